#pragma once

#include "eigen.hpp"
#include "experiments.hpp"
#include "format.hpp"
#include "graph.hpp"
#include "knn.hpp"
#include "matrix.hpp"
#include "search.hpp"
#include "total_spectrum.hpp"
