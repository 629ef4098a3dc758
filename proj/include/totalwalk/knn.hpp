// knn.hpp: closed forms for T(K_{n,n}) and T(K_n).
//
// T(K_{n,n}) has the six levels
//   { 2n, theta0+, n-2, theta0-, -2, -n },  theta0^± = (n-2 ± sqrt(n^2+4))/2,
// with multiplicities { 1, 2(n-1), 1, 2(n-1), (n-1)^2, 1 }. The middle simple
// level is n-2 with eigenvector coefficient -n on the vertex block; a
// published derivation lists n-4 and -(2+n) instead, which fail the exact
// trace identities sum(mult*phi) = 0 and sum(mult*phi^2) = 2|E|. Projector
// weights of a marked vertex/edge are rational in n and sqrt(n^2+4) through
//   Delta^± = (n^2+4 ± (2-n) sqrt(n^2+4)) / 2.
//
// T(K_n) is the Johnson graph J(n+1,2): vertex i of K_n maps to the pair
// {i,n}, edge {i,j} maps to {i,j}. Vertex-transitivity makes every projector
// weight mult/N there.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigen.hpp"
#include "graph.hpp"
#include "search.hpp"
#include "total_spectrum.hpp"

namespace totalwalk {

struct KnnTheta {
    double plus = 0, minus = 0;
};

inline KnnTheta knn_theta(int n) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    const double s = std::sqrt(n * static_cast<double>(n) + 4.0);
    return {0.5 * (n - 2 + s), 0.5 * (n - 2 - s)};
}

struct KnnDelta {
    double plus = 0, minus = 0;
};

inline KnnDelta knn_delta(int n) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    const double s = std::sqrt(n * static_cast<double>(n) + 4.0);
    const double base = n * static_cast<double>(n) + 4.0;
    return {0.5 * (base + (2.0 - n) * s), 0.5 * (base - (2.0 - n) * s)};
}

inline int knn_dimension(int n) { return n * n + 2 * n; }

inline int knn_marked_index(int n, ElementLabel::Kind kind) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    return kind == ElementLabel::Kind::vertex ? n - 1 : 2 * n + n * n - 1;
}

// ---- analytic eigenbasis of the root K_{n,n} and of ker R ----

// u_k on {0..n-1}: supported on the first k+1 coordinates, mean-free,
// orthonormal over k = 1..n-1.
inline std::vector<double> mean_zero_vector(int n, int k) {
    if (k < 1 || k >= n) throw std::invalid_argument("knn: mean-zero index out of range");
    std::vector<double> u(n, 0.0);
    const double scale = std::sqrt(k / (k + 1.0));
    for (int i = 0; i < k; ++i) u[i] = -scale / k;
    u[k] = scale;
    return u;
}

inline EigenSystem knn_root_basis(int n) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    EigenSystem es;
    es.values = {static_cast<double>(n), 0.0, static_cast<double>(-n)};
    es.multiplicities = {1, 2 * n - 2, 1};
    es.offsets = {0, 1, 2 * n - 1, 2 * n};
    es.vectors = Matrix(2 * n, 2 * n);
    const double inv = 1.0 / std::sqrt(2.0 * n);
    for (int i = 0; i < 2 * n; ++i) es.vectors(0, i) = inv;
    int at = 1;
    for (int part = 0; part < 2; ++part)
        for (int k = 1; k < n; ++k) {
            const std::vector<double> u = mean_zero_vector(n, k);
            for (int i = 0; i < n; ++i) es.vectors(at, part * n + i) = u[i];
            ++at;
        }
    for (int i = 0; i < 2 * n; ++i) es.vectors(at, i) = (i < n ? inv : -inv);
    return es;
}

// Orthonormal basis of ker R for K_{n,n}: products u_i(a) u_j(b) on the edge
// (a, b), edge index a*n + b.
inline Matrix knn_kernel_rows(int n) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    Matrix rows((n - 1) * (n - 1), n * n);
    int at = 0;
    std::vector<std::vector<double>> u;
    for (int k = 1; k < n; ++k) u.push_back(mean_zero_vector(n, k));
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) rows(at, a * n + b) = u[i][a] * u[j][b];
            ++at;
        }
    return rows;
}

// Root eigenbasis plus incidence-kernel basis in one bundle.  Row layout of
// `root`: v_n, then v_1..v_{n-1}, then v_{1'}..v_{(n-1)'}, then v_0.  Kernel
// row (i-1)*(n-1)+(j-1) is w_{i,j}, carrying squared weight h(i-1,j-1) =
// ij/((i+1)(j+1)) on the edge (i+1, j+1).
struct KnnEigenbasis {
    int n = 0;
    EigenSystem root;
    Matrix kernel;
    Matrix h;
    KnnTheta theta;
};

inline KnnEigenbasis knn_eigenbasis(int n) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    KnnEigenbasis eb;
    eb.n = n;
    eb.root = knn_root_basis(n);
    eb.kernel = knn_kernel_rows(n);
    eb.h = Matrix(n - 1, n - 1);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            eb.h(i - 1, j - 1) = static_cast<double>(i) * j / ((i + 1.0) * (j + 1.0));
    eb.theta = knn_theta(n);
    return eb;
}

inline EigenSystem knn_total_basis(int n) {
    const Graph g = complete_bipartite(n, n);
    return total_eigenvectors_regular(g, knn_root_basis(n), knn_kernel_rows(n));
}

// ---- exact level data seen from a marked element ----

inline LevelData knn_levels(int n, ElementLabel::Kind kind) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    const KnnTheta th = knn_theta(n);
    const KnnDelta de = knn_delta(n);
    const double nn = n;
    const double N = knn_dimension(n);

    LevelData lv;
    lv.values = {2.0 * n, th.plus, nn - 2.0, th.minus, -2.0, -nn};
    lv.mults = {1, 2 * (n - 1), 1, 2 * (n - 1), (n - 1) * (n - 1), 1};
    if (kind == ElementLabel::Kind::vertex) {
        lv.weights = {1.0 / N,
                      th.minus * th.minus * (n - 1) / (nn * de.plus),
                      nn / (2.0 * N),
                      th.plus * th.plus * (n - 1) / (nn * de.minus),
                      0.0,
                      1.0 / (2.0 * nn)};
    } else {
        lv.weights = {1.0 / N,
                      2.0 * (n - 1) / (nn * de.plus),
                      2.0 / (nn * N),
                      2.0 * (n - 1) / (nn * de.minus),
                      ((nn - 1.0) / nn) * ((nn - 1.0) / nn),
                      0.0};
    }

    // n = 2 collapses -2 and -n into one level
    LevelData merged;
    for (std::size_t l = 0; l < lv.values.size(); ++l) {
        if (!merged.values.empty() && merged.values.back() - lv.values[l] <= 1e-9) {
            merged.mults.back() += lv.mults[l];
            merged.weights.back() += lv.weights[l];
        } else {
            merged.values.push_back(lv.values[l]);
            merged.mults.push_back(lv.mults[l]);
            merged.weights.push_back(lv.weights[l]);
        }
    }
    return merged;
}

inline TotalSpectrumClosedForm knn_total_spectrum(int n) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    std::vector<RootLevel> root{{static_cast<double>(n), 1}, {0.0, 2 * n - 2}, {static_cast<double>(-n), 1}};
    TotalSpectrumClosedForm out =
        total_spectrum_from_root_levels(2 * n, n * n, n, true, std::move(root));
    out.note =
        "middle simple level is phi = n-2 with vertex-block eigenvector coefficient -n; "
        "a published derivation lists n-4 and -(2+n), which fail the exact trace identities "
        "sum(mult*phi) = 0 and sum(mult*phi^2) = 2|E|";
    return out;
}

// Integer trace checks for the six-level list, parametric in the middle level
// so the wrong value is visibly inconsistent.
struct KnnTraceMoments {
    std::int64_t first = 0;            // sum mult*phi, must be 0
    std::int64_t second = 0;           // sum mult*phi^2
    std::int64_t expected_second = 0;  // 2|E(T)| = 2n^3 + 4n^2
};

inline KnnTraceMoments knn_trace_moments(int n, std::int64_t phi2) {
    if (n < 2) throw std::invalid_argument("knn: n must be >= 2");
    const std::int64_t nn = n;
    // theta0+ + theta0- = n-2 and theta0+^2 + theta0-^2 = (n-2)^2 + 2n exactly
    KnnTraceMoments t;
    t.first = 2 * nn + 2 * (nn - 1) * (nn - 2) + phi2 - 2 * (nn - 1) * (nn - 1) - nn;
    t.second = 4 * nn * nn + 2 * (nn - 1) * ((nn - 2) * (nn - 2) + 2 * nn) + phi2 * phi2 +
               4 * (nn - 1) * (nn - 1) + nn * nn;
    t.expected_second = 2 * nn * nn * nn + 4 * nn * nn;
    return t;
}

inline SearchReport knn_search_report(int n, ElementLabel::Kind kind, double gamma = 0.0) {
    return analyze_levels(knn_levels(n, kind), knn_dimension(n), gamma);
}

// Leading series for the marked-vertex / marked-edge walk on T(K_{n,n}),
// paired with the exact sums they approximate.
struct KnnSearchAsymptotics {
    ElementLabel::Kind kind = ElementLabel::Kind::vertex;
    KnnTheta theta;
    KnnDelta delta;
    double s1_series = 0, s2_series = 0;
    double eps_sqrt_n_series = 0;  // epsilon * sqrt(N) expansion
    double epsilon_series = 0;
    double t_opt = 0;  // pi sqrt(N) / 2
    double p_succ_series = 0;
    double s1_exact = 0, s2_exact = 0;
    double epsilon_exact = 0;
    double p_succ_exact = 0;
};

inline KnnSearchAsymptotics knn_search_asymptotics(int n, ElementLabel::Kind kind) {
    if (n < 3) throw std::invalid_argument("knn: series need n >= 3");
    const double nn = n;
    const double N = knn_dimension(n);
    KnnSearchAsymptotics a;
    a.kind = kind;
    a.theta = knn_theta(n);
    a.delta = knn_delta(n);
    a.s2_series = 1.0 / (4.0 * nn * nn);
    if (kind == ElementLabel::Kind::vertex) {
        a.s1_series = 1.0 / (2.0 * nn) + 5.0 / (12.0 * nn * nn);
        a.eps_sqrt_n_series = 1.0 - 7.0 / (9.0 * nn);
        a.p_succ_series = 1.0 - 14.0 / (9.0 * nn);
    } else {
        a.s1_series = 1.0 / (2.0 * nn) + 1.0 / (2.0 * nn * nn);
        a.eps_sqrt_n_series = 1.0 - 1.0 / nn;
        a.p_succ_series = 1.0 - 2.0 / nn;
    }
    a.epsilon_series = a.eps_sqrt_n_series / std::sqrt(N);
    a.t_opt = M_PI * std::sqrt(N) / 2.0;
    const SearchReport rep = knn_search_report(n, kind);
    a.s1_exact = rep.s1;
    a.s2_exact = rep.s2;
    a.epsilon_exact = rep.epsilon;
    a.p_succ_exact = rep.p_succ;
    return a;
}

// ---- T(K_n) through the Johnson graph ----

inline Graph johnson_graph(int v, int k) {
    if (k != 2) throw std::invalid_argument("johnson: only k = 2 is provided");
    if (v < 3) throw std::invalid_argument("johnson: need v >= 3");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < v; ++i)
        for (int j = i + 1; j < v; ++j) pairs.emplace_back(i, j);
    const int nv = static_cast<int>(pairs.size());
    std::vector<Edge> edges;
    for (int a = 0; a < nv; ++a)
        for (int b = a + 1; b < nv; ++b) {
            const int shared = (pairs[a].first == pairs[b].first) + (pairs[a].first == pairs[b].second) +
                               (pairs[a].second == pairs[b].first) + (pairs[a].second == pairs[b].second);
            if (shared == 1) edges.push_back({a, b});
        }
    return Graph::from_edges(nv, edges);
}

// Permutation p with p[t] = Johnson index of element t of T(K_n); verified
// edge-for-edge before returning.
inline std::vector<int> total_kn_johnson_isomorphism(int n) {
    if (n < 2) throw std::invalid_argument("kn: need n >= 2");
    const Graph kn = complete_graph(n);
    const TotalGraph total = total_graph(kn);
    const Graph johnson = johnson_graph(n + 1, 2);

    auto pair_index = [n](int a, int b) {  // lexicographic rank of {a,b} in [n+1]
        if (a > b) std::swap(a, b);
        return a * (2 * (n + 1) - a - 1) / 2 + (b - a - 1);
    };
    std::vector<int> p(total.graph.vertex_count());
    for (int i = 0; i < n; ++i) p[i] = pair_index(i, n);
    const auto& root_edges = kn.edges();
    for (int j = 0; j < kn.edge_count(); ++j) p[n + j] = pair_index(root_edges[j].u, root_edges[j].v);

    if (johnson.vertex_count() != total.graph.vertex_count())
        throw std::runtime_error("kn: johnson size mismatch");
    for (const Edge& e : total.graph.edges())
        if (!johnson.adjacent(p[e.u], p[e.v])) throw std::runtime_error("kn: mapped edge missing");
    if (johnson.edge_count() != total.graph.edge_count())
        throw std::runtime_error("kn: johnson edge count mismatch");
    return p;
}

inline int kn_dimension(int n) { return n * (n + 1) / 2; }

// Vertex-transitive, so every marked element sees weight mult/N per level.
inline LevelData kn_levels(int n) {
    if (n < 3) throw std::invalid_argument("kn: need n >= 3");
    const double N = kn_dimension(n);
    LevelData lv;
    lv.values = {2.0 * n - 2.0, n - 3.0, -2.0};
    lv.mults = {1, n, (n + 1) * (n - 2) / 2};
    lv.weights = {1.0 / N, n / N, (n + 1) * (n - 2) / (2.0 * N)};
    return lv;
}

inline SearchReport kn_search_report(int n, double gamma = 0.0) {
    return analyze_levels(kn_levels(n), kn_dimension(n), gamma);
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation: bad sample sizes");
    const double k = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0 || syy <= 0) throw std::invalid_argument("correlation: constant sample");
    return sxy / std::sqrt(sxx * syy);
}

// Full dynamics on T(K_n) at gamma = S1, with the sin^2 profile comparison:
// p(t) against 4 |<lambda+|psi_0><w|lambda+>|^2 sin^2(eps t) over [0, t_opt].
struct KnSearchProfile {
    SearchReport report;
    EvolutionTrace trace;      // horizon 2 t_opt
    double p_max = 0, t_peak = 0;
    double sin2_correlation = 0;
    int distinct_levels = 0;
};

inline KnSearchProfile kn_search_profile(int n, int samples = 2001) {
    KnSearchProfile out;
    out.report = kn_search_report(n);
    out.distinct_levels = static_cast<int>(kn_levels(n).values.size());
    const RootAmplitudes roots = secular_roots(kn_levels(n), out.report.gamma, kn_dimension(n));
    out.trace = evolve_with_peak(roots, 2.0 * out.report.t_opt, samples);
    out.p_max = out.trace.p_peak;
    out.t_peak = out.trace.t_peak;
    const double c_plus = out.report.overlaps.w_plus * out.report.overlaps.psi_plus;
    const double amp = 4.0 * c_plus * c_plus;
    std::vector<double> p, model;
    for (std::size_t i = 0; i < out.trace.t.size(); ++i) {
        if (out.trace.t[i] > out.report.t_opt) break;
        const double s = std::sin(out.report.epsilon * out.trace.t[i]);
        p.push_back(out.trace.p[i]);
        model.push_back(amp * s * s);
    }
    out.sin2_correlation = pearson_correlation(p, model);
    return out;
}

}  // namespace totalwalk
