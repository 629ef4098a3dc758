// total_spectrum.hpp: closed-form spectra and eigenvectors of T(G) for
// r-regular G.
//
// For an r-regular graph with root eigenvalue lambda, T(G) picks up the pair
//   theta(lambda)^± = lambda - 1 + r/2 ± sqrt(lambda + 1 + r^2/4),
// plus the eigenvalue -2 with multiplicity m - n (m - n + 1 when G is
// bipartite, in which case -r also appears and lambda = -r is excluded from
// the pair construction). Eigenvectors follow the same case split:
//   X^± = ((2 - r - lambda + theta^±) v ; R^T v) / sqrt(c),
//   c   = (2 - r - lambda + theta^±)^2 + lambda + r,
//   Y_j = (0 ; y_j) for y_j in ker R,   Z = (J_1 ; -J_2 ; 0) normalized.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigen.hpp"
#include "graph.hpp"

namespace totalwalk {

struct RootLevel {
    double value = 0;
    int multiplicity = 0;
};

struct ThetaPair {
    double root_value = 0;
    int root_multiplicity = 0;
    double theta_plus = 0, theta_minus = 0;
    double coeff_plus = 0, coeff_minus = 0;  // 2 - r - lambda + theta^±
    double norm_plus = 0, norm_minus = 0;    // coeff^2 + lambda + r
};

struct MergedLevel {
    double value = 0;
    int multiplicity = 0;
    std::vector<std::string> branches;
};

struct TotalSpectrumClosedForm {
    int n = 0, m = 0, degree = 0;
    bool bipartite = false;
    std::vector<ThetaPair> pairs;  // excludes lambda = -r when bipartite
    int kernel_multiplicity = 0;   // eigenvalue -2: m-n, or m-n+1 when bipartite
    bool has_minus_r = false;
    std::vector<MergedLevel> merged;  // distinct values, decreasing, collisions merged
    std::string note;

    int total_multiplicity() const {
        int t = kernel_multiplicity + (has_minus_r ? 1 : 0);
        for (const ThetaPair& p : pairs) t += 2 * p.root_multiplicity;
        return t;
    }
};

namespace detail {

inline std::pair<double, double> theta_values(double lambda, int r) {
    const double disc = lambda + 1.0 + 0.25 * r * r;  // (r/2-1)^2 at lambda = -r, so never negative
    const double root = std::sqrt(std::max(0.0, disc));
    const double base = lambda - 1.0 + 0.5 * r;
    return {base + root, base - root};
}

inline std::vector<MergedLevel> merge_levels(std::vector<MergedLevel> raw) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const MergedLevel& a, const MergedLevel& b) { return a.value > b.value; });
    double scale = 1.0;
    for (const MergedLevel& l : raw) scale = std::max(scale, std::fabs(l.value));
    const double tol = 1e-9 * scale;
    std::vector<MergedLevel> out;
    for (MergedLevel& l : raw) {
        if (!out.empty() && out.back().value - l.value <= tol) {
            MergedLevel& dst = out.back();
            // weighted mean keeps the representative stable under merge order
            dst.value = (dst.value * dst.multiplicity + l.value * l.multiplicity) /
                        (dst.multiplicity + l.multiplicity);
            dst.multiplicity += l.multiplicity;
            for (std::string& b : l.branches) dst.branches.push_back(std::move(b));
        } else {
            out.push_back(std::move(l));
        }
    }
    return out;
}

}  // namespace detail

inline TotalSpectrumClosedForm total_spectrum_from_root_levels(int n, int m, int r, bool bipartite,
                                                               std::vector<RootLevel> root_levels) {
    if (r < 2) throw std::invalid_argument("total spectrum: root degree must be >= 2");
    int mult_sum = 0;
    for (const RootLevel& l : root_levels) mult_sum += l.multiplicity;
    if (mult_sum != n) throw std::invalid_argument("total spectrum: root multiplicities do not sum to n");
    std::sort(root_levels.begin(), root_levels.end(),
              [](const RootLevel& a, const RootLevel& b) { return a.value > b.value; });

    TotalSpectrumClosedForm out;
    out.n = n;
    out.m = m;
    out.degree = r;
    out.bipartite = bipartite;
    out.kernel_multiplicity = m - n + (bipartite ? 1 : 0);
    out.has_minus_r = bipartite;

    const double bottom_tol = 1e-8 * std::max(1.0, static_cast<double>(r));
    bool saw_bottom = false;
    std::vector<MergedLevel> raw;
    for (const RootLevel& l : root_levels) {
        if (bipartite && std::fabs(l.value + r) <= bottom_tol) {
            saw_bottom = true;
            if (l.multiplicity != 1)
                throw std::invalid_argument("total spectrum: eigenvalue -r must be simple (connected root)");
            continue;
        }
        auto [tp, tm] = detail::theta_values(l.value, r);
        ThetaPair p;
        p.root_value = l.value;
        p.root_multiplicity = l.multiplicity;
        p.theta_plus = tp;
        p.theta_minus = tm;
        p.coeff_plus = 2.0 - r - l.value + tp;
        p.coeff_minus = 2.0 - r - l.value + tm;
        p.norm_plus = p.coeff_plus * p.coeff_plus + l.value + r;
        p.norm_minus = p.coeff_minus * p.coeff_minus + l.value + r;
        out.pairs.push_back(p);
        const std::string tag = "lambda=" + fmt_g17(l.value);
        raw.push_back({tp, l.multiplicity, {"theta+(" + tag + ")"}});
        raw.push_back({tm, l.multiplicity, {"theta-(" + tag + ")"}});
    }
    if (bipartite && !saw_bottom)
        throw std::invalid_argument("total spectrum: bipartite root without eigenvalue -r");
    if (out.kernel_multiplicity > 0)
        raw.push_back({-2.0, out.kernel_multiplicity, {"kernel"}});
    else if (out.kernel_multiplicity < 0)
        throw std::invalid_argument("total spectrum: negative kernel multiplicity (m < n)");
    if (bipartite) raw.push_back({static_cast<double>(-r), 1, {"bipartition"}});

    out.merged = detail::merge_levels(std::move(raw));
    return out;
}

inline TotalSpectrumClosedForm total_spectrum_regular(const Graph& g) {
    const int r = g.regularity();
    if (r < 2) throw std::invalid_argument("total spectrum: graph must be regular of degree >= 2");
    if (!g.is_connected()) throw std::invalid_argument("total spectrum: graph must be connected");
    JacobiOptions opts;
    opts.compute_vectors = false;
    EigenSystem root = symmetric_eig(g.adjacency(), opts);
    std::vector<RootLevel> levels;
    for (int l = 0; l < root.level_count(); ++l) levels.push_back({root.values[l], root.multiplicities[l]});
    return total_spectrum_from_root_levels(g.vertex_count(), g.edge_count(), r, g.is_bipartite(),
                                           std::move(levels));
}

// ---- analytic root spectra for the stock families ----

inline std::vector<RootLevel> complete_graph_levels(int n) {
    if (n < 1) throw std::invalid_argument("complete_graph_levels: n must be >= 1");
    if (n == 1) return {{0.0, 1}};
    return {{static_cast<double>(n - 1), 1}, {-1.0, n - 1}};
}

inline std::vector<RootLevel> complete_bipartite_levels(int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("complete_bipartite_levels: sizes must be >= 1");
    const double s = std::sqrt(static_cast<double>(n1) * n2);
    if (n1 + n2 == 2) return {{s, 1}, {-s, 1}};
    return {{s, 1}, {0.0, n1 + n2 - 2}, {-s, 1}};
}

inline std::vector<RootLevel> cycle_levels(int k) {
    if (k < 3) throw std::invalid_argument("cycle_levels: k must be >= 3");
    std::vector<RootLevel> out{{2.0, 1}};
    for (int j = 1; j < (k + 1) / 2; ++j) out.push_back({2.0 * std::cos(2.0 * M_PI * j / k), 2});
    if (k % 2 == 0) out.push_back({-2.0, 1});
    return out;
}

inline std::vector<RootLevel> petersen_levels() { return {{3.0, 1}, {1.0, 5}, {-2.0, 4}}; }

// ---- closed-form eigenvectors ----

struct VectorPair {
    double value_plus = 0, value_minus = 0;
    std::vector<double> plus, minus;
};

// The X^± pair of T(G) built from a root eigenpair (lambda, v). Rejects the
// bipartite bottom eigenvalue, where the construction degenerates (c = 0) and
// the Z vector takes over.
inline VectorPair total_vector_pair(const Graph& g, double lambda, const std::vector<double>& v) {
    const int r = g.regularity();
    if (r < 2) throw std::invalid_argument("total eigenvectors: graph must be regular of degree >= 2");
    const int n = g.vertex_count(), m = g.edge_count();
    if (static_cast<int>(v.size()) != n) throw std::invalid_argument("total eigenvectors: root vector size");
    if (std::fabs(lambda + r) <= 1e-8 * std::max(1.0, static_cast<double>(r)))
        throw std::invalid_argument("total eigenvectors: lambda = -r has no X pair; use the Z branch");

    auto [tp, tm] = detail::theta_values(lambda, r);
    VectorPair out;
    out.value_plus = tp;
    out.value_minus = tm;
    std::vector<double> rt_v(m);
    const auto& edges = g.edges();
    for (int j = 0; j < m; ++j) rt_v[j] = v[edges[j].u] + v[edges[j].v];

    for (double theta : {tp, tm}) {
        const double coeff = 2.0 - r - lambda + theta;
        const double c = coeff * coeff + lambda + r;
        if (c <= 0) throw std::runtime_error("total eigenvectors: degenerate normalization");
        const double inv = 1.0 / std::sqrt(c);
        std::vector<double> x(n + m);
        for (int i = 0; i < n; ++i) x[i] = coeff * v[i] * inv;
        for (int j = 0; j < m; ++j) x[n + j] = rt_v[j] * inv;
        (theta == tp ? out.plus : out.minus) = std::move(x);
    }
    return out;
}

// Orthonormal rows spanning ker R, found from the zero levels of R^T R.
inline Matrix incidence_kernel_rows(const Graph& g) {
    const int m = g.edge_count();
    if (m == 0) return Matrix(0, 0);
    IntMatrix r = incidence_matrix(g);
    EigenSystem es = symmetric_eig(to_double(r.transposed()) * to_double(r));
    const double tol = 1e-7 * std::max(1.0, std::fabs(es.values.front()));
    int count = 0;
    for (int l = 0; l < es.level_count(); ++l)
        if (std::fabs(es.values[l]) <= tol) count += es.multiplicities[l];
    Matrix rows(count, m);
    int at = 0;
    for (int l = 0; l < es.level_count(); ++l) {
        if (std::fabs(es.values[l]) > tol) continue;
        for (int k = es.offsets[l]; k < es.offsets[l + 1]; ++k) {
            const double* src = es.vector(k);
            std::copy(src, src + m, rows.row(at++));
        }
    }
    return rows;
}

// Full orthonormal eigensystem of T(G) assembled branch by branch.
inline EigenSystem total_eigenvectors_regular(const Graph& g, const EigenSystem& root,
                                              const Matrix& kernel_rows) {
    const int r = g.regularity();
    if (r < 2) throw std::invalid_argument("total eigenvectors: graph must be regular of degree >= 2");
    if (!g.is_connected()) throw std::invalid_argument("total eigenvectors: graph must be connected");
    const int n = g.vertex_count(), m = g.edge_count();
    if (root.dimension() != n || !root.has_vectors())
        throw std::invalid_argument("total eigenvectors: root eigensystem inconsistent with graph");
    const bool bipartite = g.is_bipartite();
    const int kernel_count = m - n + (bipartite ? 1 : 0);
    if (static_cast<int>(kernel_rows.rows()) != kernel_count)
        throw std::invalid_argument("total eigenvectors: kernel basis has wrong dimension");
    for (std::size_t kr = 0; kr < kernel_rows.rows(); ++kr) {
        std::vector<double> ry(n, 0.0);
        const auto& edges = g.edges();
        for (int j = 0; j < m; ++j) {
            ry[edges[j].u] += kernel_rows(kr, j);
            ry[edges[j].v] += kernel_rows(kr, j);
        }
        if (norm2(ry) > 1e-8) throw std::invalid_argument("total eigenvectors: kernel row not in ker R");
    }

    const double bottom_tol = 1e-8 * std::max(1.0, static_cast<double>(r));
    std::vector<double> raw_values;
    Matrix rows(n + m, n + m);
    int at = 0;
    auto emit = [&](double value, const std::vector<double>& x) {
        std::copy(x.begin(), x.end(), rows.row(at));
        raw_values.push_back(value);
        ++at;
    };

    for (int l = 0; l < root.level_count(); ++l) {
        const double lambda = root.values[l];
        if (bipartite && std::fabs(lambda + r) <= bottom_tol) continue;
        for (int k = root.offsets[l]; k < root.offsets[l + 1]; ++k) {
            std::vector<double> v(root.vector(k), root.vector(k) + n);
            VectorPair pair = total_vector_pair(g, lambda, v);
            emit(pair.value_plus, pair.plus);
            emit(pair.value_minus, pair.minus);
        }
    }
    if (bipartite) {
        auto coloring = g.bipartition();
        std::vector<double> z(n + m, 0.0);
        const double inv = 1.0 / std::sqrt(static_cast<double>(n));
        for (int i = 0; i < n; ++i) z[i] = ((*coloring)[i] == 0 ? inv : -inv);
        emit(static_cast<double>(-r), z);
    }
    for (std::size_t kr = 0; kr < kernel_rows.rows(); ++kr) {
        std::vector<double> y(n + m, 0.0);
        for (int j = 0; j < m; ++j) y[n + j] = kernel_rows(kr, j);
        emit(-2.0, y);
    }
    if (at != n + m) throw std::runtime_error("total eigenvectors: assembled count mismatch");

    const double scale = std::sqrt(static_cast<double>(4 * m + n * r * r));  // ||A_T||_F for regular G
    return group_eigenpairs(raw_values, rows, 1e-8 * std::max(1.0, scale));
}

}  // namespace totalwalk
