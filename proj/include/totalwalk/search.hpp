// search.hpp: spectral analysis of the search Hamiltonian H = -gamma A - |w><w|.
//
// Everything is driven by the level data of A seen from the marked element:
// distinct eigenvalues phi_0 > phi_1 > ..., multiplicities, and projector
// weights w_l = ||P_l |w>||^2. The secular function
//   F(lambda) = sum_l w_l / (lambda + gamma phi_l)
// has F(lambda) = -1 exactly at the eigenvalues of H that move under the
// rank-one perturbation; everything reported here (gamma_opt, epsilon, exact
// lambda^±, overlaps, evolution amplitudes) comes from that equation.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigen.hpp"
#include "format.hpp"
#include "matrix.hpp"

namespace totalwalk {

// Weight below which a level is treated as invisible to the marked element.
inline constexpr double kWeightFloor = 1e-13;

inline Matrix search_hamiltonian(const Matrix& adjacency, double gamma, int marked_index) {
    if (adjacency.rows() != adjacency.cols()) throw std::invalid_argument("search: adjacency must be square");
    const int n = static_cast<int>(adjacency.rows());
    if (marked_index < 0 || marked_index >= n) throw std::invalid_argument("search: marked index out of range");
    if (!(gamma > 0)) throw std::invalid_argument("search: gamma must be positive");
    Matrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = -gamma * adjacency(i, j);
    h(marked_index, marked_index) -= 1.0;
    return h;
}

// w_l = ||P_l e_w||^2, one entry per level of es.
inline std::vector<double> projector_weights(const EigenSystem& es, int marked_index) {
    if (!es.has_vectors()) throw std::invalid_argument("search: eigensystem has no vectors");
    if (marked_index < 0 || marked_index >= es.dimension())
        throw std::invalid_argument("search: marked index out of range");
    std::vector<double> w(es.level_count(), 0.0);
    for (int l = 0; l < es.level_count(); ++l)
        for (int k = es.offsets[l]; k < es.offsets[l + 1]; ++k) {
            const double a = es.vector(k)[marked_index];
            w[l] += a * a;
        }
    return w;
}

struct LevelData {
    std::vector<double> values;   // strictly decreasing
    std::vector<int> mults;
    std::vector<double> weights;  // sum to 1
};

namespace detail {

inline void validate_levels(const LevelData& lv, int dimension) {
    const std::size_t k = lv.values.size();
    if (k == 0 || lv.mults.size() != k || lv.weights.size() != k)
        throw std::invalid_argument("search: level arrays inconsistent");
    long long msum = 0;
    double wsum = 0;
    for (std::size_t l = 0; l < k; ++l) {
        if (l > 0 && !(lv.values[l - 1] > lv.values[l]))
            throw std::invalid_argument("search: level values must be strictly decreasing");
        if (lv.mults[l] < 1) throw std::invalid_argument("search: level multiplicity must be positive");
        if (lv.weights[l] < -1e-12) throw std::invalid_argument("search: negative projector weight");
        msum += lv.mults[l];
        wsum += lv.weights[l];
    }
    if (msum != dimension) throw std::invalid_argument("search: multiplicities do not sum to dimension");
    if (std::fabs(wsum - 1.0) > 1e-8) throw std::invalid_argument("search: projector weights do not sum to 1");
    if (lv.weights[0] <= kWeightFloor)
        throw std::invalid_argument("search: marked element has no weight on the top level");
}

// Secular function restricted to the levels the marked element sees.
struct Secular {
    std::vector<double> poles;    // -gamma*phi_l, increasing; poles[0] = -gamma*phi_0
    std::vector<double> weights;

    double operator()(double lambda) const {
        double s = 0;
        for (std::size_t i = 0; i < poles.size(); ++i) s += weights[i] / (lambda - poles[i]);
        return s;
    }
    double derivative_sum(double lambda) const {  // sum w/(lambda-pole)^2 = 1/|<w|lambda>|^2
        double s = 0;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const double d = lambda - poles[i];
            s += weights[i] / (d * d);
        }
        return s;
    }
};

// Level values are strictly decreasing, so -gamma*value is increasing and
// poles[0] belongs to the top level.
inline Secular make_secular(const LevelData& lv, double gamma) {
    Secular f;
    for (std::size_t l = 0; l < lv.values.size(); ++l) {
        if (lv.weights[l] <= kWeightFloor) continue;
        f.poles.push_back(-gamma * lv.values[l]);
        f.weights.push_back(lv.weights[l]);
    }
    return f;
}

// Bisection for F(lambda) = -1 on (lo, hi) with F(lo) > -1 > F(hi).
inline double bisect_secular(const Secular& f, double lo, double hi, double width_tol) {
    double flo = f(lo) + 1.0, fhi = f(hi) + 1.0;
    if (!(flo > 0) || !(fhi < 0)) throw std::runtime_error("search: secular root bracket failed");
    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) + 1.0 > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

struct SSums {
    double s1 = 0, s2 = 0;
};

inline SSums s_sums(const LevelData& lv) {
    if (lv.values.size() < 2) throw std::invalid_argument("search: need at least two levels");
    SSums s;
    const double phi0 = lv.values[0];
    for (std::size_t l = 1; l < lv.values.size(); ++l) {
        const double gap = phi0 - lv.values[l];
        s.s1 += lv.weights[l] / gap;
        s.s2 += lv.weights[l] / (gap * gap);
    }
    return s;
}

inline double gamma_opt(const LevelData& lv) { return s_sums(lv).s1; }

inline double optimal_time(double epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("search: epsilon must be positive");
    return M_PI / (2.0 * epsilon);
}

struct Overlaps {
    double w_plus = 0, w_minus = 0;      // <w|lambda^±>, exact
    double psi_plus = 0, psi_minus = 0;  // <psi_0|lambda^±>, exact
    double w_asym = 0;                   // S1/sqrt(2 S2)
    double psi_asym = 0;                 // 1/sqrt(2 N w0)
};

struct SearchReport {
    int dimension = 0;
    LevelData levels;
    double s1 = 0, s2 = 0;
    double gamma = 0;       // gamma actually used
    double gamma_opt = 0;   // S1
    double w0 = 0;          // top-level projector weight
    double epsilon = 0;     // S1 sqrt(w0) / sqrt(S2)
    double lambda_plus = 0, lambda_minus = 0;   // exact secular roots around -gamma*phi_0
    double eps_plus = 0, eps_minus = 0;         // lambda^± + gamma*phi_0 (signed)
    Overlaps overlaps;
    double t_opt = 0;               // pi / (2 epsilon)
    double p_succ = 0;              // S1^2 / (N w0 S2)
    double t_run_amplified = 0;     // t_opt / sqrt(p_succ)
    std::vector<std::string> flags;
};

// Roots of the secular equation with the amplitude each contributes to
// <w| e^{-iHt} |psi_0> = sum_mu c_mu e^{-i mu t}.
struct RootAmplitudes {
    std::vector<double> roots;
    std::vector<double> amplitudes;
};

inline RootAmplitudes secular_roots(const LevelData& lv, double gamma, int dimension) {
    detail::validate_levels(lv, dimension);
    if (!(gamma > 0)) throw std::invalid_argument("search: gamma must be positive");
    detail::Secular f = detail::make_secular(lv, gamma);
    const std::size_t k = f.poles.size();
    const double scale = std::max(std::fabs(f.poles.front()), std::fabs(f.poles.back()));
    const double delta = 1e-14 * std::max(1.0, scale);
    const double width_tol = 1e-13 * std::max(1.0, scale);

    RootAmplitudes out;
    // one root below the lowest pole
    {
        double step = std::max(1.0, scale);
        double lo = f.poles[0] - step;
        for (int tries = 0; f(lo) + 1.0 <= 0 && tries < 200; ++tries) {
            step *= 2;
            lo = f.poles[0] - step;
        }
        out.roots.push_back(detail::bisect_secular(f, lo, f.poles[0] - delta, width_tol));
    }
    // one root strictly between each pair of consecutive poles
    for (std::size_t i = 0; i + 1 < k; ++i)
        out.roots.push_back(detail::bisect_secular(f, f.poles[i] + delta, f.poles[i + 1] - delta, width_tol));

    const double pole0 = f.poles[0];  // -gamma*phi_0
    const double sqrt_n = std::sqrt(static_cast<double>(dimension));
    for (double mu : out.roots) {
        const double w_overlap_sq = 1.0 / f.derivative_sum(mu);
        out.amplitudes.push_back(-w_overlap_sq / (sqrt_n * (mu - pole0)));
    }
    return out;
}

inline SearchReport analyze_levels(const LevelData& lv, int dimension, double gamma = 0.0) {
    detail::validate_levels(lv, dimension);
    SearchReport rep;
    rep.dimension = dimension;
    rep.levels = lv;
    const SSums s = s_sums(lv);
    rep.s1 = s.s1;
    rep.s2 = s.s2;
    rep.gamma_opt = s.s1;
    rep.gamma = gamma > 0 ? gamma : s.s1;
    rep.w0 = lv.weights[0];
    rep.epsilon = s.s1 * std::sqrt(rep.w0) / std::sqrt(s.s2);
    rep.t_opt = optimal_time(rep.epsilon);
    rep.p_succ = s.s1 * s.s1 / (dimension * rep.w0 * s.s2);
    rep.t_run_amplified = rep.t_opt / std::sqrt(rep.p_succ);

    if (gamma > 0 && std::fabs(gamma - s.s1) > 1e-12 * std::max(1.0, s.s1))
        rep.flags.push_back("gamma-override");
    if (lv.mults[0] != 1) rep.flags.push_back("degenerate-top-level");

    // exact lambda^± around the top pole
    detail::Secular f = detail::make_secular(lv, rep.gamma);
    const double pole0 = f.poles[0];
    const double scale = std::max(std::fabs(f.poles.front()), std::fabs(f.poles.back()));
    const double delta = 1e-14 * std::max(1.0, scale);
    const double width_tol = 1e-13 * std::max(1.0, scale);
    if (f.poles.size() < 2) throw std::runtime_error("search: marked element sees a single level");
    rep.lambda_plus = detail::bisect_secular(f, pole0 + delta, f.poles[1] - delta, width_tol);
    {
        double step = std::max(1.0, scale);
        double lo = pole0 - step;
        for (int tries = 0; f(lo) + 1.0 <= 0 && tries < 200; ++tries) {
            step *= 2;
            lo = pole0 - step;
        }
        rep.lambda_minus = detail::bisect_secular(f, lo, pole0 - delta, width_tol);
    }
    rep.eps_plus = rep.lambda_plus - pole0;
    rep.eps_minus = rep.lambda_minus - pole0;

    const double sqrt_n = std::sqrt(static_cast<double>(dimension));
    rep.overlaps.w_plus = std::sqrt(1.0 / f.derivative_sum(rep.lambda_plus));
    rep.overlaps.w_minus = std::sqrt(1.0 / f.derivative_sum(rep.lambda_minus));
    rep.overlaps.psi_plus = -rep.overlaps.w_plus / (sqrt_n * (rep.lambda_plus - pole0));
    rep.overlaps.psi_minus = -rep.overlaps.w_minus / (sqrt_n * (rep.lambda_minus - pole0));
    rep.overlaps.w_asym = s.s1 / std::sqrt(2.0 * s.s2);
    rep.overlaps.psi_asym = 1.0 / std::sqrt(2.0 * dimension * rep.w0);
    return rep;
}

inline SearchReport analyze(const EigenSystem& es, int marked_index, double gamma = 0.0) {
    LevelData lv;
    lv.values = es.values;
    lv.mults = es.multiplicities;
    lv.weights = projector_weights(es, marked_index);
    SearchReport rep = analyze_levels(lv, es.dimension(), gamma);
    // the uniform-start overlap formulas assume the top eigenvector is uniform
    const double* top = es.vector(0);
    const double want = 1.0 / std::sqrt(static_cast<double>(es.dimension()));
    double dev = 0;
    for (int i = 0; i < es.dimension(); ++i) dev = std::max(dev, std::fabs(std::fabs(top[i]) - want));
    if (dev > 1e-8) rep.flags.push_back("top-not-uniform");
    return rep;
}

// ---- time evolution from the secular roots ----

struct EvolutionTrace {
    std::vector<double> t, re, im, p;
    double t_peak = 0, p_peak = 0;
};

inline std::complex<double> evolve_amplitude(const RootAmplitudes& ra, double t) {
    double re = 0, im = 0;
    for (std::size_t i = 0; i < ra.roots.size(); ++i) {
        re += ra.amplitudes[i] * std::cos(ra.roots[i] * t);
        im -= ra.amplitudes[i] * std::sin(ra.roots[i] * t);
    }
    return {re, im};
}

inline double success_probability(const RootAmplitudes& ra, double t) {
    return std::norm(evolve_amplitude(ra, t));
}

// Samples p(t) on [0, t_end] and refines the best sample by golden-section.
inline EvolutionTrace evolve_with_peak(const RootAmplitudes& ra, double t_end, int samples = 2001) {
    if (samples < 2) throw std::invalid_argument("search: need at least two samples");
    if (!(t_end > 0)) throw std::invalid_argument("search: trace horizon must be positive");
    EvolutionTrace tr;
    tr.t.resize(samples);
    tr.re.resize(samples);
    tr.im.resize(samples);
    tr.p.resize(samples);
    int best = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = t_end * i / (samples - 1);
        const std::complex<double> a = evolve_amplitude(ra, t);
        tr.t[i] = t;
        tr.re[i] = a.real();
        tr.im[i] = a.imag();
        tr.p[i] = std::norm(a);
        if (tr.p[i] > tr.p[best]) best = i;
    }
    double lo = tr.t[std::max(0, best - 1)];
    double hi = tr.t[std::min(samples - 1, best + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double pc = success_probability(ra, c), pd = success_probability(ra, d);
    const double tol = 1e-6 * t_end;
    while (hi - lo > tol) {
        if (pc > pd) {
            hi = d;
            d = c;
            pd = pc;
            c = hi - gr * (hi - lo);
            pc = success_probability(ra, c);
        } else {
            lo = c;
            c = d;
            pc = pd;
            d = lo + gr * (hi - lo);
            pd = success_probability(ra, d);
        }
    }
    tr.t_peak = 0.5 * (lo + hi);
    tr.p_peak = success_probability(ra, tr.t_peak);
    if (tr.p[best] > tr.p_peak) {
        tr.t_peak = tr.t[best];
        tr.p_peak = tr.p[best];
    }
    return tr;
}

inline std::vector<double> uniform_state(int n) {
    if (n < 1) throw std::invalid_argument("search: dimension must be positive");
    return std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

// ---- dense-spectral evolution (no secular reduction) ----

struct SearchSetup {
    Matrix adjacency;
    int marked_index = 0;
    double gamma = 1.0;
    std::vector<double> psi0;  // empty: uniform

    Matrix hamiltonian() const { return search_hamiltonian(adjacency, gamma, marked_index); }
    std::vector<double> initial_state() const {
        if (!psi0.empty()) return psi0;
        return uniform_state(static_cast<int>(adjacency.rows()));
    }
};

// d_k = <w|k><k|psi0> over every eigenrow of H, so that
// <w|psi(t)> = sum_k e^{-i mu_k t} d_k exactly.
inline RootAmplitudes spectral_amplitudes(const EigenSystem& es_h, int marked_index,
                                          const std::vector<double>& psi0) {
    if (!es_h.has_vectors()) throw std::invalid_argument("search: eigensystem has no vectors");
    const int n = es_h.dimension();
    if (marked_index < 0 || marked_index >= n) throw std::invalid_argument("search: marked index out of range");
    if (static_cast<int>(psi0.size()) != n) throw std::invalid_argument("search: state dimension mismatch");
    RootAmplitudes ra;
    ra.roots.resize(n);
    ra.amplitudes.resize(n);
    for (int k = 0; k < n; ++k) {
        const double* v = es_h.vector(k);
        double ip = 0;
        for (int i = 0; i < n; ++i) ip += v[i] * psi0[i];
        ra.roots[k] = es_h.values[es_h.level_of_row(k)];
        ra.amplitudes[k] = v[marked_index] * ip;
    }
    return ra;
}

// Full state at time t, for norm checks.
inline std::vector<std::complex<double>> evolve_state(const EigenSystem& es_h,
                                                      const std::vector<double>& psi0, double t) {
    if (!es_h.has_vectors()) throw std::invalid_argument("search: eigensystem has no vectors");
    const int n = es_h.dimension();
    if (static_cast<int>(psi0.size()) != n) throw std::invalid_argument("search: state dimension mismatch");
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    for (int k = 0; k < n; ++k) {
        const double* v = es_h.vector(k);
        double ip = 0;
        for (int i = 0; i < n; ++i) ip += v[i] * psi0[i];
        const double mu = es_h.values[es_h.level_of_row(k)];
        const std::complex<double> ph(std::cos(mu * t) * ip, -std::sin(mu * t) * ip);
        for (int i = 0; i < n; ++i) out[i] += ph * v[i];
    }
    return out;
}

inline EvolutionTrace evolve(const SearchSetup& setup, const EigenSystem& es_h,
                             const std::vector<double>& times) {
    if (es_h.dimension() != static_cast<int>(setup.adjacency.rows()))
        throw std::invalid_argument("search: eigensystem dimension mismatch");
    if (times.empty() || !std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("search: times must be a nonempty sorted list");
    const RootAmplitudes ra = spectral_amplitudes(es_h, setup.marked_index, setup.initial_state());
    EvolutionTrace tr;
    tr.t = times;
    tr.re.resize(times.size());
    tr.im.resize(times.size());
    tr.p.resize(times.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::complex<double> a = evolve_amplitude(ra, times[i]);
        tr.re[i] = a.real();
        tr.im[i] = a.imag();
        tr.p[i] = std::norm(a);
        if (tr.p[i] > tr.p[best]) best = i;
    }
    tr.t_peak = tr.t[best];
    tr.p_peak = tr.p[best];
    return tr;
}

inline std::string trace_csv(const EvolutionTrace& tr) {
    std::string out = "t,re_amp,im_amp,p\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        out += fmt_e16(tr.t[i]);
        out += ',';
        out += fmt_e16(tr.re[i]);
        out += ',';
        out += fmt_e16(tr.im[i]);
        out += ',';
        out += fmt_e16(tr.p[i]);
        out += '\n';
    }
    return out;
}

inline void search_report_json(JsonWriter& w, const SearchReport& rep) {
    w.begin_object();
    w.key("dimension");
    w.value(rep.dimension);
    w.key("levels");
    w.begin_array();
    for (std::size_t l = 0; l < rep.levels.values.size(); ++l) {
        w.begin_object();
        w.key("value");
        w.value(rep.levels.values[l]);
        w.key("multiplicity");
        w.value(rep.levels.mults[l]);
        w.key("weight");
        w.value(rep.levels.weights[l]);
        w.end_object();
    }
    w.end_array();
    w.key("s1");
    w.value(rep.s1);
    w.key("s2");
    w.value(rep.s2);
    w.key("gamma");
    w.value(rep.gamma);
    w.key("gamma_opt");
    w.value(rep.gamma_opt);
    w.key("w0");
    w.value(rep.w0);
    w.key("epsilon");
    w.value(rep.epsilon);
    w.key("lambda_plus");
    w.value(rep.lambda_plus);
    w.key("lambda_minus");
    w.value(rep.lambda_minus);
    w.key("eps_plus");
    w.value(rep.eps_plus);
    w.key("eps_minus");
    w.value(rep.eps_minus);
    w.key("overlaps");
    w.begin_object();
    w.key("w_plus");
    w.value(rep.overlaps.w_plus);
    w.key("w_minus");
    w.value(rep.overlaps.w_minus);
    w.key("psi_plus");
    w.value(rep.overlaps.psi_plus);
    w.key("psi_minus");
    w.value(rep.overlaps.psi_minus);
    w.key("w_asym");
    w.value(rep.overlaps.w_asym);
    w.key("psi_asym");
    w.value(rep.overlaps.psi_asym);
    w.end_object();
    w.key("t_opt");
    w.value(rep.t_opt);
    w.key("p_succ");
    w.value(rep.p_succ);
    w.key("t_run_amplified");
    w.value(rep.t_run_amplified);
    w.key("flags");
    w.begin_array();
    for (const std::string& fl : rep.flags) w.value(fl);
    w.end_array();
    w.end_object();
}

}  // namespace totalwalk
