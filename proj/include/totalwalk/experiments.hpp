// experiments.hpp: parameter sweeps over the closed-form search analysis,
// log-log scaling fits, and the three spectral hypotheses checked on sweep
// data: gap symmetry (lambda^± symmetric about -gamma*phi_0 to second order),
// overlap antisymmetry (the lambda^± amplitude products nearly cancel), and
// two-level dominance (all other secular roots carry o(1/sqrt(N)) amplitude).
#pragma once

#include <cmath>
#include <cstdlib>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "format.hpp"
#include "graph.hpp"
#include "knn.hpp"
#include "search.hpp"

namespace totalwalk {

enum class Family { kn, knn };

inline std::string family_name(Family f) { return f == Family::kn ? "kn" : "knn"; }

inline Family parse_family(const std::string& s) {
    if (s == "kn") return Family::kn;
    if (s == "knn") return Family::knn;
    throw std::invalid_argument("sweep: unknown family '" + s + "'");
}

inline std::string marked_kind_name(ElementLabel::Kind k) {
    return k == ElementLabel::Kind::vertex ? "vertex" : "edge";
}

struct SweepConfig {
    Family family = Family::knn;
    int n_min = 5, n_max = 100, step = 2;
    bool marked_vertex = true, marked_edge = true;
    int threads = 0;           // 0: TOTALWALK_THREADS, then hardware
    std::string out_path;      // consumed by the CLI
    std::string format = "csv";
    int samples = 2001;        // time grid for trace-producing commands
    double horizon_factor = 2.0;  // trace horizon as a multiple of t_opt

    void validate() const {
        const int floor = family == Family::kn ? 3 : 2;
        if (n_min < floor) throw std::invalid_argument("sweep: n_min below family minimum");
        if (n_max < n_min) throw std::invalid_argument("sweep: n_max < n_min");
        if (step < 1) throw std::invalid_argument("sweep: step must be >= 1");
        if (!marked_vertex && !marked_edge) throw std::invalid_argument("sweep: no marked kind selected");
        if (threads < 0) throw std::invalid_argument("sweep: threads must be >= 0");
        if (samples < 2) throw std::invalid_argument("sweep: samples must be >= 2");
        if (!(horizon_factor > 0)) throw std::invalid_argument("sweep: horizon factor must be positive");
        if (format != "csv" && format != "json") throw std::invalid_argument("sweep: format must be csv or json");
    }
};

struct SweepRow {
    int n = 0;
    int dim = 0;
    ElementLabel::Kind kind = ElementLabel::Kind::vertex;
    double gamma = 0, s1 = 0, s2 = 0;
    double epsilon = 0;            // perturbative gap S1 sqrt(w0) / sqrt(S2)
    double eps_plus = 0, eps_minus = 0;  // exact lambda^± + gamma*phi_0
    double eps_series = 0;         // leading series for this family and kind
    double overlap_prod_plus = 0;  // <w|lambda^+><lambda^+|psi_0>
    double overlap_prod_minus = 0;
    double leakage = 0;  // |1/sqrt(N) - c+ - c-|, amplitude outside lambda^±
};

inline double sweep_eps_series(Family family, ElementLabel::Kind kind, int n, int dim) {
    const double root_n = std::sqrt(static_cast<double>(dim));
    if (family == Family::kn) return 1.0 / root_n;
    if (kind == ElementLabel::Kind::vertex) return (1.0 - 7.0 / (9.0 * n)) / root_n;
    return (1.0 - 1.0 / n) / root_n;
}

inline SweepRow sweep_point(Family family, int n, ElementLabel::Kind kind) {
    const SearchReport rep =
        family == Family::kn ? kn_search_report(n) : knn_search_report(n, kind);
    SweepRow row;
    row.n = n;
    row.dim = rep.dimension;
    row.kind = kind;
    row.gamma = rep.gamma;
    row.s1 = rep.s1;
    row.s2 = rep.s2;
    row.epsilon = rep.epsilon;
    row.eps_plus = rep.eps_plus;
    row.eps_minus = rep.eps_minus;
    row.eps_series = sweep_eps_series(family, kind, n, rep.dimension);
    row.overlap_prod_plus = rep.overlaps.w_plus * rep.overlaps.psi_plus;
    row.overlap_prod_minus = rep.overlaps.w_minus * rep.overlaps.psi_minus;
    row.leakage = std::fabs(1.0 / std::sqrt(static_cast<double>(rep.dimension)) -
                            row.overlap_prod_plus - row.overlap_prod_minus);
    return row;
}

inline int sweep_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TOTALWALK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Rows come back sorted by (n, kind) no matter how the points were scheduled.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<std::pair<int, ElementLabel::Kind>> points;
    for (int n = cfg.n_min; n <= cfg.n_max; n += cfg.step) {
        if (cfg.marked_vertex) points.emplace_back(n, ElementLabel::Kind::vertex);
        if (cfg.marked_edge) points.emplace_back(n, ElementLabel::Kind::edge);
    }
    std::vector<SweepRow> rows(points.size());
    const int threads = std::min<int>(sweep_thread_count(cfg.threads), static_cast<int>(points.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i)
            rows[i] = sweep_point(cfg.family, points[i].first, points[i].second);
        return rows;
    }
    std::vector<std::future<void>> futs;
    for (int t = 0; t < threads; ++t)
        futs.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t i = t; i < points.size(); i += threads)
                rows[i] = sweep_point(cfg.family, points[i].first, points[i].second);
        }));
    for (std::future<void>& f : futs) f.get();
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "n,N,kind,gamma,s1,s2,epsilon,eps_plus,eps_minus,eps_series,"
        "overlap_prod_plus,overlap_prod_minus,leakage\n";
    for (const SweepRow& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.dim);
        out += ',';
        out += marked_kind_name(r.kind);
        for (double v : {r.gamma, r.s1, r.s2, r.epsilon, r.eps_plus, r.eps_minus, r.eps_series,
                         r.overlap_prod_plus, r.overlap_prod_minus, r.leakage}) {
            out += ',';
            out += fmt_e16(v);
        }
        out += '\n';
    }
    return out;
}

inline void sweep_rows_json(JsonWriter& w, const std::vector<SweepRow>& rows) {
    w.begin_array();
    for (const SweepRow& r : rows) {
        w.begin_object();
        w.key("n");
        w.value(r.n);
        w.key("N");
        w.value(r.dim);
        w.key("kind");
        w.value(marked_kind_name(r.kind));
        w.key("gamma");
        w.value(r.gamma);
        w.key("s1");
        w.value(r.s1);
        w.key("s2");
        w.value(r.s2);
        w.key("epsilon");
        w.value(r.epsilon);
        w.key("eps_plus");
        w.value(r.eps_plus);
        w.key("eps_minus");
        w.value(r.eps_minus);
        w.key("eps_series");
        w.value(r.eps_series);
        w.key("overlap_prod_plus");
        w.value(r.overlap_prod_plus);
        w.key("overlap_prod_minus");
        w.value(r.overlap_prod_minus);
        w.key("leakage");
        w.value(r.leakage);
        w.end_object();
    }
    w.end_array();
}

// ---- CSV parsing (for `fit` over previously written sweeps) ----

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("csv: no column named '" + name + "'");
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::vector<std::string> line;
    std::string cell;
    bool in_header = true;
    auto end_line = [&] {
        line.push_back(cell);
        cell.clear();
        if (in_header) {
            t.header = line;
            in_header = false;
        } else {
            if (line.size() != t.header.size()) throw std::invalid_argument("csv: ragged row");
            t.rows.push_back(line);
        }
        line.clear();
    };
    for (char c : text) {
        if (c == '\n')
            end_line();
        else if (c == ',') {
            line.push_back(cell);
            cell.clear();
        } else if (c != '\r')
            cell += c;
    }
    if (!cell.empty() || !line.empty()) end_line();
    if (t.header.empty()) throw std::invalid_argument("csv: empty input");
    return t;
}

// ---- least-squares fit on (log10 N, log10 eps) ----

struct FitResult {
    double slope = 0, intercept = 0, residual_rms = 0;
    int points = 0;
};

inline FitResult fit_loglog(const std::vector<std::pair<double, double>>& n_eps) {
    if (n_eps.size() < 3) throw std::invalid_argument("fit: need at least 3 points");
    std::vector<double> x, y;
    for (const auto& [dim, eps] : n_eps) {
        if (!(dim > 0)) throw std::invalid_argument("fit: N must be positive");
        const double a = std::fabs(eps);
        if (!(a > 0)) throw std::invalid_argument("fit: epsilon must be nonzero");
        x.push_back(std::log10(dim));
        y.push_back(std::log10(a));
    }
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = k * sxx - sx * sx;
    if (std::fabs(denom) < 1e-14 * std::max(1.0, k * sxx))
        throw std::invalid_argument("fit: degenerate abscissae");
    FitResult fr;
    fr.points = static_cast<int>(x.size());
    fr.slope = (k * sxy - sx * sy) / denom;
    fr.intercept = (sy - fr.slope * sx) / k;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fr.slope * x[i] + fr.intercept);
        ss += r * r;
    }
    fr.residual_rms = std::sqrt(ss / k);
    return fr;
}

inline FitResult fit_csv_column(const CsvTable& t, const std::string& y_column,
                                const std::string& kind_filter = "") {
    const int xc = t.column("N");
    const int yc = t.column(y_column);
    int kc = -1;
    if (!kind_filter.empty()) kc = t.column("kind");
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : t.rows) {
        if (kc >= 0 && row[kc] != kind_filter) continue;
        pts.emplace_back(std::stod(row[xc]), std::stod(row[yc]));
    }
    return fit_loglog(pts);
}

inline void fit_result_json(JsonWriter& w, const FitResult& fr) {
    w.begin_object();
    w.key("slope");
    w.value(fr.slope);
    w.key("intercept");
    w.value(fr.intercept);
    w.key("residual_rms");
    w.value(fr.residual_rms);
    w.key("points");
    w.value(fr.points);
    w.end_object();
}

// ---- hypothesis checks over sweep rows ----

struct HypothesisCheck {
    std::string name;
    std::string kind;
    bool pass = false;
    std::string detail;
};

namespace detail {

// Trend means each value may exceed its predecessor by at most 0.1%.
inline bool decreasing_trend(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] * 1.001 + 1e-300) return false;
    return true;
}

}  // namespace detail

// Evaluates the three hypotheses on one (family, kind) series of rows.
inline std::vector<HypothesisCheck> check_hypotheses_kind(const std::vector<SweepRow>& rows,
                                                          ElementLabel::Kind kind) {
    std::vector<const SweepRow*> series;
    for (const SweepRow& r : rows)
        if (r.kind == kind) series.push_back(&r);
    const std::string kname = marked_kind_name(kind);
    std::vector<HypothesisCheck> out;
    if (series.empty()) return out;

    {
        HypothesisCheck c{"gap-symmetry", kname, true, ""};
        std::vector<double> norm_asym;
        double worst = 0;
        for (const SweepRow* r : series) {
            const double asym = std::fabs(r->eps_plus + r->eps_minus) / r->epsilon;
            norm_asym.push_back(asym);
            if (r->n >= 10) {
                worst = std::max(worst, asym / (10.0 * r->epsilon));
                if (asym > 10.0 * r->epsilon) c.pass = false;
            }
        }
        if (!detail::decreasing_trend(norm_asym)) c.pass = false;
        c.detail = "max |eps+ + eps-| / (10 eps^2) = " + fmt_g17(worst) +
                   (detail::decreasing_trend(norm_asym) ? ", trend decreasing" : ", trend violated");
        out.push_back(c);
    }
    {
        // |c+ + c-| exceeds 1/sqrt(N) by construction (the remaining secular
        // roots all lie above -gamma*phi_0, so their amplitudes are negative
        // and completeness pushes c+ + c- above <w|psi0>).  The checkable
        // claim is o(1) decay, i.e. a decreasing trend of the magnitude.
        HypothesisCheck c{"overlap-antisymmetry", kname, true, ""};
        std::vector<double> sums;
        double worst = 0;
        for (const SweepRow* r : series) {
            const double sum = std::fabs(r->overlap_prod_plus + r->overlap_prod_minus);
            sums.push_back(sum);
            const double bound = 1.0 / std::sqrt(static_cast<double>(r->dim));
            if (r->n >= 20) worst = std::max(worst, sum / bound);
        }
        if (!detail::decreasing_trend(sums)) c.pass = false;
        c.detail = "max |c+ + c-| * sqrt(N) = " + fmt_g17(worst) +
                   (c.pass ? ", trend decreasing" : ", trend violated");
        out.push_back(c);
    }
    {
        HypothesisCheck c{"two-level-dominance", kname, true, ""};
        double worst = 0;
        for (const SweepRow* r : series) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(r->dim));
            worst = std::max(worst, r->leakage / bound);
            if (r->leakage > bound) c.pass = false;
        }
        c.detail = "max leakage * sqrt(N) = " + fmt_g17(worst);
        out.push_back(c);
    }
    return out;
}

inline std::vector<HypothesisCheck> check_hypotheses(const std::vector<SweepRow>& rows) {
    std::vector<HypothesisCheck> out;
    for (ElementLabel::Kind kind : {ElementLabel::Kind::vertex, ElementLabel::Kind::edge}) {
        std::vector<HypothesisCheck> part = check_hypotheses_kind(rows, kind);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

inline void hypothesis_checks_json(JsonWriter& w, const std::vector<HypothesisCheck>& checks) {
    w.begin_array();
    for (const HypothesisCheck& c : checks) {
        w.begin_object();
        w.key("name");
        w.value(c.name);
        w.key("kind");
        w.value(c.kind);
        w.key("pass");
        w.value(c.pass);
        w.key("detail");
        w.value(c.detail);
        w.end_object();
    }
    w.end_array();
}

}  // namespace totalwalk
