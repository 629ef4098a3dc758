// totalwalk: command line front end.
//
// Subcommands:
//   spectrum       closed-form total-graph spectrum vs the dense oracle
//   search         search-Hamiltonian report and evolution trace
//   sweep-epsilon  spectral-gap sweep over a family, CSV/JSON rows
//   fit            least-squares log-log fit over a sweep CSV
//   check          hypothesis checks over a sweep
//
// Exit codes: 0 success, 2 usage/parse error, 3 numerical failure (bracket or
// convergence problems, or failed checks under --strict).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "totalwalk/totalwalk.hpp"

namespace tw = totalwalk;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("short write to '" + path + "'");
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

// ---- input graph resolution (the CLI names the root graph; walks run on its
// total graph) ----

struct RootSpec {
    std::string family;  // kn | knn | cycle | petersen | edge-list
    int n = 0;
    tw::Graph root;
};

RootSpec resolve_root(const std::string& family, int n, const std::string& edge_list_path) {
    RootSpec rs;
    if (!edge_list_path.empty()) {
        if (!family.empty()) throw std::invalid_argument("--edge-list conflicts with --family");
        rs.family = "edge-list";
        rs.root = tw::load_edge_list(edge_list_path);
        rs.n = rs.root.vertex_count();
    } else if (family == "kn") {
        if (n < 3) throw std::invalid_argument("family kn needs --n >= 3");
        rs = {family, n, tw::complete_graph(n)};
    } else if (family == "knn") {
        if (n < 2) throw std::invalid_argument("family knn needs --n >= 2");
        rs = {family, n, tw::complete_bipartite(n, n)};
    } else if (family == "cycle") {
        if (n < 3) throw std::invalid_argument("family cycle needs --n >= 3");
        rs = {family, n, tw::cycle_graph(n)};
    } else if (family == "petersen") {
        rs = {family, 10, tw::petersen_graph()};
    } else if (family.empty()) {
        throw std::invalid_argument("one of --family or --edge-list is required");
    } else {
        throw std::invalid_argument("unknown family '" + family + "'");
    }
    if (rs.root.regularity() < 2) throw std::invalid_argument("root graph must be regular of degree >= 2");
    if (!rs.root.is_connected()) throw std::invalid_argument("root graph must be connected");
    return rs;
}

tw::TotalSpectrumClosedForm closed_total_spectrum(const RootSpec& rs) {
    if (rs.family == "kn") {
        const int n = rs.n;
        return tw::total_spectrum_from_root_levels(n, n * (n - 1) / 2, n - 1, false,
                                                   tw::complete_graph_levels(n));
    }
    if (rs.family == "knn") return tw::knn_total_spectrum(rs.n);
    if (rs.family == "cycle")
        return tw::total_spectrum_from_root_levels(rs.n, rs.n, 2, rs.n % 2 == 0, tw::cycle_levels(rs.n));
    if (rs.family == "petersen")
        return tw::total_spectrum_from_root_levels(10, 15, 3, false, tw::petersen_levels());
    return tw::total_spectrum_regular(rs.root);
}

struct SpectrumComparison {
    double max_abs_diff = 0;
    bool multiplicities_match = false;
};

SpectrumComparison compare_spectra(const tw::TotalSpectrumClosedForm& closed, const tw::EigenSystem& oracle) {
    SpectrumComparison cmp;
    std::vector<double> a, b;
    for (const tw::MergedLevel& l : closed.merged)
        for (int i = 0; i < l.multiplicity; ++i) a.push_back(l.value);
    for (int l = 0; l < oracle.level_count(); ++l)
        for (int i = 0; i < oracle.multiplicities[l]; ++i) b.push_back(oracle.values[l]);
    if (a.size() != b.size()) {
        cmp.max_abs_diff = std::numeric_limits<double>::infinity();
        return cmp;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        cmp.max_abs_diff = std::max(cmp.max_abs_diff, std::fabs(a[i] - b[i]));
    cmp.multiplicities_match = closed.merged.size() == static_cast<std::size_t>(oracle.level_count());
    if (cmp.multiplicities_match)
        for (std::size_t l = 0; l < closed.merged.size(); ++l)
            if (closed.merged[l].multiplicity != oracle.multiplicities[l]) cmp.multiplicities_match = false;
    return cmp;
}

int cmd_spectrum(const RootSpec& rs, const std::string& out_path, bool strict) {
    const tw::TotalSpectrumClosedForm closed = closed_total_spectrum(rs);
    const tw::TotalGraph total = tw::total_graph(rs.root);
    tw::JacobiOptions opts;
    opts.compute_vectors = false;
    const tw::EigenSystem oracle = tw::symmetric_eig(total.graph.adjacency(), opts);
    const SpectrumComparison cmp = compare_spectra(closed, oracle);
    const bool pass = cmp.multiplicities_match && cmp.max_abs_diff <= 1e-9;

    tw::JsonWriter w;
    w.begin_object();
    w.key("family");
    w.value(rs.family);
    w.key("n");
    w.value(rs.n);
    w.key("root_vertices");
    w.value(closed.n);
    w.key("root_edges");
    w.value(closed.m);
    w.key("degree");
    w.value(closed.degree);
    w.key("bipartite");
    w.value(closed.bipartite);
    w.key("total_dimension");
    w.value(closed.n + closed.m);
    w.key("closed_form");
    w.begin_array();
    for (const tw::MergedLevel& l : closed.merged) {
        w.begin_object();
        w.key("value");
        w.value(l.value);
        w.key("multiplicity");
        w.value(l.multiplicity);
        w.key("branches");
        w.begin_array();
        for (const std::string& b : l.branches) w.value(b);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("oracle");
    w.begin_array();
    for (int l = 0; l < oracle.level_count(); ++l) {
        w.begin_object();
        w.key("value");
        w.value(oracle.values[l]);
        w.key("multiplicity");
        w.value(oracle.multiplicities[l]);
        w.end_object();
    }
    w.end_array();
    w.key("max_abs_diff");
    w.value(cmp.max_abs_diff);
    w.key("multiplicities_match");
    w.value(cmp.multiplicities_match);
    w.key("pass");
    w.value(pass);
    if (!closed.note.empty()) {
        w.key("erratum_note");
        w.value(closed.note);
    }
    w.end_object();
    emit(out_path, w.str() + "\n");
    return strict && !pass ? 3 : 0;
}

int cmd_search(const RootSpec& rs, std::string marked, int marked_index, double gamma,
               const std::string& out_path, const std::string& trace_path, int samples,
               double horizon_factor, bool strict) {
    if (samples < 2) throw std::invalid_argument("--samples must be >= 2");
    if (!(horizon_factor > 0)) throw std::invalid_argument("--horizon must be positive");
    const int root_n = rs.root.vertex_count(), root_m = rs.root.edge_count();
    const int dim = root_n + root_m;

    if (marked.empty()) marked = "vertex";
    if (marked != "vertex" && marked != "edge")
        throw std::invalid_argument("--marked must be vertex or edge");
    tw::ElementLabel::Kind kind =
        marked == "vertex" ? tw::ElementLabel::Kind::vertex : tw::ElementLabel::Kind::edge;
    if (marked_index < 0)
        marked_index = kind == tw::ElementLabel::Kind::vertex ? root_n - 1 : dim - 1;
    if (marked_index >= dim) throw std::invalid_argument("--marked-index out of range");
    const tw::ElementLabel::Kind index_kind =
        marked_index < root_n ? tw::ElementLabel::Kind::vertex : tw::ElementLabel::Kind::edge;
    if (index_kind != kind) throw std::invalid_argument("--marked-index does not name a marked " + marked);
    if (gamma != 0 && !(gamma > 0)) throw std::invalid_argument("--gamma must be positive");

    tw::SearchReport rep;
    tw::LevelData levels;
    if (rs.family == "kn") {
        levels = tw::kn_levels(rs.n);
        rep = tw::analyze_levels(levels, dim, gamma);
    } else if (rs.family == "knn") {
        levels = tw::knn_levels(rs.n, kind);
        rep = tw::analyze_levels(levels, dim, gamma);
    } else {
        const tw::TotalGraph total = tw::total_graph(rs.root);
        const tw::EigenSystem es = tw::symmetric_eig(total.graph.adjacency());
        rep = tw::analyze(es, marked_index, gamma);
        levels = rep.levels;
    }
    const tw::RootAmplitudes roots = tw::secular_roots(levels, rep.gamma, dim);
    const tw::EvolutionTrace trace = tw::evolve_with_peak(roots, horizon_factor * rep.t_opt, samples);

    tw::JsonWriter w;
    w.begin_object();
    w.key("family");
    w.value(rs.family);
    w.key("n");
    w.value(rs.n);
    w.key("marked_kind");
    w.value(marked);
    w.key("marked_index");
    w.value(marked_index);
    w.key("report");
    tw::search_report_json(w, rep);
    w.key("trace");
    w.begin_object();
    w.key("samples");
    w.value(samples);
    w.key("horizon_factor");
    w.value(horizon_factor);
    w.key("t_peak");
    w.value(trace.t_peak);
    w.key("p_peak");
    w.value(trace.p_peak);
    w.end_object();
    if (rs.family == "knn") {
        w.key("erratum_note");
        w.value(tw::knn_total_spectrum(rs.n).note);
    }
    w.end_object();
    emit(out_path, w.str() + "\n");
    if (!trace_path.empty()) write_file(trace_path, tw::trace_csv(trace));
    return strict && !rep.flags.empty() ? 3 : 0;
}

// ---- sweep / check configuration: JSON file first, explicit flags win ----

struct SweepFlags {
    std::string family;
    int n_min = -1, n_max = -1, step = -1, threads = -1, samples = -1;
    std::string marked, format, out_path;
    double horizon_factor = 0;
};

tw::SweepConfig build_sweep_config(const std::string& config_path, const SweepFlags& fl) {
    tw::SweepConfig cfg;
    if (!config_path.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(config_path));
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument(std::string("config: ") + e.what());
        }
        if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
        for (const auto& [key, val] : j.items()) {
            if (key == "family")
                cfg.family = tw::parse_family(val.get<std::string>());
            else if (key == "n_min")
                cfg.n_min = val.get<int>();
            else if (key == "n_max")
                cfg.n_max = val.get<int>();
            else if (key == "step")
                cfg.step = val.get<int>();
            else if (key == "marked") {
                const std::string m = val.get<std::string>();
                if (m == "vertex") {
                    cfg.marked_vertex = true;
                    cfg.marked_edge = false;
                } else if (m == "edge") {
                    cfg.marked_vertex = false;
                    cfg.marked_edge = true;
                } else if (m == "both") {
                    cfg.marked_vertex = cfg.marked_edge = true;
                } else {
                    throw std::invalid_argument("config: marked must be vertex, edge, or both");
                }
            } else if (key == "threads")
                cfg.threads = val.get<int>();
            else if (key == "out")
                cfg.out_path = val.get<std::string>();
            else if (key == "format")
                cfg.format = val.get<std::string>();
            else if (key == "samples")
                cfg.samples = val.get<int>();
            else if (key == "horizon_factor")
                cfg.horizon_factor = val.get<double>();
            else
                throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    if (!fl.family.empty()) cfg.family = tw::parse_family(fl.family);
    if (fl.n_min >= 0) cfg.n_min = fl.n_min;
    if (fl.n_max >= 0) cfg.n_max = fl.n_max;
    if (fl.step >= 0) cfg.step = fl.step;
    if (fl.threads >= 0) cfg.threads = fl.threads;
    if (fl.samples >= 0) cfg.samples = fl.samples;
    if (fl.horizon_factor > 0) cfg.horizon_factor = fl.horizon_factor;
    if (!fl.format.empty()) cfg.format = fl.format;
    if (!fl.out_path.empty()) cfg.out_path = fl.out_path;
    if (!fl.marked.empty()) {
        if (fl.marked == "vertex") {
            cfg.marked_vertex = true;
            cfg.marked_edge = false;
        } else if (fl.marked == "edge") {
            cfg.marked_vertex = false;
            cfg.marked_edge = true;
        } else if (fl.marked == "both") {
            cfg.marked_vertex = cfg.marked_edge = true;
        } else {
            throw std::invalid_argument("--marked must be vertex, edge, or both");
        }
    }
    cfg.validate();
    return cfg;
}

int cmd_sweep(const tw::SweepConfig& cfg) {
    const std::vector<tw::SweepRow> rows = tw::run_sweep(cfg);
    if (cfg.format == "csv") {
        emit(cfg.out_path, tw::sweep_csv(rows));
    } else {
        tw::JsonWriter w;
        w.begin_object();
        w.key("family");
        w.value(tw::family_name(cfg.family));
        w.key("rows");
        tw::sweep_rows_json(w, rows);
        w.end_object();
        emit(cfg.out_path, w.str() + "\n");
    }
    return 0;
}

int cmd_fit(const std::string& in_path, const std::string& column, const std::string& kind,
            const std::string& out_path) {
    if (!kind.empty() && kind != "vertex" && kind != "edge")
        throw std::invalid_argument("--kind must be vertex or edge");
    const tw::CsvTable table = tw::parse_csv(read_file(in_path));
    const tw::FitResult fr = tw::fit_csv_column(table, column, kind);
    tw::JsonWriter w;
    w.begin_object();
    w.key("column");
    w.value(column);
    w.key("kind");
    w.value(kind.empty() ? "all" : kind);
    w.key("fit");
    tw::fit_result_json(w, fr);
    w.end_object();
    emit(out_path, w.str() + "\n");
    return 0;
}

int cmd_check(const tw::SweepConfig& cfg, bool strict) {
    const std::vector<tw::SweepRow> rows = tw::run_sweep(cfg);
    const std::vector<tw::HypothesisCheck> checks = tw::check_hypotheses(rows);
    bool all_pass = true;
    for (const tw::HypothesisCheck& c : checks) all_pass = all_pass && c.pass;
    tw::JsonWriter w;
    w.begin_object();
    w.key("family");
    w.value(tw::family_name(cfg.family));
    w.key("checks");
    tw::hypothesis_checks_json(w, checks);
    w.key("all_pass");
    w.value(all_pass);
    w.end_object();
    emit(cfg.out_path, w.str() + "\n");
    return strict && !all_pass ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"total-graph quantum walk toolkit"};
    app.require_subcommand(1);

    std::string family, edge_list, out_path, trace_path, config_path, marked, column, kind, in_path;
    int n = 0, marked_index = -1;
    double gamma = 0, horizon = 2.0;
    int samples = 2001;
    bool strict = false;
    SweepFlags fl;

    CLI::App* sp = app.add_subcommand("spectrum", "closed-form total spectrum vs dense oracle");
    sp->add_option("--family", family, "kn | knn | cycle | petersen");
    sp->add_option("--n", n, "family size parameter");
    sp->add_option("--edge-list", edge_list, "root graph edge-list file");
    sp->add_option("--out", out_path, "output JSON path (default stdout)");
    sp->add_flag("--strict", strict, "exit 3 when the comparison fails");

    CLI::App* se = app.add_subcommand("search", "search Hamiltonian analysis and dynamics");
    se->add_option("--family", family, "kn | knn | cycle | petersen");
    se->add_option("--n", n, "family size parameter");
    se->add_option("--edge-list", edge_list, "root graph edge-list file");
    se->add_option("--marked", marked, "vertex | edge (default vertex)");
    se->add_option("--marked-index", marked_index, "explicit element index in the total graph");
    se->add_option("--gamma", gamma, "hopping rate (default: computed S1)");
    se->add_option("--out", out_path, "report JSON path (default stdout)");
    se->add_option("--trace", trace_path, "evolution trace CSV path");
    se->add_option("--samples", samples, "trace sample count (default 2001)");
    se->add_option("--horizon", horizon, "trace horizon as multiple of t_opt (default 2)");
    se->add_flag("--strict", strict, "exit 3 when warnings are raised");

    CLI::App* sw = app.add_subcommand("sweep-epsilon", "spectral-gap sweep over a family");
    sw->add_option("--config", config_path, "JSON config file (flags win)");
    sw->add_option("--family", fl.family, "kn | knn");
    sw->add_option("--n-min", fl.n_min, "smallest n (default 5)");
    sw->add_option("--n-max", fl.n_max, "largest n (default 100)");
    sw->add_option("--step", fl.step, "n increment (default 2)");
    sw->add_option("--marked", fl.marked, "vertex | edge | both (default both)");
    sw->add_option("--threads", fl.threads, "worker threads (default TOTALWALK_THREADS)");
    sw->add_option("--format", fl.format, "csv | json (default csv)");
    sw->add_option("--out", fl.out_path, "output path (default stdout)");

    CLI::App* fi = app.add_subcommand("fit", "log-log least squares over a sweep CSV");
    fi->add_option("--in", in_path, "sweep CSV path")->required();
    fi->add_option("--column", column, "epsilon column (default epsilon)");
    fi->add_option("--kind", kind, "restrict to vertex or edge rows");
    fi->add_option("--out", out_path, "output JSON path (default stdout)");

    CLI::App* ch = app.add_subcommand("check", "hypothesis checks over a sweep");
    ch->add_option("--config", config_path, "JSON config file (flags win)");
    ch->add_option("--family", fl.family, "kn | knn");
    ch->add_option("--n-min", fl.n_min, "smallest n");
    ch->add_option("--n-max", fl.n_max, "largest n");
    ch->add_option("--step", fl.step, "n increment");
    ch->add_option("--marked", fl.marked, "vertex | edge | both");
    ch->add_option("--threads", fl.threads, "worker threads");
    ch->add_option("--out", fl.out_path, "output path (default stdout)");
    ch->add_flag("--strict", strict, "exit 3 when any check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (sp->parsed()) return cmd_spectrum(resolve_root(family, n, edge_list), out_path, strict);
        if (se->parsed())
            return cmd_search(resolve_root(family, n, edge_list), marked, marked_index, gamma, out_path,
                              trace_path, samples, horizon, strict);
        if (sw->parsed()) return cmd_sweep(build_sweep_config(config_path, fl));
        if (fi->parsed()) return cmd_fit(in_path, column.empty() ? "epsilon" : column, kind, out_path);
        if (ch->parsed()) return cmd_check(build_sweep_config(config_path, fl), strict);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
