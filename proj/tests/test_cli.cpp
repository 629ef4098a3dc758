#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = TOTALWALK_CLI_PATH;

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("totalwalk_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    REQUIRE(out.good());
}

// Value of the first "key":<number> occurrence in a flat JSON string.
double json_number(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\":";
    const std::size_t at = text.find(needle);
    REQUIRE(at != std::string::npos);
    return std::stod(text.substr(at + needle.size()));
}

bool json_has(const std::string& text, const std::string& fragment) {
    return text.find(fragment) != std::string::npos;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0, at = 0;
    while ((at = text.find(needle, at)) != std::string::npos) {
        ++n;
        at += needle.size();
    }
    return n;
}

}  // namespace

TEST_CASE("cli spectrum closed form matches oracle") {
    const std::string out = path_of("spec_knn3.json");
    REQUIRE(run("spectrum --family knn --n 3 --out " + out) == 0);
    const std::string j = slurp(out);
    REQUIRE(json_number(j, "max_abs_diff") <= 1e-9);
    REQUIRE(json_has(j, "\"multiplicities_match\":true"));
    REQUIRE(json_has(j, "\"pass\":true"));
    REQUIRE(json_has(j, "\"total_dimension\":15"));
    REQUIRE(json_has(j, "\"erratum_note\""));
    REQUIRE(json_has(j, "n-2"));
}

TEST_CASE("cli spectrum strongly regular complete graph") {
    const std::string out = path_of("spec_k4.json");
    REQUIRE(run("spectrum --family kn --n 4 --out " + out) == 0);
    const std::string j = slurp(out);
    REQUIRE(json_has(j, "\"pass\":true"));
    // one "branches" array per closed-form level
    REQUIRE(count_occurrences(j, "\"branches\"") == 3);
}

TEST_CASE("cli spectrum other families and edge lists") {
    const std::string out = path_of("spec_misc.json");
    REQUIRE(run("spectrum --family cycle --n 6 --out " + out) == 0);
    REQUIRE(json_has(slurp(out), "\"bipartite\":true"));

    REQUIRE(run("spectrum --family petersen --out " + out) == 0);
    REQUIRE(json_has(slurp(out), "\"total_dimension\":25"));

    const std::string edges = path_of("k4.edges");
    spit(edges, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    REQUIRE(run("spectrum --edge-list " + edges + " --out " + out) == 0);
    REQUIRE(json_has(slurp(out), "\"pass\":true"));

    REQUIRE(run("spectrum --edge-list " + edges + " --family kn --out " + out) == 2);
    REQUIRE(run("spectrum --edge-list " + path_of("missing.edges") + " --out " + out) == 2);
}

TEST_CASE("cli malformed arguments exit 2 without output") {
    const std::string out = path_of("never_written.json");
    REQUIRE(run("spectrum --family knn --n abc --out " + out) == 2);
    REQUIRE_FALSE(fs::exists(out));
    REQUIRE(run("spectrum --family knn --n 1 --out " + out) == 2);
    REQUIRE_FALSE(fs::exists(out));
    REQUIRE(run("spectrum --family mesh --n 4 --out " + out) == 2);
    REQUIRE(run("spectrum --out " + out) == 2);
    REQUIRE(run("fit --column epsilon") == 2);  // --in is required
    REQUIRE(run("frobnicate") == 2);
    REQUIRE(run("") == 2);
    REQUIRE_FALSE(fs::exists(out));
}

TEST_CASE("cli search bipartite family reaches high success probability") {
    const double root_n = std::sqrt(288.0);  // T(K_{16,16})
    {
        const std::string out = path_of("search_v16.json");
        REQUIRE(run("search --family knn --n 16 --marked vertex --out " + out) == 0);
        const std::string j = slurp(out);
        REQUIRE(json_number(j, "p_peak") >= 1.0 - 2.0 / 16.0);
        REQUIRE(json_number(j, "marked_index") == 31.0);  // K_{16,16} has 32 root vertices
        REQUIRE(json_has(j, "\"erratum_note\""));
        const double t_opt = json_number(j, "t_opt");
        REQUIRE(t_opt == Catch::Approx(M_PI * root_n / 2.0).epsilon(0.05));
    }
    {
        const std::string out = path_of("search_e16.json");
        const std::string trace = path_of("search_e16.csv");
        REQUIRE(run("search --family knn --n 16 --marked edge --out " + out + " --trace " + trace) == 0);
        const std::string j = slurp(out);
        REQUIRE(json_number(j, "p_peak") >= 1.0 - 2.0 / 16.0 - 5.0 / 256.0);
        REQUIRE(json_number(j, "marked_index") == 287.0);
        const double t_opt = json_number(j, "t_opt");
        REQUIRE(t_opt == Catch::Approx(M_PI * root_n / 2.0).epsilon(0.05));

        const std::string csv = slurp(trace);
        REQUIRE(csv.rfind("t,re_amp,im_amp,p\n", 0) == 0);
        REQUIRE(count_lines(csv) == 2002);  // header + default 2001 samples
    }
}

TEST_CASE("cli search complete graph peak time") {
    const std::string out = path_of("search_k10.json");
    const std::string trace = path_of("search_k10.csv");
    REQUIRE(run("search --family kn --n 10 --out " + out + " --trace " + trace +
                " --samples 4001") == 0);
    const std::string j = slurp(out);

    // scan the trace for the argmax of p(t)
    const std::string csv = slurp(trace);
    double best_t = 0, best_p = -1;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        const std::size_t c1 = line.find(',');
        const std::size_t c3 = line.rfind(',');
        const double t = std::stod(line.substr(0, c1));
        const double p = std::stod(line.substr(c3 + 1));
        if (p > best_p) {
            best_p = p;
            best_t = t;
        }
    }
    const double expect = M_PI * std::sqrt(55.0) / 2.0;
    REQUIRE(best_t == Catch::Approx(expect).epsilon(0.02));
    REQUIRE(best_p >= 1.0 - 3.0 / 10.0);

    // the reported peak is refined between grid points
    const double t_opt = json_number(j, "t_opt");
    const double grid_step = 2.0 * t_opt / 4000.0;
    REQUIRE(json_number(j, "t_peak") == Catch::Approx(best_t).margin(grid_step));
    REQUIRE(json_number(j, "p_peak") >= best_p - 1e-12);
    REQUIRE(json_number(j, "p_peak") <= best_p + 1e-4);
}

TEST_CASE("cli search marked index rules") {
    const std::string out = path_of("search_idx.json");
    REQUIRE(run("search --family knn --n 3 --marked edge --out " + out) == 0);
    REQUIRE(json_number(slurp(out), "marked_index") == 14.0);  // dim 15, last edge

    REQUIRE(run("search --family knn --n 3 --marked vertex --marked-index 2 --out " + out) == 0);
    REQUIRE(json_number(slurp(out), "marked_index") == 2.0);

    REQUIRE(run("search --family knn --n 3 --marked edge --marked-index 2 --out " + out) == 2);
    REQUIRE(run("search --family knn --n 3 --marked-index 99 --out " + out) == 2);
    REQUIRE(run("search --family knn --n 3 --marked corner --out " + out) == 2);
    REQUIRE(run("search --family knn --n 3 --gamma -0.5 --out " + out) == 2);
    REQUIRE(run("search --family knn --n 3 --samples 1 --out " + out) == 2);
}

TEST_CASE("cli search gamma override warns and strict escalates") {
    const std::string out = path_of("search_gamma.json");
    REQUIRE(run("search --family knn --n 4 --gamma 0.5 --out " + out) == 0);
    const std::string j = slurp(out);
    REQUIRE(json_has(j, "gamma-override"));
    REQUIRE(json_number(j, "gamma") == 0.5);

    REQUIRE(run("search --family knn --n 4 --gamma 0.5 --strict --out " + out) == 3);
}

TEST_CASE("cli sweep deterministic csv") {
    const std::string a = path_of("sweep_a.csv");
    const std::string b = path_of("sweep_b.csv");
    REQUIRE(run("sweep-epsilon --n-min 5 --n-max 21 --step 2 --out " + a) == 0);
    REQUIRE(run("sweep-epsilon --n-min 5 --n-max 21 --step 2 --out " + b) == 0);
    const std::string ca = slurp(a);
    REQUIRE(ca == slurp(b));
    REQUIRE(ca.rfind("n,N,kind,", 0) == 0);
    REQUIRE(count_lines(ca) == 19);  // header + 9 sizes x 2 kinds

    // thread cap comes from the environment; rows stay ordered
    const std::string c = path_of("sweep_c.csv");
    const std::string cmd = "TOTALWALK_THREADS=3 " + kCli + " sweep-epsilon --n-min 5 --n-max 21 --step 2 --out " + c + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    REQUIRE(ca == slurp(c));
}

TEST_CASE("cli sweep json format") {
    const std::string out = path_of("sweep.json");
    REQUIRE(run("sweep-epsilon --n-max 7 --format json --out " + out) == 0);
    const std::string j = slurp(out);
    REQUIRE(j.front() == '{');
    REQUIRE(json_has(j, "\"family\":\"knn\""));
    REQUIRE(json_has(j, "\"rows\":["));
    REQUIRE(count_occurrences(j, "\"eps_plus\"") == 4);  // n in {5,7}, both kinds
}

TEST_CASE("cli sweep config file with flags winning") {
    const std::string cfg = path_of("sweep_cfg.json");
    const std::string out = path_of("sweep_cfg.csv");
    spit(cfg, "{\"family\":\"knn\",\"n_min\":5,\"n_max\":7,\"step\":2,\"marked\":\"vertex\"}\n");

    REQUIRE(run("sweep-epsilon --config " + cfg + " --out " + out) == 0);
    REQUIRE(count_lines(slurp(out)) == 3);  // header + n in {5,7}, vertex only

    REQUIRE(run("sweep-epsilon --config " + cfg + " --n-max 9 --out " + out) == 0);
    const std::string csv = slurp(out);
    REQUIRE(count_lines(csv) == 4);  // flag widened the range
    REQUIRE(json_has(csv, "\n9,99,vertex,"));

    spit(cfg, "{\"n_min\":5,\"n_max\":7,\"mystery\":1}\n");
    REQUIRE(run("sweep-epsilon --config " + cfg + " --out " + out) == 2);
    spit(cfg, "not json at all {{{\n");
    REQUIRE(run("sweep-epsilon --config " + cfg + " --out " + out) == 2);
    REQUIRE(run("sweep-epsilon --config " + path_of("absent.json") + " --out " + out) == 2);
    REQUIRE(run("sweep-epsilon --n-min 9 --n-max 5 --out " + out) == 2);
    REQUIRE(run("sweep-epsilon --format yaml --out " + out) == 2);
}

TEST_CASE("cli fit reproduces published scaling") {
    const std::string csv = path_of("sweep_full.csv");
    REQUIRE(run("sweep-epsilon --out " + csv) == 0);  // default 5..100 step 2

    const std::string out = path_of("fit.json");
    REQUIRE(run("fit --in " + csv + " --column eps_plus --kind vertex --out " + out) == 0);
    std::string j = slurp(out);
    REQUIRE(json_has(j, "\"column\":\"eps_plus\""));
    REQUIRE(json_has(j, "\"kind\":\"vertex\""));
    REQUIRE(json_number(j, "points") == 48.0);
    double slope = json_number(j, "slope");
    double intercept = json_number(j, "intercept");
    REQUIRE(slope >= -0.51);
    REQUIRE(slope <= -0.47);
    REQUIRE(intercept >= -0.10);
    REQUIRE(intercept <= -0.06);

    REQUIRE(run("fit --in " + csv + " --column eps_plus --kind edge --out " + out) == 0);
    j = slurp(out);
    slope = json_number(j, "slope");
    REQUIRE(slope >= -0.51);
    REQUIRE(slope <= -0.47);

    // default column is the half-gap; same power, higher intercept
    REQUIRE(run("fit --in " + csv + " --kind vertex --out " + out) == 0);
    j = slurp(out);
    REQUIRE(json_has(j, "\"column\":\"epsilon\""));
    slope = json_number(j, "slope");
    intercept = json_number(j, "intercept");
    REQUIRE(slope >= -0.51);
    REQUIRE(slope <= -0.47);
    REQUIRE(intercept > -0.06);

    REQUIRE(run("fit --in " + csv + " --column nonesuch --out " + out) == 2);
    REQUIRE(run("fit --in " + csv + " --kind both --out " + out) == 2);
    REQUIRE(run("fit --in " + path_of("absent.csv") + " --out " + out) == 2);
}

TEST_CASE("cli fit synthetic inverse square root") {
    const std::string csv = path_of("synthetic.csv");
    std::string text = "N,kind,epsilon\n";
    for (int k = 2; k <= 12; k += 2) {
        const double dim = std::ldexp(1.0, k);
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%.0f,vertex,%.17g\n", dim, 1.0 / std::sqrt(dim));
        text += buf;
    }
    spit(csv, text);

    const std::string out = path_of("fit_synth.json");
    REQUIRE(run("fit --in " + csv + " --out " + out) == 0);
    const std::string j = slurp(out);
    REQUIRE(json_number(j, "slope") == Catch::Approx(-0.5).margin(1e-10));
    REQUIRE(json_number(j, "intercept") == Catch::Approx(0.0).margin(1e-10));

    spit(csv, "N,kind,epsilon\n4,vertex,0.5\n16,vertex,0.25\n");
    REQUIRE(run("fit --in " + csv + " --out " + out) == 2);  // needs 3 points
}

TEST_CASE("cli check hypothesis summary") {
    const std::string out = path_of("check_knn.json");
    REQUIRE(run("check --family knn --n-min 5 --n-max 60 --step 5 --out " + out) == 0);
    const std::string j = slurp(out);
    REQUIRE(json_has(j, "\"all_pass\":true"));
    REQUIRE(count_occurrences(j, "\"name\":") == 6);
    REQUIRE(json_has(j, "\"name\":\"gap-symmetry\""));
    REQUIRE(json_has(j, "\"name\":\"overlap-antisymmetry\""));
    REQUIRE(json_has(j, "\"name\":\"two-level-dominance\""));

    REQUIRE(run("check --family kn --n-min 3 --n-max 12 --step 1 --strict --out " + out) == 0);
    REQUIRE(json_has(slurp(out), "\"all_pass\":true"));

    REQUIRE(run("check --family kn --n-min 2 --n-max 12 --out " + out) == 2);
}
