#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "totalwalk/graph.hpp"
#include "totalwalk/search.hpp"
#include "totalwalk/total_spectrum.hpp"

using namespace totalwalk;

namespace {

LevelData two_level_toy() {
    LevelData lv;
    lv.values = {1.0, -1.0};
    lv.mults = {1, 1};
    lv.weights = {0.5, 0.5};
    return lv;
}

std::vector<double> time_grid(double t_end, int samples) {
    std::vector<double> ts(samples);
    for (int i = 0; i < samples; ++i) ts[i] = t_end * i / (samples - 1);
    return ts;
}

// Marked-vertex search on T(K_{n,n}), everything dense.
struct DenseSearch {
    Matrix adjacency;
    SearchReport report;
    EigenSystem es_h;
    int marked = 0;
};

DenseSearch dense_knn_vertex_search(int n) {
    DenseSearch d;
    const TotalGraph t = total_graph(complete_bipartite(n, n));
    d.adjacency = to_double(t.graph.adjacency());
    d.marked = t.index_of(ElementLabel::vertex(n - 1));
    d.report = analyze(symmetric_eig(d.adjacency), d.marked);
    d.es_h = symmetric_eig(search_hamiltonian(d.adjacency, d.report.gamma, d.marked));
    return d;
}

}  // namespace

TEST_CASE("search hamiltonian assembly") {
    const Matrix a = to_double(complete_graph(2).adjacency());
    const Matrix h = search_hamiltonian(a, 0.5, 0);
    CHECK(h(0, 0) == -1.0);
    CHECK(h(0, 1) == -0.5);
    CHECK(h(1, 0) == -0.5);
    CHECK(h(1, 1) == 0.0);
    CHECK_THROWS_AS(search_hamiltonian(a, -1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(search_hamiltonian(a, 0.5, 2), std::invalid_argument);
}

TEST_CASE("projector weights") {
    SECTION("basis element of a diagonal matrix") {
        Matrix a(2, 2);
        a(0, 0) = 3;
        a(1, 1) = 1;
        const auto w = projector_weights(symmetric_eig(a), 0);
        CHECK(w[0] == Catch::Approx(1.0).margin(1e-14));
        CHECK(w[1] == Catch::Approx(0.0).margin(1e-14));
    }

    SECTION("top weight 1/N on regular connected total graphs") {
        for (const Graph& g : {complete_graph(4), complete_bipartite(3, 3), cycle_graph(5)}) {
            const TotalGraph t = total_graph(g);
            const EigenSystem es = symmetric_eig(to_double(t.graph.adjacency()));
            const int dim = t.graph.vertex_count();
            for (int w : {0, dim - 1}) {
                const auto weights = projector_weights(es, w);
                CHECK(weights[0] == Catch::Approx(1.0 / dim).margin(1e-12));
            }
        }
    }

    SECTION("weights sum to 1 for a marked edge of T(K33)") {
        const TotalGraph t = total_graph(complete_bipartite(3, 3));
        const EigenSystem es = symmetric_eig(to_double(t.graph.adjacency()));
        const auto weights = projector_weights(es, t.index_of(ElementLabel::edge(8)));
        double sum = 0;
        for (double w : weights) {
            CHECK(w >= -1e-14);
            sum += w;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("S sums on the two-level toy") {
    const SSums s = s_sums(two_level_toy());
    CHECK(s.s1 == Catch::Approx(0.25).margin(1e-15));
    CHECK(s.s2 == Catch::Approx(0.125).margin(1e-15));
    CHECK(gamma_opt(two_level_toy()) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("optimal time") {
    CHECK(optimal_time(1.0) == Catch::Approx(M_PI / 2).margin(1e-15));
    CHECK(optimal_time(0.01) == Catch::Approx(50.0 * M_PI).margin(1e-12));
    CHECK_THROWS_AS(optimal_time(0.0), std::invalid_argument);
}

TEST_CASE("exact roots for the K2 toy at gamma one half") {
    const SearchReport rep = analyze_levels(two_level_toy(), 2, 0.5);
    const double s2 = std::sqrt(2.0);
    CHECK(rep.lambda_plus == Catch::Approx((-1.0 + s2) / 2).margin(1e-12));
    CHECK(rep.lambda_minus == Catch::Approx((-1.0 - s2) / 2).margin(1e-12));
    CHECK(rep.lambda_minus < -rep.gamma * 1.0);
    CHECK(-rep.gamma * 1.0 < rep.lambda_plus);

    // dense cross-check
    const Matrix h = search_hamiltonian(to_double(complete_graph(2).adjacency()), 0.5, 0);
    const EigenSystem es = symmetric_eig(h);
    CHECK(es.values[0] == Catch::Approx(rep.lambda_plus).margin(1e-12));
    CHECK(es.values[1] == Catch::Approx(rep.lambda_minus).margin(1e-12));

    const auto flagged = rep.flags;
    CHECK(std::find(flagged.begin(), flagged.end(), "gamma-override") != flagged.end());
}

TEST_CASE("secular equation residual at the exact roots") {
    const TotalGraph t = total_graph(complete_bipartite(3, 3));
    const EigenSystem es = symmetric_eig(to_double(t.graph.adjacency()));
    for (int marked : {t.index_of(ElementLabel::vertex(2)), t.index_of(ElementLabel::edge(8))}) {
        const SearchReport rep = analyze(es, marked);
        LevelData lv;
        lv.values = es.values;
        lv.mults = es.multiplicities;
        lv.weights = projector_weights(es, marked);
        const detail::Secular f = detail::make_secular(lv, rep.gamma);
        CHECK(std::abs(f(rep.lambda_plus) + 1.0) < 1e-12);
        CHECK(std::abs(f(rep.lambda_minus) + 1.0) < 1e-12);

        // reciprocal overlap identity: 1/|<w|lambda>|^2 = sum_l w_l/(lambda + gamma phi_l)^2
        CHECK(rep.overlaps.w_plus ==
              Catch::Approx(1.0 / std::sqrt(f.derivative_sum(rep.lambda_plus))).margin(1e-14));
    }
}

TEST_CASE("root trajectories in gamma") {
    // For the toy, lambda = (-1 +- sqrt(1 + 4 gamma^2))/2: the lower root
    // sinks below every pole while the upper root climbs between the poles.
    const LevelData lv = two_level_toy();
    double prev_plus = -1e300, prev_minus = 1e300;
    for (double g : {0.1, 0.2, 0.25, 0.3, 0.5, 1.0, 2.0}) {
        const SearchReport rep = analyze_levels(lv, 2, g);
        const double exact = std::sqrt(1.0 + 4.0 * g * g) / 2.0;
        CHECK(rep.lambda_plus == Catch::Approx(-0.5 + exact).margin(1e-12));
        CHECK(rep.lambda_minus == Catch::Approx(-0.5 - exact).margin(1e-12));
        CHECK(rep.lambda_minus < -g * lv.values[0]);
        CHECK(rep.lambda_plus > -g * lv.values[0]);
        CHECK(rep.lambda_plus < -g * lv.values[1]);
        if (prev_plus > -1e299) {
            CHECK(rep.lambda_plus > prev_plus);
            CHECK(rep.lambda_minus < prev_minus);
        }
        prev_plus = rep.lambda_plus;
        prev_minus = rep.lambda_minus;
    }
}

TEST_CASE("flags") {
    SECTION("degenerate top level") {
        LevelData lv;
        lv.values = {1.0, -1.0};
        lv.mults = {2, 1};
        lv.weights = {0.5, 0.5};
        const SearchReport rep = analyze_levels(lv, 3);
        CHECK(std::find(rep.flags.begin(), rep.flags.end(), "degenerate-top-level") !=
              rep.flags.end());
    }

    SECTION("top eigenvector not uniform") {
        // top eigenvector (1,1,0)/sqrt(2); the marked element still sees two levels
        Matrix a(3, 3);
        a(0, 0) = 2;
        a(0, 1) = 1;
        a(1, 0) = 1;
        a(1, 1) = 2;
        a(2, 2) = 0.5;
        const SearchReport rep = analyze(symmetric_eig(a), 0);
        CHECK(std::find(rep.flags.begin(), rep.flags.end(), "top-not-uniform") != rep.flags.end());
    }

    SECTION("single visible level throws") {
        // a weight below the visibility floor keeps S1 positive but leaves a
        // single secular pole
        LevelData lv;
        lv.values = {3.0, 1.0};
        lv.mults = {1, 2};
        lv.weights = {1.0 - 1e-14, 1e-14};
        CHECK_THROWS_AS(analyze_levels(lv, 3, 0.2), std::runtime_error);

        // with exactly zero weight off the top the series gap vanishes and is
        // rejected as an argument error
        Matrix a(3, 3);
        a(0, 0) = 3;
        a(1, 1) = 1;
        a(2, 2) = 1;
        CHECK_THROWS_AS(analyze(symmetric_eig(a), 0, 0.2), std::invalid_argument);
    }
}

TEST_CASE("secular roots and amplitudes") {
    const TotalGraph t = total_graph(complete_bipartite(3, 3));
    const EigenSystem es = symmetric_eig(to_double(t.graph.adjacency()));
    const int marked = t.index_of(ElementLabel::vertex(0));
    const SearchReport rep = analyze(es, marked);
    LevelData lv;
    lv.values = es.values;
    lv.mults = es.multiplicities;
    lv.weights = projector_weights(es, marked);
    const RootAmplitudes ra = secular_roots(lv, rep.gamma, es.dimension());

    SECTION("amplitudes sum to 1/sqrt(N)") {
        double sum = 0;
        for (double a : ra.amplitudes) sum += a;
        CHECK(sum == Catch::Approx(1.0 / std::sqrt(15.0)).margin(1e-12));
    }

    SECTION("every root is an eigenvalue of the dense Hamiltonian") {
        const Matrix h = search_hamiltonian(to_double(t.graph.adjacency()), rep.gamma, marked);
        JacobiOptions opts;
        opts.compute_vectors = false;
        const EigenSystem hs = symmetric_eig(h, opts);
        for (double root : ra.roots) {
            double best = 1e300;
            for (double v : hs.values) best = std::min(best, std::abs(v - root));
            CHECK(best < 1e-8);
        }
    }

    SECTION("roots interlace the poles") {
        REQUIRE(ra.roots.size() >= 2);
        for (std::size_t i = 1; i < ra.roots.size(); ++i) CHECK(ra.roots[i - 1] < ra.roots[i]);
    }
}

TEST_CASE("overlaps against the dense eigensystem") {
    const DenseSearch d = dense_knn_vertex_search(4);
    const SearchReport& rep = d.report;

    // lambda^- < -gamma phi_0 < lambda^+ and -gamma phi_0 is the smallest
    // pole, so the two roots are the bottom two levels of H and are simple
    const int levels = d.es_h.level_count();
    REQUIRE(levels >= 2);
    CHECK(d.es_h.values[levels - 1] == Catch::Approx(rep.lambda_minus).margin(1e-10));
    CHECK(d.es_h.values[levels - 2] == Catch::Approx(rep.lambda_plus).margin(1e-10));
    CHECK(d.es_h.multiplicities[levels - 1] == 1);
    CHECK(d.es_h.multiplicities[levels - 2] == 1);
    const double* vp = d.es_h.vector(d.es_h.offsets[levels - 2]);
    const double dense_w_plus = std::abs(vp[d.marked]);
    CHECK(dense_w_plus == Catch::Approx(rep.overlaps.w_plus).margin(1e-9));

    double ip = 0;
    const int dim = d.es_h.dimension();
    for (int i = 0; i < dim; ++i) ip += vp[i] / std::sqrt(static_cast<double>(dim));
    CHECK(std::abs(ip) == Catch::Approx(std::abs(rep.overlaps.psi_plus)).margin(1e-9));
    // <w|l><l|psi0> is sign-convention free
    const double dense_prod = vp[d.marked] * ip;
    CHECK(dense_prod == Catch::Approx(rep.overlaps.w_plus * rep.overlaps.psi_plus).margin(1e-9));
}

TEST_CASE("asymptotic overlap limits") {
    // <psi0|lambda^±> -> ∓ 1/sqrt(2 N w0) and <w|lambda^±> -> S1/sqrt(2 S2)
    const DenseSearch d = dense_knn_vertex_search(16);
    const Overlaps& ov = d.report.overlaps;
    CHECK(ov.psi_plus < 0);
    CHECK(ov.psi_minus > 0);
    CHECK(std::abs(ov.psi_plus) == Catch::Approx(ov.psi_asym).epsilon(0.15));
    CHECK(std::abs(ov.psi_minus) == Catch::Approx(ov.psi_asym).epsilon(0.15));
    CHECK(ov.w_plus == Catch::Approx(ov.w_asym).epsilon(0.15));
    CHECK(ov.w_minus == Catch::Approx(ov.w_asym).epsilon(0.15));
}

TEST_CASE("perturbative roots stay within C eps^2 of the exact ones") {
    const double c_bound = 3.0;
    for (int n : {6, 8, 10, 14, 20}) {
        const DenseSearch d = dense_knn_vertex_search(n);
        const SearchReport& rep = d.report;
        CHECK(std::abs(rep.eps_plus - rep.epsilon) <= c_bound * rep.epsilon * rep.epsilon);
        CHECK(std::abs(rep.eps_minus + rep.epsilon) <= c_bound * rep.epsilon * rep.epsilon);
    }
}

TEST_CASE("weights are invariant under eigenvector sign flips") {
    const TotalGraph t = total_graph(complete_bipartite(3, 3));
    EigenSystem es = symmetric_eig(to_double(t.graph.adjacency()));
    const int marked = t.index_of(ElementLabel::edge(4));
    const SearchReport before = analyze(es, marked);

    std::mt19937 rng(7);
    for (int k = 0; k < es.dimension(); ++k)
        if (rng() % 2) {
            double* row = es.vectors.row(k);
            for (int i = 0; i < es.dimension(); ++i) row[i] = -row[i];
        }
    const SearchReport after = analyze(es, marked);
    CHECK(after.epsilon == Catch::Approx(before.epsilon).margin(1e-13));
    CHECK(after.lambda_plus == Catch::Approx(before.lambda_plus).margin(1e-13));
    CHECK(after.s1 == Catch::Approx(before.s1).margin(1e-14));
}

TEST_CASE("evolution basics") {
    SECTION("H = 0 keeps the probability constant") {
        SearchSetup setup;
        setup.adjacency = Matrix(5, 5);
        setup.marked_index = 2;
        const EigenSystem es = symmetric_eig(Matrix(5, 5));
        const EvolutionTrace tr = evolve(setup, es, time_grid(10.0, 50));
        for (double p : tr.p) CHECK(p == Catch::Approx(1.0 / 5.0).margin(1e-12));
    }

    SECTION("unmarked walk from the uniform state stays at 1/N") {
        const TotalGraph t = total_graph(complete_bipartite(3, 3));
        SearchSetup setup;
        setup.adjacency = to_double(t.graph.adjacency());
        setup.marked_index = 4;
        const int dim = t.graph.vertex_count();
        Matrix h(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) h(i, j) = -0.3 * setup.adjacency(i, j);
        const EvolutionTrace tr = evolve(setup, symmetric_eig(h), time_grid(8.0, 80));
        for (double p : tr.p) CHECK(p == Catch::Approx(1.0 / dim).margin(1e-10));
    }

    SECTION("input validation") {
        SearchSetup setup;
        setup.adjacency = Matrix(3, 3);
        const EigenSystem es = symmetric_eig(Matrix(4, 4));
        CHECK_THROWS_AS(evolve(setup, es, time_grid(1.0, 5)), std::invalid_argument);
        const EigenSystem ok = symmetric_eig(Matrix(3, 3));
        CHECK_THROWS_AS(evolve(setup, ok, std::vector<double>{1.0, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(evolve(setup, ok, std::vector<double>{}), std::invalid_argument);
    }
}

TEST_CASE("marked-vertex search on T(K88) reaches 1 - 2/n") {
    const int n = 8;
    const DenseSearch d = dense_knn_vertex_search(n);
    SearchSetup setup;
    setup.adjacency = d.adjacency;
    setup.marked_index = d.marked;
    setup.gamma = d.report.gamma;
    const EvolutionTrace tr = evolve(setup, d.es_h, time_grid(2.0 * d.report.t_opt, 1501));
    CHECK(tr.p_peak >= 1.0 - 2.0 / n);

    SECTION("two-level model agrees within 3/n") {
        CHECK(std::abs(tr.p_peak - d.report.p_succ) <= 3.0 / n);
    }

    SECTION("norm and probability stay physical") {
        const std::vector<double> psi0 = setup.initial_state();
        for (double t : {0.0, 0.37 * d.report.t_opt, d.report.t_opt}) {
            const auto state = evolve_state(d.es_h, psi0, t);
            double norm = 0;
            for (const auto& z : state) norm += std::norm(z);
            CHECK(norm == Catch::Approx(1.0).margin(1e-10));
        }
        for (double p : tr.p) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("eigenvectors orthogonal to the marked element do not move") {
    const int n = 3;
    const TotalGraph t = total_graph(complete_bipartite(n, n));
    const Matrix a = to_double(t.graph.adjacency());
    const int marked = t.index_of(ElementLabel::vertex(0));
    const double gamma = 0.11;
    const Matrix h = search_hamiltonian(a, gamma, marked);
    const int dim = t.graph.vertex_count();

    SECTION("forward: <w|lambda> = 0 forces an eigenvector of -gamma A") {
        const EigenSystem hs = symmetric_eig(h);
        int checked = 0;
        for (int k = 0; k < dim; ++k) {
            const double* v = hs.vector(k);
            if (std::abs(v[marked]) > 1e-10) continue;
            ++checked;
            const double lam = hs.values[hs.level_of_row(k)];
            double worst = 0;
            for (int i = 0; i < dim; ++i) {
                double row = 0;
                for (int j = 0; j < dim; ++j) row += -gamma * a(i, j) * v[j];
                worst = std::max(worst, std::abs(row - lam * v[i]));
            }
            CHECK(worst < 1e-8);
        }
        CHECK(checked > 0);
    }

    SECTION("backward: a root eigenvector avoiding w is an eigenvector of H") {
        // kernel vectors live on the edge block, so a marked vertex never sees them
        const Matrix rows = incidence_kernel_rows(complete_bipartite(n, n));
        REQUIRE(rows.rows() >= 1);
        std::vector<double> y(dim, 0.0);
        for (std::size_t j = 0; j < rows.cols(); ++j) y[2 * n + j] = rows(0, j);
        const double lam = 2.0 * gamma;  // -gamma * (-2)
        double worst = 0;
        for (int i = 0; i < dim; ++i) {
            double row = 0;
            for (int j = 0; j < dim; ++j) row += h(i, j) * y[j];
            worst = std::max(worst, std::abs(row - lam * y[i]));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("trace rendering") {
    RootAmplitudes ra;
    ra.roots = {1.0, -1.0};
    ra.amplitudes = {0.5, 0.5};
    const EvolutionTrace tr = evolve_with_peak(ra, M_PI, 101);
    CHECK(tr.p.front() == Catch::Approx(1.0).margin(1e-12));
    CHECK(tr.p_peak == Catch::Approx(1.0).margin(1e-9));
    const std::string csv = trace_csv(tr);
    CHECK(csv.rfind("t,re_amp,im_amp,p\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);
}
