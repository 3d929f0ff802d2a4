#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bc/osss.hpp"
#include "bc/rng.hpp"

using namespace bc;
using namespace bc::osss;

namespace {

Region region_1x2() { return Region::from_vertices(2, {make_coord(0, 0), make_coord(1, 0)}); }

}  // namespace

TEST_CASE("domain table sums to one") {
    Domain dom = make_domain(region_1x2(), BoundarySpec::wired1(), ModelParams::rc_tied(0.5, 0.5));
    CHECK(dom.n_coords == 9);
    double s = 0.0;
    for (double w : dom.mu) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dictator equality for product measures") {
    Region reg = region_1x2();
    std::vector<double> probs(9, 0.35);
    Domain dom = make_product_domain(reg, probs);
    MonotoneFn f = fn_dictator(dom, 0);
    DecisionTree t = first_coordinate_tree(dom, 0);
    OsssResult res = osss_inequality_check(dom, f, t);
    CHECK(res.holds);
    // equality: Var = 1 * Cov(d1), other coordinates unrevealed
    CHECK(res.revealment[0] == doctest::Approx(1.0));
    CHECK(res.var == doctest::Approx(res.cov[0]).epsilon(1e-12));
    CHECK(res.var == doctest::Approx(0.35 * 0.65).epsilon(1e-12));
    CHECK(res.rhs == doctest::Approx(res.var).epsilon(1e-12));
}

TEST_CASE("classical OSSS on product measures, random monotone events") {
    Region reg = region_1x2();
    Rng rng(21);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> probs;
        for (int c = 0; c < 9; ++c) probs.push_back(0.2 + 0.6 * rng.uniform());
        Domain dom = make_product_domain(reg, probs);
        auto fam = exact::standard_event_family(dom.n_coords, 4, rng.next_u64());
        MonotoneFn f = fn_from_event(dom, fam[fam.size() - 1 - trial % 4], "rand");
        DecisionTree t = trial % 2 ? lex_tree(dom) : random_admissible_tree(dom, trial);
        OsssResult res = osss_inequality_check(dom, f, t);
        INFO("trial ", trial, " var=", res.var, " rhs=", res.rhs);
        CHECK(res.holds);
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("osss for the dilute random cluster on 1x2") {
    Region reg = region_1x2();
    for (BcKind kind : {BcKind::Free0, BcKind::Wired1}) {
        Domain dom = make_domain(reg, kind == BcKind::Free0 ? BoundarySpec::free0() : BoundarySpec::wired1(),
                                 ModelParams::rc_tied(0.5, 0.5));
        MonotoneFn f = fn_all_vertices_open(dom);
        for (auto tree : {lex_tree(dom), first_coordinate_tree(dom, 1), random_admissible_tree(dom, 7)}) {
            OsssResult res = osss_inequality_check(dom, f, tree);
            INFO(dom.label, " tree=", tree.name);
            CHECK(res.holds);
        }
    }
}

TEST_CASE("osss at the weak-monotonicity threshold on Lambda_1 in d=1") {
    Region reg = Region::box(1, 1);
    double p = 0.5;
    double r = 2.0 * (1.0 - p) / (2.0 - p);
    Domain dom = make_domain(reg, BoundarySpec::wired1(), ModelParams::rc_general(p, 0.5, r));
    MonotoneFn f = fn_connect_origin_boundary(dom);
    DecisionTree t = exploration_tree(dom, 1);
    OsssResult res = osss_inequality_check(dom, f, t);
    INFO("var=", res.var, " rhs=", res.rhs);
    CHECK(res.holds);
}

TEST_CASE("exploration tree admissibility and halting") {
    Region reg = Region::box(2, 1);  // path of 5 vertices
    Domain dom = make_domain(reg, BoundarySpec::wired1(), ModelParams::rc_tied(0.5, 0.5));
    DecisionTree t = exploration_tree(dom, 1);
    // first query is a vertex of dLambda_1
    CHECK(dom.coord_is_vertex(t.first));
    CHECK(std::abs(dom.region.coord(t.first)[0]) == 2);  // ring |x| = k+1

    MonotoneFn f = fn_connect_origin_boundary(dom);
    // all-closed configuration: halts after |dLambda_1| = 2 vertex queries
    TreeRun run = run_decision_tree(dom, t, 0, f);
    CHECK(run.tau == 2);
    for (int i = 0; i < run.tau; ++i)
        CHECK(dom.coord_is_vertex(run.transcript[static_cast<std::size_t>(i)]));

    // early determination on a hand-built open configuration
    std::uint64_t all_open = dom.mu.size() - 1;
    TreeRun run2 = run_decision_tree(dom, t, all_open, f);
    CHECK(run2.tau < dom.n_coords);
}

TEST_CASE("revealment bound of Lemma 8.2 on Lambda_2 in d=1, k=1") {
    Region reg = Region::box(2, 1);
    ModelParams pa = ModelParams::rc_tied(0.45, 0.55);
    Domain dom = make_domain(reg, BoundarySpec::wired1(), pa);
    MonotoneFn f = fn_connect_origin_boundary(dom);
    DecisionTree t = exploration_tree(dom, 1);
    OsssResult res = osss_inequality_check(dom, f, t);
    CHECK(res.holds);
    // revealments in [0,1], first coordinate fully revealed
    for (double d : res.revealment) {
        CHECK(d >= -1e-15);
        CHECK(d <= 1.0 + 1e-15);
    }
    CHECK(res.revealment[static_cast<std::size_t>(t.first)] == doctest::Approx(1.0));

    // mu[v <-> dLambda_1] per combined vertex by direct summation
    std::vector<int> ring;
    for (int u = 0; u < reg.n_interior(); ++u)
        if (std::abs(reg.coord(u)[0]) == 2) ring.push_back(u);
    auto conn_ring = [&](int v) {
        double acc = 0.0;
        for (std::uint64_t b = 0; b < dom.mu.size(); ++b) {
            if (dom.mu[b] == 0.0) continue;
            for (int u : ring) {
                if (dom.connected_bits(b, v, u)) {
                    acc += dom.mu[b];
                    break;
                }
            }
        }
        return acc;
    };
    int ni = reg.n_interior();
    for (int e = 0; e < reg.n_edges(); ++e) {
        const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
        double bound = conn_ring(ed.a) + conn_ring(ed.b);
        INFO("edge ", e);
        CHECK(res.revealment[static_cast<std::size_t>(ni + e)] <= bound + 1e-12);
    }
}

TEST_CASE("non-admissible trees rejected") {
    Region reg = region_1x2();
    Domain dom = make_domain(reg, BoundarySpec::free0(), ModelParams::rc_tied(0.5, 0.5));
    CHECK_THROWS(first_coordinate_tree(dom, dom.region.n_interior()));  // an edge coordinate
}

TEST_CASE("weak monotonicity holds at and above the threshold") {
    Region reg = region_1x2();
    double p = 0.5;
    {
        WeakMonotonicityReport rep = check_weak_monotonicity(
            reg, BoundarySpec::wired1(), ModelParams::rc_general(p, 0.5, 2.0 / 3.0));
        CHECK(rep.threshold_satisfied);
        CHECK(rep.r_threshold == doctest::Approx(2.0 / 3.0));
        INFO(rep.report.worst_case);
        CHECK(rep.report.violations == 0);
    }
    {
        WeakMonotonicityReport rep =
            check_weak_monotonicity(reg, BoundarySpec::free0(), ModelParams::rc_tied(p, 0.5));
        CHECK(rep.threshold_satisfied);  // sqrt(1-p) >= 2(1-p)/(2-p) always
        CHECK(rep.report.violations == 0);
    }
    {
        // far below the threshold: report-only, violations may appear
        WeakMonotonicityReport rep = check_weak_monotonicity(
            reg, BoundarySpec::wired1(), ModelParams::rc_general(p, 0.5, 0.05));
        CHECK(!rep.threshold_satisfied);
        CHECK(rep.report.n_checked > 0);
    }
    CHECK_THROWS_AS(check_weak_monotonicity(Region::rect(0, 1, 0, 1), BoundarySpec::free0(),
                                            ModelParams::rc_tied(0.5, 0.5)),
                    exact::InstanceTooLarge);
}

TEST_CASE("sharp threshold and derivative identities on Lambda_1 in d=1") {
    ModelParams pa = ModelParams::rc_general(0.5, 0.5, 2.0 / 3.0);
    SharpThresholdReport rep = sharp_threshold_check(1, 1, pa, BoundarySpec::wired1());
    CHECK(rep.holds);
    CHECK(rep.q_n == doctest::Approx(rep.q_n_second_pass).epsilon(1e-15));
    for (const auto& d : rep.derivatives) {
        INFO(d.name, " formula=", d.formula, " fd=", d.fd);
        CHECK(d.err <= 1e-6);
    }
}

TEST_CASE("sharp threshold rejects Lambda_2 in d=2") {
    ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
    CHECK_THROWS_AS(sharp_threshold_check(2, 2, pa, BoundarySpec::wired1()), exact::InstanceTooLarge);
}

TEST_CASE("mc revealment estimate tracks the exact one") {
    Region reg = Region::box(1, 1);
    Domain dom = make_domain(reg, BoundarySpec::wired1(), ModelParams::rc_tied(0.5, 0.5));
    MonotoneFn f = fn_connect_origin_boundary(dom);
    DecisionTree t = exploration_tree(dom, 1);
    OsssResult exact_res = osss_inequality_check(dom, f, t);
    auto est = estimate_revealments(dom, t, f, 20000, 42);
    for (int c = 0; c < dom.n_coords; ++c) {
        double rc = exact_res.revealment[static_cast<std::size_t>(c)];
        double se = std::sqrt(std::max(0.0, rc * (1 - rc)) / 20000.0) + 1e-9;
        CHECK(std::fabs(est[static_cast<std::size_t>(c)] - rc) <= 5 * se + 0.01);
    }
}
