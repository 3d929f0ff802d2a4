#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "bc/crossing.hpp"
#include "bc/rng.hpp"
#include "bc/sampler.hpp"

using namespace bc;
using namespace bc::crossing;

namespace {

using EdgeMap = std::map<std::tuple<int, int, int>, bool>;

EdgeState from_map(const EdgeMap& m) {
    return [&m](int x, int y, int axis) {
        auto it = m.find({x, y, axis});
        return it != m.end() && it->second;
    };
}

EdgeState constant(bool v) {
    return [v](int, int, int) { return v; };
}

// independent circuit oracle: enumerate simple cycles in the open annulus
// subgraph and test the winding number around the origin
struct CircuitOracle {
    int n;
    std::map<Coord, std::vector<Coord>> adj;

    CircuitOracle(int n_, const EdgeState& open) : n(n_) {
        auto in_annulus = [&](int x, int y) {
            int m = std::max(std::abs(x), std::abs(y));
            return m >= n && m <= 2 * n;
        };
        for (int x = -2 * n; x <= 2 * n; ++x) {
            for (int y = -2 * n; y <= 2 * n; ++y) {
                for (int axis = 0; axis < 2; ++axis) {
                    int x2 = axis == 0 ? x + 1 : x;
                    int y2 = axis == 1 ? y + 1 : y;
                    if (!in_annulus(x, y) || !in_annulus(x2, y2)) continue;
                    if (!open(x, y, axis)) continue;
                    Coord a = make_coord(x, y), b = make_coord(x2, y2);
                    adj[a].push_back(b);
                    adj[b].push_back(a);
                }
            }
        }
    }

    static double winding(const std::vector<Coord>& cycle) {
        double total = 0.0;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const Coord& a = cycle[i];
            const Coord& b = cycle[(i + 1) % cycle.size()];
            double a1 = std::atan2(a[1], a[0]);
            double a2 = std::atan2(b[1], b[0]);
            double d = a2 - a1;
            while (d > 3.14159265358979) d -= 2 * 3.14159265358979323846;
            while (d < -3.14159265358979) d += 2 * 3.14159265358979323846;
            total += d;
        }
        return total / (2 * 3.14159265358979323846);
    }

    bool dfs(std::vector<Coord>& path, std::set<Coord>& on_path, const Coord& start, long& budget) {
        if (--budget < 0) throw std::runtime_error("oracle budget exceeded");
        const Coord& cur = path.back();
        for (const Coord& nxt : adj[cur]) {
            if (nxt == start && path.size() >= 4) {
                if (std::fabs(std::fabs(winding(path)) - 1.0) < 0.01) return true;
                continue;
            }
            if (on_path.count(nxt)) continue;
            path.push_back(nxt);
            on_path.insert(nxt);
            if (dfs(path, on_path, start, budget)) return true;
            on_path.erase(nxt);
            path.pop_back();
        }
        return false;
    }

    bool has_surrounding_circuit() {
        long budget = 4000000;
        for (auto& [v, nb] : adj) {
            (void)nb;
            std::vector<Coord> path{v};
            std::set<Coord> on_path{v};
            if (dfs(path, on_path, v, budget)) return true;
        }
        return false;
    }
};

}  // namespace

TEST_CASE("crossing detectors, trivial configurations") {
    Rect r{0, 4, 0, 3};
    CHECK(horizontal_crossing(r, constant(true)));
    CHECK(vertical_crossing(r, constant(true)));
    CHECK(!horizontal_crossing(r, constant(false)));
    // all closed: the dual crossing occurs
    CHECK(dual_blocks_vertical(r, constant(false)));
    CHECK(dual_blocks_horizontal(r, constant(false)));
    CHECK(!dual_blocks_vertical(r, constant(true)));

    // a single open horizontal path spanning the rectangle
    EdgeMap m;
    for (int x = 0; x < 4; ++x) m[{x, 2, 0}] = true;
    CHECK(horizontal_crossing(r, from_map(m)));
    // removing any one of its edges destroys the crossing
    for (int x = 0; x < 4; ++x) {
        EdgeMap broken = m;
        broken[{x, 2, 0}] = false;
        CHECK(!horizontal_crossing(r, from_map(broken)));
    }
}

TEST_CASE("duality: exactly one of the crossing and its dual complement") {
    Rng rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        int w = 1 + static_cast<int>(rng.below(5));
        int h = 1 + static_cast<int>(rng.below(5));
        Rect r{0, w, 0, h};
        double p = rng.uniform();
        EdgeMap m;
        for (int x = -1; x <= w + 1; ++x)
            for (int y = -1; y <= h + 1; ++y)
                for (int axis = 0; axis < 2; ++axis) m[{x, y, axis}] = rng.bernoulli(p);
        EdgeState open = from_map(m);
        CHECK(vertical_crossing(r, open) != dual_blocks_vertical(r, open));
        CHECK(horizontal_crossing(r, open) != dual_blocks_horizontal(r, open));
    }
}

TEST_CASE("circuits, trivial configurations") {
    for (int n : {1, 2, 3}) {
        CHECK(primal_circuit(n, constant(true)));
        CHECK(!dual_circuit(n, constant(true)));
        CHECK(!primal_circuit(n, constant(false)));
        CHECK(dual_circuit(n, constant(false)));
    }
    // an explicit full square ring of open edges at radius 3n/2
    int n = 2;
    int rad = 3;
    EdgeMap m;
    for (int x = -rad; x < rad; ++x) {
        m[{x, -rad, 0}] = true;
        m[{x, rad, 0}] = true;
    }
    for (int y = -rad; y < rad; ++y) {
        m[{-rad, y, 1}] = true;
        m[{rad, y, 1}] = true;
    }
    CHECK(primal_circuit(n, from_map(m)));
    // the lone ring connects nothing radially, so the dual circuit survives
    CHECK(dual_circuit(n, from_map(m)));
}

TEST_CASE("circuit detector agrees with the winding-number oracle") {
    Rng rng(7);
    int n = 1;
    for (int trial = 0; trial < 120; ++trial) {
        double p = 0.3 + 0.5 * rng.uniform();
        EdgeMap m;
        for (int x = -2 * n - 1; x <= 2 * n + 1; ++x)
            for (int y = -2 * n - 1; y <= 2 * n + 1; ++y)
                for (int axis = 0; axis < 2; ++axis) m[{x, y, axis}] = rng.bernoulli(p);
        EdgeState open = from_map(m);
        CircuitOracle oracle(n, open);
        CHECK(primal_circuit(n, open) == oracle.has_surrounding_circuit());
    }
}

TEST_CASE("dual circuit complements the primal connection exactly") {
    Rng rng(13);
    for (int n : {1, 2}) {
        for (int trial = 0; trial < 150; ++trial) {
            double p = rng.uniform();
            EdgeMap m;
            for (int x = -2 * n - 1; x <= 2 * n + 1; ++x)
                for (int y = -2 * n - 1; y <= 2 * n + 1; ++y)
                    for (int axis = 0; axis < 2; ++axis) m[{x, y, axis}] = rng.bernoulli(p);
            EdgeState open = from_map(m);
            CHECK(dual_circuit(n, open) == !annulus_primal_connection(n, open));
            CHECK(primal_circuit(n, open) == !annulus_dual_connection(n, open));
        }
    }
}

TEST_CASE("detectors on region configurations, error paths") {
    Region reg = Region::box(3, 2);
    ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
    ResolvedBc rbc = resolve_bc(reg, BoundarySpec::free0(), pa);
    RcConfig theta;
    theta.psi.assign(static_cast<std::size_t>(reg.n_interior()), 1);
    theta.omega.assign(static_cast<std::size_t>(reg.n_edges()), 1);
    CrossingSpec cs;
    cs.rect = Rect{-2, 2, -2, 2};
    cs.horizontal = true;
    CHECK(detect_crossing(reg, theta, rbc, cs));
    cs.rect = Rect{-5, 5, -2, 2};
    CHECK_THROWS(detect_crossing(reg, theta, rbc, cs));

    CHECK_THROWS(detect_circuit(reg, theta, 2, Mode::PrimalOpen));  // needs Lambda_4
    // boundaries excluded, recompile the configuration on Lambda_2's worth
    Region reg2 = Region::box(2, 2);
    RcConfig all_open;
    all_open.psi.assign(static_cast<std::size_t>(reg2.n_interior()), 1);
    all_open.omega.assign(static_cast<std::size_t>(reg2.n_edges()), 1);
    RcConfig all_closed = all_open;
    std::fill(all_closed.omega.begin(), all_closed.omega.end(), 0);
    CHECK(detect_circuit(reg2, all_open, 1, Mode::PrimalOpen));
    CHECK(!detect_circuit(reg2, all_open, 1, Mode::DualOpen));
    CHECK(detect_circuit(reg2, all_closed, 1, Mode::DualOpen));
    CHECK(!detect_circuit(reg2, all_closed, 1, Mode::PrimalOpen));
}

TEST_CASE("spin-set crossings") {
    Region reg = Region::box(2, 2);
    SpinConfig sigma(static_cast<std::size_t>(reg.n_interior()), 0);
    CrossingSpec cs;
    cs.rect = Rect{-2, 2, -2, 2};
    cs.mode = Mode::SpinSet;
    cs.spin_set = {true, true, false};  // {-1, 0}
    cs.horizontal = true;
    CHECK(detect_crossing_spins(reg, sigma, cs));  // all zeros cross
    cs.spin_set = {false, false, true};            // {+1}
    CHECK(!detect_crossing_spins(reg, sigma, cs));

    // a diagonal chain of +1 crosses only under *-adjacency
    for (int i = -2; i <= 2; ++i) {
        int v = reg.index_of(make_coord(i, i));
        sigma[static_cast<std::size_t>(v)] = +1;
    }
    cs.spin_set = {false, false, true};
    cs.star_adjacency = false;
    CHECK(!detect_crossing_spins(reg, sigma, cs));
    cs.star_adjacency = true;
    CHECK(detect_crossing_spins(reg, sigma, cs));
}

TEST_CASE("estimate_event at near-deterministic densities") {
    // a=1, p=0.99, wired: crossings nearly certain at n=8
    {
        ModelParams pa = params_from_rc(0.99, 1.0, Convention::ActivityE);
        EventSpec ev;
        ev.crossing.rect = Rect{-8, 8, -8, 8};
        SamplingPlan plan;
        plan.n_samples = 400;
        plan.burn_in = 50;
        plan.seed = 5;
        Estimate e = estimate_event(pa, BoundarySpec::wired1(), ev, 8, plan);
        CHECK(e.mean >= 0.99);
    }
    // p=0.01, a=0.5: sparse phase
    {
        ModelParams pa = params_from_rc(0.01, 0.5, Convention::ActivityE);
        EventSpec ev;
        ev.crossing.rect = Rect{-8, 8, -8, 8};
        SamplingPlan plan;
        plan.n_samples = 400;
        plan.burn_in = 50;
        plan.seed = 6;
        Estimate e = estimate_event(pa, BoundarySpec::free0(), ev, 8, plan);
        CHECK(e.mean <= 0.01);
    }
}

TEST_CASE("per-sample duality and pi/2 symmetry at the FK-Ising point") {
    double psd = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    ModelParams pa = params_from_rc(psd, 1.0, Convention::ActivityE);
    int n = 6;
    Region reg = Region::box(2 * n, 2);
    Rect square{-n, n, -n, n};

    std::vector<int> all_edges(static_cast<std::size_t>(reg.n_edges()));
    for (int e = 0; e < reg.n_edges(); ++e) all_edges[static_cast<std::size_t>(e)] = e;
    long vcross = 0, hcross = 0, samples = 0;
    std::vector<std::uint8_t> omega;
    std::map<std::tuple<int, int, int>, int> slot;
    for (int e = 0; e < reg.n_edges(); ++e) {
        const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
        Coord lo = std::min(reg.coord(ed.a), reg.coord(ed.b));
        slot[{lo[0], lo[1], ed.axis}] = e;
    }
    mc::run_spin_samples(reg, BoundarySpec::wired1(), pa, 600, 100, 1, 999, [&](mc::SpinChain& c) {
        c.project_omega(all_edges, omega);
        auto open = [&](int x, int y, int axis) {
            auto it = slot.find({x, y, axis});
            return it != slot.end() && omega[static_cast<std::size_t>(it->second)] != 0;
        };
        bool v = vertical_crossing(square, open);
        bool dv = dual_blocks_vertical(square, open);
        CHECK(v != dv);
        bool h = horizontal_crossing(square, open);
        vcross += v;
        hcross += h;
        ++samples;
    });
    double ph = static_cast<double>(hcross) / samples;
    double pv = static_cast<double>(vcross) / samples;
    double se = std::sqrt(2.0 * 0.25 / samples);
    CHECK(std::fabs(ph - pv) <= 5 * se + 0.1);
}

TEST_CASE("monotonicity in the boundary condition") {
    double psd = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    ModelParams pa = params_from_rc(psd, 1.0, Convention::ActivityE);
    EventSpec ev;
    ev.crossing.rect = Rect{-6, 6, -6, 6};
    SamplingPlan plan;
    plan.n_samples = 1500;
    plan.burn_in = 100;
    plan.seed = 21;
    Estimate wired = estimate_event(pa, BoundarySpec::wired1(), ev, 6, plan);
    plan.seed = 22;
    Estimate free = estimate_event(pa, BoundarySpec::free0(), ev, 6, plan);
    double se = std::sqrt(wired.stderr_ * wired.stderr_ + free.stderr_ * free.stderr_);
    CHECK(free.mean <= wired.mean + 3 * se);
}

TEST_CASE("strip density proxies at extreme densities") {
    ModelParams pa = params_from_rc(0.95, 1.0, Convention::ActivityE);
    SamplingPlan plan;
    plan.n_samples = 300;
    plan.burn_in = 50;
    plan.seed = 31;
    StripDensity sd = strip_density_proxy(pa, 4, 4, /*which_p=*/true, plan);
    CHECK(sd.proxy > 0.9);  // crossings certain: proxy near 1
    StripDensity qd = strip_density_proxy(pa, 4, 4, /*which_p=*/false, plan);
    CHECK(qd.proxy < 0.5);  // dual crossings impossible at p near 1
    CHECK(qd.degenerate);
}

TEST_CASE("event labels") {
    EventSpec ev;
    ev.crossing.rect = Rect{-4, 4, -4, 4};
    CHECK(ev.label() == "H[-4,4]x[-4,4]");
    ev.kind = EventSpec::Kind::Circuit;
    ev.circuit_n = 3;
    ev.circuit_mode = Mode::DualOpen;
    CHECK(ev.label() == "C*_3");
}
