#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "bc/lattice.hpp"
#include "bc/rng.hpp"

using namespace bc;

TEST_CASE("box region counts") {
    Region r0 = Region::box(0, 2);
    CHECK(r0.n_interior() == 1);
    CHECK(r0.n_boundary() == 4);
    CHECK(r0.n_edges() == 4);
    CHECK(r0.n_interior_edges() == 0);

    Region r1 = Region::box(1, 2);
    CHECK(r1.n_interior() == 9);
    CHECK(r1.n_interior_edges() == 12);
    CHECK(r1.n_edges() - r1.n_interior_edges() == 12);
    CHECK(r1.n_boundary() == 12);

    Region p = Region::box(1, 1);
    CHECK(p.n_interior() == 3);
    CHECK(p.n_interior_edges() == 2);
    CHECK(p.n_edges() - p.n_interior_edges() == 2);

    for (int n = 0; n <= 3; ++n) {
        Region b = Region::box(n, 2);
        CHECK(b.n_interior() == (2 * n + 1) * (2 * n + 1));
    }
    Region b3 = Region::box(1, 3);
    CHECK(b3.n_interior() == 27);
}

TEST_CASE("box region rejects bad input") {
    CHECK_THROWS(Region::box(1, 0));
    CHECK_THROWS(Region::box(-1, 2));
    CHECK_THROWS(Region::box(40000, 3));  // overflows the index type
}

TEST_CASE("edge partition invariants") {
    Region r = Region::box(2, 2);
    int interior = 0, boundary = 0;
    for (const RegionEdge& e : r.edges()) {
        bool a_in = r.is_interior(e.a), b_in = r.is_interior(e.b);
        CHECK(a_in);  // e.a < e.b and boundary indices come last
        if (e.interior) {
            CHECK(b_in);
            ++interior;
        } else {
            CHECK(!b_in);
            ++boundary;
        }
    }
    CHECK(interior == r.n_interior_edges());
    CHECK(interior + boundary == r.n_edges());
    // boundary vertices each have a neighbour inside
    for (int v = r.n_interior(); v < r.n_total(); ++v) {
        bool has_inner = false;
        for (auto [eid, w] : r.incident(v)) {
            (void)eid;
            has_inner = has_inner || r.is_interior(w);
        }
        CHECK(has_inner);
    }
}

TEST_CASE("dual edge geometry and involution") {
    PrimalEdge h{0, 0, 0};
    DualEdge dh = dual_of(h);
    CHECK(dh == DualEdge{0, -1, 1});  // cells (0,-1)-(0,0): dual sites (1/2,-1/2),(1/2,1/2)
    PrimalEdge v{0, 0, 1};
    DualEdge dv = dual_of(v);
    CHECK(dv == DualEdge{-1, 0, 0});  // cells (-1,0)-(0,0): dual sites (-1/2,1/2),(1/2,1/2)

    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        PrimalEdge e{static_cast<int>(rng.below(21)) - 10, static_cast<int>(rng.below(21)) - 10,
                     static_cast<int>(rng.below(2))};
        CHECK(primal_of(dual_of(e)) == e);
    }
    // bijection on a window: all dual edges of distinct primal edges distinct
    std::set<DualEdge> seen;
    for (int x = -3; x <= 3; ++x)
        for (int y = -3; y <= 3; ++y)
            for (int ax = 0; ax < 2; ++ax) CHECK(seen.insert(dual_of(PrimalEdge{x, y, ax})).second);
}

TEST_CASE("lift graph counts") {
    Graph single{1, {}};
    EnlargedGraph l1 = lift_graph(single);
    CHECK(l1.n() == 2);
    CHECK(l1.e1.size() == 0);
    CHECK(l1.e2.size() == 1);

    Graph edge{2, {{0, 1}}};
    EnlargedGraph l2 = lift_graph(edge);
    CHECK(l2.n() == 4);
    CHECK(l2.e1.size() == 4);
    CHECK(l2.e2.size() == 2);

    // 2x2 box: 4 vertices, 4 edges
    Graph box{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}};
    EnlargedGraph l3 = lift_graph(box);
    CHECK(l3.n() == 8);
    CHECK(l3.e1.size() == 16);
    CHECK(l3.e2.size() == 4);

    // random graphs against the closed-form counts
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        int n = 2 + static_cast<int>(rng.below(5));
        Graph g;
        g.n = n;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng.bernoulli(0.5)) g.edges.emplace_back(a, b);
        EnlargedGraph l = lift_graph(g);
        CHECK(l.n() == 2 * n);
        CHECK(l.e1.size() == 4 * g.edges.size());
        CHECK(l.e2.size() == static_cast<std::size_t>(n));
        // every base edge yields exactly the four lifted copies
        std::set<std::pair<int, int>> e1set(l.e1.begin(), l.e1.end());
        for (auto [a, b] : g.edges)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(e1set.count({EnlargedGraph::lift_index(a, i), EnlargedGraph::lift_index(b, j)}));
    }
}

TEST_CASE("site animals") {
    auto animals = site_animals_2d(5);
    int c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
    for (const auto& a : animals) {
        switch (a.size()) {
            case 1: ++c1; break;
            case 2: ++c2; break;
            case 3: ++c3; break;
            case 4: ++c4; break;
            case 5: ++c5; break;
        }
    }
    CHECK(c1 == 1);
    CHECK(c2 == 2);
    CHECK(c3 == 6);
    CHECK(c4 == 19);
    CHECK(c5 == 63);
}

TEST_CASE("connected graphs up to iso") {
    auto gs = connected_graphs_upto(4);
    int n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    for (const auto& g : gs) {
        if (g.n == 1) ++n1;
        if (g.n == 2) ++n2;
        if (g.n == 3) ++n3;
        if (g.n == 4) ++n4;
    }
    CHECK(n1 == 1);
    CHECK(n2 == 1);
    CHECK(n3 == 2);
    CHECK(n4 == 6);
}

TEST_CASE("region descriptor json") {
    CHECK(Region::box(3, 2).descriptor() == "{\"dim\":2,\"shape\":\"box\",\"n\":3}");
    Region custom = Region::from_vertices(2, {make_coord(0, 0), make_coord(1, 0)});
    CHECK(custom.descriptor() == "{\"dim\":2,\"vertices\":[[0,0],[1,0]]}");
}
