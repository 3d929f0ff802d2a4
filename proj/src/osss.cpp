#include "bc/osss.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bc/rng.hpp"
#include "bc/unionfind.hpp"

namespace bc::osss {

namespace {

constexpr int kMaxTableCoords = 22;

std::vector<int> ring_vertices(const Region& reg, int k) {
    // dLambda_k: outside Lambda_k, adjacent to it, i.e. exactly one
    // coordinate at k+1 in modulus and the rest within [-k, k]
    std::vector<int> out;
    for (int v = 0; v < reg.n_interior(); ++v) {
        const Coord& c = reg.coord(v);
        int at_edge = 0, inside = 0;
        for (int i = 0; i < reg.dim(); ++i) {
            int a = std::abs(c[static_cast<std::size_t>(i)]);
            if (a == k + 1) ++at_edge;
            else if (a <= k) ++inside;
        }
        if (at_edge == 1 && at_edge + inside == reg.dim()) out.push_back(v);
    }
    return out;
}

}  // namespace

bool Domain::vertex_open_bits(std::uint64_t bits, int v) const {
    return v < region.n_interior() ? ((bits >> v) & 1) != 0
                                   : rbc.open[static_cast<std::size_t>(v - region.n_interior())] != 0;
}

namespace {

void build_bits_uf(const Domain& dom, std::uint64_t bits, UnionFind& uf) {
    const Region& region = dom.region;
    const ResolvedBc& rbc = dom.rbc;
    int ni = region.n_interior();
    uf.reset(region.n_total());
    for (int e = 0; e < region.n_edges(); ++e) {
        if (!((bits >> (ni + e)) & 1)) continue;
        const RegionEdge& ed = region.edges()[static_cast<std::size_t>(e)];
        if (dom.vertex_open_bits(bits, ed.a) && dom.vertex_open_bits(bits, ed.b)) uf.unite(ed.a, ed.b);
    }
    std::vector<int> first_cls(static_cast<std::size_t>(rbc.n_classes), -1);
    for (int i = 0; i < region.n_boundary(); ++i) {
        if (!rbc.open[static_cast<std::size_t>(i)]) continue;
        int c = rbc.wire_class[static_cast<std::size_t>(i)];
        if (first_cls[static_cast<std::size_t>(c)] < 0) first_cls[static_cast<std::size_t>(c)] = ni + i;
        else uf.unite(first_cls[static_cast<std::size_t>(c)], ni + i);
    }
}

}  // namespace

bool Domain::connected_to_open_boundary(std::uint64_t bits, int v) const {
    if (!vertex_open_bits(bits, v)) return false;
    UnionFind uf;
    build_bits_uf(*this, bits, uf);
    int ni = region.n_interior();
    for (int i = 0; i < region.n_boundary(); ++i)
        if (rbc.open[static_cast<std::size_t>(i)] && uf.connected(v, ni + i)) return true;
    return false;
}

bool Domain::connected_bits(std::uint64_t bits, int u, int v) const {
    if (!vertex_open_bits(bits, u) || !vertex_open_bits(bits, v)) return false;
    if (u == v) return true;
    UnionFind uf;
    build_bits_uf(*this, bits, uf);
    return uf.connected(u, v);
}

Domain make_domain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa) {
    Domain dom{reg, resolve_bc(reg, bc, pa), pa, 0, {}, ""};
    dom.n_coords = reg.n_interior() + reg.n_edges();
    dom.label = reg.descriptor() + " bc=" + bc.label();
    if (dom.n_coords > kMaxTableCoords)
        throw exact::InstanceTooLarge("osss domain: " + std::to_string(dom.n_coords) + " coordinates",
                                      std::ldexp(1.0, dom.n_coords));
    dom.mu.assign(static_cast<std::size_t>(1) << dom.n_coords, 0.0);
    double z = 0.0;
    int ni = reg.n_interior();
    exact::enumerate_rc(reg, dom.rbc, pa, [&](const exact::RcEnumState& st) {
        std::uint64_t bits = st.psi_mask;
        for (std::size_t j = 0; j < st.live_edges.size(); ++j)
            if ((st.omega_bits >> j) & 1) bits |= 1ull << (ni + st.live_edges[j]);
        double w = std::exp(st.logw);
        dom.mu[bits] += w;
        z += w;
    });
    for (double& x : dom.mu) x /= z;
    return dom;
}

Domain make_product_domain(const Region& reg, std::span<const double> probs) {
    ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
    Domain dom{reg, resolve_bc(reg, BoundarySpec::free0(), pa), pa, 0, {}, "product"};
    dom.n_coords = reg.n_interior() + reg.n_edges();
    if (dom.n_coords > kMaxTableCoords || probs.size() != static_cast<std::size_t>(dom.n_coords))
        throw std::invalid_argument("make_product_domain: bad size");
    dom.mu.assign(static_cast<std::size_t>(1) << dom.n_coords, 0.0);
    for (std::uint64_t b = 0; b < dom.mu.size(); ++b) {
        double w = 1.0;
        for (int c = 0; c < dom.n_coords; ++c)
            w *= ((b >> c) & 1) ? probs[static_cast<std::size_t>(c)] : 1.0 - probs[static_cast<std::size_t>(c)];
        dom.mu[b] = w;
    }
    return dom;
}

MonotoneFn fn_from_event(const Domain& dom, const exact::MonotoneEvent& ev, const std::string& name) {
    MonotoneFn f;
    f.name = name;
    f.table.resize(dom.mu.size());
    for (std::uint64_t b = 0; b < f.table.size(); ++b) f.table[b] = ev.contains(b) ? 1.0 : 0.0;
    return f;
}

MonotoneFn fn_dictator(const Domain& dom, int coord) {
    MonotoneFn f;
    f.name = "dictator#" + std::to_string(coord);
    f.table.resize(dom.mu.size());
    for (std::uint64_t b = 0; b < f.table.size(); ++b) f.table[b] = (b >> coord) & 1 ? 1.0 : 0.0;
    return f;
}

MonotoneFn fn_connect_origin_boundary(const Domain& dom) {
    MonotoneFn f;
    f.name = "0<->dLambda";
    int origin = dom.region.index_of(make_coord(0));
    f.table.resize(dom.mu.size());
    for (std::uint64_t b = 0; b < f.table.size(); ++b)
        f.table[b] = dom.connected_to_open_boundary(b, origin) ? 1.0 : 0.0;
    return f;
}

MonotoneFn fn_all_vertices_open(const Domain& dom) {
    MonotoneFn f;
    f.name = "all-vertices-open";
    std::uint64_t mask = (1ull << dom.region.n_interior()) - 1;
    f.table.resize(dom.mu.size());
    for (std::uint64_t b = 0; b < f.table.size(); ++b) f.table[b] = (b & mask) == mask ? 1.0 : 0.0;
    return f;
}

MonotoneFn fn_open_fraction(const Domain& dom) {
    MonotoneFn f;
    f.name = "open-fraction";
    f.table.resize(dom.mu.size());
    for (std::uint64_t b = 0; b < f.table.size(); ++b)
        f.table[b] = static_cast<double>(std::popcount(b)) / dom.n_coords;
    return f;
}

// ---------------------------------------------------------------------------
// decision trees
// ---------------------------------------------------------------------------

namespace {

struct Replay {
    std::vector<std::int8_t> state;  // per coordinate: -1 unqueried, else bit
    Replay(const Domain& dom, std::span<const int> hist, std::span<const std::uint8_t> bits)
        : state(static_cast<std::size_t>(dom.n_coords), -1) {
        for (std::size_t i = 0; i < hist.size(); ++i)
            state[static_cast<std::size_t>(hist[i])] = static_cast<std::int8_t>(bits[i]);
    }
    bool queried(int c) const { return state[static_cast<std::size_t>(c)] >= 0; }
    bool open(int c) const { return state[static_cast<std::size_t>(c)] == 1; }
};

// admissibility: an edge may be queried only after its interior endpoints
bool edge_admissible(const Region& reg, const Replay& rp, int edge) {
    const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(edge)];
    if (reg.is_interior(ed.a) && !rp.queried(ed.a)) return false;
    if (reg.is_interior(ed.b) && !rp.queried(ed.b)) return false;
    return true;
}

}  // namespace

DecisionTree exploration_tree(const Domain& dom, int k) {
    const Region& reg = dom.region;
    if (!reg.is_box) throw std::invalid_argument("exploration_tree: box regions only");
    int n = reg.box_n;
    if (k < 1 || k > n) throw std::invalid_argument("exploration_tree: k must be in [1, n]");
    bool seed_is_boundary = k == n;
    std::vector<int> ring = seed_is_boundary ? std::vector<int>{} : ring_vertices(reg, k);
    if (!seed_is_boundary && ring.empty()) throw std::invalid_argument("exploration_tree: empty ring");

    int ni = reg.n_interior();
    const Domain* domp = &dom;

    DecisionTree t;
    t.name = "T(" + std::to_string(k) + ")";
    if (seed_is_boundary) {
        int first = -1;
        for (int v = 0; v < ni && first < 0; ++v)
            for (auto [eid, w] : reg.incident(v)) {
                (void)eid;
                if (!reg.is_interior(w) && dom.rbc.open[static_cast<std::size_t>(w - ni)]) {
                    first = v;
                    break;
                }
            }
        t.first = first < 0 ? 0 : first;
    } else {
        t.first = ring.front();
    }

    t.next = [domp, ring, seed_is_boundary, ni](std::span<const int> hist,
                                                std::span<const std::uint8_t> bits) -> int {
        const Domain& d = *domp;
        const Region& reg = d.region;
        const ResolvedBc& rbc = d.rbc;
        Replay rp(d, hist, bits);
        // phase 1: the ring vertices, lexicographic
        for (int v : ring)
            if (!rp.queried(v)) return v;
        // phase 2: edges inside the ring among open vertices
        if (!seed_is_boundary) {
            std::vector<char> in_ring(static_cast<std::size_t>(reg.n_total()), 0);
            for (int v : ring) in_ring[static_cast<std::size_t>(v)] = 1;
            for (int e = 0; e < reg.n_edges(); ++e) {
                const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
                if (!in_ring[static_cast<std::size_t>(ed.a)] || !in_ring[static_cast<std::size_t>(ed.b)])
                    continue;
                if (rp.open(ed.a) && rp.open(ed.b) && !rp.queried(ni + e)) return ni + e;
            }
        }
        // cluster structure over known-open vertices and queried-open edges
        auto vertex_known_open = [&](int v) {
            return v < ni ? rp.open(v) : rbc.open[static_cast<std::size_t>(v - ni)] != 0;
        };
        UnionFind uf(reg.n_total());
        for (int e = 0; e < reg.n_edges(); ++e) {
            if (!rp.queried(ni + e) || !rp.open(ni + e)) continue;
            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
            if (vertex_known_open(ed.a) && vertex_known_open(ed.b)) uf.unite(ed.a, ed.b);
        }
        std::vector<int> first_cls(static_cast<std::size_t>(rbc.n_classes), -1);
        for (int i = 0; i < reg.n_boundary(); ++i) {
            if (!rbc.open[static_cast<std::size_t>(i)]) continue;
            int c = rbc.wire_class[static_cast<std::size_t>(i)];
            if (first_cls[static_cast<std::size_t>(c)] < 0) first_cls[static_cast<std::size_t>(c)] = ni + i;
            else uf.unite(first_cls[static_cast<std::size_t>(c)], ni + i);
        }
        std::vector<char> in_c(static_cast<std::size_t>(reg.n_total()), 0);
        {
            std::vector<int> roots;
            if (seed_is_boundary) {
                for (int i = 0; i < reg.n_boundary(); ++i)
                    if (rbc.open[static_cast<std::size_t>(i)]) roots.push_back(uf.find(ni + i));
            } else {
                for (int v : ring)
                    if (rp.open(v)) roots.push_back(uf.find(v));
            }
            std::sort(roots.begin(), roots.end());
            roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
            for (int v = 0; v < reg.n_total(); ++v) {
                if (!vertex_known_open(v)) continue;
                if (std::binary_search(roots.begin(), roots.end(), uf.find(v)))
                    in_c[static_cast<std::size_t>(v)] = 1;
            }
        }
        // phase 3: growth edges joining the cluster set to a known-open
        // vertex outside it
        for (int e = 0; e < reg.n_edges(); ++e) {
            if (rp.queried(ni + e)) continue;
            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
            if (reg.is_interior(ed.a) && !rp.queried(ed.a)) continue;
            if (reg.is_interior(ed.b) && !rp.queried(ed.b)) continue;
            if (!vertex_known_open(ed.a) || !vertex_known_open(ed.b)) continue;
            if (in_c[static_cast<std::size_t>(ed.a)] != in_c[static_cast<std::size_t>(ed.b)]) return ni + e;
        }
        // phase 4: unqueried vertices adjacent to the cluster set
        for (int v = 0; v < ni; ++v) {
            if (rp.queried(v)) continue;
            for (auto [eid, w] : reg.incident(v)) {
                (void)eid;
                if (in_c[static_cast<std::size_t>(w)]) return v;
            }
        }
        // exploration finished: lexicographic admissible continuation
        for (int v = 0; v < ni; ++v)
            if (!rp.queried(v)) return v;
        for (int e = 0; e < reg.n_edges(); ++e)
            if (!rp.queried(ni + e) && edge_admissible(reg, rp, e)) return ni + e;
        return -1;
    };
    return t;
}

DecisionTree lex_tree(const Domain& dom) {
    DecisionTree t;
    t.name = "lex";
    t.first = 0;
    int ni = dom.region.n_interior();
    const Domain* domp = &dom;
    t.next = [domp, ni](std::span<const int> hist, std::span<const std::uint8_t> bits) -> int {
        Replay rp(*domp, hist, bits);
        for (int v = 0; v < ni; ++v)
            if (!rp.queried(v)) return v;
        for (int e = 0; e < domp->region.n_edges(); ++e)
            if (!rp.queried(ni + e)) return ni + e;
        return -1;
    };
    return t;
}

DecisionTree first_coordinate_tree(const Domain& dom, int vertex_coord) {
    if (!dom.coord_is_vertex(vertex_coord))
        throw std::invalid_argument("first_coordinate_tree: admissible trees start at a vertex");
    DecisionTree t = lex_tree(dom);
    t.name = "first#" + std::to_string(vertex_coord);
    t.first = vertex_coord;
    return t;
}

DecisionTree random_admissible_tree(const Domain& dom, std::uint64_t seed) {
    int n = dom.n_coords;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    for (std::size_t i = 0; i < order.size(); ++i)
        if (dom.coord_is_vertex(order[i])) {
            std::swap(order[0], order[i]);
            break;
        }
    DecisionTree t;
    t.name = "random#" + std::to_string(seed);
    t.first = order[0];
    int ni = dom.region.n_interior();
    const Domain* domp = &dom;
    t.next = [domp, order, ni](std::span<const int> hist, std::span<const std::uint8_t> bits) -> int {
        Replay rp(*domp, hist, bits);
        for (int c : order) {
            if (rp.queried(c)) continue;
            if (c < ni) return c;
            if (edge_admissible(domp->region, rp, c - ni)) return c;
        }
        for (int v = 0; v < ni; ++v)
            if (!rp.queried(v)) return v;
        for (int e = 0; e < domp->region.n_edges(); ++e)
            if (!rp.queried(ni + e)) return ni + e;
        return -1;
    };
    return t;
}

// ---------------------------------------------------------------------------
// running trees and the exact OSSS inequality
// ---------------------------------------------------------------------------

namespace {

struct CylinderScan {
    bool constant = false;
    double value = 0.0;
    double mass = 0.0;
};

CylinderScan scan_cylinder(const Domain& dom, const MonotoneFn& f, std::uint64_t fixed_mask,
                           std::uint64_t fixed_bits) {
    std::uint64_t free_mask = (dom.mu.size() - 1) & ~fixed_mask;
    CylinderScan out;
    double lo = 1e300, hi = -1e300, mass = 0.0;
    std::uint64_t sub = 0;
    for (;;) {
        std::uint64_t b = fixed_bits | sub;
        double v = f.table[b];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mass += dom.mu[b];
        if (sub == free_mask) break;
        sub = (sub - free_mask) & free_mask;
    }
    out.constant = lo == hi;
    out.value = lo;
    out.mass = mass;
    return out;
}

}  // namespace

TreeRun run_decision_tree(const Domain& dom, const DecisionTree& tree, std::uint64_t bits,
                          const MonotoneFn& f) {
    TreeRun run;
    std::vector<std::uint8_t> hist_bits;
    std::uint64_t fixed_mask = 0, fixed_bits = 0;
    int coord = tree.first;
    if (!dom.coord_is_vertex(coord)) throw std::invalid_argument("run_decision_tree: tree not admissible");
    for (int t = 1; t <= dom.n_coords; ++t) {
        if (coord < 0) throw std::logic_error("run_decision_tree: tree exhausted early");
        if (!dom.coord_is_vertex(coord)) {
            Replay rp(dom, run.transcript, hist_bits);
            if (!edge_admissible(dom.region, rp, coord - dom.region.n_interior()))
                throw std::invalid_argument("run_decision_tree: tree not admissible");
        }
        run.transcript.push_back(coord);
        std::uint8_t bit = static_cast<std::uint8_t>((bits >> coord) & 1);
        hist_bits.push_back(bit);
        fixed_mask |= 1ull << coord;
        if (bit) fixed_bits |= 1ull << coord;
        CylinderScan sc = scan_cylinder(dom, f, fixed_mask, fixed_bits);
        if (sc.constant) {
            run.tau = t;
            return run;
        }
        coord = tree.next(run.transcript, hist_bits);
    }
    run.tau = dom.n_coords;
    return run;
}

namespace {

void osss_walk(const Domain& dom, const MonotoneFn& f, const DecisionTree& tree,
               std::vector<int>& hist, std::vector<std::uint8_t>& bits, std::uint64_t fixed_mask,
               std::uint64_t fixed_bits, std::vector<double>& revealment) {
    CylinderScan sc = scan_cylinder(dom, f, fixed_mask, fixed_bits);
    if (sc.constant) {
        for (int d : hist) revealment[static_cast<std::size_t>(d)] += sc.mass;
        return;
    }
    int coord = tree.next(hist, bits);
    if (coord < 0) throw std::logic_error("osss_walk: tree exhausted before determination");
    hist.push_back(coord);
    for (std::uint8_t b : {std::uint8_t{0}, std::uint8_t{1}}) {
        bits.push_back(b);
        osss_walk(dom, f, tree, hist, bits, fixed_mask | (1ull << coord),
                  b ? fixed_bits | (1ull << coord) : fixed_bits, revealment);
        bits.pop_back();
    }
    hist.pop_back();
}

}  // namespace

OsssResult osss_inequality_check(const Domain& dom, const MonotoneFn& f, const DecisionTree& tree,
                                 double tol) {
    OsssResult res;
    int n = dom.n_coords;
    double ef = 0.0, ef2 = 0.0;
    std::vector<double> ed(static_cast<std::size_t>(n), 0.0), efd(static_cast<std::size_t>(n), 0.0);
    for (std::uint64_t b = 0; b < dom.mu.size(); ++b) {
        double w = dom.mu[b];
        if (w == 0.0) continue;
        double fv = f.table[b];
        ef += w * fv;
        ef2 += w * fv * fv;
        for (int c = 0; c < n; ++c) {
            if ((b >> c) & 1) {
                ed[static_cast<std::size_t>(c)] += w;
                efd[static_cast<std::size_t>(c)] += w * fv;
            }
        }
    }
    res.var = ef2 - ef * ef;
    res.cov.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c)
        res.cov[static_cast<std::size_t>(c)] =
            efd[static_cast<std::size_t>(c)] - ef * ed[static_cast<std::size_t>(c)];

    res.revealment.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<int> hist{tree.first};
    std::vector<std::uint8_t> bits;
    for (std::uint8_t b : {std::uint8_t{0}, std::uint8_t{1}}) {
        bits.push_back(b);
        osss_walk(dom, f, tree, hist, bits, 1ull << tree.first, b ? (1ull << tree.first) : 0ull,
                  res.revealment);
        bits.pop_back();
    }

    res.rhs = 0.0;
    for (int c = 0; c < n; ++c)
        res.rhs += res.revealment[static_cast<std::size_t>(c)] * res.cov[static_cast<std::size_t>(c)];
    res.slack = res.rhs - res.var;
    res.holds = res.var <= res.rhs + tol;
    return res;
}

std::vector<double> estimate_revealments(const Domain& dom, const DecisionTree& tree,
                                         const MonotoneFn& f, int n_samples, std::uint64_t seed) {
    std::vector<double> cdf(dom.mu.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dom.mu.size(); ++i) {
        acc += dom.mu[i];
        cdf[i] = acc;
    }
    Rng rng(seed);
    std::vector<double> rev(static_cast<std::size_t>(dom.n_coords), 0.0);
    for (int s = 0; s < n_samples; ++s) {
        double u = rng.uniform() * acc;
        std::uint64_t b =
            static_cast<std::uint64_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        TreeRun run = run_decision_tree(dom, tree, b, f);
        for (int t = 0; t < run.tau; ++t)
            rev[static_cast<std::size_t>(run.transcript[static_cast<std::size_t>(t)])] += 1.0;
    }
    for (double& x : rev) x /= n_samples;
    return rev;
}

// ---------------------------------------------------------------------------
// weak monotonicity
// ---------------------------------------------------------------------------

WeakMonotonicityReport check_weak_monotonicity(const Region& reg, const BoundarySpec& bc,
                                               const ModelParams& pa, double tol) {
    WeakMonotonicityReport out;
    out.r_threshold = 2.0 * (1.0 - pa.rc.p) / (2.0 - pa.rc.p);
    out.threshold_satisfied = pa.rc.r >= out.r_threshold - 1e-15;

    int ni = reg.n_interior();
    int ne = reg.n_edges();
    int n = ni + ne;
    if (n > 14)
        throw exact::InstanceTooLarge(
            "check_weak_monotonicity: " + std::to_string(n) + " coordinates (limit 14)",
            std::ldexp(1.0, n));
    Domain dom = make_domain(reg, bc, pa);
    out.report.check = "weak-monotonicity";
    out.report.instance = dom.label + " p=" + std::to_string(pa.rc.p) + " a=" + std::to_string(pa.rc.a) +
                          " r=" + std::to_string(pa.rc.r);

    for (std::uint64_t vs = 0; vs < (1ull << ni); ++vs) {
        std::vector<int> ok_edges;
        for (int e = 0; e < ne; ++e) {
            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
            bool a_ok = !reg.is_interior(ed.a) || ((vs >> ed.a) & 1);
            bool b_ok = !reg.is_interior(ed.b) || ((vs >> ed.b) & 1);
            if (a_ok && b_ok) ok_edges.push_back(e);
        }
        for (std::uint64_t es = 0; es < (1ull << ok_edges.size()); ++es) {
            std::vector<int> coords;
            for (int v = 0; v < ni; ++v)
                if ((vs >> v) & 1) coords.push_back(v);
            for (std::size_t j = 0; j < ok_edges.size(); ++j)
                if ((es >> j) & 1) coords.push_back(ni + ok_edges[j]);
            int k = static_cast<int>(coords.size());
            if (k == 0 || k == n) continue;

            std::size_t np = static_cast<std::size_t>(1) << k;
            std::vector<double> zpat(np, 0.0);
            std::vector<double> mpat(np * static_cast<std::size_t>(n), 0.0);
            for (std::uint64_t b = 0; b < dom.mu.size(); ++b) {
                double w = dom.mu[b];
                if (w == 0.0) continue;
                std::size_t pat = 0;
                for (int j = 0; j < k; ++j)
                    if ((b >> coords[static_cast<std::size_t>(j)]) & 1) pat |= 1ull << j;
                zpat[pat] += w;
                for (int c = 0; c < n; ++c)
                    if ((b >> c) & 1)
                        mpat[pat * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] += w;
            }

            std::vector<int> digit(static_cast<std::size_t>(k), 0);  // 0: both 0, 1: both 1, 2: (0,1)
            for (;;) {
                std::size_t p1 = 0, p2 = 0;
                for (int j = 0; j < k; ++j) {
                    if (digit[static_cast<std::size_t>(j)] == 1) {
                        p1 |= 1ull << j;
                        p2 |= 1ull << j;
                    } else if (digit[static_cast<std::size_t>(j)] == 2) {
                        p2 |= 1ull << j;
                    }
                }
                if (p1 != p2 && zpat[p1] > 0.0 && zpat[p2] > 0.0) {
                    for (int c = 0; c < n; ++c) {
                        bool revealed = false;
                        for (int j = 0; j < k && !revealed; ++j)
                            revealed = coords[static_cast<std::size_t>(j)] == c;
                        if (revealed) continue;
                        double c1 = mpat[p1 * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] / zpat[p1];
                        double c2 = mpat[p2 * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] / zpat[p2];
                        out.report.record(std::max(0.0, c1 - c2), tol,
                                          "S=" + std::to_string(vs) + "/" + std::to_string(es) +
                                              " d0=" + std::to_string(c));
                    }
                }
                int j = 0;
                while (j < k && digit[static_cast<std::size_t>(j)] == 2) digit[static_cast<std::size_t>(j++)] = 0;
                if (j == k) break;
                ++digit[static_cast<std::size_t>(j)];
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// sharp threshold (Lemma 8.2) and the derivative identities (Prop 8.4)
// ---------------------------------------------------------------------------

namespace {

struct StreamSums {
    double z = 0.0;
    double f_conn = 0.0;
    double f_psi0 = 0.0;
    std::vector<double> eta;
    std::vector<double> conn_eta;
    std::vector<double> psi0_eta;
    std::vector<double> theta_xk;
    std::vector<double> theta_xk_rev;
};

StreamSums stream_sharp_threshold(const Region& reg, const ResolvedBc& rbc, const ModelParams& pa,
                                  int box_n, int threads) {
    int ni = reg.n_interior();
    int ne = reg.n_edges();
    int D = ni + ne;
    int origin = reg.index_of(make_coord(0));

    // targets of x <-> dLambda_k(x), clipped to the region and its boundary
    std::vector<std::vector<std::vector<int>>> targets(static_cast<std::size_t>(ni));
    for (int x = 0; x < ni; ++x) {
        targets[static_cast<std::size_t>(x)].resize(static_cast<std::size_t>(box_n));
        for (int k = 0; k < box_n; ++k) {
            for (int v = 0; v < reg.n_total(); ++v) {
                int at_edge = 0, inside = 0;
                for (int i = 0; i < reg.dim(); ++i) {
                    int off = std::abs(reg.coord(v)[static_cast<std::size_t>(i)] -
                                       reg.coord(x)[static_cast<std::size_t>(i)]);
                    if (off == k + 1) ++at_edge;
                    else if (off <= k) ++inside;
                }
                if (at_edge == 1 && at_edge + inside == reg.dim())
                    targets[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)].push_back(v);
            }
        }
    }

    std::size_t theta_n = static_cast<std::size_t>(ni) * static_cast<std::size_t>(box_n);
    std::size_t n_out = 3 + 3 * static_cast<std::size_t>(D) + 2 * theta_n;
    auto body = [&, origin, D, ni, box_n](const exact::RcEnumState& st, double* acc) {
        double w = std::exp(st.logw);
        acc[0] += w;
        bool conn = st.connected_to_open_boundary(origin);
        bool psi0 = st.vertex_open(origin);
        if (conn) acc[1] += w;
        if (psi0) acc[2] += w;
        double* eta = acc + 3;
        double* conn_eta = eta + D;
        double* psi0_eta = conn_eta + D;
        for (int v = 0; v < ni; ++v) {
            if ((st.psi_mask >> v) & 1) {
                eta[v] += w;
                if (conn) conn_eta[v] += w;
                if (psi0) psi0_eta[v] += w;
            }
        }
        for (std::size_t j = 0; j < st.live_edges.size(); ++j) {
            if ((st.omega_bits >> j) & 1) {
                int c = ni + st.live_edges[j];
                eta[c] += w;
                if (conn) conn_eta[c] += w;
                if (psi0) psi0_eta[c] += w;
            }
        }
        double* th = psi0_eta + D;
        double* th_rev = th + theta_n;
        for (int x = 0; x < ni; ++x) {
            if (!st.vertex_open(x)) continue;
            int rx = st.find(x);
            for (int k = 0; k < box_n; ++k) {
                const auto& tg = targets[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)];
                bool hit = false;
                for (int v : tg)
                    if (st.vertex_open(v) && st.find(v) == rx) {
                        hit = true;
                        break;
                    }
                bool hit2 = false;
                for (auto it = tg.rbegin(); it != tg.rend(); ++it)
                    if (st.vertex_open(*it) && st.find(*it) == rx) {
                        hit2 = true;
                        break;
                    }
                if (hit) th[x * box_n + k] += w;
                if (hit2) th_rev[x * box_n + k] += w;
            }
        }
    };
    std::vector<double> acc = exact::rc_reduce(reg, rbc, pa, n_out, body, threads);

    StreamSums s;
    s.z = acc[0];
    s.f_conn = acc[1];
    s.f_psi0 = acc[2];
    s.eta.assign(acc.begin() + 3, acc.begin() + 3 + D);
    s.conn_eta.assign(acc.begin() + 3 + D, acc.begin() + 3 + 2 * D);
    s.psi0_eta.assign(acc.begin() + 3 + 2 * D, acc.begin() + 3 + 3 * D);
    s.theta_xk.assign(acc.begin() + 3 + 3 * D, acc.begin() + 3 + 3 * D + static_cast<long>(theta_n));
    s.theta_xk_rev.assign(acc.begin() + 3 + 3 * D + static_cast<long>(theta_n), acc.end());
    return s;
}

}  // namespace

SharpThresholdReport sharp_threshold_check(int box_n, int dim, const ModelParams& pa,
                                           const BoundarySpec& bc, double fd_step, int threads) {
    Region reg = Region::box(box_n, dim);
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    exact::check_enumerable(reg, rbc);
    int ni = reg.n_interior();
    int ne = reg.n_edges();
    int D = ni + ne;

    StreamSums s = stream_sharp_threshold(reg, rbc, pa, box_n, threads);
    SharpThresholdReport rep;
    rep.theta = s.f_conn / s.z;

    double sum_cov = 0.0;
    for (int c = 0; c < D; ++c)
        sum_cov += s.conn_eta[static_cast<std::size_t>(c)] / s.z -
                   rep.theta * s.eta[static_cast<std::size_t>(c)] / s.z;
    rep.sum_cov = sum_cov;

    double qn = 0.0, qn2 = 0.0;
    for (int x = 0; x < ni; ++x) {
        double sx = 0.0, sx2 = 0.0;
        for (int k = 0; k < box_n; ++k) {
            sx += s.theta_xk[static_cast<std::size_t>(x * box_n + k)] / s.z;
            sx2 += s.theta_xk_rev[static_cast<std::size_t>(x * box_n + k)] / s.z;
        }
        qn = std::max(qn, sx);
        qn2 = std::max(qn2, sx2);
    }
    rep.q_n = qn;
    rep.q_n_second_pass = qn2;
    rep.rhs = qn > 0.0 ? box_n / (4.0 * dim * qn) * rep.theta * (1.0 - rep.theta) : 0.0;
    rep.holds = rep.sum_cov >= rep.rhs - 1e-12;

    auto probs_at = [&](double p, double a) {
        ModelParams q = ModelParams::rc_general(p, a, pa.rc.r);
        ResolvedBc rb = resolve_bc(reg, bc, q);
        StreamSums t = stream_sharp_threshold(reg, rb, q, box_n, threads);
        return std::pair<double, double>{t.f_conn / t.z, t.f_psi0 / t.z};
    };
    double cov_conn_p = 0.0, cov_conn_a = 0.0, cov_psi0_p = 0.0, cov_psi0_a = 0.0;
    double p_psi0 = s.f_psi0 / s.z;
    for (int c = 0; c < D; ++c) {
        double cc = s.conn_eta[static_cast<std::size_t>(c)] / s.z -
                    rep.theta * s.eta[static_cast<std::size_t>(c)] / s.z;
        double cp = s.psi0_eta[static_cast<std::size_t>(c)] / s.z -
                    p_psi0 * s.eta[static_cast<std::size_t>(c)] / s.z;
        if (c < ni) {
            cov_conn_a += cc;
            cov_psi0_a += cp;
        } else {
            cov_conn_p += cc;
            cov_psi0_p += cp;
        }
    }
    auto [conn_hi, psi0_hi] = probs_at(pa.rc.p + fd_step, pa.rc.a);
    auto [conn_lo, psi0_lo] = probs_at(pa.rc.p - fd_step, pa.rc.a);
    auto [conn_ahi, psi0_ahi] = probs_at(pa.rc.p, pa.rc.a + fd_step);
    auto [conn_alo, psi0_alo] = probs_at(pa.rc.p, pa.rc.a - fd_step);
    double pp = pa.rc.p * (1.0 - pa.rc.p), aa = pa.rc.a * (1.0 - pa.rc.a);
    rep.derivatives = {
        {"dphi[0<->dL]/dp", cov_conn_p / pp, (conn_hi - conn_lo) / (2 * fd_step), 0.0},
        {"dphi[0<->dL]/da", cov_conn_a / aa, (conn_ahi - conn_alo) / (2 * fd_step), 0.0},
        {"dphi[psi_0=1]/dp", cov_psi0_p / pp, (psi0_hi - psi0_lo) / (2 * fd_step), 0.0},
        {"dphi[psi_0=1]/da", cov_psi0_a / aa, (psi0_ahi - psi0_alo) / (2 * fd_step), 0.0},
    };
    for (auto& d : rep.derivatives) d.err = std::fabs(d.formula - d.fd);
    return rep;
}

}  // namespace bc::osss
