#include "bc/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bc {

namespace {

bool coord_less(const Coord& a, const Coord& b) { return a < b; }

}  // namespace

void Region::build(int d, std::vector<Coord> interior) {
    if (d < 1 || d > 4) throw std::invalid_argument("Region: dim must be in [1,4]");
    dim_ = d;
    std::sort(interior.begin(), interior.end(), coord_less);
    interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
    if (interior.empty()) throw std::invalid_argument("Region: empty vertex set");
    if (interior.size() > (1ull << 31))
        throw std::invalid_argument("Region: vertex count exceeds index type");
    n_interior_ = static_cast<int>(interior.size());

    std::map<Coord, int> index;
    for (int i = 0; i < n_interior_; ++i) index[interior[static_cast<std::size_t>(i)]] = i;

    // boundary = lattice neighbours of Lambda outside Lambda
    std::set<Coord> boundary;
    for (const Coord& v : interior) {
        for (int ax = 0; ax < d; ++ax) {
            for (int s : {-1, +1}) {
                Coord w = v;
                w[static_cast<std::size_t>(ax)] += s;
                if (!index.count(w)) boundary.insert(w);
            }
        }
    }
    verts_ = std::move(interior);
    for (const Coord& b : boundary) {
        index[b] = static_cast<int>(verts_.size());
        verts_.push_back(b);
    }

    // E_Lambda: every edge with at least one endpoint in Lambda, ordered
    // lexicographically by (lower endpoint, axis)
    std::vector<std::pair<Coord, int>> keys;
    for (int i = 0; i < n_interior_; ++i) {
        const Coord& v = verts_[static_cast<std::size_t>(i)];
        for (int ax = 0; ax < d; ++ax) {
            for (int s : {-1, +1}) {
                Coord w = v;
                w[static_cast<std::size_t>(ax)] += s;
                Coord lo = std::min(v, w);
                keys.emplace_back(lo, ax);
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    adj_.resize(verts_.size());
    for (const auto& [lo, ax] : keys) {
        Coord hi = lo;
        hi[static_cast<std::size_t>(ax)] += 1;
        auto ia = index.find(lo);
        auto ib = index.find(hi);
        if (ia == index.end() || ib == index.end()) continue;  // edge between two boundary sites
        RegionEdge e;
        e.a = std::min(ia->second, ib->second);
        e.b = std::max(ia->second, ib->second);
        e.axis = ax;
        e.interior = e.b < n_interior_;
        if (e.interior) ++n_interior_edges_;
        int id = static_cast<int>(edges_.size());
        edges_.push_back(e);
        adj_[static_cast<std::size_t>(e.a)].emplace_back(id, e.b);
        adj_[static_cast<std::size_t>(e.b)].emplace_back(id, e.a);
    }
}

Region Region::box(int n, int d) { return box_at(make_coord(0), n, d); }

Region Region::box_at(const Coord& center, int n, int d) {
    if (n < 0) throw std::invalid_argument("Region::box: n must be >= 0");
    if (d < 1) throw std::invalid_argument("Region::box: d must be >= 1");
    if (d > 4) throw std::invalid_argument("Region::box: d must be <= 4");
    double count = 1;
    for (int i = 0; i < d; ++i) count *= 2.0 * n + 1.0;
    if (count > 2147483647.0) throw std::invalid_argument("Region::box: vertex count overflows index type");
    std::vector<Coord> vs;
    vs.reserve(static_cast<std::size_t>(count));
    Coord c = make_coord(0);
    for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] = -n;
    for (;;) {
        Coord v = center;
        for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] += c[static_cast<std::size_t>(i)];
        vs.push_back(v);
        int ax = 0;
        while (ax < d) {
            if (++c[static_cast<std::size_t>(ax)] <= n) break;
            c[static_cast<std::size_t>(ax)] = -n;
            ++ax;
        }
        if (ax == d) break;
    }
    Region r;
    r.build(d, std::move(vs));
    r.is_box = true;
    r.box_n = n;
    r.box_center = center;
    return r;
}

Region Region::rect(int x0, int x1, int y0, int y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("Region::rect: empty rectangle");
    std::vector<Coord> vs;
    for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) vs.push_back(make_coord(x, y));
    Region r;
    r.build(2, std::move(vs));
    return r;
}

Region Region::from_vertices(int d, std::vector<Coord> verts) {
    Region r;
    r.build(d, std::move(verts));
    return r;
}

int Region::index_of(const Coord& c) const {
    auto lo = std::lower_bound(verts_.begin(), verts_.begin() + n_interior_, c, coord_less);
    if (lo != verts_.begin() + n_interior_ && *lo == c)
        return static_cast<int>(lo - verts_.begin());
    auto bl = std::lower_bound(verts_.begin() + n_interior_, verts_.end(), c, coord_less);
    if (bl != verts_.end() && *bl == c) return static_cast<int>(bl - verts_.begin());
    return -1;
}

Graph Region::interior_graph() const {
    Graph g;
    g.n = n_interior_;
    for (const RegionEdge& e : edges_)
        if (e.interior) g.edges.emplace_back(e.a, e.b);
    return g;
}

bool Region::interior_connected() const {
    if (n_interior_ == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(n_interior_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [eid, w] : adj_[static_cast<std::size_t>(v)]) {
            (void)eid;
            if (w < n_interior_ && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++cnt;
                stack.push_back(w);
            }
        }
    }
    return cnt == n_interior_;
}

std::string Region::descriptor() const {
    std::ostringstream os;
    if (is_box) {
        os << "{\"dim\":" << dim_ << ",\"shape\":\"box\",\"n\":" << box_n << "}";
    } else {
        os << "{\"dim\":" << dim_ << ",\"vertices\":[";
        for (int i = 0; i < n_interior_; ++i) {
            if (i) os << ",";
            os << "[";
            for (int k = 0; k < dim_; ++k) {
                if (k) os << ",";
                os << verts_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            }
            os << "]";
        }
        os << "]}";
    }
    return os.str();
}

DualEdge dual_of(const PrimalEdge& e) {
    if (e.axis == 0) return DualEdge{e.x, e.y - 1, 1};  // vertical dual pair
    if (e.axis == 1) return DualEdge{e.x - 1, e.y, 0};  // horizontal dual pair
    throw std::invalid_argument("dual_of: not a nearest-neighbour edge of Z^2");
}

PrimalEdge primal_of(const DualEdge& e) {
    if (e.axis == 1) return PrimalEdge{e.cx, e.cy + 1, 0};
    if (e.axis == 0) return PrimalEdge{e.cx + 1, e.cy, 1};
    throw std::invalid_argument("primal_of: malformed dual edge");
}

EnlargedGraph lift_graph(const Graph& g) {
    EnlargedGraph l;
    l.base_n = g.n;
    for (auto [x, y] : g.edges) {
        if (x == y || x < 0 || y < 0 || x >= g.n || y >= g.n)
            throw std::invalid_argument("lift_graph: graph must be simple");
        for (int i = 0; i <= 1; ++i)
            for (int j = 0; j <= 1; ++j)
                l.e1.emplace_back(EnlargedGraph::lift_index(x, i), EnlargedGraph::lift_index(y, j));
    }
    for (int x = 0; x < g.n; ++x)
        l.e2.emplace_back(EnlargedGraph::lift_index(x, 0), EnlargedGraph::lift_index(x, 1));
    return l;
}

std::vector<std::vector<Coord>> site_animals_2d(int k) {
    // grow connected sets, normalize by translating the lex-min vertex to 0
    std::set<std::vector<Coord>> seen;
    std::vector<std::vector<Coord>> out;
    std::vector<Coord> start{make_coord(0, 0)};
    auto normalize = [](std::vector<Coord> v) {
        std::sort(v.begin(), v.end());
        Coord base = v.front();
        for (Coord& c : v) {
            c[0] -= base[0];
            c[1] -= base[1];
        }
        std::sort(v.begin(), v.end());
        return v;
    };
    std::vector<std::vector<Coord>> layer{start};
    seen.insert(start);
    if (k >= 1) out.push_back(start);
    for (int size = 1; size < k; ++size) {
        std::vector<std::vector<Coord>> next;
        for (const auto& animal : layer) {
            std::set<Coord> cur(animal.begin(), animal.end());
            for (const Coord& v : animal) {
                static const int dx[4] = {1, -1, 0, 0};
                static const int dy[4] = {0, 0, 1, -1};
                for (int t = 0; t < 4; ++t) {
                    Coord w = make_coord(v[0] + dx[t], v[1] + dy[t]);
                    if (cur.count(w)) continue;
                    std::vector<Coord> grown(animal);
                    grown.push_back(w);
                    auto norm = normalize(grown);
                    if (seen.insert(norm).second) {
                        next.push_back(norm);
                        out.push_back(norm);
                    }
                }
            }
        }
        layer = std::move(next);
    }
    // keep only animals of size <= k; "out" accumulated every size
    return out;
}

namespace {

std::uint64_t canonical_code(const Graph& g) {
    std::vector<int> perm(static_cast<std::size_t>(g.n));
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = ~0ull;
    do {
        std::uint64_t code = 0;
        for (auto [a, b] : g.edges) {
            int pa = perm[static_cast<std::size_t>(a)], pb = perm[static_cast<std::size_t>(b)];
            if (pa > pb) std::swap(pa, pb);
            code |= 1ull << (pa * g.n + pb);
        }
        best = std::min(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

bool graph_connected(const Graph& g) {
    if (g.n == 0) return false;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
    for (auto [a, b] : g.edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    std::vector<int> st{0};
    seen[0] = 1;
    int cnt = 1;
    while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        for (int w : adj[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++cnt;
                st.push_back(w);
            }
    }
    return cnt == g.n;
}

}  // namespace

std::vector<Graph> connected_graphs_upto(int max_n) {
    std::vector<Graph> out;
    for (int n = 1; n <= max_n; ++n) {
        std::vector<std::pair<int, int>> all;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) all.emplace_back(a, b);
        std::set<std::uint64_t> seen;
        for (std::uint64_t mask = 0; mask < (1ull << all.size()); ++mask) {
            Graph g;
            g.n = n;
            for (std::size_t i = 0; i < all.size(); ++i)
                if (mask & (1ull << i)) g.edges.push_back(all[i]);
            if (!graph_connected(g)) continue;
            if (seen.insert(canonical_code(g)).second) out.push_back(g);
        }
    }
    return out;
}

Graph named_graph(const std::string& id) {
    auto num = [&](std::size_t prefix) { return std::atoi(id.c_str() + prefix); };
    Graph g;
    if (id.rfind("path", 0) == 0) {
        g.n = num(4);
        for (int i = 0; i + 1 < g.n; ++i) g.edges.emplace_back(i, i + 1);
    } else if (id.rfind("cycle", 0) == 0) {
        g.n = num(5);
        for (int i = 0; i < g.n; ++i) g.edges.emplace_back(i, (i + 1) % g.n);
    } else if (id.rfind("star", 0) == 0) {
        g.n = num(4);
        for (int i = 1; i < g.n; ++i) g.edges.emplace_back(0, i);
    } else if (id.rfind("complete", 0) == 0) {
        g.n = num(8);
        for (int a = 0; a < g.n; ++a)
            for (int b = a + 1; b < g.n; ++b) g.edges.emplace_back(a, b);
    } else {
        throw std::invalid_argument("unknown graph id: " + id);
    }
    if (g.n < 1 || g.n > 20) throw std::invalid_argument("graph id size out of range: " + id);
    return g;
}

}  // namespace bc
