#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bc {

// Coordinates live in Z^d with d <= 4; unused entries are zero.
using Coord = std::array<int, 4>;

inline Coord make_coord(int x, int y = 0, int z = 0, int w = 0) { return {x, y, z, w}; }

// A simple finite graph given by an edge list over vertices 0..n-1.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

struct RegionEdge {
    int a = 0;       // combined vertex index, a < b
    int b = 0;
    int axis = 0;    // lattice direction
    bool interior = false;  // both endpoints in Lambda
};

// A finite region Lambda of Z^d together with its vertex boundary and the
// incident edge set E_Lambda = b(Lambda) u dE_Lambda. Vertices are ordered
// lexicographically; boundary vertices are indexed after the interior ones.
// Immutable after construction.
class Region {
public:
    static Region box(int n, int d);                       // Lambda_n = [-n,n]^d
    static Region box_at(const Coord& center, int n, int d);
    static Region rect(int x0, int x1, int y0, int y1);    // [x0,x1] x [y0,y1] in d=2
    static Region from_vertices(int d, std::vector<Coord> verts);

    int dim() const { return dim_; }
    int n_interior() const { return n_interior_; }
    int n_boundary() const { return static_cast<int>(verts_.size()) - n_interior_; }
    int n_total() const { return static_cast<int>(verts_.size()); }

    const Coord& coord(int v) const { return verts_[static_cast<std::size_t>(v)]; }
    bool is_interior(int v) const { return v < n_interior_; }

    // -1 when the coordinate is neither in Lambda nor in its boundary
    int index_of(const Coord& c) const;

    const std::vector<RegionEdge>& edges() const { return edges_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    int n_interior_edges() const { return n_interior_edges_; }

    // incident (edge index, other endpoint) pairs for a combined vertex
    const std::vector<std::pair<int, int>>& incident(int v) const {
        return adj_[static_cast<std::size_t>(v)];
    }

    // induced graph on Lambda (interior vertices, b(Lambda) edges)
    Graph interior_graph() const;

    std::string descriptor() const;  // JSON: {dim, shape, ...}

    // true if the interior vertex set spans a connected subgraph
    bool interior_connected() const;

    bool is_box = false;
    int box_n = 0;
    Coord box_center{0, 0, 0, 0};

private:
    int dim_ = 0;
    int n_interior_ = 0;
    int n_interior_edges_ = 0;
    std::vector<Coord> verts_;  // interior sorted lex, then boundary sorted lex
    std::vector<RegionEdge> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;

    void build(int d, std::vector<Coord> interior);
};

// Axis-aligned rectangle [a,b] x [c,d] in Z^2 with named sides.
struct Rect {
    int a = 0, b = 0, c = 0, d = 0;
    static Rect of(int a, int b, int c, int d) { return Rect{a, b, c, d}; }
    bool contains(int x, int y) const { return x >= a && x <= b && y >= c && y <= d; }
    // sides as coordinate predicates
    bool on_left(int x, int y) const { return x == a && y >= c && y <= d; }
    bool on_right(int x, int y) const { return x == b && y >= c && y <= d; }
    bool on_bottom(int x, int y) const { return y == c && x >= a && x <= b; }
    bool on_top(int x, int y) const { return y == d && x >= a && x <= b; }
};

// A primal nearest-neighbour edge of Z^2, named by its lex-lower endpoint
// and direction.
struct PrimalEdge {
    int x = 0, y = 0;
    int axis = 0;  // 0: {(x,y),(x+1,y)}, 1: {(x,y),(x,y+1)}
    auto operator<=>(const PrimalEdge&) const = default;
};

// A dual edge, named by the pair of cells it joins. Cell (x,y) stands for
// the dual site (x+1/2, y+1/2); connectivity code never touches floats.
struct DualEdge {
    int cx = 0, cy = 0;
    int axis = 0;  // 0: cells (cx,cy)-(cx+1,cy), 1: cells (cx,cy)-(cx,cy+1)
    auto operator<=>(const DualEdge&) const = default;
};

// The unique dual edge crossing e, and back. dual_of(primal_of(e)) == e.
DualEdge dual_of(const PrimalEdge& e);
PrimalEdge primal_of(const DualEdge& e);

// The lift l(G): vertex (x,i) -> index 2x+i; E1 edges are the four
// cross-layer copies of each base edge, E2 the vertical rungs.
struct EnlargedGraph {
    int base_n = 0;
    std::vector<std::pair<int, int>> e1;
    std::vector<std::pair<int, int>> e2;
    int n() const { return 2 * base_n; }
    static int lift_index(int x, int layer) { return 2 * x + layer; }
};

EnlargedGraph lift_graph(const Graph& g);

// All connected subsets of Z^2 with k vertices containing the origin as
// lex-smallest element (fixed site animals, translation-normalized).
std::vector<std::vector<Coord>> site_animals_2d(int k);

// All connected simple graphs on <= max_n vertices, up to isomorphism.
std::vector<Graph> connected_graphs_upto(int max_n);

// Named graph families for the CLI: pathK, cycleK, starK, completeK.
Graph named_graph(const std::string& id);

}  // namespace bc
