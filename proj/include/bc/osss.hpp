#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bc/exact.hpp"
#include "bc/model.hpp"

namespace bc::osss {

// The coordinate domain D = Lambda u E_Lambda of a region together with a
// dense measure table over {0,1}^D (zero on incompatible configurations).
struct Domain {
    Region region;
    ResolvedBc rbc;
    ModelParams params;
    int n_coords = 0;
    std::vector<double> mu;  // size 2^n_coords, normalized
    std::string label;

    int n_vertices() const { return region.n_interior(); }
    bool coord_is_vertex(int c) const { return c < region.n_interior(); }
    // connectivity on a raw bit pattern: an edge is traversable iff its bit
    // is set and both endpoints are open (interior by bit, boundary by bc)
    bool connected_to_open_boundary(std::uint64_t bits, int v) const;
    bool connected_bits(std::uint64_t bits, int u, int v) const;
    bool vertex_open_bits(std::uint64_t bits, int combined_vertex) const;
};

Domain make_domain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa);
// product measure over the same coordinates (classical OSSS cross-check)
Domain make_product_domain(const Region& reg, std::span<const double> probs);

// An increasing function into [0,1], tabulated over bit patterns.
struct MonotoneFn {
    std::string name;
    std::vector<double> table;
    double operator()(std::uint64_t bits) const { return table[bits]; }
};

MonotoneFn fn_from_event(const Domain& dom, const exact::MonotoneEvent& ev, const std::string& name);
MonotoneFn fn_dictator(const Domain& dom, int coord);
MonotoneFn fn_connect_origin_boundary(const Domain& dom);   // 1{0 <-> dLambda}
MonotoneFn fn_all_vertices_open(const Domain& dom);
MonotoneFn fn_open_fraction(const Domain& dom);             // non-indicator example

// Decision tree: first query plus a deterministic successor rule on the
// revealed history. Builders below only produce admissible trees (start at
// a vertex, an edge only after its Lambda-endpoints).
struct DecisionTree {
    std::string name;
    int first = 0;
    std::function<int(std::span<const int>, std::span<const std::uint8_t>)> next;
};

// The T(k) construction: query the ring dLambda_k, then the edges inside
// the ring among open vertices, then grow the cluster of the ring (vertex
// before its incident edges), which determines 1{0 <-> dLambda_n}.
// k = box_n uses the (known) boundary of the region itself as the seed set.
DecisionTree exploration_tree(const Domain& dom, int k);
DecisionTree lex_tree(const Domain& dom);
DecisionTree first_coordinate_tree(const Domain& dom, int vertex_coord);
DecisionTree random_admissible_tree(const Domain& dom, std::uint64_t seed);

struct TreeRun {
    std::vector<int> transcript;  // queried coordinates, in order
    int tau = 0;                  // stopping time (>= 1 by convention)
};
TreeRun run_decision_tree(const Domain& dom, const DecisionTree& tree, std::uint64_t bits,
                          const MonotoneFn& f);

struct OsssResult {
    double var = 0.0;
    std::vector<double> cov;         // per coordinate
    std::vector<double> revealment;  // per coordinate
    double rhs = 0.0;                // sum_d revealment * cov
    bool holds = false;
    double slack = 0.0;              // rhs - var
};
// Exact check of Var(f) <= sum_d delta_d Cov(f, eta_d), all quantities by
// enumeration; revealments from running T on every configuration.
OsssResult osss_inequality_check(const Domain& dom, const MonotoneFn& f, const DecisionTree& tree,
                                 double tol = 1e-12);

struct WeakMonotonicityReport {
    exact::ExactReport report;
    bool threshold_satisfied = false;  // r >= 2(1-p)/(2-p)
    double r_threshold = 0.0;
};
// Exhaustive conditional-monotonicity check over all admissible revealed
// sets in U_Lambda, all comparable revealed pairs, all target coordinates.
WeakMonotonicityReport check_weak_monotonicity(const Region& reg, const BoundarySpec& bc,
                                               const ModelParams& pa, double tol = 1e-12);

struct DerivativeCheck {
    std::string name;
    double formula = 0.0;  // covariance identity value
    double fd = 0.0;       // central finite difference
    double err = 0.0;
};

struct SharpThresholdReport {
    double theta = 0.0;    // mu[0 <-> dLambda_n]
    double sum_cov = 0.0;  // sum over D of Cov(f, eta_d)
    double q_n = 0.0;
    double q_n_second_pass = 0.0;
    double rhs = 0.0;  // n/(4 d Q_n) theta (1 - theta)
    bool holds = false;
    std::vector<DerivativeCheck> derivatives;
};
// Lemma 8.2 bound plus the Prop 8.4 derivative identities (formula versus
// central finite differences, step 1e-5, tolerance 1e-6). Exact mode only;
// instances beyond the enumerable ceiling raise InstanceTooLarge.
SharpThresholdReport sharp_threshold_check(int box_n, int dim, const ModelParams& pa,
                                           const BoundarySpec& bc, double fd_step = 1e-5,
                                           int threads = 1);

// MC revealment estimation for domains beyond the exact ceiling: runs the
// tree on sampled configurations; reporting only.
std::vector<double> estimate_revealments(const Domain& dom, const DecisionTree& tree,
                                         const MonotoneFn& f, int n_samples, std::uint64_t seed);

}  // namespace bc::osss
