#pragma once

#include <atomic>
#include <bit>
#include <complex>
#include <cstring>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bc/model.hpp"

namespace bc::exact {

constexpr double kLog2 = 0.6931471805599453094;

class InstanceTooLarge : public std::runtime_error {
public:
    InstanceTooLarge(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    double estimated_states() const { return estimate_; }

private:
    double estimate_;
};

// One checked identity: worst errors, violation count, witness.
struct ExactReport {
    std::string check;
    std::string instance;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    long violations = 0;
    long n_checked = 0;
    std::string worst_case;

    void record(double abs_err, double tol, const std::string& witness, double rel_err = 0.0) {
        ++n_checked;
        if (abs_err > max_abs_err) {
            max_abs_err = abs_err;
            worst_case = witness;
        }
        if (rel_err > max_rel_err) max_rel_err = rel_err;
        if (abs_err > tol) ++violations;
    }
    // violation count 0 <=> all recorded errors below tolerance
    bool passed() const { return violations == 0; }
    void merge(const ExactReport& o);
};

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

struct KahanComplex {
    KahanSum re, im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

// ---------------------------------------------------------------------------
// RC configuration enumerator. psi runs over subsets of Lambda; omega only
// over E_psi (edges whose endpoints are open), which prunes the 2^{|E|}
// factor down to 2^{|E_psi|}.
// ---------------------------------------------------------------------------

struct RcEnumState {
    const Region* region = nullptr;
    const ResolvedBc* rbc = nullptr;
    std::uint64_t psi_mask = 0;            // bit v: interior vertex v open
    std::uint64_t omega_bits = 0;          // bit j: live_edges[j] open
    std::span<const int> live_edges;       // global edge ids with open endpoints
    std::span<const std::uint8_t> edge_open;  // per global edge id
    int k = 0;
    double logw = 0.0;
    int* parent = nullptr;  // union-find over combined vertices (wiring merged)

    bool vertex_open(int v) const {
        return v < region->n_interior()
                   ? (psi_mask >> v) & 1
                   : rbc->open[static_cast<std::size_t>(v - region->n_interior())] != 0;
    }
    int find(int x) const {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool connected(int u, int v) const {
        if (!vertex_open(u) || !vertex_open(v)) return false;
        return find(u) == find(v);
    }
    bool connected_to_open_boundary(int u) const {
        if (!vertex_open(u)) return false;
        int ni = region->n_interior();
        int ru = find(u);
        for (int i = 0; i < region->n_boundary(); ++i)
            if (rbc->open[static_cast<std::size_t>(i)] && find(ni + i) == ru) return true;
        return false;
    }
    RcConfig materialize() const {
        RcConfig t;
        int ni = region->n_interior();
        t.psi.resize(static_cast<std::size_t>(ni));
        for (int v = 0; v < ni; ++v) t.psi[static_cast<std::size_t>(v)] = (psi_mask >> v) & 1;
        t.omega.assign(static_cast<std::size_t>(region->n_edges()), 0);
        for (std::size_t j = 0; j < live_edges.size(); ++j)
            if ((omega_bits >> j) & 1) t.omega[static_cast<std::size_t>(live_edges[j])] = 1;
        return t;
    }
};

// Total number of (psi, omega) states after pruning.
double rc_state_count(const Region& reg, const ResolvedBc& rbc);

void check_enumerable(const Region& reg, const ResolvedBc& rbc, double max_states = 3.0e8);

namespace detail {
inline int uf_find(int* p, int x) {
    while (p[x] != x) {
        p[x] = p[p[x]];
        x = p[x];
    }
    return x;
}
}  // namespace detail

template <class F>
void enumerate_rc(const Region& reg, const ResolvedBc& rbc, const ModelParams& pa, F&& f,
                  std::uint64_t psi_lo, std::uint64_t psi_hi) {
    const int ni = reg.n_interior();
    const int nt = reg.n_total();
    const auto& edges = reg.edges();
    const int ne = static_cast<int>(edges.size());
    if (ni > 62) throw InstanceTooLarge("enumerate_rc: too many vertices", 1e300);

    const double la = std::log(pa.rc.a / (1.0 - pa.rc.a));
    std::vector<double> logit(static_cast<std::size_t>(ne)), logr(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
        double pe = rbc.edge_p[static_cast<std::size_t>(e)];
        logit[static_cast<std::size_t>(e)] = std::log(pe / (1.0 - pe));
        logr[static_cast<std::size_t>(e)] = std::log(rbc.edge_r[static_cast<std::size_t>(e)]);
    }

    // wiring template: each open boundary vertex points to the first member
    // of its class; everything else is a self-root
    std::vector<int> tmpl(static_cast<std::size_t>(nt));
    for (int v = 0; v < nt; ++v) tmpl[static_cast<std::size_t>(v)] = v;
    std::vector<int> first_of_class(static_cast<std::size_t>(rbc.n_classes), -1);
    int classes_present = 0;
    for (int i = 0; i < reg.n_boundary(); ++i) {
        if (!rbc.open[static_cast<std::size_t>(i)]) continue;
        int c = rbc.wire_class[static_cast<std::size_t>(i)];
        int v = ni + i;
        if (first_of_class[static_cast<std::size_t>(c)] < 0) {
            first_of_class[static_cast<std::size_t>(c)] = v;
            ++classes_present;
        } else {
            tmpl[static_cast<std::size_t>(v)] = first_of_class[static_cast<std::size_t>(c)];
        }
    }

    std::vector<int> parent(static_cast<std::size_t>(nt));
    std::vector<int> live;
    live.reserve(static_cast<std::size_t>(ne));
    std::vector<std::uint8_t> edge_open(static_cast<std::size_t>(ne), 0);

    RcEnumState st;
    st.region = &reg;
    st.rbc = &rbc;
    st.edge_open = edge_open;

    const std::uint64_t pm_end = std::min<std::uint64_t>(psi_hi, 1ull << ni);
    for (std::uint64_t pm = psi_lo; pm < pm_end; ++pm) {
        live.clear();
        double base = la * static_cast<double>(std::popcount(pm));
        for (int e = 0; e < ne; ++e) {
            const RegionEdge& ed = edges[static_cast<std::size_t>(e)];
            bool oa = ed.a < ni ? ((pm >> ed.a) & 1) != 0
                                : rbc.open[static_cast<std::size_t>(ed.a - ni)] != 0;
            bool ob = ed.b < ni ? ((pm >> ed.b) & 1) != 0
                                : rbc.open[static_cast<std::size_t>(ed.b - ni)] != 0;
            if (oa && ob) {
                live.push_back(e);
                base += logr[static_cast<std::size_t>(e)];
            }
        }
        const int L = static_cast<int>(live.size());
        if (L > 30) throw InstanceTooLarge("enumerate_rc: too many live edges", std::ldexp(1.0, L));
        const int base_k = std::popcount(pm) + classes_present;
        st.psi_mask = pm;
        st.live_edges = live;

        for (std::uint64_t om = 0; om < (1ull << L); ++om) {
            std::memcpy(parent.data(), tmpl.data(), sizeof(int) * static_cast<std::size_t>(nt));
            int succ = 0;
            double lw = base;
            std::uint64_t rest = om;
            while (rest) {
                int j = std::countr_zero(rest);
                rest &= rest - 1;
                int e = live[static_cast<std::size_t>(j)];
                edge_open[static_cast<std::size_t>(e)] = 1;
                lw += logit[static_cast<std::size_t>(e)];
                int ra = detail::uf_find(parent.data(), edges[static_cast<std::size_t>(e)].a);
                int rb = detail::uf_find(parent.data(), edges[static_cast<std::size_t>(e)].b);
                if (ra != rb) {
                    if (ra < rb) parent[static_cast<std::size_t>(rb)] = ra;
                    else parent[static_cast<std::size_t>(ra)] = rb;
                    ++succ;
                }
            }
            st.omega_bits = om;
            st.k = base_k - succ;
            st.logw = lw + st.k * kLog2;
            st.parent = parent.data();
            f(const_cast<const RcEnumState&>(st));
            rest = om;
            while (rest) {
                int j = std::countr_zero(rest);
                rest &= rest - 1;
                edge_open[static_cast<std::size_t>(live[static_cast<std::size_t>(j)])] = 0;
            }
        }
    }
}

template <class F>
void enumerate_rc(const Region& reg, const ResolvedBc& rbc, const ModelParams& pa, F&& f) {
    enumerate_rc(reg, rbc, pa, std::forward<F>(f), 0, ~0ull);
}

// Deterministic parallel reduction: the psi space is split into fixed blocks
// merged in index order, so the result is bit-identical for any thread count.
template <class Body>
std::vector<double> rc_reduce(const Region& reg, const ResolvedBc& rbc, const ModelParams& pa,
                              std::size_t n_out, Body body, int threads = 1) {
    const int ni = reg.n_interior();
    const std::uint64_t total = 1ull << ni;
    const int n_blocks = ni >= 6 ? 64 : 1;
    const std::uint64_t block = total / static_cast<std::uint64_t>(n_blocks);
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(n_blocks));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int b = next.fetch_add(1);
            if (b >= n_blocks) return;
            std::vector<double> acc(n_out, 0.0);
            std::uint64_t lo = static_cast<std::uint64_t>(b) * block;
            std::uint64_t hi = b == n_blocks - 1 ? total : lo + block;
            enumerate_rc(reg, rbc, pa, [&](const RcEnumState& st) { body(st, acc.data()); }, lo, hi);
            partial[static_cast<std::size_t>(b)] = std::move(acc);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<double> out(n_out, 0.0);
    for (int b = 0; b < n_blocks; ++b)
        for (std::size_t i = 0; i < n_out; ++i) out[i] += partial[static_cast<std::size_t>(b)][i];
    return out;
}

// ---------------------------------------------------------------------------
// Spin configuration enumerator: sigma in {-1,0,+1}^Lambda, lex odometer.
// ---------------------------------------------------------------------------

template <class F>
void enumerate_spins(const Region& reg, const ResolvedBc& rbc, double beta, double delta,
                     const ComplexField* field, F&& f) {
    const int ni = reg.n_interior();
    double states = std::pow(3.0, ni);
    if (states > 5.0e6)
        throw InstanceTooLarge("enumerate_spins: 3^" + std::to_string(ni) + " states", states);
    SpinConfig sigma(static_cast<std::size_t>(ni), -1);
    for (;;) {
        std::complex<double> lw = bc_log_weight(reg, rbc, sigma, beta, delta, field);
        f(const_cast<const SpinConfig&>(sigma), lw);
        int i = 0;
        while (i < ni) {
            if (sigma[static_cast<std::size_t>(i)] < 1) {
                ++sigma[static_cast<std::size_t>(i)];
                break;
            }
            sigma[static_cast<std::size_t>(i)] = -1;
            ++i;
        }
        if (i == ni) break;
    }
}

// ---------------------------------------------------------------------------
// Spec-facing operations
// ---------------------------------------------------------------------------

enum class Kind { BlumeCapel, DiluteRC, IsingLifted };

using SpinEvent = std::function<bool(const SpinConfig&)>;
using RcEvent = std::function<bool(const RcEnumState&)>;
using SpinObservable = std::function<double(const SpinConfig&)>;

std::complex<double> bc_partition(const Region& reg, const BoundarySpec& bc, double beta, double delta,
                                  const ComplexField* field = nullptr, const SpinEvent& event = nullptr);
double rc_partition(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                    const RcEvent& event = nullptr, int threads = 1);
double rc_event_probability(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                            const RcEvent& event, int threads = 1);
std::complex<double> bc_expectation(const Region& reg, const BoundarySpec& bc, double beta, double delta,
                                    const SpinObservable& obs, const ComplexField* field = nullptr,
                                    const SpinEvent& event = nullptr);
// generic dispatch used by the CLI
std::complex<double> exact_partition(Kind kind, const Region& reg, const BoundarySpec& bc,
                                     const ModelParams& pa, const ComplexField* field = nullptr);

// exact spin distribution as a dense base-3 table (index digit = sigma+1)
std::vector<double> bc_distribution(const Region& reg, const BoundarySpec& bc, double beta, double delta);

// Lifted Ising model of Section-4 type: couplings beta/4 on E1 and
// (Delta+log 2)/2 on E2, boundary l(xi).
struct LiftedIsing {
    EnlargedGraph lifted;
    double j1 = 0.0, j2 = 0.0;
    // boundary coupling terms: (lifted vertex, strength * eta)
    std::vector<std::pair<int, double>> boundary_field;
};
LiftedIsing build_lifted(const Region& reg, double beta, double delta, int xi /* -1,0,+1 */);
LiftedIsing build_lifted(const Graph& g, double beta, double delta);
double ising_partition(const LiftedIsing& li);

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct ConventionResolution {
    Convention chosen = Convention::ActivityE;
    double err_chosen = 0.0;
    double err_rejected = 0.0;
};
// Startup oracle: enumerates a single site and a two-site path and selects
// the convention under which the Edwards-Sokal marginal identity holds.
ConventionResolution resolve_convention(double beta = 0.5, double delta = -0.3);
Convention resolved_convention();  // cached

std::vector<ExactReport> verify_es_coupling(const Region& reg, const BoundarySpec& bc, double beta,
                                            double delta, Convention conv);

std::vector<ExactReport> verify_ising_mapping(const Region& reg, double beta, double delta, int xi);
std::vector<ExactReport> verify_ising_mapping(const Graph& g, double beta, double delta);

struct OrderCheckOptions {
    int n_random_events = 200;
    std::uint64_t seed = 12345;
    double tol = 1e-12;
};
std::vector<ExactReport> verify_order_properties(const Region& reg, const ModelParams& pa,
                                                 const OrderCheckOptions& opt = {});

ExactReport verify_comparison_lemma(int n, double delta, const ModelParams& pa,
                                    int n_events = 200, std::uint64_t seed = 7);

// Remark 2.3 degenerate case a=1: dilute RC equals the q=2 random cluster.
ExactReport verify_a1_reduction(const Region& reg, double p);

// Monotone event machinery shared with the OSSS module.
struct MonotoneEvent {
    std::vector<std::uint64_t> masks;  // union of up-sets {bits >= mask}
    bool contains(std::uint64_t bits) const {
        for (std::uint64_t m : masks)
            if ((bits & m) == m) return true;
        return false;
    }
};

// full distribution over the D = Lambda u E_Lambda coordinates
std::vector<double> rc_coordinate_distribution(const Region& reg, const BoundarySpec& bc,
                                               const ModelParams& pa);
// superset-sum transform g[m] = sum_{b >= m} mu[b]
std::vector<double> upset_probabilities(std::vector<double> mu);
double event_probability(const std::vector<double>& upset, const MonotoneEvent& ev);

std::vector<MonotoneEvent> standard_event_family(int n_coords, int n_random, std::uint64_t seed);

}  // namespace bc::exact
