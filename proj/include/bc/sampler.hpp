#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bc/model.hpp"
#include "bc/rng.hpp"
#include "bc/stats.hpp"
#include "bc/unionfind.hpp"

namespace bc::mc {

// Blume-Capel chain driven by the hybrid kernel: an Edwards-Sokal cluster
// sweep (which cannot change the zero set) alternated with a single-site
// heat-bath sweep (which can). Boundary spins are fixed by the bc.
class SpinChain {
public:
    SpinChain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa, std::uint64_t seed);

    void sweep() {
        es_sweep();
        site_heatbath_sweep();
        ++sweeps_;
    }
    void es_sweep();
    void site_heatbath_sweep();

    const Region& region() const { return *reg_; }
    const ResolvedBc& rbc() const { return rbc_; }
    const SpinConfig& sigma() const { return sigma_; }
    double spin(int v) const { return sigma_[static_cast<std::size_t>(v)]; }
    std::int64_t sweep_count() const { return sweeps_; }
    Rng& rng() { return rng_; }

    // conditional (psi, omega) draw given the current spins, restricted to
    // the requested edges; independent Bernoulli(p_e) on equal nonzero pairs
    void project_omega(std::span<const int> edges, std::vector<std::uint8_t>& out);
    RcConfig project_config();

    // cluster labels of the last es_sweep projection through project_all;
    // boundary spins are never modified
    void check_invariants() const;

private:
    const Region* reg_;
    BoundarySpec bc_;
    ModelParams pa_;
    ResolvedBc rbc_;
    SpinConfig sigma_;
    Rng rng_;
    std::int64_t sweeps_ = 0;
    bool ising_mode_ = false;  // a = 1: zero spins excluded

    // scratch
    std::vector<int> parent_;
    std::vector<int> wire_template_;
    std::vector<std::int8_t> root_sign_;

    std::int8_t boundary_spin(int combined) const {
        return rbc_.spin[static_cast<std::size_t>(combined - reg_->n_interior())];
    }
};

// Dilute random cluster chain: per-coordinate heat-bath (Sweeny-type edge
// moves with a connectivity query, vertex moves with the exact ratio).
class RcChain {
public:
    RcChain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa, std::uint64_t seed,
            bool freeze_vertices = false);

    void sweep();
    const RcConfig& config() const { return theta_; }
    const Region& region() const { return *reg_; }
    const ResolvedBc& rbc() const { return rbc_; }
    std::int64_t sweep_count() const { return sweeps_; }
    void check_invariants() const;
    int open_edge_count() const;

    // optional per-move hook for transition-frequency tests: arguments are
    // (is_vertex, index, full coordinate bits before the move, outcome)
    std::function<void(bool, int, std::uint64_t, bool)> move_hook;

private:
    const Region* reg_;
    ModelParams pa_;
    ResolvedBc rbc_;
    RcConfig theta_;
    Rng rng_;
    std::int64_t sweeps_ = 0;
    bool freeze_vertices_;

    bool vertex_open(int v) const {
        return v < reg_->n_interior() ? theta_.psi[static_cast<std::size_t>(v)] != 0
                                      : rbc_.open[static_cast<std::size_t>(v - reg_->n_interior())] != 0;
    }
    bool connected_without(int u, int v, int skip_edge);
    std::uint64_t coordinate_bits() const;

    std::vector<int> bfs_mark_;
    int bfs_epoch_ = 0;
    std::vector<int> bfs_queue_;
};

struct RunSpec {
    enum class Target { BlumeCapel, DiluteRC };
    Target target = Target::BlumeCapel;
    std::vector<std::string> observables;
    std::int64_t n_sweeps = 10000;
    std::int64_t burn_in = -1;  // negative: measured-plateau default
    int thinning = 1;
    int n_chains = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    bool debug_checks = false;
};

struct NamedEstimate {
    std::string name;
    Estimate estimate;
};

// Independent chains with derived per-chain seeds; estimates merged by
// chain index; deterministic given (seed, n_chains, schedule).
std::vector<NamedEstimate> run_chain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                                     const RunSpec& spec);

// Low-level loop: one chain, burn-in then callback on every retained sweep.
void run_spin_samples(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                      std::int64_t n_sweeps, std::int64_t burn_in, int thinning, std::uint64_t seed,
                      const std::function<void(SpinChain&)>& on_sample);

// named observable lookup (sigma0, sigma0sq, mag, nonzero, corr:dx[,dy],
// and for the RC target psi0, open_frac, conn0b)
std::function<double(SpinChain&)> spin_observable(const std::string& name, const Region& reg);
std::function<double(RcChain&)> rc_observable(const std::string& name, const Region& reg);

}  // namespace bc::mc
