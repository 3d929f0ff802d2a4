#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bc/model.hpp"
#include "bc/sampler.hpp"
#include "bc/stats.hpp"

namespace bc::crossing {

enum class Mode { PrimalOpen, DualOpen, SpinSet };

struct CrossingSpec {
    Rect rect;
    bool horizontal = true;
    Mode mode = Mode::PrimalOpen;
    std::array<bool, 3> spin_set{false, false, false};  // membership of {-1,0,+1}
    bool star_adjacency = false;                        // SpinSet only
};

// Edge-state oracle: open(x, y, axis) for the primal edge named by its
// lex-lower endpoint. Pure detectors below run BFS on it.
using EdgeState = std::function<bool(int, int, int)>;

bool horizontal_crossing(const Rect& r, const EdgeState& open);
bool vertical_crossing(const Rect& r, const EdgeState& open);
// The planar-dual complement: a dual crossing of the conjugate rectangle
// that occurs exactly when the primal crossing fails. The first and last
// dual steps may use half-integer boundary lines outside the rectangle.
bool dual_blocks_vertical(const Rect& r, const EdgeState& open);
bool dual_blocks_horizontal(const Rect& r, const EdgeState& open);

// circuits in the annulus Lambda_{2n} \ Lambda_n surrounding the origin
bool primal_circuit(int n, const EdgeState& open);  // C_n
bool dual_circuit(int n, const EdgeState& open);    // C*_n
// the blocking connections the two circuit detectors negate
bool annulus_primal_connection(int n, const EdgeState& open);
bool annulus_dual_connection(int n, const EdgeState& open);

// site-percolation crossing on spins restricted to a value set
bool spin_crossing(const Rect& r, bool horizontal, const std::array<bool, 3>& member,
                   const std::function<int(int, int)>& spin_at, bool star_adjacency);

// detectors on sampled configurations
bool detect_crossing(const Region& reg, const RcConfig& theta, const ResolvedBc& rbc,
                     const CrossingSpec& cs);
bool detect_crossing_spins(const Region& reg, const SpinConfig& sigma, const CrossingSpec& cs);
bool detect_circuit(const Region& reg, const RcConfig& theta, int n, Mode mode);

struct EventSpec {
    enum class Kind { Crossing, Circuit };
    Kind kind = Kind::Crossing;
    CrossingSpec crossing;
    int circuit_n = 0;
    Mode circuit_mode = Mode::PrimalOpen;
    std::string label() const;
};

struct SamplingPlan {
    std::int64_t n_samples = 2000;
    std::int64_t burn_in = 200;
    int thinning = 1;
    int n_chains = 1;
    std::uint64_t seed = 1;
    int threads = 1;
};

// spin parameters matching a dilute RC point under the given convention;
// a = 1 selects the pure Ising chain
ModelParams params_from_rc(double p, double a, Convention conv);

// Monte Carlo estimate of an event probability under the dilute RC measure
// on Lambda_{2 scale} with the given boundary condition. Spins are sampled
// with the hybrid kernel; one (psi, omega) projection per retained sample.
Estimate estimate_event(const ModelParams& pa, const BoundarySpec& bc, const EventSpec& ev, int scale,
                        const SamplingPlan& plan);

// finite-aspect-ratio proxy for the strip densities p_n (free) and q_n
// (wired, no vertical crossing); the result is the alpha-th root
struct StripDensity {
    Estimate raw;       // crossing (or non-crossing) probability
    double proxy = 0.0; // raw^{1/alpha}
    double proxy_stderr = 0.0;
    int alpha = 0;
    bool degenerate = false;  // raw estimate hit 0 or 1
};
StripDensity strip_density_proxy(const ModelParams& pa, int n, int alpha, bool which_p,
                                 const SamplingPlan& plan);

enum class Verdict { SubCrit, SupCrit, ContCrit, DiscontCrit, Undecided };
std::string to_string(Verdict v);

struct ScaleRow {
    int scale = 0;
    Estimate wired;
    Estimate free;
};

struct QuadrichotomyVerdict {
    Verdict label = Verdict::Undecided;
    std::vector<ScaleRow> rows;
    LinearFit fit_wired_crossing;    // log phi^1[H_n] vs n
    LinearFit fit_free_noncrossing;  // log(1 - phi^0[H_n]) vs n
    LinearFit fit_free_crossing;     // log phi^0[H_n] vs n
    LinearFit fit_wired_noncrossing; // log(1 - phi^1[H_n]) vs n
    double t_threshold = 3.0;
    double tau = 0.02;
};

QuadrichotomyVerdict classify_quadrichotomy(const ModelParams& pa, std::span<const int> scales,
                                            const SamplingPlan& plan, double t_threshold = 3.0,
                                            double tau = 0.02);

}  // namespace bc::crossing
