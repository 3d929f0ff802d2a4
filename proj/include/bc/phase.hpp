#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bc/crossing.hpp"
#include "bc/model.hpp"
#include "bc/stats.hpp"

namespace bc::phase {

struct BisectionStep {
    double p = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
};

struct CriticalPointEstimate {
    double a = 0.0;
    double p_lo = 0.0;
    double p_hi = 1.0;
    int scale = 0;
    std::int64_t samples_per_step = 0;
    std::uint64_t seed = 0;
    std::vector<BisectionStep> trace;
    double p_mid() const { return 0.5 * (p_lo + p_hi); }
};

// Bisection on p of the wired square-crossing estimate phi^1_{Lambda_2n}[H_n]
// against threshold 1/2, refined until the bracket is <= tol. Statistically
// ambiguous steps (within 3 sigma of 1/2) are re-sampled with 4x samples.
CriticalPointEstimate find_pc(double a, int scale, double tol, std::int64_t samples_per_step,
                              std::uint64_t seed, Convention conv, int threads = 1);

struct ProfileRow {
    int n = 0;
    Estimate direct;  // <sigma_0> by spin sampling
    Estimate via_rc;  // phi^1[0 <-> dLambda] through the coupling
};
std::vector<ProfileRow> magnetization_profile(double beta, double delta, std::span<const int> n_list,
                                              bool plus_bc, const crossing::SamplingPlan& plan,
                                              Convention conv);

struct TwoPointRow {
    int x = 0;
    double raw = 0.0;  // <sigma_0 sigma_x> via the connection probability
    double raw_stderr = 0.0;
    double truncated = 0.0;  // <sigma_0 ; sigma_x>, covariance-aware errors
    double truncated_stderr = 0.0;
};
struct TwoPointResult {
    std::vector<TwoPointRow> rows;
    LinearFit exp_fit;    // log y = alpha - c x
    LinearFit power_fit;  // log y = alpha - c log x
    bool fits_done = false;
};
// two-point profile along the x-axis inside Lambda_volume with plus bc
TwoPointResult truncated_two_point(double beta, double delta, std::span<const int> xs, int volume_n,
                                   const crossing::SamplingPlan& plan, Convention conv);

struct WeakPlusRow {
    double eps = 0.0;
    int n = 0;
    double cond_eps = 0.0;  // mu^{+,eps}[sigma_0 | sigma_0 != 0]
    double cond_eps_stderr = 0.0;
    double cond_plus = 0.0;  // mu^+ reference
    double cond_plus_stderr = 0.0;
    double gap = 0.0;
    double gap_stderr = 0.0;
    double effective_samples = 0.0;  // n_samples * P(sigma_0 != 0)
};
std::vector<WeakPlusRow> weak_plus_probe(double beta, double delta, std::span<const double> eps_list,
                                         std::span<const int> n_list,
                                         const crossing::SamplingPlan& plan, Convention conv);

// W^eps = Z^{+,eps}[sigma_0 = -1] / Z^{+,eps}[sigma_0 = +1], exact on
// enumerable volumes
double exact_w_ratio(int n, int d, double beta, double delta, double eps);

}  // namespace bc::phase
