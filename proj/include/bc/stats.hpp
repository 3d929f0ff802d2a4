#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bc {

// A Monte Carlo result. stderr is computed by binning (>= 16 bins at the
// chosen level), so it accounts for autocorrelation; binning_level is the
// plateau level that was used and acts as the autocorrelation proxy.
struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_samples = 0;
    int n_chains = 1;
    std::int64_t burn_in = 0;
    std::uint64_t seed = 0;
    int binning_level = 0;
    bool binning_converged = true;
};

// Binning analysis of a scalar time series. Doubles the bin size until
// fewer than min_bins bins remain; returns the estimate at the plateau.
Estimate binning_estimate(std::span<const double> series, int min_bins = 16);

// stderr of f(mean_1, ..., mean_k) by leave-one-bin-out jackknife over
// jointly binned series (all series must have equal length).
struct JackknifeResult {
    double value = 0.0;
    double stderr_ = 0.0;
};
JackknifeResult jackknife_ratio(std::span<const double> num, std::span<const double> den, int n_bins = 32);
// covariance-aware a*b - c form: value = mean(ab) - mean(a)*mean(b)
JackknifeResult jackknife_truncated(std::span<const double> ab, std::span<const double> a,
                                    std::span<const double> b, int n_bins = 32);

// Merge per-chain estimates, associative, ordered by chain index.
Estimate merge_estimates(std::span<const Estimate> chains);

// Weighted least squares fit y = intercept + slope * x with per-point
// standard deviations sigma. Also reports AIC for model comparison
// (Gaussian likelihood with the given sigmas).
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double t_slope = 0.0;  // slope / slope_stderr
    double aic = 0.0;
    double chi2 = 0.0;
    int n = 0;
    bool ok = false;
};
LinearFit wls_fit(std::span<const double> x, std::span<const double> y, std::span<const double> sigma);

// Upper regularized incomplete gamma Q(a, x); chi2 tail p-value is
// Q(dof/2, x/2).
double gamma_q(double a, double x);
double chi2_pvalue(double statistic, int dof);

double log_binomial_stderr_clip(double phat, std::int64_t n, double& clipped);

}  // namespace bc
