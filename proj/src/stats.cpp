#include "bc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bc {

namespace {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // variance of the mean
    int bins = 0;
};

MeanVar bin_means(std::span<const double> series, std::int64_t bin_size) {
    MeanVar out;
    std::int64_t n = static_cast<std::int64_t>(series.size());
    std::int64_t nb = n / bin_size;
    if (nb < 2) return out;
    double mean = 0.0;
    for (std::int64_t b = 0; b < nb; ++b) {
        double s = 0.0;
        for (std::int64_t i = b * bin_size; i < (b + 1) * bin_size; ++i) s += series[i];
        mean += s / static_cast<double>(bin_size);
    }
    mean /= static_cast<double>(nb);
    double ss = 0.0;
    for (std::int64_t b = 0; b < nb; ++b) {
        double s = 0.0;
        for (std::int64_t i = b * bin_size; i < (b + 1) * bin_size; ++i) s += series[i];
        double bm = s / static_cast<double>(bin_size);
        ss += (bm - mean) * (bm - mean);
    }
    out.mean = mean;
    out.var = ss / (static_cast<double>(nb) * static_cast<double>(nb - 1));
    out.bins = static_cast<int>(nb);
    return out;
}

}  // namespace

Estimate binning_estimate(std::span<const double> series, int min_bins) {
    Estimate e;
    e.n_samples = static_cast<std::int64_t>(series.size());
    if (series.empty()) return e;
    if (series.size() == 1) {
        e.mean = series[0];
        return e;
    }
    double prev_err = -1.0;
    int level = 0;
    Estimate best;
    best.n_samples = e.n_samples;
    for (std::int64_t bin = 1;; bin *= 2, ++level) {
        MeanVar mv = bin_means(series, bin);
        if (mv.bins < min_bins) {
            // could not reach a plateau before running out of bins
            if (level == 0) {
                // series shorter than min_bins: single-level estimate
                MeanVar flat = bin_means(series, 1);
                best.mean = flat.mean;
                best.stderr_ = std::sqrt(std::max(0.0, flat.var));
                best.binning_level = 0;
            }
            best.binning_converged = prev_err < 0.0 ? false : best.binning_converged;
            break;
        }
        double err = std::sqrt(std::max(0.0, mv.var));
        best.mean = mv.mean;
        best.stderr_ = err;
        best.binning_level = level;
        if (prev_err >= 0.0 && err <= prev_err * 1.02) {
            best.binning_converged = true;
            break;
        }
        best.binning_converged = false;
        prev_err = err;
    }
    best.n_samples = e.n_samples;
    return best;
}

namespace {

std::vector<double> bin_series(std::span<const double> s, int n_bins) {
    std::int64_t n = static_cast<std::int64_t>(s.size());
    n_bins = static_cast<int>(std::min<std::int64_t>(n_bins, n));
    std::vector<double> out(static_cast<std::size_t>(n_bins), 0.0);
    std::int64_t bin = n / n_bins;
    for (int b = 0; b < n_bins; ++b) {
        double acc = 0.0;
        for (std::int64_t i = b * bin; i < (b + 1) * bin; ++i) acc += s[i];
        out[static_cast<std::size_t>(b)] = acc / static_cast<double>(bin);
    }
    return out;
}

JackknifeResult jackknife_impl(const std::vector<std::vector<double>>& bins,
                               double (*f)(const std::vector<double>&)) {
    int B = static_cast<int>(bins.front().size());
    std::size_t k = bins.size();
    std::vector<double> tot(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        for (int b = 0; b < B; ++b) tot[j] += bins[j][static_cast<std::size_t>(b)];
    std::vector<double> full(k);
    for (std::size_t j = 0; j < k; ++j) full[j] = tot[j] / B;
    JackknifeResult r;
    r.value = f(full);
    if (B < 2) return r;
    std::vector<double> loo(k);
    double m = 0.0, ss = 0.0;
    std::vector<double> thetas(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        for (std::size_t j = 0; j < k; ++j)
            loo[j] = (tot[j] - bins[j][static_cast<std::size_t>(b)]) / (B - 1);
        thetas[static_cast<std::size_t>(b)] = f(loo);
        m += thetas[static_cast<std::size_t>(b)];
    }
    m /= B;
    for (int b = 0; b < B; ++b) {
        double d = thetas[static_cast<std::size_t>(b)] - m;
        ss += d * d;
    }
    r.stderr_ = std::sqrt(ss * (B - 1) / B);
    return r;
}

}  // namespace

JackknifeResult jackknife_ratio(std::span<const double> num, std::span<const double> den, int n_bins) {
    std::vector<std::vector<double>> bins{bin_series(num, n_bins), bin_series(den, n_bins)};
    return jackknife_impl(bins, +[](const std::vector<double>& v) {
        return v[1] != 0.0 ? v[0] / v[1] : 0.0;
    });
}

JackknifeResult jackknife_truncated(std::span<const double> ab, std::span<const double> a,
                                    std::span<const double> b, int n_bins) {
    std::vector<std::vector<double>> bins{bin_series(ab, n_bins), bin_series(a, n_bins), bin_series(b, n_bins)};
    return jackknife_impl(bins, +[](const std::vector<double>& v) { return v[0] - v[1] * v[2]; });
}

Estimate merge_estimates(std::span<const Estimate> chains) {
    Estimate out;
    if (chains.empty()) return out;
    double mean = 0.0, var = 0.0;
    std::int64_t n = 0;
    bool conv = true;
    int level = 0;
    for (const Estimate& c : chains) {
        mean += c.mean;
        var += c.stderr_ * c.stderr_;
        n += c.n_samples;
        conv = conv && c.binning_converged;
        level = std::max(level, c.binning_level);
    }
    int nc = static_cast<int>(chains.size());
    out.mean = mean / nc;
    out.stderr_ = std::sqrt(var) / nc;
    out.n_samples = n;
    out.n_chains = nc;
    out.burn_in = chains[0].burn_in;
    out.seed = chains[0].seed;
    out.binning_level = level;
    out.binning_converged = conv;
    return out;
}

LinearFit wls_fit(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
    LinearFit f;
    std::size_t n = x.size();
    if (n < 3 || y.size() != n || sigma.size() != n) return f;
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0 / (sigma[i] * sigma[i]);
        S += w;
        Sx += w * x[i];
        Sy += w * y[i];
        Sxx += w * x[i] * x[i];
        Sxy += w * x[i] * y[i];
    }
    double det = S * Sxx - Sx * Sx;
    if (det <= 0) return f;
    f.intercept = (Sxx * Sy - Sx * Sxy) / det;
    f.slope = (S * Sxy - Sx * Sy) / det;
    f.slope_stderr = std::sqrt(S / det);
    f.t_slope = f.slope_stderr > 0 ? f.slope / f.slope_stderr : 0.0;
    double chi2 = 0.0, loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (y[i] - f.intercept - f.slope * x[i]) / sigma[i];
        chi2 += r * r;
        loglik += -0.5 * r * r - std::log(sigma[i]) - 0.5 * std::log(2.0 * 3.14159265358979323846);
    }
    f.chi2 = chi2;
    f.aic = 2.0 * 2 - 2.0 * loglik;
    f.n = static_cast<int>(n);
    f.ok = true;
    return f;
}

namespace {

// Regularized incomplete gamma, series and continued-fraction forms.
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_pvalue(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

double log_binomial_stderr_clip(double phat, std::int64_t n, double& clipped) {
    double floor_p = 0.5 / static_cast<double>(std::max<std::int64_t>(n, 2));
    clipped = std::clamp(phat, floor_p, 1.0 - floor_p);
    double se = std::sqrt(clipped * (1.0 - clipped) / static_cast<double>(std::max<std::int64_t>(n, 2)));
    return se / clipped;  // stderr of log(p)
}

}  // namespace bc
