#include "bc/phase.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <stdexcept>

#include "bc/exact.hpp"
#include "bc/sampler.hpp"
#include "bc/unionfind.hpp"

namespace bc::phase {

namespace {

using crossing::EventSpec;
using crossing::Mode;
using crossing::SamplingPlan;

Estimate wired_square_crossing(double p, double a, int scale, std::int64_t samples,
                               std::uint64_t seed, Convention conv, int threads) {
    ModelParams pa = crossing::params_from_rc(p, a, conv);
    EventSpec ev;
    ev.kind = EventSpec::Kind::Crossing;
    ev.crossing.rect = Rect{-scale, scale, -scale, scale};
    ev.crossing.horizontal = true;
    ev.crossing.mode = Mode::PrimalOpen;
    SamplingPlan plan;
    plan.n_chains = std::max(1, threads);
    plan.n_samples = samples / plan.n_chains;
    plan.burn_in = std::max<std::int64_t>(100, scale * 4);
    plan.seed = seed;
    plan.threads = threads;
    return crossing::estimate_event(pa, BoundarySpec::wired1(), ev, scale, plan);
}

}  // namespace

CriticalPointEstimate find_pc(double a, int scale, double tol, std::int64_t samples_per_step,
                              std::uint64_t seed, Convention conv, int threads) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("find_pc: a must lie in (0, 1]");
    if (scale < 16) throw std::invalid_argument("find_pc: scale must be >= 16");
    CriticalPointEstimate out;
    out.a = a;
    out.scale = scale;
    out.samples_per_step = samples_per_step;
    out.seed = seed;

    double lo = 0.05, hi = 0.99;
    int step = 0;
    auto measure = [&](double p) {
        std::int64_t n = samples_per_step;
        for (int attempt = 0;; ++attempt) {
            Estimate e = wired_square_crossing(p, a, scale, n,
                                               derive_stream(seed, static_cast<std::uint64_t>(step * 8 + attempt), 6),
                                               conv, threads);
            out.trace.push_back({p, e.mean, e.stderr_, e.n_samples});
            // a statistically non-monotone (ambiguous) step: re-sample 4x
            if (std::fabs(e.mean - 0.5) >= 3.0 * e.stderr_ || attempt >= 2) return e.mean;
            n *= 4;
        }
    };
    // sanity of the initial bracket; expand toward the ends if needed
    for (int guard = 0; guard < 3 && measure(lo) > 0.5; ++guard) lo = lo / 2;
    ++step;
    for (int guard = 0; guard < 3 && measure(hi) < 0.5; ++guard) hi = 0.5 * (1.0 + hi);
    ++step;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double est = measure(mid);
        ++step;
        if (est > 0.5) hi = mid;
        else lo = mid;
    }
    out.p_lo = lo;
    out.p_hi = hi;
    return out;
}

namespace {

// per-sample union-find over a full projected configuration
struct ConnectivityScratch {
    std::vector<int> parent;
    std::vector<int> wire_template;
    std::vector<int> all_edges;

    ConnectivityScratch(const Region& reg, const ResolvedBc& rbc) {
        int nt = reg.n_total();
        wire_template.resize(static_cast<std::size_t>(nt));
        for (int v = 0; v < nt; ++v) wire_template[static_cast<std::size_t>(v)] = v;
        std::vector<int> first(static_cast<std::size_t>(rbc.n_classes), -1);
        for (int i = 0; i < reg.n_boundary(); ++i) {
            if (!rbc.open[static_cast<std::size_t>(i)]) continue;
            int c = rbc.wire_class[static_cast<std::size_t>(i)];
            int v = reg.n_interior() + i;
            if (first[static_cast<std::size_t>(c)] < 0) first[static_cast<std::size_t>(c)] = v;
            else wire_template[static_cast<std::size_t>(v)] = first[static_cast<std::size_t>(c)];
        }
        parent.resize(static_cast<std::size_t>(nt));
        all_edges.resize(static_cast<std::size_t>(reg.n_edges()));
        for (int e = 0; e < reg.n_edges(); ++e) all_edges[static_cast<std::size_t>(e)] = e;
    }

    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }

    // build components from a projected omega over all region edges
    void build(const Region& reg, const mc::SpinChain& chain, std::span<const std::uint8_t> omega) {
        std::memcpy(parent.data(), wire_template.data(),
                    sizeof(int) * static_cast<std::size_t>(reg.n_total()));
        for (int e = 0; e < reg.n_edges(); ++e) {
            if (!omega[static_cast<std::size_t>(e)]) continue;
            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
            int ra = find(ed.a), rb = find(ed.b);
            if (ra != rb) {
                if (ra < rb) parent[static_cast<std::size_t>(rb)] = ra;
                else parent[static_cast<std::size_t>(ra)] = rb;
            }
        }
        (void)chain;
    }
};

}  // namespace

std::vector<ProfileRow> magnetization_profile(double beta, double delta, std::span<const int> n_list,
                                              bool plus_bc, const crossing::SamplingPlan& plan,
                                              Convention conv) {
    std::vector<ProfileRow> out;
    ModelParams pa = ModelParams::spin(beta, delta, conv);
    BoundarySpec bc = plus_bc ? BoundarySpec::plus() : BoundarySpec::free0();
    for (int n : n_list) {
        Region reg = Region::box(n, 2);
        ResolvedBc rbc = resolve_bc(reg, bc, pa);
        int origin = reg.index_of(make_coord(0));
        ConnectivityScratch scratch(reg, rbc);

        std::vector<double> direct_series, rc_series;
        std::vector<std::uint8_t> omega;
        mc::run_spin_samples(reg, bc, pa, plan.n_samples * plan.thinning, plan.burn_in, plan.thinning,
                             derive_stream(plan.seed, static_cast<std::uint64_t>(n), 10),
                             [&](mc::SpinChain& chain) {
                                 direct_series.push_back(chain.spin(origin));
                                 chain.project_omega(scratch.all_edges, omega);
                                 scratch.build(reg, chain, omega);
                                 bool conn = false;
                                 if (chain.spin(origin) != 0) {
                                     int r0 = scratch.find(origin);
                                     for (int i = 0; i < reg.n_boundary() && !conn; ++i)
                                         if (rbc.open[static_cast<std::size_t>(i)])
                                             conn = scratch.find(reg.n_interior() + i) == r0;
                                 }
                                 rc_series.push_back(conn ? 1.0 : 0.0);
                             });
        ProfileRow row;
        row.n = n;
        row.direct = binning_estimate(direct_series);
        row.via_rc = binning_estimate(rc_series);
        row.direct.seed = row.via_rc.seed = plan.seed;
        out.push_back(row);
    }
    return out;
}

TwoPointResult truncated_two_point(double beta, double delta, std::span<const int> xs, int volume_n,
                                   const crossing::SamplingPlan& plan, Convention conv) {
    for (int x : xs)
        if (x < 0 || x > volume_n / 2)
            throw std::invalid_argument("truncated_two_point: need 0 <= x <= n/2");
    ModelParams pa = ModelParams::spin(beta, delta, conv);
    Region reg = Region::box(volume_n, 2);
    BoundarySpec bc = BoundarySpec::plus();
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    int origin = reg.index_of(make_coord(0));
    std::vector<int> targets;
    for (int x : xs) targets.push_back(reg.index_of(make_coord(x, 0)));
    ConnectivityScratch scratch(reg, rbc);

    std::size_t k = xs.size();
    std::vector<std::vector<double>> conn_series(k), prod_series(k), sx_series(k);
    std::vector<double> s0_series;
    std::vector<std::uint8_t> omega;
    mc::run_spin_samples(reg, bc, pa, plan.n_samples * plan.thinning, plan.burn_in, plan.thinning,
                         derive_stream(plan.seed, 0, 11), [&](mc::SpinChain& chain) {
                             chain.project_omega(scratch.all_edges, omega);
                             scratch.build(reg, chain, omega);
                             int r0 = chain.spin(origin) != 0 ? scratch.find(origin) : -1;
                             s0_series.push_back(chain.spin(origin));
                             for (std::size_t i = 0; i < k; ++i) {
                                 int tv = targets[i];
                                 bool conn = r0 >= 0 && chain.spin(tv) != 0 && scratch.find(tv) == r0;
                                 conn_series[i].push_back(conn ? 1.0 : 0.0);
                                 prod_series[i].push_back(chain.spin(origin) * chain.spin(tv));
                                 sx_series[i].push_back(chain.spin(tv));
                             }
                         });

    TwoPointResult out;
    std::vector<double> fx, fy, fs;
    for (std::size_t i = 0; i < k; ++i) {
        TwoPointRow row;
        row.x = xs[i];
        Estimate conn = binning_estimate(conn_series[i]);
        row.raw = conn.mean;
        row.raw_stderr = conn.stderr_;
        JackknifeResult tr = jackknife_truncated(prod_series[i], s0_series, sx_series[i]);
        row.truncated = tr.value;
        row.truncated_stderr = tr.stderr_;
        out.rows.push_back(row);
        if (row.x > 0 && row.raw > 0.0 && conn.n_samples > 1) {
            double clipped;
            double se_log = log_binomial_stderr_clip(row.raw, conn.n_samples, clipped);
            se_log = std::max(se_log, row.raw_stderr / std::max(clipped, 1e-12));
            fx.push_back(row.x);
            fy.push_back(std::log(clipped));
            fs.push_back(se_log);
        }
    }
    if (fx.size() >= 3) {
        out.exp_fit = wls_fit(fx, fy, fs);
        std::vector<double> lx;
        for (double x : fx) lx.push_back(std::log(x));
        out.power_fit = wls_fit(lx, fy, fs);
        out.fits_done = out.exp_fit.ok && out.power_fit.ok;
    }
    return out;
}

std::vector<WeakPlusRow> weak_plus_probe(double beta, double delta, std::span<const double> eps_list,
                                         std::span<const int> n_list,
                                         const crossing::SamplingPlan& plan, Convention conv) {
    ModelParams pa = ModelParams::spin(beta, delta, conv);
    std::vector<WeakPlusRow> out;
    for (int n : n_list) {
        Region reg = Region::box(n, 2);
        int origin = reg.index_of(make_coord(0));
        // plus-measure reference
        std::vector<double> plus_num, plus_den;
        mc::run_spin_samples(reg, BoundarySpec::plus(), pa, plan.n_samples * plan.thinning,
                             plan.burn_in, plan.thinning, derive_stream(plan.seed, static_cast<std::uint64_t>(n), 12),
                             [&](mc::SpinChain& chain) {
                                 double s = chain.spin(origin);
                                 plus_num.push_back(s);
                                 plus_den.push_back(s != 0 ? 1.0 : 0.0);
                             });
        JackknifeResult ref = jackknife_ratio(plus_num, plus_den);
        for (double eps : eps_list) {
            WeakPlusRow row;
            row.eps = eps;
            row.n = n;
            row.cond_plus = ref.value;
            row.cond_plus_stderr = ref.stderr_;
            if (eps == 0.0) {
                // mu^{+,0} is the free measure: the conditional mean is 0 by symmetry
                row.cond_eps = 0.0;
                row.cond_eps_stderr = 0.0;
                row.effective_samples = 0.0;
            } else {
                std::vector<double> num, den;
                mc::run_spin_samples(reg, BoundarySpec::eps_field(eps),
                                     pa, plan.n_samples * plan.thinning, plan.burn_in, plan.thinning,
                                     derive_stream(plan.seed, static_cast<std::uint64_t>(n * 131 + 7), 13),
                                     [&](mc::SpinChain& chain) {
                                         double s = chain.spin(origin);
                                         num.push_back(s);
                                         den.push_back(s != 0 ? 1.0 : 0.0);
                                     });
                JackknifeResult jr = jackknife_ratio(num, den);
                row.cond_eps = jr.value;
                row.cond_eps_stderr = jr.stderr_;
                double pnz = 0.0;
                for (double d : den) pnz += d;
                row.effective_samples = pnz;
            }
            row.gap = row.cond_plus - row.cond_eps;
            row.gap_stderr = std::sqrt(row.cond_plus_stderr * row.cond_plus_stderr +
                                       row.cond_eps_stderr * row.cond_eps_stderr);
            out.push_back(row);
        }
    }
    return out;
}

double exact_w_ratio(int n, int d, double beta, double delta, double eps) {
    Region reg = Region::box(n, d);
    int origin = reg.index_of(make_coord(0));
    BoundarySpec bc = BoundarySpec::eps_field(eps);
    double z_minus = exact::bc_partition(reg, bc, beta, delta, nullptr,
                                         [origin](const SpinConfig& s) {
                                             return s[static_cast<std::size_t>(origin)] == -1;
                                         })
                         .real();
    double z_plus = exact::bc_partition(reg, bc, beta, delta, nullptr,
                                        [origin](const SpinConfig& s) {
                                            return s[static_cast<std::size_t>(origin)] == +1;
                                        })
                        .real();
    return z_minus / z_plus;
}

}  // namespace bc::phase
