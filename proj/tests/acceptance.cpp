// Acceptance suite: one pass/fail line per criterion, each run at its
// stated tolerance and within its stated runtime budget.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "bc/crossing.hpp"
#include "bc/exact.hpp"
#include "bc/osss.hpp"
#include "bc/phase.hpp"
#include "bc/sampler.hpp"
#include "bc/suites.hpp"

using namespace bc;

namespace {

constexpr std::uint64_t kSeed = 20260810;
int g_threads = 2;

struct Criterion {
    std::string name;
    double budget_s;
    std::function<bool(std::string&)> run;
};

double now_s() {
    using clock = std::chrono::steady_clock;
    static auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

bool approx_contains(double lo, double hi, double x) { return lo <= x && x <= hi; }

// ---- criterion 6 helper -------------------------------------------------

struct SamplerCheck {
    long instances = 0;
    long sigma_failures = 0;
    long chi2_failures = 0;
    double worst_pvalue = 1.0;
    double worst_sigma_dev = 0.0;
};

SamplerCheck sampler_suite(double beta, double delta, std::int64_t sweeps) {
    SamplerCheck out;
    Convention conv = exact::resolved_convention();
    ModelParams pa = ModelParams::spin(beta, delta, conv);
    int animal_idx = 0;
    for (const auto& animal : site_animals_2d(5)) {
        Region reg = Region::from_vertices(2, animal);
        int nv = reg.n_interior();
        for (BcKind kind : {BcKind::Free0, BcKind::Wired1}) {
            BoundarySpec bc = kind == BcKind::Free0 ? BoundarySpec::free0() : BoundarySpec::wired1();
            ++out.instances;
            // exact references
            int origin = reg.index_of(make_coord(0, 0));
            auto obs_s0 = [origin](const SpinConfig& s) {
                return static_cast<double>(s[static_cast<std::size_t>(origin)]);
            };
            auto obs_s0sq = [origin](const SpinConfig& s) {
                double v = s[static_cast<std::size_t>(origin)];
                return v * v;
            };
            auto obs_sxy = [](const SpinConfig& s) {
                return s.size() > 1 ? static_cast<double>(s[0]) * s[1] : static_cast<double>(s[0]) * s[0];
            };
            double ex_s0 = exact::bc_expectation(reg, bc, beta, delta, obs_s0).real();
            double ex_s0sq = exact::bc_expectation(reg, bc, beta, delta, obs_s0sq).real();
            double ex_sxy = exact::bc_expectation(reg, bc, beta, delta, obs_sxy).real();
            std::vector<double> probs = exact::bc_distribution(reg, bc, beta, delta);

            mc::SpinChain chain(reg, bc, pa,
                                derive_stream(kSeed, static_cast<std::uint64_t>(animal_idx * 2 +
                                                                                (kind == BcKind::Free0 ? 0 : 1)),
                                              40));
            for (int t = 0; t < 400; ++t) chain.sweep();
            std::vector<double> s0, s0sq, sxy;
            std::map<std::size_t, long> counts;
            long total = 0;
            for (std::int64_t t = 0; t < sweeps; ++t) {
                chain.sweep();
                const SpinConfig& s = chain.sigma();
                s0.push_back(s[static_cast<std::size_t>(origin)]);
                s0sq.push_back(obs_s0sq(s));
                sxy.push_back(obs_sxy(s));
                if (t % 2 == 0) {
                    std::size_t idx = 0, mul = 1;
                    for (auto x : s) {
                        idx += static_cast<std::size_t>(x + 1) * mul;
                        mul *= 3;
                    }
                    ++counts[idx];
                    ++total;
                }
            }
            auto check = [&](std::span<const double> series, double exact_value) {
                Estimate e = binning_estimate(series);
                double dev = std::fabs(e.mean - exact_value) / std::max(e.stderr_, 1e-14);
                out.worst_sigma_dev = std::max(out.worst_sigma_dev, dev);
                if (std::fabs(e.mean - exact_value) > 4.0 * e.stderr_) ++out.sigma_failures;
            };
            check(s0, ex_s0);
            check(s0sq, ex_s0sq);
            check(sxy, ex_sxy);

            double stat = 0.0;
            int dof = 0;
            for (std::size_t st = 0; st < probs.size(); ++st) {
                double expect = probs[st] * total;
                if (expect < 1e-9) continue;
                long obs = counts.count(st) ? counts.at(st) : 0;
                stat += (obs - expect) * (obs - expect) / expect;
                ++dof;
            }
            double pval = chi2_pvalue(stat, dof - 1);
            out.worst_pvalue = std::min(out.worst_pvalue, pval);
            if (pval <= 1e-3) ++out.chi2_failures;
            (void)nv;
        }
        ++animal_idx;
    }
    return out;
}

// ---- criterion 11 helper ------------------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return "<missing:" + path + ">";
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool repro_command(const std::string& tool, const std::string& args, const std::string& tag,
                   const std::vector<std::string>& extra_suffixes, std::string& detail) {
    std::string a = "/tmp/acc_" + tag + "_a.out";
    std::string b = "/tmp/acc_" + tag + "_b.out";
    std::string cmd1 = tool + " " + args + " --threads 1 --out " + a + " > /dev/null 2>&1";
    if (std::system(cmd1.c_str()) != 0 && std::system(("test -f " + a).c_str()) != 0) {
        detail += tag + ": first run failed; ";
        return false;
    }
    std::string cmd2 = tool + " rerun --manifest " + a + ".manifest.json --threads 8 --out " + b +
                       " > /dev/null 2>&1";
    if (std::system(cmd2.c_str()) != 0 && std::system(("test -f " + b).c_str()) != 0) {
        detail += tag + ": rerun failed; ";
        return false;
    }
    bool ok = slurp(a) == slurp(b);
    for (const std::string& suf : extra_suffixes) ok = ok && slurp(a + suf) == slurp(b + suf);
    if (!ok) detail += tag + ": outputs differ; ";
    return ok;
}

}  // namespace

int main() {
    Convention conv = exact::resolved_convention();
    std::cout << "resolved a-convention: " << to_string(conv) << "\n";
    double psd = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));

    std::vector<Criterion> criteria;

    criteria.push_back({"C1 Edwards-Sokal coupling suite (<=5-vertex regions, 1e-12)", 60.0,
                        [&](std::string& detail) {
                            auto suite = suites::es_coupling_suite(0.5, -0.3, 5, conv);
                            auto witness = suites::convention_witness(0.5, -0.3);
                            std::ostringstream os;
                            os << suite.records.size() << " records, " << suite.violations
                               << " violations; witness ok=" << witness.ok();
                            detail = os.str();
                            return suite.ok() && witness.ok();
                        }});

    criteria.push_back({"C2 Ising-mapping suite (<=4-vertex graphs, rel 1e-10)", 120.0,
                        [&](std::string& detail) {
                            std::vector<double> betas{0.2, 0.5, 1.0};
                            std::vector<double> deltas{-1.5, -0.693, 0.0, 1.0};
                            auto suite = suites::ising_mapping_suite(betas, deltas, 4);
                            std::ostringstream os;
                            os << suite.records.size() << " records, " << suite.violations
                               << " violations";
                            detail = os.str();
                            return suite.ok();
                        }});

    criteria.push_back({"C3 order-property suite (1x2, 2x2, 3x3 grid, 1e-12)", 600.0,
                        [&](std::string& detail) {
                            std::vector<double> grid{0.3, 0.5, 0.7};
                            auto suite = suites::order_suite(grid, grid, 200, kSeed);
                            std::ostringstream os;
                            os << suite.records.size() << " records, " << suite.violations
                               << " violations";
                            detail = os.str();
                            return suite.ok();
                        }});

    criteria.push_back({"C4 Lee-Yang suite (site factors n<=8; cone scans <=5 vertices)", 300.0,
                        [&](std::string& detail) {
                            std::vector<double> deltas{-std::log(4.0), -1.0, 0.0, 1.0};
                            auto suite = suites::leeyang_suite(8, deltas, 0.5, 5, 2.0, 101, 1e-9);
                            std::ostringstream os;
                            os << suite.records.size() << " records, " << suite.violations
                               << " violations";
                            detail = os.str();
                            return suite.ok();
                        }});

    criteria.push_back({"C5 OSSS suite (>=50 triples; Lemma 8.2; derivatives 1e-6)", 600.0,
                        [&](std::string& detail) {
                            auto suite = suites::osss_suite(kSeed, g_threads);
                            std::ostringstream os;
                            os << suite.records.size() << " records, " << suite.violations
                               << " violations";
                            detail = os.str();
                            return suite.ok();
                        }});

    criteria.push_back({"C6 sampler correctness (1e5 sweeps; 4 stderr; chi2 at 1e-3)", 600.0,
                        [&](std::string& detail) {
                            SamplerCheck res = sampler_suite(0.5, -0.3, 100000);
                            std::ostringstream os;
                            os << res.instances << " instances, sigma failures=" << res.sigma_failures
                               << ", chi2 failures=" << res.chi2_failures
                               << ", worst dev=" << res.worst_sigma_dev
                               << ", worst pval=" << res.worst_pvalue;
                            detail = os.str();
                            return res.sigma_failures == 0 && res.chi2_failures == 0;
                        }});

    phase::CriticalPointEstimate pc_a1;
    criteria.push_back({"C7 critical-point recovery at a=1 (n=32, >=1e4/step)", 1800.0,
                        [&](std::string& detail) {
                            pc_a1 = phase::find_pc(1.0, 32, 0.02, 10000, kSeed, conv, g_threads);
                            std::ostringstream os;
                            os << "bracket [" << pc_a1.p_lo << ", " << pc_a1.p_hi << "], p_sd=" << psd;
                            detail = os.str();
                            return pc_a1.p_hi - pc_a1.p_lo <= 0.02 + 1e-12 &&
                                   approx_contains(pc_a1.p_lo, pc_a1.p_hi, psd);
                        }});

    criteria.push_back(
        {"C8 quadrichotomy calibration (scales 8,16,32,64)", 3600.0, [&](std::string& detail) {
             std::vector<int> scales{8, 16, 32, 64};
             struct Case {
                 double p;
                 crossing::Verdict expect;
             };
             std::vector<Case> cases{{0.45, crossing::Verdict::SubCrit},
                                     {0.70, crossing::Verdict::SupCrit},
                                     {0.58579, crossing::Verdict::ContCrit}};
             bool ok = true;
             std::ostringstream os;
             for (const Case& c : cases) {
                 crossing::SamplingPlan plan;
                 plan.n_samples = 600;
                 plan.burn_in = 300;
                 plan.seed = derive_stream(kSeed, static_cast<std::uint64_t>(c.p * 1e4), 41);
                 plan.n_chains = g_threads;
                 plan.threads = g_threads;
                 ModelParams pa = crossing::params_from_rc(c.p, 1.0, conv);
                 crossing::QuadrichotomyVerdict v = crossing::classify_quadrichotomy(pa, scales, plan);
                 os << "p=" << c.p << " -> " << crossing::to_string(v.label) << "; ";
                 ok = ok && v.label == c.expect;
             }
             detail = os.str();
             return ok;
         }});

    criteria.push_back(
        {"C9 exponential decay at (0, 0.7 beta_c) in Lambda_40", 1800.0, [&](std::string& detail) {
             // a(Delta=0) under the resolved convention; locate p_c, then run
             // at beta = 0.7 * beta_c
             RcParams rc0 = bc_to_rc_params(1.0, 0.0, conv);  // beta placeholder for a only
             double a0 = rc0.a;
             phase::CriticalPointEstimate pc =
                 phase::find_pc(a0, 32, 0.02, 10000, derive_stream(kSeed, 9, 42), conv, g_threads);
             double beta_c = -0.5 * std::log1p(-pc.p_mid());
             double beta = 0.7 * beta_c;
             std::vector<int> xs{2, 4, 6, 8, 10, 12, 14, 16};
             crossing::SamplingPlan plan;
             plan.n_samples = 300000;
             plan.burn_in = 500;
             plan.seed = derive_stream(kSeed, 10, 43);
             phase::TwoPointResult res =
                 phase::truncated_two_point(beta, 0.0, xs, 40, plan, conv);
             std::ostringstream os;
             os << "a0=" << a0 << " p_c~" << pc.p_mid() << " beta=" << beta;
             if (res.fits_done)
                 os << " slope=" << res.exp_fit.slope << " t=" << res.exp_fit.t_slope
                    << " AIC(exp)=" << res.exp_fit.aic << " AIC(pow)=" << res.power_fit.aic;
             detail = os.str();
             return res.fits_done && res.exp_fit.slope < 0.0 && res.exp_fit.t_slope <= -3.0 &&
                    res.exp_fit.aic < res.power_fit.aic;
         }});

    criteria.push_back(
        {"C10 critical-line monotonicity over a in {0.3,...,1.0}", 7200.0, [&](std::string& detail) {
             std::vector<double> agrid{0.3, 0.5, 0.7, 0.9, 1.0};
             std::vector<phase::CriticalPointEstimate> brackets;
             std::ostringstream os;
             for (double a : agrid) {
                 brackets.push_back(phase::find_pc(a, 32, 0.008, 10000,
                                                   derive_stream(kSeed, static_cast<std::uint64_t>(a * 100), 44),
                                                   conv, g_threads));
                 os << "a=" << a << ": [" << brackets.back().p_lo << ", " << brackets.back().p_hi
                    << "] ";
             }
             bool ok = true;
             for (std::size_t i = 0; i + 1 < brackets.size(); ++i)
                 ok = ok && brackets[i].p_lo > brackets[i + 1].p_hi;  // strictly decreasing
             detail = os.str();
             return ok;
         }});

    criteria.push_back({"C11 reproducibility (rerun from manifest; threads 1 vs 8)", 3600.0,
                        [&](std::string& detail) {
                            const char* bin = std::getenv("BCTOOL_BIN");
                            if (!bin) {
                                detail = "BCTOOL_BIN not set";
                                return false;
                            }
                            std::string tool = bin;
                            bool ok = true;
                            ok &= repro_command(tool,
                                                "exact-verify --suite comparison --p 0.5 --a 0.5 "
                                                "--random-events 60 --seed 5",
                                                "exact", {}, detail);
                            ok &= repro_command(tool,
                                                "sample --model bc --bc wired --beta 0.55 --delta -0.1 "
                                                "--n 2 --sweeps 4000 --burnin 200 --chains 4 --obs "
                                                "sigma0 --obs mag --seed 6",
                                                "sample", {}, detail);
                            ok &= repro_command(tool,
                                                "crossing --p 0.6 --a 1.0 --bc wired --event h "
                                                "--scale 6 --samples 500 --burnin 100 --seed 7",
                                                "crossing", {}, detail);
                            ok &= repro_command(tool,
                                                "quad --p 0.5858 --a 1.0 --scales 8,12,16,32 "
                                                "--samples 150 --burnin 100 --seed 8",
                                                "quad", {".verdict.json"}, detail);
                            ok &= repro_command(tool,
                                                "phase-scan --a-grid 1.0 --scale 16 --tol 0.05 "
                                                "--samples 500 --seed 9",
                                                "phase", {}, detail);
                            ok &= repro_command(tool,
                                                "weak-plus --beta 0.5 --delta 0.0 --eps-list 0.3 "
                                                "--n-list 2 --samples 3000 --burnin 100 --seed 10",
                                                "weak", {}, detail);
                            ok &= repro_command(tool,
                                                "leeyang --graph path4 --beta 0.5 --delta -1.386 "
                                                "--scan-cone 1.5 --grid 21 --seed 11",
                                                "leeyang", {".summary.json"}, detail);
                            ok &= repro_command(tool, "osss-verify --seed 12", "osss", {}, detail);
                            if (ok) detail = "8 commands bit-identical across reruns and thread counts";
                            return ok;
                        }});

    int failures = 0;
    for (auto& c : criteria) {
        double t0 = now_s();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double dt = now_s() - t0;
        bool in_budget = dt <= c.budget_s;
        bool pass = ok && in_budget;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.name << "  (" << dt << " s"
                  << (in_budget ? "" : ", OVER BUDGET") << ")\n";
        if (!detail.empty()) std::cout << "       " << detail << "\n";
        std::cout.flush();
        if (!pass) ++failures;
    }
    std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed\n"
                                : "ACCEPTANCE: " + std::to_string(failures) + " criterion(s) failed\n");
    return failures == 0 ? 0 : 1;
}
