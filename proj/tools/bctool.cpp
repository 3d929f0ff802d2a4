#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "bc/crossing.hpp"
#include "bc/exact.hpp"
#include "bc/leeyang.hpp"
#include "bc/osss.hpp"
#include "bc/phase.hpp"
#include "bc/sampler.hpp"
#include "bc/suites.hpp"

using json = nlohmann::ordered_json;
using namespace bc;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

struct OutputWriter {
    std::string path;
    std::ofstream stream;
    explicit OutputWriter(const std::string& p) : path(p), stream(p, std::ios::binary) {
        if (!stream) throw std::runtime_error("cannot open output file: " + p);
    }
    void line(const std::string& s) { stream << s << "\n"; }
};

BoundarySpec parse_bc(const std::string& s) {
    if (s == "free" || s == "0") return BoundarySpec::free0();
    if (s == "wired" || s == "plus" || s == "1" || s == "+") return BoundarySpec::wired1();
    if (s.rfind("eps:", 0) == 0) return BoundarySpec::eps_field(std::stod(s.substr(4)));
    if (s.rfind("delta:", 0) == 0) return BoundarySpec::delta_wired(std::stod(s.substr(6)));
    throw CLI::ValidationError("--bc", "unknown boundary condition: " + s);
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        out.push_back(std::stoi(s.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void write_manifest(const std::string& out_path, const std::string& command, const json& params,
                    std::uint64_t seed, int threads, double wall_s) {
    json m;
    m["command"] = command;
    m["params"] = params;
    m["convention"] = to_string(exact::resolved_convention());
    m["seed"] = seed;
    m["code_version"] = "0.1.0";
    m["threads"] = threads;
    m["wall_time_s"] = wall_s;
    std::ofstream f(out_path + ".manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
}

int write_suite(const suites::SuiteOutcome& suite, const std::string& out, const std::string& cmd,
                const json& params, std::uint64_t seed, int threads, double wall) {
    OutputWriter w(out);
    for (const json& rec : suite.records) {
        json r = rec;
        r["seed"] = seed;
        w.line(r.dump());
    }
    write_manifest(out, cmd, params, seed, threads, wall);
    if (!suite.ok()) {
        std::cerr << "check failures present: " << suite.violations << " violation(s); report at " << out
                  << "\n";
        return 1;
    }
    return 0;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Blume-Capel / dilute random cluster toolbox"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string out = "out.jsonl";
    std::uint64_t seed = 1;
    int threads = 1;
    app.add_option("--out", out, "output file; the manifest goes to <out>.manifest.json");
    app.add_option("--seed", seed, "PRNG seed");
    app.add_option("--threads", threads, "worker threads (results are thread-count independent)");

    // ---- exact-verify ----
    auto* exact_cmd = app.add_subcommand("exact-verify", "exact-enumeration identity suites");
    exact_cmd->fallthrough();
    std::string suite_name = "es-coupling";
    double ev_beta = 0.5, ev_delta = 0.0, ev_p = 0.5, ev_a = 0.5;
    int ev_maxverts = 5, ev_nrandom = 200;
    exact_cmd->add_option("--suite", suite_name,
                          "es-coupling | conventions | ising-mapping | order | comparison | a1");
    exact_cmd->add_option("--beta", ev_beta);
    exact_cmd->add_option("--delta", ev_delta);
    exact_cmd->add_option("--p", ev_p);
    exact_cmd->add_option("--a", ev_a);
    exact_cmd->add_option("--max-verts", ev_maxverts);
    exact_cmd->add_option("--random-events", ev_nrandom);

    // ---- sample ----
    auto* sample_cmd = app.add_subcommand("sample", "Markov chain estimates of observables");
    sample_cmd->fallthrough();
    std::string s_model = "bc", s_bc = "free";
    double s_beta = 0.5, s_delta = 0.0, s_p = -1.0, s_a = -1.0, s_r = -1.0;
    int s_n = 4, s_d = 2, s_thin = 1, s_chains = 1;
    std::int64_t s_sweeps = 10000, s_burnin = -1;
    std::vector<std::string> s_obs;
    sample_cmd->add_option("--model", s_model, "bc | rc");
    sample_cmd->add_option("--bc", s_bc, "free | wired | plus | eps:E | delta:D");
    sample_cmd->add_option("--beta", s_beta);
    sample_cmd->add_option("--delta", s_delta);
    sample_cmd->add_option("--p", s_p);
    sample_cmd->add_option("--a", s_a);
    sample_cmd->add_option("--r", s_r);
    sample_cmd->add_option("--n", s_n, "box radius");
    sample_cmd->add_option("--d", s_d, "dimension");
    sample_cmd->add_option("--sweeps", s_sweeps);
    sample_cmd->add_option("--burnin", s_burnin);
    sample_cmd->add_option("--thin", s_thin);
    sample_cmd->add_option("--chains", s_chains);
    sample_cmd->add_option("--obs", s_obs, "observable name (repeatable)");

    // ---- crossing ----
    auto* cross_cmd = app.add_subcommand("crossing", "crossing/circuit probability estimates");
    cross_cmd->fallthrough();
    double c_p = 0.5, c_a = 1.0;
    std::string c_bc = "wired", c_event = "h";
    int c_scale = 8;
    std::int64_t c_samples = 2000, c_burnin = 200;
    cross_cmd->add_option("--p", c_p);
    cross_cmd->add_option("--a", c_a);
    cross_cmd->add_option("--bc", c_bc);
    cross_cmd->add_option("--event", c_event, "h | v | hdual | vdual | circuit | circuitdual");
    cross_cmd->add_option("--scale", c_scale);
    cross_cmd->add_option("--samples", c_samples);
    cross_cmd->add_option("--burnin", c_burnin);

    // ---- quad ----
    auto* quad_cmd = app.add_subcommand("quad", "quadrichotomy classifier");
    quad_cmd->fallthrough();
    double q_p = 0.5858, q_a = 1.0, q_tau = 0.02, q_tthresh = 3.0;
    std::string q_scales = "8,16,32,64";
    std::int64_t q_samples = 2000, q_burnin = 200;
    quad_cmd->add_option("--p", q_p);
    quad_cmd->add_option("--a", q_a);
    quad_cmd->add_option("--scales", q_scales);
    quad_cmd->add_option("--samples", q_samples);
    quad_cmd->add_option("--burnin", q_burnin);
    quad_cmd->add_option("--tau", q_tau);
    quad_cmd->add_option("--t-threshold", q_tthresh);

    // ---- phase-scan ----
    auto* phase_cmd = app.add_subcommand("phase-scan", "critical point brackets over an a-grid");
    phase_cmd->fallthrough();
    std::string ps_agrid = "1.0";
    int ps_scale = 32;
    double ps_tol = 0.02;
    std::int64_t ps_samples = 10000;
    phase_cmd->add_option("--a-grid", ps_agrid);
    phase_cmd->add_option("--scale", ps_scale);
    phase_cmd->add_option("--tol", ps_tol);
    phase_cmd->add_option("--samples", ps_samples, "samples per bisection step");

    // ---- weak-plus ----
    auto* weak_cmd = app.add_subcommand("weak-plus", "weak plus measure probe");
    weak_cmd->fallthrough();
    double w_beta = 0.5, w_delta = 0.0;
    std::string w_eps = "0.1,0.5", w_ns = "4,8";
    std::int64_t w_samples = 20000, w_burnin = 300;
    weak_cmd->add_option("--beta", w_beta);
    weak_cmd->add_option("--delta", w_delta);
    weak_cmd->add_option("--eps-list", w_eps);
    weak_cmd->add_option("--n-list", w_ns);
    weak_cmd->add_option("--samples", w_samples);
    weak_cmd->add_option("--burnin", w_burnin);

    // ---- leeyang ----
    auto* ly_cmd = app.add_subcommand("leeyang", "complex-field partition scans");
    ly_cmd->fallthrough();
    std::string ly_graph = "path5";
    double ly_beta = 0.5, ly_delta = -std::log(4.0), ly_radius = 2.0;
    int ly_grid = 101;
    ly_cmd->add_option("--graph", ly_graph, "pathK | cycleK | starK | completeK");
    ly_cmd->add_option("--beta", ly_beta);
    ly_cmd->add_option("--delta", ly_delta);
    ly_cmd->add_option("--scan-cone", ly_radius, "cone radius R");
    ly_cmd->add_option("--grid", ly_grid);

    // ---- osss-verify ----
    auto* osss_cmd = app.add_subcommand("osss-verify", "OSSS / sharp-threshold exact checks");
    osss_cmd->fallthrough();

    // ---- rerun ----
    auto* rerun_cmd = app.add_subcommand("rerun", "re-execute a command from its manifest");
    rerun_cmd->fallthrough();
    std::string rr_manifest;
    rerun_cmd->add_option("--manifest", rr_manifest)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    Timer timer;

    try {
        if (rerun_cmd->parsed()) {
            std::ifstream f(rr_manifest);
            if (!f) throw std::runtime_error("cannot read manifest: " + rr_manifest);
            json m = json::parse(f);
            std::vector<std::string> args;
            args.push_back("bctool");
            args.push_back(m["command"].get<std::string>());
            for (auto& [k, v] : m["params"].items()) {
                if (v.is_array()) {
                    for (const auto& item : v) {
                        args.push_back("--" + k);
                        args.push_back(item.is_string() ? item.get<std::string>() : item.dump());
                    }
                } else {
                    args.push_back("--" + k);
                    args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            }
            args.push_back("--out");
            args.push_back(out);
            args.push_back("--seed");
            args.push_back(std::to_string(m["seed"].get<std::uint64_t>()));
            args.push_back("--threads");
            args.push_back(std::to_string(threads));
            std::vector<char*> cargs;
            for (auto& s : args) cargs.push_back(s.data());
            return run_cli(static_cast<int>(cargs.size()), cargs.data());
        }

        if (exact_cmd->parsed()) {
            json params{{"suite", suite_name}, {"beta", ev_beta},     {"delta", ev_delta},
                        {"p", ev_p},           {"a", ev_a},           {"max-verts", ev_maxverts},
                        {"random-events", ev_nrandom}};
            suites::SuiteOutcome suite;
            Convention conv = exact::resolved_convention();
            if (suite_name == "es-coupling") {
                suite = suites::es_coupling_suite(ev_beta, ev_delta, ev_maxverts, conv);
            } else if (suite_name == "conventions") {
                suite = suites::convention_witness(ev_beta, ev_delta);
            } else if (suite_name == "ising-mapping") {
                std::vector<double> betas{0.2, 0.5, 1.0};
                std::vector<double> deltas{-1.5, -0.693, 0.0, 1.0};
                suite = suites::ising_mapping_suite(betas, deltas, std::min(ev_maxverts, 4));
            } else if (suite_name == "order") {
                std::vector<double> grid{0.3, 0.5, 0.7};
                suite = suites::order_suite(grid, grid, ev_nrandom, seed);
            } else if (suite_name == "comparison") {
                std::vector<double> deltas{0.1, 0.3, 0.5};
                suite = suites::comparison_suite(deltas, ev_p, ev_a, ev_nrandom, seed);
            } else if (suite_name == "a1") {
                suite.absorb(exact::verify_a1_reduction(Region::rect(0, 1, 0, 1), ev_p), conv);
            } else {
                throw CLI::ValidationError("--suite", "unknown suite " + suite_name);
            }
            return write_suite(suite, out, "exact-verify", params, seed, threads, timer.seconds());
        }

        if (sample_cmd->parsed()) {
            json params{{"model", s_model},   {"bc", s_bc},       {"beta", s_beta},
                        {"delta", s_delta},   {"p", s_p},         {"a", s_a},
                        {"r", s_r},           {"n", s_n},         {"d", s_d},
                        {"sweeps", s_sweeps}, {"burnin", s_burnin}, {"thin", s_thin},
                        {"chains", s_chains}};
            for (std::size_t i = 0; i < s_obs.size(); ++i) params["obs"].push_back(s_obs[i]);
            Region reg = Region::box(s_n, s_d);
            ModelParams pa;
            mc::RunSpec spec;
            if (s_model == "bc") {
                spec.target = mc::RunSpec::Target::BlumeCapel;
                if (s_p >= 0.0 && s_a >= 0.0)
                    pa = crossing::params_from_rc(s_p, s_a, exact::resolved_convention());
                else
                    pa = ModelParams::spin(s_beta, s_delta, exact::resolved_convention());
                if (s_obs.empty()) s_obs = {"sigma0", "sigma0sq", "mag"};
            } else if (s_model == "rc") {
                spec.target = mc::RunSpec::Target::DiluteRC;
                double p = s_p >= 0.0 ? s_p : 0.5;
                double a = s_a >= 0.0 ? s_a : 0.5;
                pa = s_r > 0.0 ? ModelParams::rc_general(p, a, s_r) : ModelParams::rc_tied(p, a);
                if (s_obs.empty()) s_obs = {"psi0", "open_frac"};
            } else {
                throw CLI::ValidationError("--model", "unknown model " + s_model);
            }
            spec.observables = s_obs;
            spec.n_sweeps = s_sweeps;
            spec.burn_in = s_burnin;
            spec.thinning = s_thin;
            spec.n_chains = s_chains;
            spec.seed = seed;
            spec.threads = threads;
            auto ests = mc::run_chain(reg, parse_bc(s_bc), pa, spec);
            OutputWriter w(out);
            for (const auto& ne : ests) {
                json r;
                r["observable"] = ne.name;
                r["mean"] = ne.estimate.mean;
                r["stderr"] = ne.estimate.stderr_;
                r["n_samples"] = ne.estimate.n_samples;
                r["n_chains"] = ne.estimate.n_chains;
                r["burn_in"] = ne.estimate.burn_in;
                r["binning_level"] = ne.estimate.binning_level;
                r["binning_converged"] = ne.estimate.binning_converged;
                r["seed"] = seed;
                w.line(r.dump());
                if (!ne.estimate.binning_converged)
                    std::cerr << "warning: binning plateau not reached for " << ne.name << "\n";
            }
            write_manifest(out, "sample", params, seed, threads, timer.seconds());
            return 0;
        }

        if (cross_cmd->parsed()) {
            json params{{"p", c_p},         {"a", c_a},           {"bc", c_bc},
                        {"event", c_event}, {"scale", c_scale},   {"samples", c_samples},
                        {"burnin", c_burnin}};
            crossing::EventSpec ev;
            if (c_event == "circuit" || c_event == "circuitdual") {
                ev.kind = crossing::EventSpec::Kind::Circuit;
                ev.circuit_n = c_scale;
                ev.circuit_mode =
                    c_event == "circuit" ? crossing::Mode::PrimalOpen : crossing::Mode::DualOpen;
            } else {
                ev.kind = crossing::EventSpec::Kind::Crossing;
                ev.crossing.rect = Rect{-c_scale, c_scale, -c_scale, c_scale};
                ev.crossing.horizontal = c_event == "h" || c_event == "hdual";
                ev.crossing.mode = (c_event == "hdual" || c_event == "vdual")
                                       ? crossing::Mode::DualOpen
                                       : crossing::Mode::PrimalOpen;
            }
            crossing::SamplingPlan plan;
            plan.n_samples = c_samples;
            plan.burn_in = c_burnin;
            plan.seed = seed;
            plan.n_chains = std::max(1, threads);
            plan.n_samples = c_samples / plan.n_chains;
            ModelParams pa = crossing::params_from_rc(c_p, c_a, exact::resolved_convention());
            Estimate e = crossing::estimate_event(pa, parse_bc(c_bc), ev, c_scale, plan);
            OutputWriter w(out);
            w.line("n,bc,event,mean,stderr,n_samples,seed");
            w.line(std::to_string(c_scale) + "," + csv_quote(c_bc) + "," + csv_quote(ev.label()) + "," +
                   fmt17(e.mean) + "," + fmt17(e.stderr_) + "," + std::to_string(e.n_samples) + "," +
                   std::to_string(seed));
            write_manifest(out, "crossing", params, seed, threads, timer.seconds());
            return 0;
        }

        if (quad_cmd->parsed()) {
            json params{{"p", q_p},           {"a", q_a},         {"scales", q_scales},
                        {"samples", q_samples}, {"burnin", q_burnin}, {"tau", q_tau},
                        {"t-threshold", q_tthresh}};
            std::vector<int> scales = parse_int_list(q_scales);
            crossing::SamplingPlan plan;
            plan.burn_in = q_burnin;
            plan.seed = seed;
            plan.n_chains = std::max(1, threads);
            plan.n_samples = q_samples / plan.n_chains;
            plan.threads = threads;
            ModelParams pa = crossing::params_from_rc(q_p, q_a, exact::resolved_convention());
            crossing::QuadrichotomyVerdict v =
                crossing::classify_quadrichotomy(pa, scales, plan, q_tthresh, q_tau);
            OutputWriter w(out);
            w.line("n,bc,event,mean,stderr,n_samples,seed");
            for (const auto& row : v.rows) {
                w.line(std::to_string(row.scale) + ",wired,H," + fmt17(row.wired.mean) + "," +
                       fmt17(row.wired.stderr_) + "," + std::to_string(row.wired.n_samples) + "," +
                       std::to_string(seed));
                w.line(std::to_string(row.scale) + ",free,H," + fmt17(row.free.mean) + "," +
                       fmt17(row.free.stderr_) + "," + std::to_string(row.free.n_samples) + "," +
                       std::to_string(seed));
            }
            json verdict;
            verdict["label"] = crossing::to_string(v.label);
            auto fit_json = [](const LinearFit& f) {
                json j;
                j["slope"] = f.slope;
                j["slope_stderr"] = f.slope_stderr;
                j["t"] = f.t_slope;
                j["aic"] = f.aic;
                return j;
            };
            verdict["fit_wired_crossing"] = fit_json(v.fit_wired_crossing);
            verdict["fit_free_noncrossing"] = fit_json(v.fit_free_noncrossing);
            verdict["fit_free_crossing"] = fit_json(v.fit_free_crossing);
            verdict["fit_wired_noncrossing"] = fit_json(v.fit_wired_noncrossing);
            verdict["tau"] = v.tau;
            verdict["seed"] = seed;
            std::ofstream vf(out + ".verdict.json", std::ios::binary);
            vf << verdict.dump(2) << "\n";
            std::cout << "verdict: " << crossing::to_string(v.label) << "\n";
            write_manifest(out, "quad", params, seed, threads, timer.seconds());
            return 0;
        }

        if (phase_cmd->parsed()) {
            json params{{"a-grid", ps_agrid}, {"scale", ps_scale}, {"tol", ps_tol},
                        {"samples", ps_samples}};
            std::vector<double> agrid = parse_double_list(ps_agrid);
            OutputWriter w(out);
            w.line("a,p_lo,p_hi,n,samples,seed");
            for (double a : agrid) {
                phase::CriticalPointEstimate est = phase::find_pc(
                    a, ps_scale, ps_tol, ps_samples, derive_stream(seed, static_cast<std::uint64_t>(a * 1000), 30),
                    exact::resolved_convention(), threads);
                w.line(fmt17(a) + "," + fmt17(est.p_lo) + "," + fmt17(est.p_hi) + "," +
                       std::to_string(ps_scale) + "," + std::to_string(ps_samples) + "," +
                       std::to_string(seed));
            }
            write_manifest(out, "phase-scan", params, seed, threads, timer.seconds());
            return 0;
        }

        if (weak_cmd->parsed()) {
            json params{{"beta", w_beta},   {"delta", w_delta}, {"eps-list", w_eps},
                        {"n-list", w_ns},   {"samples", w_samples}, {"burnin", w_burnin}};
            std::vector<double> eps = parse_double_list(w_eps);
            std::vector<int> ns = parse_int_list(w_ns);
            crossing::SamplingPlan plan;
            plan.n_samples = w_samples;
            plan.burn_in = w_burnin;
            plan.seed = seed;
            auto rows = phase::weak_plus_probe(w_beta, w_delta, eps, ns, plan,
                                               exact::resolved_convention());
            OutputWriter w(out);
            w.line("eps,n,gap,stderr,cond_eps,cond_eps_stderr,cond_plus,cond_plus_stderr,ess,seed");
            for (const auto& r : rows) {
                w.line(fmt17(r.eps) + "," + std::to_string(r.n) + "," + fmt17(r.gap) + "," +
                       fmt17(r.gap_stderr) + "," + fmt17(r.cond_eps) + "," + fmt17(r.cond_eps_stderr) +
                       "," + fmt17(r.cond_plus) + "," + fmt17(r.cond_plus_stderr) + "," +
                       fmt17(r.effective_samples) + "," + std::to_string(seed));
            }
            write_manifest(out, "weak-plus", params, seed, threads, timer.seconds());
            return 0;
        }

        if (ly_cmd->parsed()) {
            json params{{"graph", ly_graph}, {"beta", ly_beta},   {"delta", ly_delta},
                        {"scan-cone", ly_radius}, {"grid", ly_grid}};
            Graph g = named_graph(ly_graph);
            std::vector<int> all(static_cast<std::size_t>(g.n));
            for (int i = 0; i < g.n; ++i) all[static_cast<std::size_t>(i)] = i;
            leeyang::ConeScanResult res =
                leeyang::cone_scan(g, ly_beta, ly_delta, all, ly_radius, ly_grid, 1e-9, true);
            OutputWriter w(out);
            w.line("graph,delta,beta,re_h,im_h,abs_z,condition");
            for (const auto& rec : res.records) {
                w.line(csv_quote(ly_graph) + "," + fmt17(ly_delta) + "," + fmt17(ly_beta) + "," +
                       fmt17(rec.h.real()) + "," + fmt17(rec.h.imag()) + "," + fmt17(rec.abs_z) + "," +
                       fmt17(rec.normalized));
            }
            json summary;
            summary["graph"] = ly_graph;
            summary["min_normalized"] = res.min_normalized;
            summary["argmin_re"] = res.argmin_h.real();
            summary["argmin_im"] = res.argmin_h.imag();
            summary["below_threshold"] = res.below_threshold;
            summary["seed"] = seed;
            std::ofstream sf(out + ".summary.json", std::ios::binary);
            sf << summary.dump(2) << "\n";
            write_manifest(out, "leeyang", params, seed, threads, timer.seconds());
            std::cout << "min |Z|/sum|terms| = " << res.min_normalized << "\n";
            return 0;
        }

        if (osss_cmd->parsed()) {
            json params = json::object();
            suites::SuiteOutcome suite = suites::osss_suite(seed, threads);
            return write_suite(suite, out, "osss-verify", params, seed, threads, timer.seconds());
        }
    } catch (const exact::InstanceTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int main(int argc, char** argv) { return run_cli(argc, argv); }
