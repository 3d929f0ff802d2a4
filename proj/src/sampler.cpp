#include "bc/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace bc::mc {

namespace {

int uf_find(std::vector<int>& p, int x) {
    while (p[static_cast<std::size_t>(x)] != x) {
        p[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
        x = p[static_cast<std::size_t>(x)];
    }
    return x;
}

void uf_unite(std::vector<int>& p, int a, int b) {
    a = uf_find(p, a);
    b = uf_find(p, b);
    if (a == b) return;
    if (a < b) p[static_cast<std::size_t>(b)] = a;
    else p[static_cast<std::size_t>(a)] = b;
}

}  // namespace

SpinChain::SpinChain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                     std::uint64_t seed)
    : reg_(&reg), bc_(bc), pa_(pa), rbc_(resolve_bc(reg, bc, pa)), rng_(seed) {
    if (pa.rc.a >= 1.0) ising_mode_ = true;
    if (pa.beta <= 0.0) throw std::invalid_argument("SpinChain: beta must be > 0");
    sigma_.assign(static_cast<std::size_t>(reg.n_interior()), +1);
    int nt = reg.n_total();
    wire_template_.resize(static_cast<std::size_t>(nt));
    for (int v = 0; v < nt; ++v) wire_template_[static_cast<std::size_t>(v)] = v;
    std::vector<int> first(static_cast<std::size_t>(rbc_.n_classes), -1);
    for (int i = 0; i < reg.n_boundary(); ++i) {
        if (!rbc_.open[static_cast<std::size_t>(i)]) continue;
        int c = rbc_.wire_class[static_cast<std::size_t>(i)];
        int v = reg.n_interior() + i;
        if (first[static_cast<std::size_t>(c)] < 0) first[static_cast<std::size_t>(c)] = v;
        else wire_template_[static_cast<std::size_t>(v)] = first[static_cast<std::size_t>(c)];
    }
    parent_.resize(static_cast<std::size_t>(nt));
    root_sign_.resize(static_cast<std::size_t>(nt));
}

void SpinChain::es_sweep() {
    const Region& reg = *reg_;
    int ni = reg.n_interior();
    int nt = reg.n_total();
    std::memcpy(parent_.data(), wire_template_.data(), sizeof(int) * static_cast<std::size_t>(nt));

    // bond pass: Bernoulli(p_e) on equal nonzero pairs, fixed edge order
    const auto& edges = reg.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const RegionEdge& ed = edges[e];
        int sa = ed.a < ni ? sigma_[static_cast<std::size_t>(ed.a)] : boundary_spin(ed.a);
        if (sa == 0) continue;
        int sb = ed.b < ni ? sigma_[static_cast<std::size_t>(ed.b)] : boundary_spin(ed.b);
        if (sb != sa) continue;
        if (!ed.interior && !rbc_.open[static_cast<std::size_t>(ed.b - ni)]) continue;
        if (rng_.uniform() < rbc_.edge_p[e]) uf_unite(parent_, ed.a, ed.b);
    }

    // sign pass: boundary-touching clusters keep the wired sign, the rest
    // are resampled uniformly; iteration order fixed by vertex index
    std::fill(root_sign_.begin(), root_sign_.end(), static_cast<std::int8_t>(0));
    for (int i = 0; i < reg.n_boundary(); ++i) {
        if (!rbc_.open[static_cast<std::size_t>(i)]) continue;
        int r = uf_find(parent_, ni + i);
        root_sign_[static_cast<std::size_t>(r)] = rbc_.spin[static_cast<std::size_t>(i)];
    }
    for (int v = 0; v < ni; ++v) {
        if (sigma_[static_cast<std::size_t>(v)] == 0) continue;
        int r = uf_find(parent_, v);
        std::int8_t s = root_sign_[static_cast<std::size_t>(r)];
        if (s == 0) {
            s = rng_.bernoulli(0.5) ? +1 : -1;
            root_sign_[static_cast<std::size_t>(r)] = s;
        }
        sigma_[static_cast<std::size_t>(v)] = s;
    }
}

void SpinChain::site_heatbath_sweep() {
    const Region& reg = *reg_;
    int ni = reg.n_interior();
    double delta = pa_.delta;
    for (int v = 0; v < ni; ++v) {
        double u = 0.0;
        for (auto [eid, w] : reg.incident(v)) {
            double sw = w < ni ? sigma_[static_cast<std::size_t>(w)] : boundary_spin(w);
            u += rbc_.edge_coupling[static_cast<std::size_t>(eid)] * sw;
        }
        if (ising_mode_) {
            double pplus = 1.0 / (1.0 + std::exp(-2.0 * u));
            sigma_[static_cast<std::size_t>(v)] = rng_.uniform() < pplus ? +1 : -1;
        } else {
            // three-state conditional: {0: 1, +: e^{D+u}, -: e^{D-u}}
            double m = std::max(0.0, delta + std::fabs(u));
            double w0 = std::exp(-m);
            double wp = std::exp(delta + u - m);
            double wm = std::exp(delta - u - m);
            double x = rng_.uniform() * (w0 + wp + wm);
            sigma_[static_cast<std::size_t>(v)] = x < w0 ? 0 : (x < w0 + wp ? +1 : -1);
        }
    }
}

void SpinChain::project_omega(std::span<const int> edges, std::vector<std::uint8_t>& out) {
    const Region& reg = *reg_;
    int ni = reg.n_interior();
    out.assign(edges.size(), 0);
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(edges[j])];
        int sa = ed.a < ni ? sigma_[static_cast<std::size_t>(ed.a)] : boundary_spin(ed.a);
        if (sa == 0) continue;
        int sb = ed.b < ni ? sigma_[static_cast<std::size_t>(ed.b)] : boundary_spin(ed.b);
        if (sb != sa) continue;
        if (!ed.interior && !rbc_.open[static_cast<std::size_t>(ed.b - ni)]) continue;
        if (rng_.uniform() < rbc_.edge_p[static_cast<std::size_t>(edges[j])]) out[j] = 1;
    }
}

RcConfig SpinChain::project_config() {
    RcConfig t;
    int ni = reg_->n_interior();
    t.psi.resize(static_cast<std::size_t>(ni));
    for (int v = 0; v < ni; ++v)
        t.psi[static_cast<std::size_t>(v)] = sigma_[static_cast<std::size_t>(v)] != 0;
    std::vector<int> all(static_cast<std::size_t>(reg_->n_edges()));
    for (int e = 0; e < reg_->n_edges(); ++e) all[static_cast<std::size_t>(e)] = e;
    project_omega(all, t.omega);
    return t;
}

void SpinChain::check_invariants() const {
    for (auto s : sigma_)
        if (s < -1 || s > 1) throw std::logic_error("SpinChain: corrupt spin value");
    if (ising_mode_)
        for (auto s : sigma_)
            if (s == 0) throw std::logic_error("SpinChain: zero spin in Ising mode");
}

// ---------------------------------------------------------------------------

RcChain::RcChain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa, std::uint64_t seed,
                 bool freeze_vertices)
    : reg_(&reg), pa_(pa), rbc_(resolve_bc(reg, bc, pa)), rng_(seed), freeze_vertices_(freeze_vertices) {
    if (!(pa.rc.p > 0.0 && pa.rc.p < 1.0))
        throw std::invalid_argument("RcChain: p must lie in (0,1)");
    if (!(pa.rc.a > 0.0 && pa.rc.a < 1.0))
        throw std::invalid_argument("RcChain: a must lie in (0,1)");
    if (!(pa.rc.r > 0.0)) throw std::invalid_argument("RcChain: r must be positive (r = 0 degenerate)");
    theta_.psi.assign(static_cast<std::size_t>(reg.n_interior()), 1);
    theta_.omega.assign(static_cast<std::size_t>(reg.n_edges()), 0);
    bfs_mark_.assign(static_cast<std::size_t>(reg.n_total()), 0);
}

std::uint64_t RcChain::coordinate_bits() const {
    int ni = reg_->n_interior();
    std::uint64_t b = 0;
    for (int v = 0; v < ni; ++v)
        if (theta_.psi[static_cast<std::size_t>(v)]) b |= 1ull << v;
    for (int e = 0; e < reg_->n_edges(); ++e)
        if (theta_.omega[static_cast<std::size_t>(e)]) b |= 1ull << (ni + e);
    return b;
}

bool RcChain::connected_without(int u, int v, int skip_edge) {
    const Region& reg = *reg_;
    int ni = reg.n_interior();
    ++bfs_epoch_;
    bfs_queue_.clear();
    auto push = [&](int x) {
        if (bfs_mark_[static_cast<std::size_t>(x)] != bfs_epoch_) {
            bfs_mark_[static_cast<std::size_t>(x)] = bfs_epoch_;
            bfs_queue_.push_back(x);
        }
    };
    push(u);
    for (std::size_t qi = 0; qi < bfs_queue_.size(); ++qi) {
        int x = bfs_queue_[qi];
        if (x == v) return true;
        if (x >= ni) {
            int cls = rbc_.wire_class[static_cast<std::size_t>(x - ni)];
            if (cls >= 0)
                for (int i = 0; i < reg.n_boundary(); ++i)
                    if (rbc_.wire_class[static_cast<std::size_t>(i)] == cls) push(ni + i);
        }
        for (auto [eid, w] : reg.incident(x)) {
            if (eid == skip_edge || !theta_.omega[static_cast<std::size_t>(eid)]) continue;
            push(w);
        }
    }
    return bfs_mark_[static_cast<std::size_t>(v)] == bfs_epoch_;
}

void RcChain::sweep() {
    const Region& reg = *reg_;
    int ni = reg.n_interior();
    double A = pa_.rc.a / (1.0 - pa_.rc.a);

    if (!freeze_vertices_) {
        for (int v = 0; v < ni; ++v) {
            bool any_open_edge = false;
            for (auto [eid, w] : reg.incident(v)) {
                (void)w;
                if (theta_.omega[static_cast<std::size_t>(eid)]) {
                    any_open_edge = true;
                    break;
                }
            }
            std::uint64_t bits = move_hook ? coordinate_bits() : 0;
            bool outcome;
            if (any_open_edge) {
                outcome = true;  // conditional law forces the vertex open
            } else {
                double rprod = 1.0;
                for (auto [eid, w] : reg.incident(v))
                    if (vertex_open(w)) rprod *= rbc_.edge_r[static_cast<std::size_t>(eid)];
                double w1 = 2.0 * A * rprod;  // opening creates a new cluster
                outcome = rng_.uniform() * (1.0 + w1) < w1;
            }
            theta_.psi[static_cast<std::size_t>(v)] = outcome ? 1 : 0;
            if (move_hook) move_hook(true, v, bits, outcome);
        }
    }

    for (int e = 0; e < reg.n_edges(); ++e) {
        const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
        if (!vertex_open(ed.a) || !vertex_open(ed.b)) {
            theta_.omega[static_cast<std::size_t>(e)] = 0;
            continue;
        }
        std::uint64_t bits = move_hook ? coordinate_bits() : 0;
        double pe = rbc_.edge_p[static_cast<std::size_t>(e)];
        double u = pe / (1.0 - pe);
        theta_.omega[static_cast<std::size_t>(e)] = 0;
        bool joined = connected_without(ed.a, ed.b, e);
        double w1 = joined ? u : 0.5 * u;  // closing a bridge splits a cluster
        bool outcome = rng_.uniform() * (1.0 + w1) < w1;
        theta_.omega[static_cast<std::size_t>(e)] = outcome ? 1 : 0;
        if (move_hook) move_hook(false, e, bits, outcome);
    }
    ++sweeps_;
}

void RcChain::check_invariants() const {
    if (!is_compatible(*reg_, rbc_, theta_)) throw std::logic_error("RcChain: incompatible state");
}

int RcChain::open_edge_count() const {
    int c = 0;
    for (auto b : theta_.omega) c += b != 0;
    return c;
}

// ---------------------------------------------------------------------------
// chain driver
// ---------------------------------------------------------------------------

namespace {

std::int64_t measured_burn_in(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                              std::uint64_t seed, std::int64_t n_sweeps) {
    // pilot run: binning plateau of a cheap observable; burn-in is ten
    // times the plateau bin size
    std::int64_t pilot = std::min<std::int64_t>(1024, std::max<std::int64_t>(128, n_sweeps / 8));
    SpinChain chain(reg, bc, pa, derive_stream(seed, 0, 0x9));
    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(pilot));
    int origin = reg.index_of(make_coord(0));
    for (std::int64_t t = 0; t < pilot; ++t) {
        chain.sweep();
        series.push_back(chain.spin(origin) * chain.spin(origin));
    }
    Estimate e = binning_estimate(series);
    std::int64_t burn = 10ll * (1ll << e.binning_level);
    return std::clamp<std::int64_t>(burn, 64, std::max<std::int64_t>(64, n_sweeps / 4));
}

}  // namespace

std::function<double(SpinChain&)> spin_observable(const std::string& name, const Region& reg) {
    int origin = reg.index_of(make_coord(0));
    if (name == "sigma0") return [origin](SpinChain& c) { return c.spin(origin); };
    if (name == "sigma0sq")
        return [origin](SpinChain& c) { return c.spin(origin) * c.spin(origin); };
    if (name == "mag")
        return [](SpinChain& c) {
            double s = 0.0;
            for (auto x : c.sigma()) s += x;
            return s / static_cast<double>(c.sigma().size());
        };
    if (name == "nonzero")
        return [](SpinChain& c) {
            double s = 0.0;
            for (auto x : c.sigma()) s += x != 0;
            return s / static_cast<double>(c.sigma().size());
        };
    if (name.rfind("corr:", 0) == 0) {
        Coord x = make_coord(0);
        std::sscanf(name.c_str() + 5, "%d,%d,%d", &x[0], &x[1], &x[2]);
        int target = reg.index_of(x);
        if (target < 0 || target >= reg.n_interior())
            throw std::invalid_argument("observable " + name + ": point outside the region");
        int origin2 = origin;
        return [origin2, target](SpinChain& c) { return c.spin(origin2) * c.spin(target); };
    }
    throw std::invalid_argument("unknown spin observable: " + name);
}

std::function<double(RcChain&)> rc_observable(const std::string& name, const Region& reg) {
    int origin = reg.index_of(make_coord(0));
    if (name == "psi0")
        return [origin](RcChain& c) {
            return static_cast<double>(c.config().psi[static_cast<std::size_t>(origin)]);
        };
    if (name == "open_frac")
        return [](RcChain& c) {
            return static_cast<double>(c.open_edge_count()) /
                   static_cast<double>(c.config().omega.size());
        };
    if (name == "conn0b")
        return [origin](RcChain& c) {
            return connected_to_boundary(c.region(), c.rbc(), c.config(), origin) ? 1.0 : 0.0;
        };
    throw std::invalid_argument("unknown rc observable: " + name);
}

std::vector<NamedEstimate> run_chain(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                                     const RunSpec& spec) {
    std::size_t n_obs = spec.observables.size();
    std::int64_t burn = spec.burn_in >= 0 ? spec.burn_in
                                          : (spec.target == RunSpec::Target::BlumeCapel
                                                 ? measured_burn_in(reg, bc, pa, spec.seed, spec.n_sweeps)
                                                 : std::max<std::int64_t>(64, spec.n_sweeps / 10));

    std::vector<std::vector<Estimate>> per_chain(static_cast<std::size_t>(spec.n_chains));
    auto run_one = [&](int chain_idx) {
        std::uint64_t cseed = derive_stream(spec.seed, static_cast<std::uint64_t>(chain_idx), 1);
        std::vector<std::vector<double>> series(n_obs);
        if (spec.target == RunSpec::Target::BlumeCapel) {
            std::vector<std::function<double(SpinChain&)>> fns;
            for (const auto& o : spec.observables) fns.push_back(spin_observable(o, reg));
            SpinChain chain(reg, bc, pa, cseed);
            for (std::int64_t t = 0; t < burn; ++t) chain.sweep();
            for (std::int64_t t = 0; t < spec.n_sweeps; ++t) {
                chain.sweep();
                if (spec.debug_checks) chain.check_invariants();
                if (t % spec.thinning == 0)
                    for (std::size_t i = 0; i < n_obs; ++i) series[i].push_back(fns[i](chain));
            }
        } else {
            std::vector<std::function<double(RcChain&)>> fns;
            for (const auto& o : spec.observables) fns.push_back(rc_observable(o, reg));
            RcChain chain(reg, bc, pa, cseed);
            for (std::int64_t t = 0; t < burn; ++t) chain.sweep();
            for (std::int64_t t = 0; t < spec.n_sweeps; ++t) {
                chain.sweep();
                if (spec.debug_checks) chain.check_invariants();
                if (t % spec.thinning == 0)
                    for (std::size_t i = 0; i < n_obs; ++i) series[i].push_back(fns[i](chain));
            }
        }
        std::vector<Estimate> ests;
        for (std::size_t i = 0; i < n_obs; ++i) {
            Estimate e = binning_estimate(series[i]);
            e.burn_in = burn;
            e.seed = cseed;
            ests.push_back(e);
        }
        per_chain[static_cast<std::size_t>(chain_idx)] = std::move(ests);
    };

    if (spec.threads <= 1 || spec.n_chains == 1) {
        for (int c = 0; c < spec.n_chains; ++c) run_one(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        int nt = std::min(spec.threads, spec.n_chains);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&]() {
                for (;;) {
                    int c = next.fetch_add(1);
                    if (c >= spec.n_chains) return;
                    run_one(c);
                }
            });
        for (auto& t : pool) t.join();
    }

    std::vector<NamedEstimate> out;
    for (std::size_t i = 0; i < n_obs; ++i) {
        std::vector<Estimate> chains;
        for (int c = 0; c < spec.n_chains; ++c)
            chains.push_back(per_chain[static_cast<std::size_t>(c)][i]);
        Estimate merged = merge_estimates(chains);
        merged.seed = spec.seed;
        out.push_back({spec.observables[i], merged});
    }
    return out;
}

void run_spin_samples(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                      std::int64_t n_sweeps, std::int64_t burn_in, int thinning, std::uint64_t seed,
                      const std::function<void(SpinChain&)>& on_sample) {
    SpinChain chain(reg, bc, pa, seed);
    for (std::int64_t t = 0; t < burn_in; ++t) chain.sweep();
    for (std::int64_t t = 0; t < n_sweeps; ++t) {
        chain.sweep();
        if (t % thinning == 0) on_sample(chain);
    }
}

}  // namespace bc::mc
