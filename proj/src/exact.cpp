#include "bc/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "bc/rng.hpp"
#include "bc/unionfind.hpp"

namespace bc::exact {

void ExactReport::merge(const ExactReport& o) {
    n_checked += o.n_checked;
    violations += o.violations;
    if (o.max_abs_err > max_abs_err) {
        max_abs_err = o.max_abs_err;
        worst_case = o.worst_case;
    }
    max_rel_err = std::max(max_rel_err, o.max_rel_err);
}

double rc_state_count(const Region& reg, const ResolvedBc& rbc) {
    int ni = reg.n_interior();
    if (ni > 25) return 1e300;
    double total = 0.0;
    const auto& edges = reg.edges();
    for (std::uint64_t pm = 0; pm < (1ull << ni); ++pm) {
        int live = 0;
        for (const RegionEdge& ed : edges) {
            bool oa = ed.a < ni ? ((pm >> ed.a) & 1) != 0 : rbc.open[static_cast<std::size_t>(ed.a - ni)] != 0;
            bool ob = ed.b < ni ? ((pm >> ed.b) & 1) != 0 : rbc.open[static_cast<std::size_t>(ed.b - ni)] != 0;
            if (oa && ob) ++live;
        }
        total += std::ldexp(1.0, live);
    }
    return total;
}

void check_enumerable(const Region& reg, const ResolvedBc& rbc, double max_states) {
    if (reg.n_interior() > 14)
        throw InstanceTooLarge("instance too large: " + std::to_string(reg.n_interior()) +
                                   " vertices (limit 14)",
                               std::pow(2.0, reg.n_interior()));
    double est = rc_state_count(reg, rbc);
    if (est > max_states)
        throw InstanceTooLarge("instance too large: ~" + std::to_string(est) + " states", est);
}

// ---------------------------------------------------------------------------
// partitions and expectations
// ---------------------------------------------------------------------------

std::complex<double> bc_partition(const Region& reg, const BoundarySpec& bc, double beta, double delta,
                                  const ComplexField* field, const SpinEvent& event) {
    ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
    pa.beta = beta;
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    KahanComplex z;
    enumerate_spins(reg, rbc, beta, delta, field, [&](const SpinConfig& s, std::complex<double> lw) {
        if (event && !event(s)) return;
        z.add(std::exp(lw));
    });
    return z.value();
}

std::vector<double> bc_distribution(const Region& reg, const BoundarySpec& bc, double beta, double delta) {
    ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
    pa.beta = beta;
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    std::size_t n = static_cast<std::size_t>(std::pow(3.0, reg.n_interior()) + 0.5);
    std::vector<double> table(n, 0.0);
    double z = 0.0;
    enumerate_spins(reg, rbc, beta, delta, nullptr, [&](const SpinConfig& s, std::complex<double> lw) {
        std::size_t idx = 0, mul = 1;
        for (std::size_t i = 0; i < s.size(); ++i) {
            idx += static_cast<std::size_t>(s[i] + 1) * mul;
            mul *= 3;
        }
        double w = std::exp(lw.real());
        table[idx] += w;
        z += w;
    });
    for (double& t : table) t /= z;
    return table;
}

double rc_partition(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                    const RcEvent& event, int threads) {
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    check_enumerable(reg, rbc);
    auto out = rc_reduce(reg, rbc, pa, 1,
                         [&](const RcEnumState& st, double* acc) {
                             if (event && !event(st)) return;
                             acc[0] += std::exp(st.logw);
                         },
                         threads);
    return out[0];
}

double rc_event_probability(const Region& reg, const BoundarySpec& bc, const ModelParams& pa,
                            const RcEvent& event, int threads) {
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    check_enumerable(reg, rbc);
    auto out = rc_reduce(reg, rbc, pa, 2,
                         [&](const RcEnumState& st, double* acc) {
                             double w = std::exp(st.logw);
                             acc[0] += w;
                             if (event(st)) acc[1] += w;
                         },
                         threads);
    return out[1] / out[0];
}

std::complex<double> bc_expectation(const Region& reg, const BoundarySpec& bc, double beta, double delta,
                                    const SpinObservable& obs, const ComplexField* field,
                                    const SpinEvent& event) {
    ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
    pa.beta = beta;
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    KahanComplex z, num;
    enumerate_spins(reg, rbc, beta, delta, field, [&](const SpinConfig& s, std::complex<double> lw) {
        if (event && !event(s)) return;
        std::complex<double> w = std::exp(lw);
        z.add(w);
        num.add(w * obs(s));
    });
    std::complex<double> zz = z.value();
    if (std::abs(zz) == 0.0) throw std::domain_error("bc_expectation: zero partition function");
    return num.value() / zz;
}

std::complex<double> exact_partition(Kind kind, const Region& reg, const BoundarySpec& bc,
                                     const ModelParams& pa, const ComplexField* field) {
    switch (kind) {
        case Kind::BlumeCapel:
            return bc_partition(reg, bc, pa.beta, pa.delta, field);
        case Kind::DiluteRC:
            return rc_partition(reg, bc, pa);
        case Kind::IsingLifted: {
            int xi = bc.kind == BcKind::Free0 ? 0 : 1;
            return ising_partition(build_lifted(reg, pa.beta, pa.delta, xi));
        }
    }
    throw std::logic_error("exact_partition: bad kind");
}

LiftedIsing build_lifted(const Region& reg, double beta, double delta, int xi) {
    LiftedIsing li;
    li.lifted = lift_graph(reg.interior_graph());
    li.j1 = beta / 4.0;
    li.j2 = (delta + std::log(2.0)) / 2.0;
    if (xi != 0) {
        for (const RegionEdge& ed : reg.edges()) {
            if (ed.interior) continue;
            for (int i = 0; i <= 1; ++i) {
                // the two lifted copies of the boundary spin act through
                // coupling beta/4 each: field (beta/2) * xi per lifted edge
                li.boundary_field.emplace_back(EnlargedGraph::lift_index(ed.a, i), (beta / 2.0) * xi);
            }
        }
    }
    return li;
}

LiftedIsing build_lifted(const Graph& g, double beta, double delta) {
    LiftedIsing li;
    li.lifted = lift_graph(g);
    li.j1 = beta / 4.0;
    li.j2 = (delta + std::log(2.0)) / 2.0;
    return li;
}

double ising_partition(const LiftedIsing& li) {
    int n = li.lifted.n();
    if (n > 24) throw InstanceTooLarge("ising_partition: 2^" + std::to_string(n), std::ldexp(1.0, n));
    KahanSum z;
    for (std::uint64_t m = 0; m < (1ull << n); ++m) {
        auto spin = [&](int v) { return ((m >> v) & 1) ? 1.0 : -1.0; };
        double h = 0.0;
        for (auto [u, v] : li.lifted.e1) h += li.j1 * spin(u) * spin(v);
        for (auto [u, v] : li.lifted.e2) h += li.j2 * spin(u) * spin(v);
        for (auto [v, f] : li.boundary_field) h += f * spin(v);
        z.add(std::exp(h));
    }
    return z.value();
}

// ---------------------------------------------------------------------------
// Edwards-Sokal verification
// ---------------------------------------------------------------------------

namespace {

// unnormalized joint sigma-marginal: sum over omega compatible with sigma
double joint_sigma_weight(const Region& reg, const ResolvedBc& rbc, const ModelParams& pa,
                          const SpinConfig& sigma) {
    double A = pa.rc.a / (1.0 - pa.rc.a);
    int nopen = 0;
    for (auto s : sigma) nopen += s != 0;
    double w = std::pow(A, nopen);
    for (std::size_t e = 0; e < reg.edges().size(); ++e) {
        const RegionEdge& ed = reg.edges()[e];
        int sa = ed.a < reg.n_interior() ? sigma[static_cast<std::size_t>(ed.a)]
                                         : rbc.spin[static_cast<std::size_t>(ed.a - reg.n_interior())];
        int sb = ed.b < reg.n_interior() ? sigma[static_cast<std::size_t>(ed.b)]
                                         : rbc.spin[static_cast<std::size_t>(ed.b - reg.n_interior())];
        bool oa = ed.a < reg.n_interior() ? sa != 0 : rbc.open[static_cast<std::size_t>(ed.a - reg.n_interior())] != 0;
        bool ob = ed.b < reg.n_interior() ? sb != 0 : rbc.open[static_cast<std::size_t>(ed.b - reg.n_interior())] != 0;
        if (!(oa && ob)) continue;
        double u = rbc.edge_p[e] / (1.0 - rbc.edge_p[e]);
        w *= rbc.edge_r[e] * (sa == sb ? 1.0 + u : 1.0);
    }
    return w;
}

int free_cluster_count(const RcEnumState& st) {
    const Region& reg = *st.region;
    int ni = reg.n_interior();
    int k = st.k;
    std::set<int> boundary_roots;
    for (int i = 0; i < reg.n_boundary(); ++i)
        if (st.rbc->open[static_cast<std::size_t>(i)]) boundary_roots.insert(st.find(ni + i));
    return k - static_cast<int>(boundary_roots.size());
}

// weight of a specific (sigma, omega) triple at fixed omega
double sigma_omega_weight(const Region& reg, const ResolvedBc& rbc, const ModelParams& pa,
                          const SpinConfig& s, const RcEnumState& st) {
    int ni = reg.n_interior();
    for (int v = 0; v < ni; ++v) {
        bool open = ((st.psi_mask >> v) & 1) != 0;
        if (open != (s[static_cast<std::size_t>(v)] != 0)) return 0.0;
    }
    double A = pa.rc.a / (1.0 - pa.rc.a);
    double w = std::pow(A, std::popcount(st.psi_mask));
    for (std::size_t j = 0; j < st.live_edges.size(); ++j) {
        std::size_t e = static_cast<std::size_t>(st.live_edges[j]);
        const RegionEdge& ed = reg.edges()[e];
        int sa = ed.a < ni ? s[static_cast<std::size_t>(ed.a)] : rbc.spin[static_cast<std::size_t>(ed.a - ni)];
        int sb = ed.b < ni ? s[static_cast<std::size_t>(ed.b)] : rbc.spin[static_cast<std::size_t>(ed.b - ni)];
        w *= rbc.edge_r[e];
        if ((st.omega_bits >> j) & 1) {
            if (sa != sb) return 0.0;
            w *= rbc.edge_p[e] / (1.0 - rbc.edge_p[e]);
        }
    }
    return w;
}

std::string coords_str(const Region& reg, int v) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < reg.dim(); ++i) {
        if (i) os << ",";
        os << reg.coord(v)[static_cast<std::size_t>(i)];
    }
    os << ")";
    return os.str();
}

}  // namespace

std::vector<ExactReport> verify_es_coupling(const Region& reg, const BoundarySpec& bc, double beta,
                                            double delta, Convention conv) {
    ModelParams pa = ModelParams::spin(beta, delta, conv);
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    check_enumerable(reg, rbc);
    const int ni = reg.n_interior();
    std::string inst = reg.descriptor() + " bc=" + bc.label() + " conv=" + to_string(conv);

    std::vector<ExactReport> reports;
    auto fresh = [&](const std::string& name) {
        ExactReport r;
        r.check = name;
        r.instance = inst;
        return r;
    };

    // route 1: Blume-Capel enumeration
    double z_bc = 0.0;
    std::vector<double> bc_weight;
    std::vector<SpinConfig> sigmas;
    enumerate_spins(reg, rbc, beta, delta, nullptr, [&](const SpinConfig& s, std::complex<double> lw) {
        sigmas.push_back(s);
        bc_weight.push_back(std::exp(lw.real()));
        z_bc += bc_weight.back();
    });

    // route 2: joint measure, sigma marginal
    ExactReport sig_rep = fresh("es-sigma-marginal");
    double z_joint = 0.0;
    std::vector<double> joint_w(sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        joint_w[i] = joint_sigma_weight(reg, rbc, pa, sigmas[i]);
        z_joint += joint_w[i];
    }
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        double err = std::fabs(joint_w[i] / z_joint - bc_weight[i] / z_bc);
        sig_rep.record(err, 1e-12, "sigma#" + std::to_string(i));
    }
    reports.push_back(sig_rep);

    // route 3: dilute RC enumeration; joint (psi,omega) marginal
    ExactReport rc_rep = fresh("es-rc-marginal");
    double z_rc = 0.0, z_joint2 = 0.0;
    double A = pa.rc.a / (1.0 - pa.rc.a);
    std::vector<std::pair<double, double>> pairs;  // (P_rc unnorm, P_joint unnorm)
    enumerate_rc(reg, rbc, pa, [&](const RcEnumState& st) {
        double w_rc = std::exp(st.logw);
        // joint marginal: base factor times 2^{#free clusters}
        double base = std::pow(A, std::popcount(st.psi_mask));
        for (std::size_t j = 0; j < st.live_edges.size(); ++j) {
            std::size_t e = static_cast<std::size_t>(st.live_edges[j]);
            base *= st.rbc->edge_r[e];
            if ((st.omega_bits >> j) & 1) base *= rbc.edge_p[e] / (1.0 - rbc.edge_p[e]);
        }
        double w_joint = base * std::ldexp(1.0, free_cluster_count(st));
        z_rc += w_rc;
        z_joint2 += w_joint;
        pairs.emplace_back(w_rc, w_joint);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double err = std::fabs(pairs[i].first / z_rc - pairs[i].second / z_joint2);
        rc_rep.record(err, 1e-12, "theta#" + std::to_string(i));
    }
    reports.push_back(rc_rep);

    // conditional laws (i)-(iii): omega given sigma is an independent
    // Bernoulli product on equal-spin live edges
    ExactReport cond_rep = fresh("es-conditional-omega");
    for (std::size_t i = 0; i < sigmas.size() && ni <= 6; ++i) {
        const SpinConfig& s = sigmas[i];
        std::vector<std::size_t> eq_edges;
        double live_r = 1.0;
        for (std::size_t e = 0; e < reg.edges().size(); ++e) {
            const RegionEdge& ed = reg.edges()[e];
            int sa = ed.a < ni ? s[static_cast<std::size_t>(ed.a)] : rbc.spin[static_cast<std::size_t>(ed.a - ni)];
            int sb = ed.b < ni ? s[static_cast<std::size_t>(ed.b)] : rbc.spin[static_cast<std::size_t>(ed.b - ni)];
            bool oa = ed.a < ni ? sa != 0 : rbc.open[static_cast<std::size_t>(ed.a - ni)] != 0;
            bool ob = ed.b < ni ? sb != 0 : rbc.open[static_cast<std::size_t>(ed.b - ni)] != 0;
            if (!(oa && ob)) continue;
            live_r *= rbc.edge_r[e];
            if (sa == sb) eq_edges.push_back(e);
        }
        int nopen = 0;
        for (auto sv : s) nopen += sv != 0;
        double base = std::pow(A, nopen) * live_r;
        // enumerate omega over equal-spin edges and compare with the product law
        for (std::uint64_t om = 0; om < (1ull << eq_edges.size()); ++om) {
            double w = base, prod = 1.0;
            for (std::size_t j = 0; j < eq_edges.size(); ++j) {
                double pe = rbc.edge_p[eq_edges[j]];
                if ((om >> j) & 1) {
                    w *= pe / (1.0 - pe);
                    prod *= pe;
                } else {
                    prod *= 1.0 - pe;
                }
            }
            double cond = w / joint_w[i];
            cond_rep.record(std::fabs(cond - prod), 1e-12,
                            "sigma#" + std::to_string(i) + " om=" + std::to_string(om));
        }
    }
    reports.push_back(cond_rep);

    // conditional laws (a)-(b): sigma given (psi,omega) is uniform over the
    // 2^{#free clusters} cluster-constant assignments
    if (ni <= 4) {
        ExactReport law_rep = fresh("es-conditional-sigma");
        enumerate_rc(reg, rbc, pa, [&](const RcEnumState& st) {
            double base = std::pow(A, std::popcount(st.psi_mask));
            for (std::size_t j = 0; j < st.live_edges.size(); ++j) {
                std::size_t e = static_cast<std::size_t>(st.live_edges[j]);
                base *= rbc.edge_r[e];
                if ((st.omega_bits >> j) & 1) base *= rbc.edge_p[e] / (1.0 - rbc.edge_p[e]);
            }
            int nfree = free_cluster_count(st);
            double w_joint = base * std::ldexp(1.0, nfree);
            // enumerate sigma with sigma^2 = psi
            std::vector<int> open_sites;
            for (int v = 0; v < ni; ++v)
                if ((st.psi_mask >> v) & 1) open_sites.push_back(v);
            for (std::uint64_t sm = 0; sm < (1ull << open_sites.size()); ++sm) {
                SpinConfig s(static_cast<std::size_t>(ni), 0);
                for (std::size_t j = 0; j < open_sites.size(); ++j)
                    s[static_cast<std::size_t>(open_sites[j])] = ((sm >> j) & 1) ? 1 : -1;
                // validity: constant on clusters, boundary clusters pinned
                bool valid = true;
                for (std::size_t j = 0; j < st.live_edges.size() && valid; ++j) {
                    if (!((st.omega_bits >> j) & 1)) continue;
                    const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(st.live_edges[j])];
                    int sa = ed.a < ni ? s[static_cast<std::size_t>(ed.a)] : rbc.spin[static_cast<std::size_t>(ed.a - ni)];
                    int sb = ed.b < ni ? s[static_cast<std::size_t>(ed.b)] : rbc.spin[static_cast<std::size_t>(ed.b - ni)];
                    if (sa != sb) valid = false;
                }
                if (valid) {
                    for (int v = 0; v < ni && valid; ++v) {
                        if (!((st.psi_mask >> v) & 1)) continue;
                        if (st.connected_to_open_boundary(v)) {
                            // pinned by the wired class spin
                            if (s[static_cast<std::size_t>(v)] != +1) valid = false;
                        }
                    }
                }
                double cond_expected = valid ? std::ldexp(1.0, -nfree) : 0.0;
                double cond_actual = sigma_omega_weight(reg, rbc, pa, s, st) / w_joint;
                law_rep.record(std::fabs(cond_actual - cond_expected), 1e-12, "cluster-law");
            }
        });
        reports.push_back(law_rep);
    }

    // Corollary 2.9 correlation identities (independent routes)
    ExactReport cor_rep = fresh(bc.kind == BcKind::Wired1 ? "es-cor29-wired" : "es-cor29-free");
    auto spin_mean = [&](const SpinObservable& obs) {
        double num = 0.0;
        for (std::size_t i = 0; i < sigmas.size(); ++i) num += bc_weight[i] * obs(sigmas[i]);
        return num / z_bc;
    };
    std::vector<double> conn_acc;
    {
        std::size_t n_obs = static_cast<std::size_t>(ni) + static_cast<std::size_t>(ni) * static_cast<std::size_t>(ni) + 1;
        conn_acc.assign(n_obs, 0.0);
        enumerate_rc(reg, rbc, pa, [&](const RcEnumState& st) {
            double w = std::exp(st.logw);
            conn_acc[n_obs - 1] += w;
            for (int x = 0; x < ni; ++x) {
                if (st.connected_to_open_boundary(x)) conn_acc[static_cast<std::size_t>(x)] += w;
                for (int y = x; y < ni; ++y)
                    if (x == y ? st.vertex_open(x) : st.connected(x, y))
                        conn_acc[static_cast<std::size_t>(ni + x * ni + y)] += w;
            }
        });
    }
    double zc = conn_acc.back();
    if (bc.kind == BcKind::Wired1) {
        for (int x = 0; x < ni; ++x) {
            double lhs = spin_mean([&](const SpinConfig& s) { return s[static_cast<std::size_t>(x)]; });
            double rhs = conn_acc[static_cast<std::size_t>(x)] / zc;
            cor_rep.record(std::fabs(lhs - rhs), 1e-12, "<sigma_" + coords_str(reg, x) + ">+ vs phi1[x<->dL]");
        }
    }
    for (int x = 0; x < ni; ++x) {
        for (int y = x; y < ni; ++y) {
            double lhs = spin_mean([&](const SpinConfig& s) {
                return static_cast<double>(s[static_cast<std::size_t>(x)]) * s[static_cast<std::size_t>(y)];
            });
            double rhs = conn_acc[static_cast<std::size_t>(ni + x * ni + y)] / zc;
            cor_rep.record(std::fabs(lhs - rhs), 1e-12,
                           "<sigma sigma> vs phi[x<->y] x=" + coords_str(reg, x) + " y=" + coords_str(reg, y));
        }
    }
    reports.push_back(cor_rep);
    return reports;
}

// ---------------------------------------------------------------------------
// convention resolution
// ---------------------------------------------------------------------------

ConventionResolution resolve_convention(double beta, double delta) {
    Region site = Region::box(0, 2);
    Region path = Region::from_vertices(2, {make_coord(0, 0), make_coord(1, 0)});
    auto worst = [&](Convention c) {
        double err = 0.0;
        for (const Region* reg : {&site, &path}) {
            for (BcKind kind : {BcKind::Free0, BcKind::Wired1}) {
                BoundarySpec bc = kind == BcKind::Free0 ? BoundarySpec::free0() : BoundarySpec::wired1();
                for (const ExactReport& r : verify_es_coupling(*reg, bc, beta, delta, c))
                    err = std::max(err, r.max_abs_err);
            }
        }
        return err;
    };
    double ea = worst(Convention::PaperA);
    double ee = worst(Convention::ActivityE);
    ConventionResolution res;
    if (ee <= 1e-12 && ea > 1e-12) {
        res.chosen = Convention::ActivityE;
        res.err_chosen = ee;
        res.err_rejected = ea;
    } else if (ea <= 1e-12 && ee > 1e-12) {
        res.chosen = Convention::PaperA;
        res.err_chosen = ea;
        res.err_rejected = ee;
    } else {
        throw std::runtime_error("convention resolution inconclusive: paper-a err=" + std::to_string(ea) +
                                 " activity-e err=" + std::to_string(ee));
    }
    return res;
}

Convention resolved_convention() {
    static std::once_flag flag;
    static Convention conv = Convention::ActivityE;
    std::call_once(flag, [] { conv = resolve_convention().chosen; });
    return conv;
}

// ---------------------------------------------------------------------------
// Ising mapping verification
// ---------------------------------------------------------------------------

namespace {

std::vector<ExactReport> verify_mapping_impl(const Region* reg, const Graph* g, double beta, double delta,
                                             int xi) {
    Graph base = reg ? reg->interior_graph() : *g;
    int nv = base.n;
    if (nv > 6) throw InstanceTooLarge("verify_ising_mapping: > 6 vertices", std::pow(3.0, nv));
    LiftedIsing li = reg ? build_lifted(*reg, beta, delta, xi) : build_lifted(*g, beta, delta);
    std::ostringstream inst;
    inst << (reg ? reg->descriptor() : "{\"graph\":" + std::to_string(nv) + "v" + std::to_string(base.edges.size()) + "e}")
         << " beta=" << beta << " delta=" << delta << " xi=" << xi;

    std::vector<ExactReport> out;
    auto fresh = [&](const std::string& name) {
        ExactReport r;
        r.check = name;
        r.instance = inst.str();
        return r;
    };

    // (i) coupling constant assembly
    {
        ExactReport r = fresh("ising-j-assembly");
        r.record(std::fabs(static_cast<double>(li.lifted.e1.size()) - 4.0 * static_cast<double>(base.edges.size())),
                 0.5, "|E1| = 4|E|");
        r.record(std::fabs(static_cast<double>(li.lifted.e2.size()) - static_cast<double>(nv)), 0.5, "|E2| = |V|");
        r.record(std::fabs(li.j1 - beta / 4.0), 1e-15, "J|E1 = beta/4");
        r.record(std::fabs(li.j2 - (delta + std::log(2.0)) / 2.0), 1e-15, "J|E2 = (Delta+log2)/2");
        out.push_back(r);
    }

    // Blume-Capel side
    BoundarySpec bcspec = BoundarySpec::free0();
    Region site_region = reg ? *reg : Region::box(0, 1);  // placeholder when abstract
    double z_bc = 0.0;
    std::vector<double> bc_table;  // base-3 indexed
    std::size_t tbl = static_cast<std::size_t>(std::pow(3.0, nv) + 0.5);
    bc_table.assign(tbl, 0.0);
    if (reg) {
        if (xi == 0)
            bcspec = BoundarySpec::free0();
        else {
            std::size_t nb = static_cast<std::size_t>(reg->n_boundary());
            bcspec = BoundarySpec::explicit_bc(std::vector<std::uint8_t>(nb, 1), std::vector<int>(nb, 0),
                                               std::vector<std::int8_t>(nb, static_cast<std::int8_t>(xi)));
        }
        ModelParams pa = ModelParams::rc_tied(0.5, 0.5);
        pa.beta = beta;
        ResolvedBc rbc = resolve_bc(*reg, bcspec, pa);
        enumerate_spins(*reg, rbc, beta, delta, nullptr, [&](const SpinConfig& s, std::complex<double> lw) {
            std::size_t idx = 0, mul = 1;
            for (int i = 0; i < nv; ++i) {
                idx += static_cast<std::size_t>(s[static_cast<std::size_t>(i)] + 1) * mul;
                mul *= 3;
            }
            double w = std::exp(lw.real());
            bc_table[idx] += w;
            z_bc += w;
        });
    } else {
        // abstract graph, free boundary: direct Hamiltonian sum
        std::vector<int> s(static_cast<std::size_t>(nv), -1);
        for (;;) {
            double h = 0.0;
            for (auto [a, b] : base.edges) h += beta * s[static_cast<std::size_t>(a)] * s[static_cast<std::size_t>(b)];
            for (int v = 0; v < nv; ++v) h += delta * s[static_cast<std::size_t>(v)] * s[static_cast<std::size_t>(v)];
            std::size_t idx = 0, mul = 1;
            for (int v = 0; v < nv; ++v) {
                idx += static_cast<std::size_t>(s[static_cast<std::size_t>(v)] + 1) * mul;
                mul *= 3;
            }
            double w = std::exp(h);
            bc_table[idx] += w;
            z_bc += w;
            int i = 0;
            while (i < nv && s[static_cast<std::size_t>(i)] == 1) s[static_cast<std::size_t>(i++)] = -1;
            if (i == nv) break;
            ++s[static_cast<std::size_t>(i)];
        }
    }

    // Ising side: partition, T-pushforward, correlations
    int n = li.lifted.n();
    double z_i = 0.0;
    std::vector<double> push(tbl, 0.0);
    std::vector<long> preimage(tbl, 0);
    // correlation accumulators for |A| <= 3, all index choices
    std::vector<std::array<int, 3>> asets;
    for (int a = 0; a < nv; ++a) {
        asets.push_back({a, -1, -1});
        for (int b = a + 1; b < nv; ++b) {
            asets.push_back({a, b, -1});
            for (int c = b + 1; c < nv; ++c) asets.push_back({a, b, c});
        }
    }
    std::map<std::pair<std::size_t, unsigned>, double> tau_corr;  // (aset idx, i-pattern) -> sum
    std::vector<double> sigma_corr(asets.size(), 0.0);

    for (std::uint64_t m = 0; m < (1ull << n); ++m) {
        auto spin = [&](int v) { return ((m >> v) & 1) ? 1.0 : -1.0; };
        double h = 0.0;
        for (auto [u, v] : li.lifted.e1) h += li.j1 * spin(u) * spin(v);
        for (auto [u, v] : li.lifted.e2) h += li.j2 * spin(u) * spin(v);
        for (auto [v, f] : li.boundary_field) h += f * spin(v);
        double w = std::exp(h);
        z_i += w;
        std::size_t idx = 0, mul = 1;
        for (int v = 0; v < nv; ++v) {
            double t = 0.5 * (spin(EnlargedGraph::lift_index(v, 0)) + spin(EnlargedGraph::lift_index(v, 1)));
            idx += static_cast<std::size_t>(t + 1.0 + 0.5) * mul;
            mul *= 3;
        }
        push[idx] += w;
        preimage[idx] += 1;
        for (std::size_t ai = 0; ai < asets.size(); ++ai) {
            const auto& A = asets[ai];
            int sz = A[1] < 0 ? 1 : (A[2] < 0 ? 2 : 3);
            for (unsigned pat = 0; pat < (1u << sz); ++pat) {
                double prod = 1.0;
                for (int j = 0; j < sz; ++j)
                    prod *= spin(EnlargedGraph::lift_index(A[static_cast<std::size_t>(j)], (pat >> j) & 1));
                tau_corr[{ai, pat}] += w * prod;
            }
        }
    }
    // sigma correlations from the Blume-Capel table
    for (std::size_t idx = 0; idx < tbl; ++idx) {
        std::size_t t = idx;
        std::array<int, 6> digits{};
        for (int v = 0; v < nv; ++v) {
            digits[static_cast<std::size_t>(v)] = static_cast<int>(t % 3) - 1;
            t /= 3;
        }
        for (std::size_t ai = 0; ai < asets.size(); ++ai) {
            const auto& A = asets[ai];
            int sz = A[1] < 0 ? 1 : (A[2] < 0 ? 2 : 3);
            double prod = 1.0;
            for (int j = 0; j < sz; ++j) prod *= digits[static_cast<std::size_t>(A[static_cast<std::size_t>(j)])];
            sigma_corr[ai] += bc_table[idx] * prod;
        }
    }

    // (ii) partition identity
    {
        ExactReport r = fresh("ising-partition-identity");
        double rhs = std::exp(-0.5 * (delta - std::log(2.0)) * nv) * z_bc;
        double rel = std::fabs(z_i - rhs) / std::fabs(rhs);
        r.record(rel, 1e-10, "Z_Ising vs e^{-(Delta-log2)|V|/2} Z_BC", rel);
        out.push_back(r);
    }
    // (iii) distributional identity + preimage counts
    {
        ExactReport r = fresh("ising-distributional");
        for (std::size_t idx = 0; idx < tbl; ++idx) {
            double lhs = bc_table[idx] / z_bc;
            double rhs = push[idx] / z_i;
            r.record(std::fabs(lhs - rhs), 1e-12, "eta#" + std::to_string(idx));
            // |T^{-1}(eta)| = 2^{sum (1 - eta^2)}
            std::size_t t = idx;
            int zeros = 0;
            for (int v = 0; v < nv; ++v) {
                if (t % 3 == 1) ++zeros;
                t /= 3;
            }
            r.record(std::fabs(static_cast<double>(preimage[idx]) - std::ldexp(1.0, zeros)), 0.5,
                     "preimage#" + std::to_string(idx));
        }
        out.push_back(r);
    }
    // (iv) Corollary 4.3 correlations
    {
        ExactReport r = fresh("ising-correlations");
        for (std::size_t ai = 0; ai < asets.size(); ++ai) {
            const auto& A = asets[ai];
            int sz = A[1] < 0 ? 1 : (A[2] < 0 ? 2 : 3);
            double lhs = sigma_corr[ai] / z_bc;
            for (unsigned pat = 0; pat < (1u << sz); ++pat) {
                double rhs = tau_corr[{ai, pat}] / z_i;
                double rel = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs));
                r.record(std::fabs(lhs - rhs), 1e-10, "A#" + std::to_string(ai) + " i=" + std::to_string(pat),
                         rel);
            }
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace

std::vector<ExactReport> verify_ising_mapping(const Region& reg, double beta, double delta, int xi) {
    return verify_mapping_impl(&reg, nullptr, beta, delta, xi);
}

std::vector<ExactReport> verify_ising_mapping(const Graph& g, double beta, double delta) {
    return verify_mapping_impl(nullptr, &g, beta, delta, 0);
}

// ---------------------------------------------------------------------------
// coordinate distributions and monotone event machinery
// ---------------------------------------------------------------------------

std::vector<double> rc_coordinate_distribution(const Region& reg, const BoundarySpec& bc,
                                               const ModelParams& pa) {
    ResolvedBc rbc = resolve_bc(reg, bc, pa);
    int ni = reg.n_interior();
    int ne = reg.n_edges();
    int D = ni + ne;
    if (D > 26) throw InstanceTooLarge("coordinate distribution: D = " + std::to_string(D), std::ldexp(1.0, D));
    std::vector<double> mu(static_cast<std::size_t>(1) << D, 0.0);
    double z = 0.0;
    enumerate_rc(reg, rbc, pa, [&](const RcEnumState& st) {
        std::uint64_t bits = st.psi_mask;
        for (std::size_t j = 0; j < st.live_edges.size(); ++j)
            if ((st.omega_bits >> j) & 1) bits |= 1ull << (ni + st.live_edges[j]);
        double w = std::exp(st.logw);
        mu[bits] += w;
        z += w;
    });
    for (double& x : mu) x /= z;
    return mu;
}

std::vector<double> upset_probabilities(std::vector<double> mu) {
    std::size_t n = mu.size();
    for (std::size_t bit = 1; bit < n; bit <<= 1)
        for (std::size_t m = 0; m < n; ++m)
            if (!(m & bit)) mu[m] += mu[m | bit];
    return mu;
}

double event_probability(const std::vector<double>& upset, const MonotoneEvent& ev) {
    // inclusion-exclusion over the union of up-sets; subset ORs built by a
    // lowbit recurrence so the cost is O(2^k)
    std::size_t k = ev.masks.size();
    if (k == 1) return upset[ev.masks[0]];
    static thread_local std::vector<std::uint64_t> ors;
    ors.assign(static_cast<std::size_t>(1) << k, 0);
    double p = 0.0;
    for (std::uint64_t s = 1; s < (1ull << k); ++s) {
        int j = std::countr_zero(s);
        ors[s] = ors[s & (s - 1)] | ev.masks[static_cast<std::size_t>(j)];
        p += (std::popcount(s) & 1) ? upset[ors[s]] : -upset[ors[s]];
    }
    return p;
}

std::vector<MonotoneEvent> standard_event_family(int n_coords, int n_random, std::uint64_t seed) {
    std::vector<MonotoneEvent> fam;
    // up-sets generated by <= 3 coordinates (intersections of singles)
    for (int a = 0; a < n_coords; ++a) {
        fam.push_back({{1ull << a}});
        for (int b = a + 1; b < n_coords; ++b) {
            fam.push_back({{(1ull << a) | (1ull << b)}});
            for (int c = b + 1; c < n_coords; ++c)
                fam.push_back({{(1ull << a) | (1ull << b) | (1ull << c)}});
        }
    }
    // unions of two singles
    for (int a = 0; a < n_coords && a < 12; ++a)
        for (int b = a + 1; b < n_coords && b < 12; ++b)
            fam.push_back({{1ull << a, 1ull << b}});
    // seeded random monotone events: unions of <= 3 masks
    Rng rng(seed);
    for (int i = 0; i < n_random; ++i) {
        MonotoneEvent ev;
        int nm = 1 + static_cast<int>(rng.below(3));
        for (int j = 0; j < nm; ++j) {
            std::uint64_t m = 0;
            int bits = 1 + static_cast<int>(rng.below(4));
            for (int t = 0; t < bits; ++t) m |= 1ull << rng.below(static_cast<std::uint64_t>(n_coords));
            ev.masks.push_back(m);
        }
        fam.push_back(ev);
    }
    return fam;
}

// ---------------------------------------------------------------------------
// order properties
// ---------------------------------------------------------------------------

namespace {

// independent q=2 random cluster distribution on the open subgraph of psi,
// BFS-based component count, textbook p^o (1-p)^c q^k weights
std::map<std::uint64_t, double> rc_q2_conditional(const Region& reg, const ResolvedBc& rbc,
                                                  std::uint64_t psi_mask, double p) {
    int ni = reg.n_interior();
    std::vector<int> live;
    for (int e = 0; e < reg.n_edges(); ++e) {
        const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
        bool oa = ed.a < ni ? ((psi_mask >> ed.a) & 1) != 0 : rbc.open[static_cast<std::size_t>(ed.a - ni)] != 0;
        bool ob = ed.b < ni ? ((psi_mask >> ed.b) & 1) != 0 : rbc.open[static_cast<std::size_t>(ed.b - ni)] != 0;
        if (oa && ob) live.push_back(e);
    }
    auto open_v = [&](int v) {
        return v < ni ? ((psi_mask >> v) & 1) != 0 : rbc.open[static_cast<std::size_t>(v - ni)] != 0;
    };
    std::map<std::uint64_t, double> dist;
    double z = 0.0;
    for (std::uint64_t om = 0; om < (1ull << live.size()); ++om) {
        // component count by BFS over open vertices, edges in om, wiring merged
        int nt = reg.n_total();
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(nt));
        for (std::size_t j = 0; j < live.size(); ++j) {
            if (!((om >> j) & 1)) continue;
            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(live[j])];
            adj[static_cast<std::size_t>(ed.a)].push_back(ed.b);
            adj[static_cast<std::size_t>(ed.b)].push_back(ed.a);
        }
        // wiring: connect same-class boundary vertices
        std::vector<std::vector<int>> class_members(static_cast<std::size_t>(rbc.n_classes));
        for (int i = 0; i < reg.n_boundary(); ++i)
            if (rbc.open[static_cast<std::size_t>(i)])
                class_members[static_cast<std::size_t>(rbc.wire_class[static_cast<std::size_t>(i)])].push_back(ni + i);
        for (const auto& mem : class_members)
            for (std::size_t i = 1; i < mem.size(); ++i) {
                adj[static_cast<std::size_t>(mem[0])].push_back(mem[i]);
                adj[static_cast<std::size_t>(mem[i])].push_back(mem[0]);
            }
        std::vector<char> seen(static_cast<std::size_t>(nt), 0);
        int k = 0;
        for (int v = 0; v < nt; ++v) {
            if (!open_v(v) || seen[static_cast<std::size_t>(v)]) continue;
            ++k;
            std::vector<int> st{v};
            seen[static_cast<std::size_t>(v)] = 1;
            while (!st.empty()) {
                int u = st.back();
                st.pop_back();
                for (int w : adj[static_cast<std::size_t>(u)])
                    if (!seen[static_cast<std::size_t>(w)]) {
                        seen[static_cast<std::size_t>(w)] = 1;
                        st.push_back(w);
                    }
            }
        }
        int o = std::popcount(om);
        double w = std::pow(p, o) * std::pow(1.0 - p, static_cast<int>(live.size()) - o) * std::ldexp(1.0, k);
        std::uint64_t bits = 0;
        for (std::size_t j = 0; j < live.size(); ++j)
            if ((om >> j) & 1) bits |= 1ull << live[j];
        dist[bits] = w;
        z += w;
    }
    for (auto& [k2, v] : dist) v /= z;
    return dist;
}

}  // namespace

std::vector<ExactReport> verify_order_properties(const Region& reg, const ModelParams& pa,
                                                 const OrderCheckOptions& opt) {
    int ni = reg.n_interior();
    int ne = reg.n_edges();
    int D = ni + ne;
    std::string inst = reg.descriptor() + " p=" + std::to_string(pa.rc.p) + " a=" + std::to_string(pa.rc.a);
    std::vector<ExactReport> out;
    auto fresh = [&](const std::string& name) {
        ExactReport r;
        r.check = name;
        r.instance = inst;
        return r;
    };

    auto fam = standard_event_family(D, opt.n_random_events, opt.seed);

    auto upset_for = [&](const BoundarySpec& bc, const ModelParams& params) {
        return upset_probabilities(rc_coordinate_distribution(reg, bc, params));
    };

    std::vector<double> up_free = upset_for(BoundarySpec::free0(), pa);
    std::vector<double> up_wired = upset_for(BoundarySpec::wired1(), pa);

    // FKG for both extremal boundary conditions
    std::vector<std::pair<const char*, const std::vector<double>*>> fkg_cases{
        {"fkg-free", &up_free}, {"fkg-wired", &up_wired}};
    for (auto [name, up] : fkg_cases) {
        ExactReport r = fresh(name);
        std::vector<double> probs(fam.size());
        for (std::size_t i = 0; i < fam.size(); ++i) probs[i] = event_probability(*up, fam[i]);
        for (std::size_t i = 0; i < fam.size(); ++i) {
            for (std::size_t j = i; j < fam.size(); ++j) {
                MonotoneEvent inter;
                for (std::uint64_t ma : fam[i].masks)
                    for (std::uint64_t mb : fam[j].masks) inter.masks.push_back(ma | mb);
                if (inter.masks.size() > 9) continue;
                double pab = event_probability(*up, inter);
                double slack = pab - probs[i] * probs[j];
                r.record(std::max(0.0, -slack), opt.tol,
                         "A#" + std::to_string(i) + " B#" + std::to_string(j));
            }
        }
        out.push_back(r);
    }

    // domination in (p, a) and in the boundary condition
    {
        ExactReport r = fresh("domination");
        double dp = std::min(0.2, (1.0 - pa.rc.p) / 2);
        double da = std::min(0.2, (1.0 - pa.rc.a) / 2);
        std::vector<double> up_free_hi = upset_for(BoundarySpec::free0(), ModelParams::rc_tied(pa.rc.p + dp, pa.rc.a + da));
        std::vector<double> up_wired_hi = upset_for(BoundarySpec::wired1(), ModelParams::rc_tied(pa.rc.p + dp, pa.rc.a + da));
        for (std::size_t i = 0; i < fam.size(); ++i) {
            double p_free = event_probability(up_free, fam[i]);
            double p_wired = event_probability(up_wired, fam[i]);
            double p_free_hi = event_probability(up_free_hi, fam[i]);
            double p_wired_hi = event_probability(up_wired_hi, fam[i]);
            r.record(std::max(0.0, p_free - p_wired), opt.tol, "xi: free <= wired A#" + std::to_string(i));
            r.record(std::max(0.0, p_free - p_free_hi), opt.tol, "(p,a) up, free A#" + std::to_string(i));
            r.record(std::max(0.0, p_wired - p_wired_hi), opt.tol, "(p,a) up, wired A#" + std::to_string(i));
        }
        out.push_back(r);
    }

    // finite energy (Prop 2.6 sigma-algebras)
    {
        ExactReport r = fresh("finite-energy");
        std::vector<double> mu_free = rc_coordinate_distribution(reg, BoundarySpec::free0(), pa);
        std::vector<double> mu_wired = rc_coordinate_distribution(reg, BoundarySpec::wired1(), pa);
        for (auto* mu : {&mu_free, &mu_wired}) {
            // vertices: condition on everything except x and its incident edges
            for (int x = 0; x < ni; ++x) {
                std::uint64_t drop = 1ull << x;
                for (auto [eid, w] : reg.incident(x)) {
                    (void)w;
                    drop |= 1ull << (ni + eid);
                }
                std::map<std::uint64_t, std::pair<double, double>> grp;  // rest -> (den, num)
                for (std::size_t b = 0; b < mu->size(); ++b) {
                    if ((*mu)[b] == 0.0) continue;
                    std::uint64_t rest = b & ~drop;
                    auto& g = grp[rest];
                    g.first += (*mu)[b];
                    if (b & (1ull << x)) g.second += (*mu)[b];
                }
                for (auto& [rest, g] : grp) {
                    double c = g.second / g.first;
                    double err = (c <= 0.0 || c >= 1.0) ? 1.0 : 0.0;
                    r.record(err, 0.5, "psi_x cond, x=" + std::to_string(x));
                }
            }
            // interior edges: condition on everything except xy and the endpoints
            for (int e = 0; e < ne; ++e) {
                const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
                if (!ed.interior) continue;
                std::uint64_t drop = (1ull << (ni + e)) | (1ull << ed.a) | (1ull << ed.b);
                std::map<std::uint64_t, std::pair<double, double>> grp;
                for (std::size_t b = 0; b < mu->size(); ++b) {
                    if ((*mu)[b] == 0.0) continue;
                    std::uint64_t rest = b & ~drop;
                    auto& g = grp[rest];
                    g.first += (*mu)[b];
                    if (b & (1ull << (ni + e))) g.second += (*mu)[b];
                }
                for (auto& [rest, g] : grp) {
                    double c = g.second / g.first;
                    double err = (c <= 0.0 || c >= 1.0) ? 1.0 : 0.0;
                    r.record(err, 0.5, "omega_e cond, e=" + std::to_string(e));
                }
            }
        }
        out.push_back(r);
    }

    // conditioning identity: omega given psi is the q=2 random cluster on
    // the psi-induced graph (independent BFS implementation)
    {
        ExactReport r = fresh("conditioning-rc");
        ResolvedBc rbc_w = resolve_bc(reg, BoundarySpec::wired1(), pa);
        std::vector<double> mu = rc_coordinate_distribution(reg, BoundarySpec::wired1(), pa);
        for (std::uint64_t pm = 0; pm < (1ull << ni); ++pm) {
            // conditional of mu given psi = pm
            std::map<std::uint64_t, double> cond;
            double zc = 0.0;
            for (std::size_t b = 0; b < mu.size(); ++b) {
                if ((b & ((1ull << ni) - 1)) != pm || mu[b] == 0.0) continue;
                cond[b >> ni] += mu[b];
                zc += mu[b];
            }
            if (zc == 0.0) continue;
            auto ref = rc_q2_conditional(reg, rbc_w, pm, pa.rc.p);
            for (auto& [bits, pr] : ref) {
                double actual = (cond.count(bits) ? cond[bits] : 0.0) / zc;
                r.record(std::fabs(actual - pr), opt.tol, "psi=" + std::to_string(pm));
            }
        }
        out.push_back(r);
    }

    // (MON) and (SMP) against a canonical proper subregion
    if (ni >= 2) {
        std::vector<Coord> sub_coords;
        for (int v = 0; v < (ni + 1) / 2; ++v) sub_coords.push_back(reg.coord(v));
        Region sub = Region::from_vertices(reg.dim(), sub_coords);
        int sni = sub.n_interior();
        int sne = sub.n_edges();
        int sD = sni + sne;

        // coordinate maps sub -> big
        std::vector<int> map_v(static_cast<std::size_t>(sni), -1);
        for (int v = 0; v < sni; ++v) map_v[static_cast<std::size_t>(v)] = reg.index_of(sub.coord(v));
        std::map<std::pair<Coord, int>, int> big_edge_by_key;
        for (int e = 0; e < ne; ++e) {
            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
            Coord lo = std::min(reg.coord(ed.a), reg.coord(ed.b));
            big_edge_by_key[{lo, ed.axis}] = e;
        }
        std::vector<int> map_e(static_cast<std::size_t>(sne), -1);
        for (int e = 0; e < sne; ++e) {
            const RegionEdge& ed = sub.edges()[static_cast<std::size_t>(e)];
            Coord lo = std::min(sub.coord(ed.a), sub.coord(ed.b));
            map_e[static_cast<std::size_t>(e)] = big_edge_by_key.at({lo, ed.axis});
        }
        auto lift_mask = [&](std::uint64_t m) {
            std::uint64_t out = 0;
            for (int v = 0; v < sni; ++v)
                if (m & (1ull << v)) out |= 1ull << map_v[static_cast<std::size_t>(v)];
            for (int e = 0; e < sne; ++e)
                if (m & (1ull << (sni + e))) out |= 1ull << (ni + map_e[static_cast<std::size_t>(e)]);
            return out;
        };

        auto sub_fam = standard_event_family(sD, opt.n_random_events / 2, opt.seed + 1);

        // MON: wired on the subregion dominates anything on the larger one;
        // free measures increase with the domain
        {
            ExactReport r = fresh("mon-domain");
            std::vector<double> up_sub_wired =
                upset_probabilities(rc_coordinate_distribution(sub, BoundarySpec::wired1(), pa));
            std::vector<double> up_sub_free =
                upset_probabilities(rc_coordinate_distribution(sub, BoundarySpec::free0(), pa));
            for (std::size_t i = 0; i < sub_fam.size(); ++i) {
                MonotoneEvent lifted;
                for (std::uint64_t m : sub_fam[i].masks) lifted.masks.push_back(lift_mask(m));
                double p_sub_wired = event_probability(up_sub_wired, sub_fam[i]);
                double p_sub_free = event_probability(up_sub_free, sub_fam[i]);
                double p_big_free = event_probability(up_free, lifted);
                double p_big_wired = event_probability(up_wired, lifted);
                r.record(std::max(0.0, p_big_free - p_sub_wired), opt.tol, "free_L <= wired_L' A#" + std::to_string(i));
                r.record(std::max(0.0, p_big_wired - p_sub_wired), opt.tol, "wired_L <= wired_L' A#" + std::to_string(i));
                r.record(std::max(0.0, p_sub_free - p_big_free), opt.tol, "free_L' <= free_L A#" + std::to_string(i));
            }
            out.push_back(r);
        }

        // SMP: conditioning the large measure on the annulus configuration
        // equals the subregion measure with the induced boundary condition
        {
            ExactReport r = fresh("smp");
            std::uint64_t sub_img = 0;
            for (int v = 0; v < sni; ++v) sub_img |= 1ull << map_v[static_cast<std::size_t>(v)];
            for (int e = 0; e < sne; ++e) sub_img |= 1ull << (ni + map_e[static_cast<std::size_t>(e)]);
            std::uint64_t out_mask = ((1ull << D) - 1) & ~sub_img;

            for (BcKind kind : {BcKind::Free0, BcKind::Wired1}) {
                BoundarySpec big_bc = kind == BcKind::Free0 ? BoundarySpec::free0() : BoundarySpec::wired1();
                ResolvedBc big_rbc = resolve_bc(reg, big_bc, pa);
                std::vector<double> mu = rc_coordinate_distribution(reg, big_bc, pa);
                // group by outside pattern
                std::map<std::uint64_t, std::map<std::uint64_t, double>> groups;
                for (std::size_t b = 0; b < mu.size(); ++b) {
                    if (mu[b] == 0.0) continue;
                    std::uint64_t outside = b & out_mask;
                    // project to sub coordinates
                    std::uint64_t sb = 0;
                    for (int v = 0; v < sni; ++v)
                        if (b & (1ull << map_v[static_cast<std::size_t>(v)])) sb |= 1ull << v;
                    for (int e = 0; e < sne; ++e)
                        if (b & (1ull << (ni + map_e[static_cast<std::size_t>(e)]))) sb |= 1ull << (sni + e);
                    groups[outside][sb] += mu[b];
                }
                for (auto& [outside, cond] : groups) {
                    double zc = 0.0;
                    for (auto& [sb, w] : cond) zc += w;
                    // induced boundary condition for the subregion
                    int snb = sub.n_boundary();
                    std::vector<std::uint8_t> sopen(static_cast<std::size_t>(snb), 0);
                    std::vector<int> sclass(static_cast<std::size_t>(snb), -1);
                    std::vector<std::int8_t> sspin(static_cast<std::size_t>(snb), 0);
                    // connectivity among outside nodes (big combined indices)
                    UnionFind uf(reg.n_total());
                    for (int e = 0; e < ne; ++e) {
                        if (outside & (1ull << (ni + e))) {
                            const RegionEdge& ed = reg.edges()[static_cast<std::size_t>(e)];
                            uf.unite(ed.a, ed.b);
                        }
                    }
                    std::vector<int> first_cls(static_cast<std::size_t>(big_rbc.n_classes), -1);
                    for (int i = 0; i < reg.n_boundary(); ++i) {
                        if (!big_rbc.open[static_cast<std::size_t>(i)]) continue;
                        int c = big_rbc.wire_class[static_cast<std::size_t>(i)];
                        if (first_cls[static_cast<std::size_t>(c)] < 0)
                            first_cls[static_cast<std::size_t>(c)] = reg.n_interior() + i;
                        else
                            uf.unite(first_cls[static_cast<std::size_t>(c)], reg.n_interior() + i);
                    }
                    std::map<int, int> root_to_class;
                    for (int i = 0; i < snb; ++i) {
                        Coord c = sub.coord(sub.n_interior() + i);
                        int big_idx = reg.index_of(c);
                        bool open =
                            big_idx < ni ? (outside & (1ull << big_idx)) != 0
                                         : big_rbc.open[static_cast<std::size_t>(big_idx - ni)] != 0;
                        if (!open) continue;
                        sopen[static_cast<std::size_t>(i)] = 1;
                        sspin[static_cast<std::size_t>(i)] = +1;
                        int root = uf.find(big_idx);
                        auto it = root_to_class.find(root);
                        if (it == root_to_class.end())
                            it = root_to_class.emplace(root, static_cast<int>(root_to_class.size())).first;
                        sclass[static_cast<std::size_t>(i)] = it->second;
                    }
                    BoundarySpec sub_bc = BoundarySpec::explicit_bc(sopen, sclass, sspin);
                    std::vector<double> sub_mu = rc_coordinate_distribution(sub, sub_bc, pa);
                    for (std::size_t sb = 0; sb < sub_mu.size(); ++sb) {
                        double lhs = (cond.count(sb) ? cond.at(sb) : 0.0) / zc;
                        r.record(std::fabs(lhs - sub_mu[sb]), opt.tol,
                                 "outside=" + std::to_string(outside) + " theta=" + std::to_string(sb));
                    }
                }
            }
            out.push_back(r);
        }
    }

    // Prop 2.16: conditioning boundary-contact edges closed is dominated by
    // closing the boundary vertices themselves
    {
        ExactReport r = fresh("closed-edge-vs-closed-vertex");
        // S = all of the boundary; xi = wired
        std::vector<double> mu = rc_coordinate_distribution(reg, BoundarySpec::wired1(), pa);
        // condition on all boundary edges closed
        std::uint64_t bmask = 0;
        for (int e = 0; e < ne; ++e)
            if (!reg.edges()[static_cast<std::size_t>(e)].interior) bmask |= 1ull << (ni + e);
        std::vector<double> mu_cond(mu.size(), 0.0);
        double zc = 0.0;
        for (std::size_t b = 0; b < mu.size(); ++b) {
            if (b & bmask) continue;
            mu_cond[b] = mu[b];
            zc += mu[b];
        }
        for (double& x : mu_cond) x /= zc;
        std::vector<double> up_cond = upset_probabilities(std::move(mu_cond));
        // versus free (S closed entirely); xi cap 0_S with S = dLambda is free
        for (std::size_t i = 0; i < fam.size(); ++i) {
            double lhs = event_probability(up_cond, fam[i]);
            double rhs = event_probability(up_free, fam[i]);
            r.record(std::max(0.0, lhs - rhs), opt.tol, "A#" + std::to_string(i));
        }
        out.push_back(r);
    }

    return out;
}

ExactReport verify_comparison_lemma(int n, double delta, const ModelParams& pa, int n_events,
                                    std::uint64_t seed) {
    if (n != 1) throw InstanceTooLarge("verify_comparison_lemma: only n = 1 is enumerable", 1e300);
    Region reg = Region::box(n, 2);
    int ni = reg.n_interior();
    std::vector<int> interior_edges;
    for (int e = 0; e < reg.n_edges(); ++e)
        if (reg.edges()[static_cast<std::size_t>(e)].interior) interior_edges.push_back(e);
    int nb_bits = ni + static_cast<int>(interior_edges.size());
    std::vector<int> edge_slot(static_cast<std::size_t>(reg.n_edges()), -1);
    for (std::size_t j = 0; j < interior_edges.size(); ++j)
        edge_slot[static_cast<std::size_t>(interior_edges[j])] = static_cast<int>(j);

    auto restricted_distribution = [&](const BoundarySpec& bc) {
        ResolvedBc rbc = resolve_bc(reg, bc, pa);
        std::vector<double> table(static_cast<std::size_t>(1) << nb_bits, 0.0);
        double z = 0.0;
        enumerate_rc(reg, rbc, pa, [&](const RcEnumState& st) {
            std::uint64_t bits = st.psi_mask;
            for (std::size_t j = 0; j < st.live_edges.size(); ++j) {
                if (!((st.omega_bits >> j) & 1)) continue;
                int slot = edge_slot[static_cast<std::size_t>(st.live_edges[j])];
                if (slot >= 0) bits |= 1ull << (ni + slot);
            }
            double w = std::exp(st.logw);
            table[bits] += w;
            z += w;
        });
        for (double& x : table) x /= z;
        return table;
    };

    ExactReport rep;
    rep.check = "comparison-lemma-7.2";
    rep.instance = "Lambda_" + std::to_string(n) + " delta=" + std::to_string(delta) +
                   " p=" + std::to_string(pa.rc.p) + " a=" + std::to_string(pa.rc.a);
    double factor = std::pow(1.0 / (1.0 - delta), 12 * n + 6);

    std::vector<double> p_delta = restricted_distribution(BoundarySpec::delta_wired(delta));
    std::vector<double> p_free = restricted_distribution(BoundarySpec::free0());

    // per-pattern comparison implies the bound for every event on
    // (Lambda_n, b(Lambda_n))
    for (std::size_t b = 0; b < p_delta.size(); ++b) {
        double slack = factor * p_free[b] - p_delta[b];
        rep.record(std::max(0.0, -slack), 1e-12, "pattern " + std::to_string(b));
    }
    // sampled event family, as reported output
    auto fam = standard_event_family(nb_bits, n_events, seed);
    std::vector<double> up_delta = upset_probabilities(p_delta);
    std::vector<double> up_free = upset_probabilities(p_free);
    for (std::size_t i = 0; i < fam.size(); ++i) {
        double lhs = event_probability(up_delta, fam[i]);
        double rhs = event_probability(up_free, fam[i]);
        rep.record(std::max(0.0, lhs - factor * rhs), 1e-12, "event A#" + std::to_string(i));
    }
    return rep;
}

ExactReport verify_a1_reduction(const Region& reg, double p) {
    // dilute RC at a = 1 on the free-boundary region: psi is identically 1
    // on Lambda and the conditional law must be the q=2 random cluster
    ExactReport rep;
    rep.check = "a1-reduction";
    rep.instance = reg.descriptor() + " p=" + std::to_string(p);
    ModelParams pa = ModelParams::rc_tied(p, 0.5);  // a unused below
    ResolvedBc rbc = resolve_bc(reg, BoundarySpec::free0(), pa);
    int ni = reg.n_interior();
    std::uint64_t full = (1ull << ni) - 1;
    // weights restricted to psi == 1 with the vertex factor dropped
    std::vector<int> live;
    for (int e = 0; e < reg.n_edges(); ++e)
        if (reg.edges()[static_cast<std::size_t>(e)].interior) live.push_back(e);
    std::map<std::uint64_t, double> dilute;
    double z = 0.0;
    for (std::uint64_t om = 0; om < (1ull << live.size()); ++om) {
        RcConfig t;
        t.psi.assign(static_cast<std::size_t>(ni), 1);
        t.omega.assign(static_cast<std::size_t>(reg.n_edges()), 0);
        for (std::size_t j = 0; j < live.size(); ++j)
            if ((om >> j) & 1) t.omega[static_cast<std::size_t>(live[j])] = 1;
        int k = cluster_count(reg, rbc, t);
        double u = p / (1.0 - p);
        double w = std::pow(u, std::popcount(om)) * std::ldexp(1.0, k);
        dilute[om] = w;
        z += w;
    }
    auto ref = rc_q2_conditional(reg, rbc, full, p);
    for (auto& [bits, pr] : ref) {
        std::uint64_t om = 0;
        for (std::size_t j = 0; j < live.size(); ++j)
            if (bits & (1ull << live[j])) om |= 1ull << j;
        rep.record(std::fabs(dilute[om] / z - pr), 1e-12, "omega=" + std::to_string(om));
    }
    return rep;
}

}  // namespace bc::exact
