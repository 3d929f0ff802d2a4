#include "bc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "bc/unionfind.hpp"

namespace bc {

std::string to_string(Convention c) { return c == Convention::PaperA ? "paper-a" : "activity-e"; }

ModelParams ModelParams::spin(double beta, double delta, Convention conv) {
    ModelParams m;
    m.beta = beta;
    m.delta = delta;
    m.rc = bc_to_rc_params(beta, delta, conv);
    return m;
}

ModelParams ModelParams::rc_tied(double p, double a) {
    ModelParams m;
    m.rc.p = p;
    m.rc.a = a;
    m.rc.r = std::sqrt(1.0 - p);
    m.rc.tied = true;
    m.beta = -0.5 * std::log1p(-p);
    m.delta = 0.0;  // spin side meaningful only through a convention
    return m;
}

ModelParams ModelParams::rc_general(double p, double a, double r) {
    ModelParams m;
    m.rc.p = p;
    m.rc.a = a;
    m.rc.r = r;
    m.rc.tied = false;
    m.beta = -0.5 * std::log1p(-p);
    m.delta = 0.0;
    return m;
}

RcParams bc_to_rc_params(double beta, double delta, Convention conv) {
    if (beta <= 0.0) throw std::invalid_argument("bc_to_rc_params: beta must be > 0");
    RcParams rc;
    rc.p = -std::expm1(-2.0 * beta);
    rc.r = std::exp(-beta);  // sqrt(1-p) computed without cancellation
    rc.tied = true;
    double e = std::exp(delta);
    rc.a = conv == Convention::PaperA ? 2.0 * e / (1.0 + 2.0 * e) : e / (1.0 + e);
    return rc;
}

void rc_to_bc_params(const RcParams& rc, Convention conv, double& beta, double& delta) {
    beta = -0.5 * std::log1p(-rc.p);
    double ratio = rc.a / (1.0 - rc.a);
    delta = conv == Convention::PaperA ? std::log(ratio / 2.0) : std::log(ratio);
}

BoundarySpec BoundarySpec::wired1() {
    BoundarySpec b;
    b.kind = BcKind::Wired1;
    return b;
}

BoundarySpec BoundarySpec::eps_field(double eps) {
    if (eps < 0.0) throw std::invalid_argument("eps_field: eps must be >= 0");
    BoundarySpec b;
    b.kind = BcKind::EpsField;
    b.eps = eps;
    return b;
}

BoundarySpec BoundarySpec::delta_wired(double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta_wired: delta in (0,1)");
    BoundarySpec b;
    b.kind = BcKind::DeltaWired;
    b.delta = delta;
    return b;
}

BoundarySpec BoundarySpec::explicit_bc(std::vector<std::uint8_t> open, std::vector<int> wire_class,
                                       std::vector<std::int8_t> spin) {
    BoundarySpec b;
    b.kind = BcKind::Explicit;
    b.open = std::move(open);
    b.wire_class = std::move(wire_class);
    b.spin = std::move(spin);
    return b;
}

std::string BoundarySpec::label() const {
    switch (kind) {
        case BcKind::Free0: return "free";
        case BcKind::Wired1: return "wired";
        case BcKind::EpsField: return "eps:" + std::to_string(eps);
        case BcKind::DeltaWired: return "delta:" + std::to_string(delta);
        case BcKind::Explicit: return "explicit";
    }
    return "?";
}

ResolvedBc resolve_bc(const Region& reg, const BoundarySpec& bc, const ModelParams& params) {
    ResolvedBc r;
    std::size_t nb = static_cast<std::size_t>(reg.n_boundary());
    std::size_t ne = static_cast<std::size_t>(reg.n_edges());
    r.edge_p.assign(ne, params.rc.p);
    r.edge_r.assign(ne, params.rc.r);
    r.edge_coupling.assign(ne, params.beta);

    auto all_wired = [&](std::int8_t sp) {
        r.open.assign(nb, 1);
        r.wire_class.assign(nb, 0);
        r.spin.assign(nb, sp);
        r.n_classes = nb > 0 ? 1 : 0;
    };

    switch (bc.kind) {
        case BcKind::Free0:
            r.open.assign(nb, 0);
            r.wire_class.assign(nb, -1);
            r.spin.assign(nb, 0);
            r.n_classes = 0;
            break;
        case BcKind::Wired1:
            all_wired(+1);
            break;
        case BcKind::EpsField: {
            all_wired(+1);
            double d = -std::expm1(-2.0 * bc.eps);
            for (std::size_t e = 0; e < ne; ++e) {
                if (!reg.edges()[e].interior) {
                    r.edge_p[e] = d;
                    r.edge_r[e] = std::exp(-bc.eps);
                    r.edge_coupling[e] = bc.eps;
                }
            }
            break;
        }
        case BcKind::DeltaWired: {
            all_wired(+1);
            double eps = -0.5 * std::log1p(-bc.delta);
            for (std::size_t e = 0; e < ne; ++e) {
                if (!reg.edges()[e].interior) {
                    r.edge_p[e] = bc.delta;
                    r.edge_r[e] = std::sqrt(1.0 - bc.delta);
                    r.edge_coupling[e] = eps;
                }
            }
            break;
        }
        case BcKind::Explicit: {
            if (bc.open.size() != nb || bc.wire_class.size() != nb || bc.spin.size() != nb)
                throw std::invalid_argument("explicit bc sized for a different region");
            r.open = bc.open;
            r.wire_class = bc.wire_class;
            r.spin = bc.spin;
            int maxc = -1;
            for (std::size_t i = 0; i < nb; ++i) {
                if (!r.open[i] && r.wire_class[i] >= 0)
                    throw std::invalid_argument("explicit bc: closed vertex in a wiring class");
                if (r.open[i] && r.wire_class[i] > maxc) maxc = r.wire_class[i];
            }
            r.n_classes = maxc + 1;
            break;
        }
    }
    return r;
}

bool field_in_cone(const ComplexField& h) {
    for (const auto& z : h)
        if (z.real() < std::fabs(z.imag())) return false;
    return true;
}

bool is_compatible(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta) {
    for (std::size_t e = 0; e < theta.omega.size(); ++e) {
        if (!theta.omega[e]) continue;
        const RegionEdge& ed = reg.edges()[e];
        if (!rbc.vertex_open(reg, ed.a, theta.psi) || !rbc.vertex_open(reg, ed.b, theta.psi))
            return false;
    }
    return true;
}

namespace {

// union-find with wiring merges applied; returns uf over combined vertices
void merged_components(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta, UnionFind& uf) {
    int n = reg.n_total();
    uf.reset(n);
    for (std::size_t e = 0; e < theta.omega.size(); ++e) {
        if (!theta.omega[e]) continue;
        const RegionEdge& ed = reg.edges()[e];
        uf.unite(ed.a, ed.b);
    }
    // external wiring: chain boundary vertices of the same class
    int nb = reg.n_boundary();
    std::vector<int> first_of_class(static_cast<std::size_t>(rbc.n_classes), -1);
    for (int i = 0; i < nb; ++i) {
        int c = rbc.wire_class[static_cast<std::size_t>(i)];
        if (c < 0) continue;
        int v = reg.n_interior() + i;
        if (first_of_class[static_cast<std::size_t>(c)] < 0)
            first_of_class[static_cast<std::size_t>(c)] = v;
        else
            uf.unite(first_of_class[static_cast<std::size_t>(c)], v);
    }
}

}  // namespace

int cluster_count(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta) {
    if (!is_compatible(reg, rbc, theta))
        throw std::invalid_argument("cluster_count: incompatible configuration");
    UnionFind uf;
    merged_components(reg, rbc, theta, uf);
    int n = reg.n_total();
    int k = 0;
    for (int v = 0; v < n; ++v) {
        if (!rbc.vertex_open(reg, v, theta.psi)) continue;
        if (uf.find(v) == v) ++k;
        // roots are representatives; a root is always open when any open
        // vertex is present in its component because closed vertices are
        // never united with anything
    }
    return k;
}

std::vector<int> component_labels(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta) {
    UnionFind uf;
    merged_components(reg, rbc, theta, uf);
    int n = reg.n_total();
    std::vector<int> lab(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v)
        if (rbc.vertex_open(reg, v, theta.psi)) lab[static_cast<std::size_t>(v)] = uf.find(v);
    return lab;
}

bool connected_in_config(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta, int u, int v) {
    UnionFind uf;
    merged_components(reg, rbc, theta, uf);
    if (!rbc.vertex_open(reg, u, theta.psi) || !rbc.vertex_open(reg, v, theta.psi)) return false;
    return uf.connected(u, v);
}

bool connected_to_boundary(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta, int u) {
    if (!rbc.vertex_open(reg, u, theta.psi)) return false;
    UnionFind uf;
    merged_components(reg, rbc, theta, uf);
    for (int i = 0; i < reg.n_boundary(); ++i) {
        int v = reg.n_interior() + i;
        if (rbc.open[static_cast<std::size_t>(i)] && uf.connected(u, v)) return true;
    }
    return false;
}

double rc_log_weight(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta,
                     const ModelParams& params) {
    if (!is_compatible(reg, rbc, theta))
        throw std::invalid_argument("rc_log_weight: incompatible configuration");
    if (params.rc.a <= 0.0 || params.rc.a >= 1.0 || params.rc.p <= 0.0 || params.rc.p >= 1.0)
        throw std::invalid_argument("rc_log_weight: degenerate a or p (Bernoulli conventions apply)");
    double logw = 0.0;
    double la = std::log(params.rc.a / (1.0 - params.rc.a));
    int nopen = 0;
    for (std::size_t x = 0; x < theta.psi.size(); ++x) nopen += theta.psi[x] ? 1 : 0;
    logw += la * nopen;
    for (std::size_t e = 0; e < theta.omega.size(); ++e) {
        const RegionEdge& ed = reg.edges()[e];
        bool live = rbc.vertex_open(reg, ed.a, theta.psi) && rbc.vertex_open(reg, ed.b, theta.psi);
        if (!live) continue;
        logw += std::log(rbc.edge_r[e]);
        if (theta.omega[e]) logw += std::log(rbc.edge_p[e] / (1.0 - rbc.edge_p[e]));
    }
    int k = cluster_count(reg, rbc, theta);
    logw += k * std::log(2.0);
    return logw;
}

std::complex<double> bc_log_weight(const Region& reg, const ResolvedBc& rbc, const SpinConfig& sigma,
                                   double beta, double delta, const ComplexField* field) {
    if (static_cast<int>(sigma.size()) != reg.n_interior())
        throw std::invalid_argument("bc_log_weight: sigma must cover Lambda");
    std::complex<double> logw = 0.0;
    for (std::size_t x = 0; x < sigma.size(); ++x) {
        double s = sigma[x];
        logw += delta * s * s;
        if (field) logw += (*field)[x] * s;
    }
    for (std::size_t e = 0; e < reg.edges().size(); ++e) {
        const RegionEdge& ed = reg.edges()[e];
        if (ed.interior) {
            logw += beta * static_cast<double>(sigma[static_cast<std::size_t>(ed.a)]) *
                    static_cast<double>(sigma[static_cast<std::size_t>(ed.b)]);
        } else {
            int bidx = ed.b - reg.n_interior();
            double eta = rbc.spin[static_cast<std::size_t>(bidx)];
            logw += rbc.edge_coupling[e] * static_cast<double>(sigma[static_cast<std::size_t>(ed.a)]) * eta;
        }
    }
    return logw;
}

std::string encode_rc_config(const RcConfig& theta) {
    std::string bits;
    bits.reserve(theta.psi.size() + theta.omega.size());
    for (auto b : theta.psi) bits.push_back(b ? '1' : '0');
    for (auto b : theta.omega) bits.push_back(b ? '1' : '0');
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        int v = 0;
        for (std::size_t j = 0; j < 4 && i + j < bits.size(); ++j)
            if (bits[i + j] == '1') v |= 1 << j;
        out.push_back(hexd[v]);
    }
    return out;
}

RcConfig decode_rc_config(const std::string& hex, int n_vertices, int n_edges) {
    RcConfig t;
    t.psi.assign(static_cast<std::size_t>(n_vertices), 0);
    t.omega.assign(static_cast<std::size_t>(n_edges), 0);
    auto bit = [&](int i) {
        int nib = i / 4;
        if (nib >= static_cast<int>(hex.size())) throw std::invalid_argument("decode_rc_config: short string");
        char c = hex[static_cast<std::size_t>(nib)];
        int v = c <= '9' ? c - '0' : c - 'a' + 10;
        return (v >> (i % 4)) & 1;
    };
    for (int i = 0; i < n_vertices; ++i) t.psi[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit(i));
    for (int i = 0; i < n_edges; ++i)
        t.omega[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit(n_vertices + i));
    return t;
}

}  // namespace bc
