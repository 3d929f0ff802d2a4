#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bc/lattice.hpp"

namespace bc {

// Two candidate dictionaries between the crystal field Delta and the vertex
// activity a. PaperA is the printed a = 2e^D/(1+2e^D); ActivityE is
// a = e^D/(1+e^D), i.e. per-open-vertex weight a/(1-a) = e^D. Which one
// makes the spin/cluster coupling exact is decided at startup by
// exact::resolve_convention, never assumed.
enum class Convention { PaperA, ActivityE };

std::string to_string(Convention c);

struct RcParams {
    double p = 0.5;
    double a = 0.5;
    double r = 0.0;
    bool tied = true;  // r == sqrt(1-p)
};

struct ModelParams {
    double beta = 0.0;
    double delta = 0.0;
    RcParams rc;

    static ModelParams spin(double beta, double delta, Convention conv);
    static ModelParams rc_tied(double p, double a);
    static ModelParams rc_general(double p, double a, double r);
};

// p = 1 - e^{-2 beta}, r = sqrt(1-p), a per the convention.
RcParams bc_to_rc_params(double beta, double delta, Convention conv);
// inverse map (round trip to 1e-12)
void rc_to_bc_params(const RcParams& rc, Convention conv, double& beta, double& delta);

enum class BcKind { Free0, Wired1, EpsField, DeltaWired, Explicit };

// Finite-volume boundary condition: states of dLambda vertices, a partition
// of the open ones into externally-wired classes, spin values for the
// Edwards-Sokal side, and per-edge (p_e, r_e, coupling) overrides on
// boundary edges.
struct BoundarySpec {
    BcKind kind = BcKind::Free0;
    double eps = 0.0;    // EpsField strength
    double delta = 0.0;  // DeltaWired edge parameter
    // Explicit data, indexed by boundary vertex position (0..n_boundary-1):
    std::vector<std::uint8_t> open;  // vertex open states
    std::vector<int> wire_class;     // -1 for closed vertices
    std::vector<std::int8_t> spin;   // in {-1,0,+1}

    static BoundarySpec free0() { return {}; }
    static BoundarySpec wired1();
    static BoundarySpec plus() { return wired1(); }
    static BoundarySpec eps_field(double eps);
    static BoundarySpec delta_wired(double delta);
    static BoundarySpec explicit_bc(std::vector<std::uint8_t> open, std::vector<int> wire_class,
                                    std::vector<std::int8_t> spin);
    std::string label() const;
};

// BoundarySpec resolved against a concrete region and parameter set.
struct ResolvedBc {
    std::vector<std::uint8_t> open;      // per boundary vertex
    std::vector<int> wire_class;         // per boundary vertex, -1 closed
    std::vector<std::int8_t> spin;       // per boundary vertex
    std::vector<double> edge_p;          // per region edge
    std::vector<double> edge_r;          // per region edge
    std::vector<double> edge_coupling;   // spin-side strength per region edge
    int n_classes = 0;

    bool vertex_open(const Region& reg, int v, const std::vector<std::uint8_t>& psi) const {
        return reg.is_interior(v) ? psi[static_cast<std::size_t>(v)] != 0
                                  : open[static_cast<std::size_t>(v - reg.n_interior())] != 0;
    }
};

ResolvedBc resolve_bc(const Region& reg, const BoundarySpec& bc, const ModelParams& params);

// sigma on interior vertices; boundary spins live in the ResolvedBc
using SpinConfig = std::vector<std::int8_t>;
// psi on interior vertices, omega on E_Lambda (region edge order)
struct RcConfig {
    std::vector<std::uint8_t> psi;
    std::vector<std::uint8_t> omega;
};

using ComplexField = std::vector<std::complex<double>>;

// Re(h_x) >= |Im(h_x)| at every site
bool field_in_cone(const ComplexField& h);

bool is_compatible(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta);

// k(theta, Lambda): components of the open graph meeting the closed region,
// with externally-wired classes merged before counting.
int cluster_count(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta);

// log of the unnormalized weight in (defRC) with per-edge overrides; the
// 2^k factor enters as k*log 2 with integer k.
double rc_log_weight(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta,
                     const ModelParams& params);

// -H, the spin log-weight, including boundary coupling and optional field.
std::complex<double> bc_log_weight(const Region& reg, const ResolvedBc& rbc, const SpinConfig& sigma,
                                   double beta, double delta,
                                   const ComplexField* field = nullptr);

// Connectivity helpers on RC configurations (respect boundary wiring).
// Component labels: one label per combined vertex, -1 for closed.
std::vector<int> component_labels(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta);
bool connected_in_config(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta, int u, int v);
bool connected_to_boundary(const Region& reg, const ResolvedBc& rbc, const RcConfig& theta, int u);

// Compact bitstring serialization (psi bits then omega bits, lex order).
std::string encode_rc_config(const RcConfig& theta);
RcConfig decode_rc_config(const std::string& hex, int n_vertices, int n_edges);

}  // namespace bc
