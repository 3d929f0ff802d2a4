#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "bc/exact.hpp"
#include "bc/lattice.hpp"
#include "bc/model.hpp"

namespace bc::leeyang {

// Site classes of the duplicated-system expansion: vertices conditioned to
// be nonzero carry the four values sqrt(2)*{1,i,-1,-i}; unconditioned ones
// carry the nine-element set with moduli^2 in {0,1,2}.
enum class SiteClass { IsingSite, BCSite };

std::vector<std::complex<double>> site_values(SiteClass c);

// Closed form of sum_{nu in S} nu^n conj(nu)^{n'} e^{Delta |nu|^2}.
std::complex<double> site_factor(int n, int np, double delta, SiteClass c);

// Brute-force comparison for all n, n' <= n_max over the given Delta list;
// also asserts non-negativity for Delta >= -log 4 when 4 | n - n'.
exact::ExactReport verify_site_factor_identity(int n_max, std::span<const double> deltas);

struct ComplexPartition {
    std::complex<double> value;
    double sum_abs = 0.0;  // sum of |terms|, the conditioning scale
    double normalized() const { return sum_abs > 0.0 ? std::abs(value) / sum_abs : 0.0; }
};

// Z^h_{G,beta,Delta}[sigma_A != 0], exact complex sum with compensated
// summation. A lists vertex indices of G.
ComplexPartition complex_event_partition(const Graph& g, double beta, double delta,
                                         const ComplexField& h, const std::vector<int>& A);

struct ConeScanRecord {
    std::complex<double> h;
    double abs_z = 0.0;
    double normalized = 0.0;
    bool in_cone = true;
};

struct ConeScanResult {
    double min_normalized = 1e300;
    std::complex<double> argmin_h;
    long below_threshold = 0;  // count of grid points under the zero threshold
    std::vector<ConeScanRecord> records;
};

// Uniform-field scan over the cone {Re in [0, radius], |Im| <= Re},
// grid x grid points (corners of the cone included).
ConeScanResult cone_scan(const Graph& g, double beta, double delta, const std::vector<int>& A,
                         double radius, int grid, double zero_threshold = 1e-9,
                         bool keep_records = false);

// Two-parameter boundary-field scan of Section-7.3 type on a box region:
// h_x = eta at the origin and (number of outside neighbours) * h on the
// other boundary-adjacent sites, with sigma_0 != 0 imposed.
ConeScanResult cone_scan_boundary_field(int n, int d, double beta, double delta, double radius,
                                        int grid, double eta_re, double zero_threshold = 1e-9);

}  // namespace bc::leeyang
