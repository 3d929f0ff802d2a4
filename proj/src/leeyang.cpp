#include "bc/leeyang.hpp"

#include <cmath>

namespace bc::leeyang {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// exact eighth roots of unity (components in {0, +-1, +-1/sqrt(2)})
const std::complex<double> kRoot8[8] = {
    {1.0, 0.0},  {kInvSqrt2, kInvSqrt2},   {0.0, 1.0},  {-kInvSqrt2, kInvSqrt2},
    {-1.0, 0.0}, {-kInvSqrt2, -kInvSqrt2}, {0.0, -1.0}, {kInvSqrt2, -kInvSqrt2}};

struct SiteValue {
    int mod2 = 0;   // |nu|^2 in {0,1,2}
    int phase = 0;  // nu = |nu| e^{i pi phase/4}
};

std::vector<SiteValue> site_value_reps(SiteClass c) {
    if (c == SiteClass::IsingSite)
        return {{2, 0}, {2, 2}, {2, 4}, {2, 6}};
    return {{0, 0}, {2, 0}, {2, 2}, {2, 4}, {2, 6}, {1, 1}, {1, 3}, {1, 5}, {1, 7}};
}

std::complex<double> value_of(const SiteValue& v) {
    double mod = v.mod2 == 2 ? std::sqrt(2.0) : (v.mod2 == 1 ? 1.0 : 0.0);
    return mod * kRoot8[v.phase];
}

int mod8(long x) { return static_cast<int>(((x % 8) + 8) % 8); }

}  // namespace

std::vector<std::complex<double>> site_values(SiteClass c) {
    std::vector<std::complex<double>> out;
    for (const SiteValue& v : site_value_reps(c)) out.push_back(value_of(v));
    return out;
}

std::complex<double> site_factor(int n, int np, double delta, SiteClass c) {
    bool div4 = (n - np) % 4 == 0;
    double ising = div4 ? 4.0 * std::pow(std::sqrt(2.0), n + np) * std::exp(2.0 * delta) : 0.0;
    if (c == SiteClass::IsingSite) return ising;
    double v = (n == 0 && np == 0) ? 1.0 : 0.0;
    if (div4) v += ising + 4.0 * std::exp(delta) * (((n - np) / 4) % 2 == 0 ? 1.0 : -1.0);
    return v;
}

exact::ExactReport verify_site_factor_identity(int n_max, std::span<const double> deltas) {
    exact::ExactReport rep;
    rep.check = "site-factor-identity";
    rep.instance = "n,n' <= " + std::to_string(n_max);
    double log4 = std::log(4.0);
    for (double delta : deltas) {
        for (SiteClass c : {SiteClass::IsingSite, SiteClass::BCSite}) {
            auto reps = site_value_reps(c);
            for (int n = 0; n <= n_max; ++n) {
                for (int np = 0; np <= n_max; ++np) {
                    // brute force: nu^n conj(nu)^{n'} = |nu|^{n+n'} e^{i pi phase (n-n')/4}
                    exact::KahanComplex sum;
                    for (const SiteValue& v : reps) {
                        if (v.mod2 == 0) {
                            if (n == 0 && np == 0) sum.add(1.0);
                            continue;
                        }
                        double mag = std::pow(v.mod2 == 2 ? std::sqrt(2.0) : 1.0, n + np) *
                                     std::exp(delta * v.mod2);
                        sum.add(mag * kRoot8[mod8(static_cast<long>(v.phase) * (n - np))]);
                    }
                    std::complex<double> bf = sum.value();
                    std::complex<double> cf = site_factor(n, np, delta, c);
                    double scale = std::max(1.0, std::abs(cf));
                    std::string wit = std::string(c == SiteClass::IsingSite ? "ising" : "bc") + " n=" +
                                      std::to_string(n) + " n'=" + std::to_string(np) +
                                      " delta=" + std::to_string(delta);
                    rep.record(std::abs(bf - cf) / scale, 1e-12, wit);
                    // conjugate symmetry of the value sets keeps sums real
                    rep.record(std::fabs(bf.imag()), 1e-12, wit + " imag");
                    // positivity on and above the -log 4 boundary
                    if (delta >= -log4 - 1e-15 && (n - np) % 4 == 0)
                        rep.record(std::max(0.0, -cf.real()), 1e-12, wit + " positivity");
                }
            }
        }
    }
    return rep;
}

ComplexPartition complex_event_partition(const Graph& g, double beta, double delta,
                                         const ComplexField& h, const std::vector<int>& A) {
    if (static_cast<int>(h.size()) != g.n)
        throw std::invalid_argument("complex_event_partition: field must cover V");
    if (g.n > 14)
        throw exact::InstanceTooLarge("complex_event_partition: 3^" + std::to_string(g.n),
                                      std::pow(3.0, g.n));
    std::vector<char> in_a(static_cast<std::size_t>(g.n), 0);
    for (int x : A) in_a[static_cast<std::size_t>(x)] = 1;

    exact::KahanComplex z;
    double sum_abs = 0.0;
    std::vector<int> s(static_cast<std::size_t>(g.n), -1);
    for (;;) {
        bool ok = true;
        for (int x = 0; x < g.n && ok; ++x)
            if (in_a[static_cast<std::size_t>(x)] && s[static_cast<std::size_t>(x)] == 0) ok = false;
        if (ok) {
            std::complex<double> lw = 0.0;
            for (auto [a, b] : g.edges)
                lw += beta * static_cast<double>(s[static_cast<std::size_t>(a)]) *
                      static_cast<double>(s[static_cast<std::size_t>(b)]);
            for (int x = 0; x < g.n; ++x) {
                double sx = s[static_cast<std::size_t>(x)];
                lw += delta * sx * sx + h[static_cast<std::size_t>(x)] * sx;
            }
            std::complex<double> term = std::exp(lw);
            z.add(term);
            sum_abs += std::abs(term);
        }
        int i = 0;
        while (i < g.n && s[static_cast<std::size_t>(i)] == 1) s[static_cast<std::size_t>(i++)] = -1;
        if (i == g.n) break;
        ++s[static_cast<std::size_t>(i)];
    }
    return {z.value(), sum_abs};
}

ConeScanResult cone_scan(const Graph& g, double beta, double delta, const std::vector<int>& A,
                         double radius, int grid, double zero_threshold, bool keep_records) {
    ConeScanResult res;
    for (int iu = 0; iu < grid; ++iu) {
        double u = radius * iu / (grid - 1);
        for (int it = 0; it < grid; ++it) {
            double t = -1.0 + 2.0 * it / (grid - 1);
            std::complex<double> hval{u, t * u};
            ComplexField h(static_cast<std::size_t>(g.n), hval);
            ComplexPartition zp = complex_event_partition(g, beta, delta, h, A);
            double norm = zp.normalized();
            if (norm < res.min_normalized) {
                res.min_normalized = norm;
                res.argmin_h = hval;
            }
            if (norm <= zero_threshold) ++res.below_threshold;
            if (keep_records) res.records.push_back({hval, std::abs(zp.value), norm, field_in_cone(h)});
        }
    }
    return res;
}

ConeScanResult cone_scan_boundary_field(int n, int d, double beta, double delta, double radius,
                                        int grid, double eta_re, double zero_threshold) {
    Region reg = Region::box(n, d);
    Graph g = reg.interior_graph();
    // number of outside neighbours per interior vertex
    std::vector<int> mult(static_cast<std::size_t>(g.n), 0);
    for (const RegionEdge& e : reg.edges())
        if (!e.interior) ++mult[static_cast<std::size_t>(e.a)];
    int origin = reg.index_of(make_coord(0));
    std::vector<int> A{origin};

    ConeScanResult res;
    for (int iu = 0; iu < grid; ++iu) {
        double u = radius * iu / (grid - 1);
        for (int it = 0; it < grid; ++it) {
            double t = -1.0 + 2.0 * it / (grid - 1);
            std::complex<double> hval{u, t * u};
            ComplexField h(static_cast<std::size_t>(g.n), 0.0);
            for (int x = 0; x < g.n; ++x)
                if (x != origin)
                    h[static_cast<std::size_t>(x)] =
                        hval * static_cast<double>(mult[static_cast<std::size_t>(x)]);
            h[static_cast<std::size_t>(origin)] = std::complex<double>{eta_re, 0.0};
            ComplexPartition zp = complex_event_partition(g, beta, delta, h, A);
            double norm = zp.normalized();
            if (norm < res.min_normalized) {
                res.min_normalized = norm;
                res.argmin_h = hval;
            }
            if (norm <= zero_threshold) ++res.below_threshold;
        }
    }
    return res;
}

}  // namespace bc::leeyang
