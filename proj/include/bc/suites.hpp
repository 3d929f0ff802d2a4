#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bc/exact.hpp"
#include "bc/leeyang.hpp"
#include "bc/osss.hpp"

namespace bc::suites {

using json = nlohmann::ordered_json;

struct SuiteOutcome {
    std::vector<json> records;
    long violations = 0;
    bool ok() const { return violations == 0; }
    void absorb(const exact::ExactReport& r, Convention conv);
    void merge(const SuiteOutcome& o);
};

json report_record(const exact::ExactReport& r, Convention conv);

// Edwards-Sokal identities over every connected subregion of Z^2 with at
// most max_vertices vertices, free and wired.
SuiteOutcome es_coupling_suite(double beta, double delta, int max_vertices, Convention conv);
// the rejected convention must produce a reported nonzero error
SuiteOutcome convention_witness(double beta, double delta);

// Lemma 4.2 / Corollary 4.3 over lattice subregions (all boundary signs)
// and abstract connected graphs (free boundary).
SuiteOutcome ising_mapping_suite(std::span<const double> betas, std::span<const double> deltas,
                                 int max_vertices);

// FKG, domination, MON, SMP, finite energy, conditioning, Prop 2.16 on the
// 1x2 and 2x2 regions over a (p, a) grid.
SuiteOutcome order_suite(std::span<const double> ps, std::span<const double> as, int n_random,
                         std::uint64_t seed);

// Lemma 7.2 comparison on Lambda_1 over a delta grid.
SuiteOutcome comparison_suite(std::span<const double> deltas, double p, double a, int n_events,
                              std::uint64_t seed);

// site factors, the -log4 boundary case, cone scans over all connected
// graphs with <= cone_max_vertices vertices.
SuiteOutcome leeyang_suite(int n_max, std::span<const double> deltas, double beta,
                           int cone_max_vertices, double radius, int grid, double zero_threshold);

// >= 50 exact OSSS triples, weak monotonicity at the Prop 8.3 threshold,
// Lemma 8.2 bounds and Prop 8.4 derivative identities.
SuiteOutcome osss_suite(std::uint64_t seed, int threads = 1);

}  // namespace bc::suites
