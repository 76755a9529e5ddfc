#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zetalab/report.hpp"

namespace zetalab {

// Result of one named identity suite: seeded random (or gridded) instances
// of a library identity, one ComparisonRow each, gated on relative error.
// Rows are grouped by the prefix of their label before the first '/'; the
// `gates` list assigns per-prefix tolerances, with `tolerance` as the
// fallback for unmatched labels.
struct SuiteResult {
    std::string name;
    std::string statement;  // one-line description of the identity under test
    std::vector<ComparisonRow> rows;
    double tolerance = 0.0;
    std::vector<std::pair<std::string, double>> gates;  // (label prefix, tol)
    double max_rel = 0.0;
    std::string worst_label;  // label of the row with the largest rel error
    bool pass = false;

    // Tolerance applying to a given row label (first matching prefix, else
    // the suite default).
    double gate_for(const std::string& label) const;
};

// Names of the available suites, in canonical order.
const std::vector<std::string>& suite_names();

// Run one suite with the given seed. `tolerance_override` > 0 replaces every
// gate in the suite (used to tighten or loosen the pass criterion from the
// command line). Throws std::invalid_argument for an unknown suite name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed,
                      double tolerance_override = 0.0);

}  // namespace zetalab
