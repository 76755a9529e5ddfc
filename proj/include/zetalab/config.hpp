#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zetalab/shifts.hpp"

namespace zetalab {

// Raised for malformed config files (JSON syntax, unknown keys, wrong types).
// The message names the source and, for syntax errors, the line and column.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full description of one CLI run. Parsed from a JSON config file where
// complex numbers appear as [re, im] pairs; every field has a default so a
// config may specify only what it changes. serialize_config emits the
// canonical form (all fields, fixed order), and the pair round-trips:
// parse_config_text(serialize_config(c)) == c.
struct RunConfig {
    // One of: verify, correlate, moments, vandermonde, report. Empty means
    // "whatever subcommand was invoked"; when set it must match.
    std::string subcommand;

    ShiftMultiset A, B;  // shift multisets, JSON as [[re, im], ...]

    double T = 2000.0;      // center of the t-average window [T, 2T]
    double X = 1000.0;      // Dirichlet-polynomial length / window scale
    double epsilon = 0.06;  // half-offset of the residue contours

    std::uint64_t M = 1, N = 1;              // correlation moduli (coprime)
    std::vector<long long> h_values = {1};   // correlation offsets
    double window_shift = 0.0;               // shifts the [X, 2X] window
    std::string weight = "bump";             // smoothing-pair catalog name

    // Truncation block ("truncations" object in the JSON).
    int circle_nodes = 64;        // trapezoid nodes on small contour circles
    double radius = 0.1;          // radius of those circles
    std::uint64_t Q_max = 10000;  // modulus cutoff in the delta-method q-sum
    std::uint32_t P_cut = 10000;  // Euler-product prime cutoff
    int K = 240;                  // prime-power series cutoff
    int line_nodes = 3201;        // nodes per vertical integration line
    double line_height = 40.0;    // half-height of the vertical lines
    int t_nodes = 128;            // nodes for the explicit t-average
    long long h_bound = 50;       // off-diagonal offset cutoff |h_j| <= h_bound
    long long direction_bound = 30;     // direction-product cutoff in strata
    std::uint64_t N_direct = 2000000;   // refusal bound for direct summation
    int MN_bound = 8;             // modulus cutoff in local-average cross-checks

    std::uint64_t seed = 1;  // seed for randomized suites
    std::string suite;       // verify: suite name ("" = all suites)
    int ell = 1;             // vandermonde: stratification level

    std::string out_csv;   // CSV destination ("" = stdout)
    std::string out_json;  // machine-readable summary ("" = none)
    // Record real wall-clock seconds in reports. Off by default so that a
    // fixed config + seed produces byte-identical report files.
    bool timing = false;
    // If set, exit with status 1 when any report row exceeds this relative
    // error (also overrides the per-suite gates of `verify`).
    std::optional<double> gate_rel;
};

bool operator==(const RunConfig& a, const RunConfig& b);
inline bool operator!=(const RunConfig& a, const RunConfig& b) { return !(a == b); }

// Parse a config from JSON text; `origin` names the source in diagnostics.
// Unknown keys and type mismatches are errors (naming the key), as is JSON
// the parser rejects (naming line and column).
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Read and parse a config file.
RunConfig parse_config_file(const std::string& path);

// Canonical JSON serialization: every field in a fixed order, complex
// numbers as [re, im], two-space indent, trailing newline.
std::string serialize_config(const RunConfig& c);

}  // namespace zetalab
