#pragma once

#include <string>
#include <vector>

#include "zetalab/complex_util.hpp"

namespace zetalab {

// One comparison in a report: a labeled lhs/rhs value pair plus a digest of
// the parameters that produced it.
struct ComparisonRow {
    std::string label;
    cplx lhs = 0.0;
    cplx rhs = 0.0;
    std::string params_digest;  // 16 lowercase hex chars (see digest_hex)
    double seconds = 0.0;       // wall-clock cost of producing the row
};

// 16-hex-digit FNV-1a digest of a parameter string. Rows carry this so a
// merged report still identifies exactly which parameters produced each row.
std::string digest_hex(const std::string& params);

// Fixed-schema CSV: a header plus one line per row with columns
//   label,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,params_digest,seconds
// Values print deterministically; `seconds` prints as 0.000 unless `timing`
// is set, so default reports are byte-identical across reruns.
std::string rows_to_csv(const std::vector<ComparisonRow>& rows, bool timing);

// The header line rows_to_csv emits (no newline).
const std::string& csv_header();

// Largest relative error over the rows (0 for an empty list); if `worst` is
// non-null it receives the label of the maximizing row.
double max_rel_err(const std::vector<ComparisonRow>& rows, std::string* worst = nullptr);

// Merge CSV reports produced by rows_to_csv: every input must start with the
// fixed header; data lines concatenate in argument order under one header.
// Throws std::invalid_argument on a header mismatch (naming the input index).
std::string merge_csv(const std::vector<std::string>& csv_texts);

// Whole-file text I/O; both throw std::runtime_error naming the path.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace zetalab
