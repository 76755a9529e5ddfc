#include "zetalab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace zetalab {

namespace {

// Deterministic shortest-unambiguous formatting for report values: %.16e
// pins every bit pattern to one spelling on every libc we target.
std::string fmt_val(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string fmt_err(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

// Labels are free text; keep the CSV single-token per field.
std::string sanitize_label(const std::string& label) {
    std::string out = label;
    for (char& ch : out)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return out;
}

}  // namespace

std::string digest_hex(const std::string& params) {
    std::uint64_t h = fnv1a(params);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::string& csv_header() {
    static const std::string h =
        "label,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,params_digest,seconds";
    return h;
}

std::string rows_to_csv(const std::vector<ComparisonRow>& rows, bool timing) {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const ComparisonRow& r : rows) {
        os << sanitize_label(r.label) << ',' << fmt_val(r.lhs.real()) << ','
           << fmt_val(r.lhs.imag()) << ',' << fmt_val(r.rhs.real()) << ','
           << fmt_val(r.rhs.imag()) << ',' << fmt_err(std::abs(r.lhs - r.rhs)) << ','
           << fmt_err(rel_err(r.lhs, r.rhs)) << ',' << r.params_digest << ','
           << fmt_seconds(timing ? r.seconds : 0.0) << '\n';
    }
    return os.str();
}

double max_rel_err(const std::vector<ComparisonRow>& rows, std::string* worst) {
    double mx = 0.0;
    for (const ComparisonRow& r : rows) {
        double e = rel_err(r.lhs, r.rhs);
        if (e >= mx) {
            mx = e;
            if (worst) *worst = r.label;
        }
    }
    return mx;
}

std::string merge_csv(const std::vector<std::string>& csv_texts) {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (std::size_t i = 0; i < csv_texts.size(); ++i) {
        std::istringstream in(csv_texts[i]);
        std::string line;
        if (!std::getline(in, line) || line != csv_header()) {
            std::ostringstream msg;
            msg << "merge_csv: input " << i + 1 << " does not start with the report header";
            throw std::invalid_argument(msg.str());
        }
        while (std::getline(in, line))
            if (!line.empty()) os << line << '\n';
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

}  // namespace zetalab
