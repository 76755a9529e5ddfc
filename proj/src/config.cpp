#include "zetalab/config.hpp"

#include <cstddef>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace zetalab {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError("config " + origin + ": " + msg);
}

// 1-based line and column of a byte offset, for JSON syntax diagnostics.
std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col;
    return os.str();
}

double want_double(const ordered_json& v, const std::string& key, const std::string& origin) {
    if (!v.is_number()) fail(origin, "key \"" + key + "\": expected a number");
    return v.get<double>();
}

std::int64_t want_int(const ordered_json& v, const std::string& key, const std::string& origin) {
    if (!v.is_number_integer()) fail(origin, "key \"" + key + "\": expected an integer");
    return v.get<std::int64_t>();
}

std::uint64_t want_uint(const ordered_json& v, const std::string& key, const std::string& origin) {
    std::int64_t n = want_int(v, key, origin);
    if (n < 0) fail(origin, "key \"" + key + "\": expected a nonnegative integer");
    return static_cast<std::uint64_t>(n);
}

std::string want_string(const ordered_json& v, const std::string& key, const std::string& origin) {
    if (!v.is_string()) fail(origin, "key \"" + key + "\": expected a string");
    return v.get<std::string>();
}

bool want_bool(const ordered_json& v, const std::string& key, const std::string& origin) {
    if (!v.is_boolean()) fail(origin, "key \"" + key + "\": expected true or false");
    return v.get<bool>();
}

ShiftMultiset want_shifts(const ordered_json& v, const std::string& key, const std::string& origin) {
    if (!v.is_array()) fail(origin, "key \"" + key + "\": expected an array of [re, im] pairs");
    ShiftMultiset out;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail(origin, "key \"" + key + "\": each shift must be a [re, im] pair of numbers");
        out.add(cplx(e[0].get<double>(), e[1].get<double>()));
    }
    return out;
}

std::vector<long long> want_int_list(const ordered_json& v, const std::string& key,
                                     const std::string& origin) {
    if (!v.is_array()) fail(origin, "key \"" + key + "\": expected an array of integers");
    std::vector<long long> out;
    for (const auto& e : v) {
        if (!e.is_number_integer())
            fail(origin, "key \"" + key + "\": each entry must be an integer");
        out.push_back(e.get<long long>());
    }
    return out;
}

void parse_truncations(const ordered_json& t, RunConfig& c, const std::string& origin) {
    if (!t.is_object()) fail(origin, "key \"truncations\": expected an object");
    for (const auto& [key, v] : t.items()) {
        if (key == "circle_nodes") {
            c.circle_nodes = static_cast<int>(want_int(v, "truncations." + key, origin));
        } else if (key == "radius") {
            c.radius = want_double(v, "truncations." + key, origin);
        } else if (key == "Q_max") {
            c.Q_max = want_uint(v, "truncations." + key, origin);
        } else if (key == "P_cut") {
            c.P_cut = static_cast<std::uint32_t>(want_uint(v, "truncations." + key, origin));
        } else if (key == "K") {
            c.K = static_cast<int>(want_int(v, "truncations." + key, origin));
        } else if (key == "line_nodes") {
            c.line_nodes = static_cast<int>(want_int(v, "truncations." + key, origin));
        } else if (key == "line_height") {
            c.line_height = want_double(v, "truncations." + key, origin);
        } else if (key == "t_nodes") {
            c.t_nodes = static_cast<int>(want_int(v, "truncations." + key, origin));
        } else if (key == "h_bound") {
            c.h_bound = want_int(v, "truncations." + key, origin);
        } else if (key == "direction_bound") {
            c.direction_bound = want_int(v, "truncations." + key, origin);
        } else if (key == "N_direct") {
            c.N_direct = want_uint(v, "truncations." + key, origin);
        } else if (key == "MN_bound") {
            c.MN_bound = static_cast<int>(want_int(v, "truncations." + key, origin));
        } else {
            fail(origin, "unknown key \"truncations." + key + "\"");
        }
    }
}

ordered_json shifts_to_json(const ShiftMultiset& s) {
    ordered_json a = ordered_json::array();
    for (const cplx& z : s) a.push_back(ordered_json::array({z.real(), z.imag()}));
    return a;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.subcommand == b.subcommand && a.A == b.A && a.B == b.B && a.T == b.T &&
           a.X == b.X && a.epsilon == b.epsilon && a.M == b.M && a.N == b.N &&
           a.h_values == b.h_values && a.window_shift == b.window_shift &&
           a.weight == b.weight && a.circle_nodes == b.circle_nodes && a.radius == b.radius &&
           a.Q_max == b.Q_max && a.P_cut == b.P_cut && a.K == b.K &&
           a.line_nodes == b.line_nodes && a.line_height == b.line_height &&
           a.t_nodes == b.t_nodes && a.h_bound == b.h_bound &&
           a.direction_bound == b.direction_bound && a.N_direct == b.N_direct &&
           a.MN_bound == b.MN_bound && a.seed == b.seed && a.suite == b.suite &&
           a.ell == b.ell && a.out_csv == b.out_csv && a.out_json == b.out_json &&
           a.timing == b.timing && a.gate_rel == b.gate_rel;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is the 1-based byte offset of the failure.
        std::size_t byte = e.byte > 0 ? static_cast<std::size_t>(e.byte) - 1 : 0;
        fail(origin, "JSON syntax error at " + line_col(text, byte));
    }
    if (!j.is_object()) fail(origin, "top level must be a JSON object");

    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "subcommand") {
            c.subcommand = want_string(v, key, origin);
        } else if (key == "A") {
            c.A = want_shifts(v, key, origin);
        } else if (key == "B") {
            c.B = want_shifts(v, key, origin);
        } else if (key == "T") {
            c.T = want_double(v, key, origin);
        } else if (key == "X") {
            c.X = want_double(v, key, origin);
        } else if (key == "epsilon") {
            c.epsilon = want_double(v, key, origin);
        } else if (key == "M") {
            c.M = want_uint(v, key, origin);
        } else if (key == "N") {
            c.N = want_uint(v, key, origin);
        } else if (key == "h_values") {
            c.h_values = want_int_list(v, key, origin);
        } else if (key == "window_shift") {
            c.window_shift = want_double(v, key, origin);
        } else if (key == "weight") {
            c.weight = want_string(v, key, origin);
        } else if (key == "truncations") {
            parse_truncations(v, c, origin);
        } else if (key == "seed") {
            c.seed = want_uint(v, key, origin);
        } else if (key == "suite") {
            c.suite = want_string(v, key, origin);
        } else if (key == "ell") {
            c.ell = static_cast<int>(want_int(v, key, origin));
        } else if (key == "out_csv") {
            c.out_csv = want_string(v, key, origin);
        } else if (key == "out_json") {
            c.out_json = want_string(v, key, origin);
        } else if (key == "timing") {
            c.timing = want_bool(v, key, origin);
        } else if (key == "gate_rel") {
            if (v.is_null())
                c.gate_rel.reset();
            else
                c.gate_rel = want_double(v, key, origin);
        } else {
            fail(origin, "unknown key \"" + key + "\"");
        }
    }
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config " + path + ": cannot open file");
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config_text(body.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    ordered_json j;
    j["subcommand"] = c.subcommand;
    j["A"] = shifts_to_json(c.A);
    j["B"] = shifts_to_json(c.B);
    j["T"] = c.T;
    j["X"] = c.X;
    j["epsilon"] = c.epsilon;
    j["M"] = c.M;
    j["N"] = c.N;
    j["h_values"] = c.h_values;
    j["window_shift"] = c.window_shift;
    j["weight"] = c.weight;
    ordered_json t;
    t["circle_nodes"] = c.circle_nodes;
    t["radius"] = c.radius;
    t["Q_max"] = c.Q_max;
    t["P_cut"] = c.P_cut;
    t["K"] = c.K;
    t["line_nodes"] = c.line_nodes;
    t["line_height"] = c.line_height;
    t["t_nodes"] = c.t_nodes;
    t["h_bound"] = c.h_bound;
    t["direction_bound"] = c.direction_bound;
    t["N_direct"] = c.N_direct;
    t["MN_bound"] = c.MN_bound;
    j["truncations"] = t;
    j["seed"] = c.seed;
    j["suite"] = c.suite;
    j["ell"] = c.ell;
    j["out_csv"] = c.out_csv;
    j["out_json"] = c.out_json;
    j["timing"] = c.timing;
    if (c.gate_rel) j["gate_rel"] = *c.gate_rel;
    return j.dump(2) + "\n";
}

}  // namespace zetalab
