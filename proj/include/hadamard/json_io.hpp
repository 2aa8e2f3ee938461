#pragma once

// Shared JSON surface: the matrix file format and a byte-stable writer that prints
// every floating value with 17 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "nnmatrix.hpp"

namespace hadamard {

using json = nlohmann::ordered_json;

/// {"rows": n, "cols": m, "data": [[...], ...]}
inline json matrix_to_json(const NonNegativeMatrix& a) {
    json data = json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        data.push_back(std::move(row));
    }
    json out;
    out["rows"] = a.rows();
    out["cols"] = a.cols();
    out["data"] = std::move(data);
    return out;
}

inline NonNegativeMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        throw domain_error("matrix JSON needs \"rows\", \"cols\" and \"data\"");
    }
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer()) {
        throw domain_error("matrix JSON: rows and cols must be integers");
    }
    const auto rows = j["rows"].get<long long>();
    const auto cols = j["cols"].get<long long>();
    if (rows < 1 || cols < 1) throw dimension_error("matrix JSON: rows and cols must be >= 1");
    const json& data = j["data"];
    if (!data.is_array() || data.size() != static_cast<std::size_t>(rows)) {
        throw dimension_error("matrix JSON: data must hold exactly \"rows\" rows");
    }
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(rows * cols));
    for (const auto& row : data) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
            throw dimension_error("matrix JSON: every row must hold exactly \"cols\" numbers");
        }
        for (const auto& v : row) {
            if (!v.is_number()) throw domain_error("matrix JSON: entries must be numbers");
            entries.push_back(v.get<double>());
        }
    }
    return NonNegativeMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                             std::move(entries));
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw domain_error(origin + ": malformed JSON (" + e.what() + ")");
    }
}

inline NonNegativeMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open matrix file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return matrix_from_json(parse_json_text(ss.str(), path));
    } catch (const error& e) {
        throw domain_error(path + ": " + e.what());
    }
}

namespace detail {

inline void format_double(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    if (v == 0.0) v = 0.0;  // fold -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

inline void dump_stable(std::string& out, const json& j, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_stable(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line so matrix rows read naturally.
            const bool flat = std::all_of(j.begin(), j.end(),
                                          [](const json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat || indent < 0 ? (indent < 0 ? "," : ", ") : ",";
                first = false;
                if (!flat) newline(depth + 1);
                dump_stable(out, e, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float:
            format_double(out, j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace detail

/// Deterministic serialization: insertion-ordered keys, floats as %.17g, non-finite as null.
inline std::string dump_stable(const json& j, int indent = 2) {
    std::string out;
    detail::dump_stable(out, j, indent, 0);
    return out;
}

}  // namespace hadamard
