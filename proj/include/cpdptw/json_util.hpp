#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cpdptw/common.hpp"

namespace cpdptw::detail {

using json = nlohmann::json;

template <class T>
T require(const json& obj, const std::string& key, const std::string& path) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(where, "missing field");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where, e.what());
    }
}

template <class T>
T optional_field(const json& obj, const std::string& key, const std::string& path, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return require<T>(obj, key, path);
}

inline Point require_point(const json& obj, const std::string& key, const std::string& path) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!obj.contains(key)) throw ParseError(where, "missing field");
    const json& p = obj.at(key);
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ParseError(where, "expected [x_km, y_km]");
    return {p[0].get<double>(), p[1].get<double>()};
}

inline json point_json(Point p) { return json::array({p.x, p.y}); }

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(path, e.what());
    }
}

inline void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

inline void require_version(const json& doc, const std::string& key, int expected) {
    const int v = require<int>(doc, key, "");
    if (v != expected)
        throw ParseError(key, "unsupported version " + std::to_string(v) + ", expected " +
                                  std::to_string(expected));
}

}  // namespace cpdptw::detail
