#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/error.hpp"
#include "plap/vec2.hpp"

namespace plap::json_io::detail {

using nlohmann::json;

// Typed access to one JSON object. Every key read is remembered so that
// finish() can reject the ones nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    /// Accept key without reading it (handled elsewhere).
    void mark(const std::string& key) { seen_.insert(key); }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        return has(key) ? number(key) : fallback;
    }
    std::optional<double> optional_number(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) return std::nullopt;
        return number(key);
    }
    int integer(const std::string& key, int fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<int>();
    }
    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected a boolean");
        return v.get<bool>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback = {}) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    Vec2 vec2(const std::string& key) {
        auto v = numbers(key);
        if (v.size() != 2) throw ConfigError(where(key) + ": expected two coordinates");
        return {v[0], v[1]};
    }
    Vec2 vec2(const std::string& key, Vec2 fallback) {
        seen_.insert(key);
        return has(key) ? vec2(key) : fallback;
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace plap::json_io::detail
