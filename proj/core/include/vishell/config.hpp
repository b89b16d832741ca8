#pragma once

#include "vishell/errors.hpp"

#include <map>
#include <string>
#include <vector>

namespace vishell {

// Flat key-value configuration file: one `key = value` per line, `#` starts
// a comment. Values are strings; typed getters parse on demand.
class Config {
public:
    static Config load(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const; // comma separated
    std::vector<std::string> get_string_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace vishell
