#pragma once

#include "vem2d/types.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace vem {

// Flat "key = value" configuration text, one entry per line, `#` comments.
class Config {
public:
    static Config parse(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    Real get_real(const std::string& key, Real fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace vem
