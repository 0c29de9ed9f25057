#include "vem2d/config.hpp"

#include "vem2d/errors.hpp"

#include <fstream>

namespace vem {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

Config Config::parse(const std::string& text)
{
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfigError("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw InvalidConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        throw InvalidConfigError("missing required config key '" + key + "'");
    return it->second;
}

Real Config::get_real(const std::string& key, Real fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    try {
        size_t pos = 0;
        const Real v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidConfigError("config key '" + key + "': cannot parse '" + it->second +
                                 "' as a number");
    }
}

int Config::get_int(const std::string& key, int fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    try {
        size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidConfigError("config key '" + key + "': cannot parse '" + it->second +
                                 "' as an integer");
    }
}

std::vector<int> Config::get_int_list(const std::string& key) const
{
    std::vector<int> out;
    const auto it = values_.find(key);
    if (it == values_.end())
        return out;
    std::istringstream in(it->second);
    int v;
    while (in >> v)
        out.push_back(v);
    if (!in.eof())
        throw InvalidConfigError("config key '" + key + "': expected a list of integers");
    return out;
}

} // namespace vem
