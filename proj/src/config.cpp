#include "tsl/config.hpp"

#include <fstream>
#include <stdexcept>

namespace tsl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

ConfigMap ConfigMap::parse(std::istream& is) {
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // section headers ignored
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: missing '=' on line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
        out.kv_[key] = val;
    }
    return out;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    return parse(is);
}

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stod(it->second);
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stoi(it->second);
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : std::stoull(it->second);
}

SimConfig sim_config_from(const ConfigMap& cfg) {
    SimConfig sc;
    sc.dim = cfg.get_int("d", sc.dim);
    sc.n = cfg.get_int("n", sc.n);
    sc.dt = cfg.get_double("dt", sc.dt);
    sc.t_end = cfg.get_double("t_end", sc.t_end);
    sc.cfl = cfg.get_double("cfl", sc.cfl);
    sc.rho_min = cfg.get_double("rho_min", sc.rho_min);
    const std::string sign = cfg.get("sign", "repulsive");
    if (sign == "repulsive")
        sc.sign = ForcingSign::repulsive;
    else if (sign == "attractive")
        sc.sign = ForcingSign::attractive;
    else
        throw std::runtime_error("config: sign must be repulsive or attractive");
    sc.scheme = cfg.get("scheme", sc.scheme);
    sc.seed = cfg.get_u64("seed", sc.seed);
    sc.output_dir = cfg.get("output_dir", sc.output_dir);
    sc.besov_p = cfg.get_double("p", sc.besov_p);
    sc.sample_every = cfg.get_int("sample_every", sc.sample_every);
    sc.validate();
    return sc;
}

}  // namespace tsl
