#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>

#include "tsl/sim.hpp"

// Flat key = value configuration files ('#' comments, optional quotes).

namespace tsl {

class ConfigMap {
  public:
    static ConfigMap parse(std::istream& is);
    static ConfigMap parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

// Documented keys: d, n, dt, t_end, cfl, rho_min, sign, scheme, seed,
// output_dir, p, sample_every.
SimConfig sim_config_from(const ConfigMap& cfg);

}  // namespace tsl
