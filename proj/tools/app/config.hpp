#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdiss/maps.hpp"
#include "sdiss/trapping.hpp"

namespace sdiss::app {

// Bad or missing configuration; the CLI exits with status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key-value configuration:
//
//   # comment
//   family = henon          # henon | extension-quadratic | extension-arnold | quadratic
//   a = 1.4
//   b = 0.1
//   region = auto           # auto | rect xmin xmax ymin ymax | polygon x1 y1 x2 y2 ...
//
// Keys are case sensitive, later lines override earlier ones, and
// command-line overrides are applied last.
class RunConfig {
public:
    static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
    static RunConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::string& require(const std::string& key) const;

    std::string str(const std::string& key, const std::string& def) const;
    double num(const std::string& key, double def) const;
    double num(const std::string& key) const;
    std::int64_t integer(const std::string& key, std::int64_t def) const;
    std::uint64_t u64(const std::string& key, std::uint64_t def) const;
    bool flag(const std::string& key, bool def) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& def) const;

    // sorted "key = value" lines, excluding output location and thread count
    std::string canonical() const;
    std::uint64_t hash() const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
    std::string origin_;
};

PlanarMap planar_map(const RunConfig& cfg);
Map1D interval_map(const RunConfig& cfg);  // family = quadratic
bool is_interval_family(const RunConfig& cfg);
TrappingRegion region(const RunConfig& cfg, const PlanarMap& f);

}  // namespace sdiss::app
