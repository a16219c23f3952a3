#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sdiss/errors.hpp"

namespace sdiss::app {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + key + "' is not a number: " + v);
    return x;
}

std::vector<std::string> words(const std::string& v) {
    std::vector<std::string> out;
    std::string w;
    for (char ch : v) {
        if (ch == ' ' || ch == '\t' || ch == ',') {
            if (!w.empty()) out.push_back(w);
            w.clear();
        } else {
            w += ch;
        }
    }
    if (!w.empty()) out.push_back(w);
    return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
    RunConfig c;
    c.origin_ = origin;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        c.kv_[k] = v;
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void RunConfig::set(const std::string& key, const std::string& value) { kv_[trim(key)] = trim(value); }

const std::string& RunConfig::require(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end() || it->second.empty()) throw ConfigError("config: missing required field '" + key + "'");
    return it->second;
}

std::string RunConfig::str(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double RunConfig::num(const std::string& key, double def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : parse_double(key, it->second);
}

double RunConfig::num(const std::string& key) const { return parse_double(key, require(key)); }

std::int64_t RunConfig::integer(const std::string& key, std::int64_t def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::int64_t x = 0;
    const auto& v = it->second;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + key + "' is not an integer: " + v);
    return x;
}

std::uint64_t RunConfig::u64(const std::string& key, std::uint64_t def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::uint64_t x = 0;
    const auto& v = it->second;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: '" + key + "' is not an unsigned integer: " + v);
    return x;
}

bool RunConfig::flag(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    const auto& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' is not a boolean: " + v);
}

std::vector<double> RunConfig::list(const std::string& key, const std::vector<double>& def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::vector<double> out;
    for (const auto& w : words(it->second)) out.push_back(parse_double(key, w));
    if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
    return out;
}

std::string RunConfig::canonical() const {
    std::string s;
    for (const auto& [k, v] : kv_) {
        if (k == "out" || k == "threads") continue;
        s += k + " = " + v + "\n";
    }
    return s;
}

std::uint64_t RunConfig::hash() const {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_interval_family(const RunConfig& cfg) { return cfg.require("family") == "quadratic"; }

PlanarMap planar_map(const RunConfig& cfg) {
    const std::string& fam = cfg.require("family");
    if (fam == "henon") return HenonMap{cfg.num("a"), cfg.num("b")};
    if (fam == "extension-quadratic") return Extension2D{QuadraticMap{cfg.num("c")}, cfg.num("b"), cfg.num("eps")};
    if (fam == "extension-arnold")
        return Extension2D{ArnoldMap{cfg.num("a"), cfg.num("omega")}, cfg.num("b"), cfg.num("eps")};
    if (fam == "quadratic") throw ConfigError("config: family 'quadratic' is an interval map; only 'close' accepts it");
    throw ConfigError("config: unknown family '" + fam + "'");
}

Map1D interval_map(const RunConfig& cfg) {
    if (!is_interval_family(cfg)) throw ConfigError("config: an interval family (quadratic) is required");
    return QuadraticMap{cfg.num("c")};
}

TrappingRegion region(const RunConfig& cfg, const PlanarMap& f) {
    const std::string desc = cfg.str("region", "auto");
    auto w = words(desc);
    if (w.empty()) throw ConfigError("config: empty region");
    try {
        if (w[0] == "auto") {
            if (auto h = std::get_if<HenonMap>(&f)) return henon_trapping_region(h->a, h->b);
            if (auto e = std::get_if<Extension2D>(&f)) return extension_trapping_region(*e);
            throw ConfigError("config: no automatic region for this family");
        }
        if (w[0] == "strip") {
            auto e = std::get_if<Extension2D>(&f);
            if (!e) throw ConfigError("config: region 'strip' needs an extension family");
            return extension_region(*e);
        }
        std::vector<double> v;
        for (std::size_t i = 1; i < w.size(); ++i) v.push_back(parse_double("region", w[i]));
        if (w[0] == "rect") {
            if (v.size() != 4) throw ConfigError("config: region 'rect' needs xmin xmax ymin ymax");
            return TrappingRegion::rectangle(v[0], v[1], v[2], v[3]);
        }
        if (w[0] == "polygon") {
            if (v.size() < 6 || v.size() % 2) throw ConfigError("config: region 'polygon' needs at least 3 x y pairs");
            std::vector<Point2> pts;
            for (std::size_t i = 0; i < v.size(); i += 2) pts.push_back({v[i], v[i + 1]});
            return TrappingRegion(pts);
        }
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: region: ") + e.what());
    }
    throw ConfigError("config: unknown region kind '" + w[0] + "'");
}

}  // namespace sdiss::app
