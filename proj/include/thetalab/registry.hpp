#pragma once

// Built-in lattices by name: E8, E8^2, Dn+ (n a multiple of 8), and the glue
// lattices whose data files live in the data directory. Extra spec files can
// be dropped into $THETALAB_REGISTRY_DIR.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "thetalab/gram_target.hpp"
#include "thetalab/lattice.hpp"
#include "thetalab/spec_io.hpp"

#ifndef THETALAB_DATA_DIR
#define THETALAB_DATA_DIR "data"
#endif

namespace thetalab {

inline std::string data_dir() {
  if (const char* env = std::getenv("THETALAB_DATA_DIR"); env && *env) return env;
  return THETALAB_DATA_DIR;
}

/// The rank-24 pairs with equal root counts, (Lambda, Gamma) in table order.
inline const std::vector<std::pair<std::string, std::string>>& rank24_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"A5^4D4", "D4^6"},   {"A9^2D6", "D6^4"},  {"E6^4", "A11D7E6"},
      {"A17E7", "D10E7^2"}, {"D16E8", "E8^3"},
  };
  return pairs;
}

inline std::vector<std::string> rank24_names() {
  std::vector<std::string> out;
  for (const auto& [a, b] : rank24_pairs()) {
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

/// Genus-4 targets used for identity checks: zero, diag(2,0,0,0),
/// diag(2,2,0,0) with off-diagonal -1/0/1, 2I, A2+A2, A4, D4.
inline std::vector<GramTarget> curated_tset() {
  std::vector<GramTarget> out;
  out.push_back(GramTarget(4));
  out.push_back(GramTarget::diagonal({2, 0, 0, 0}));
  for (std::int64_t off : {-1, 0, 1}) {
    GramTarget t = GramTarget::diagonal({2, 2, 0, 0});
    t.set(0, 1, off);
    out.push_back(t);
  }
  out.push_back(GramTarget::diagonal({2, 2, 2, 2}));
  out.push_back(GramTarget::from_rows({{2, -1, 0, 0}, {-1, 2, 0, 0}, {0, 0, 2, -1}, {0, 0, -1, 2}}));
  out.push_back(GramTarget::from_matrix(cartan_matrix(RootComponent{RootType::A, 4})));
  out.push_back(GramTarget::from_matrix(cartan_matrix(RootComponent{RootType::D, 4})));
  return out;
}

inline GramTarget a4_target() {
  return GramTarget::from_matrix(cartan_matrix(RootComponent{RootType::A, 4}));
}

class Registry {
 public:
  static Registry& instance() {
    static Registry r;
    return r;
  }

  /// Canonical names of all built-ins, in listing order.
  std::vector<std::string> names() const {
    std::vector<std::string> out = {"E8", "E8^2", "D16+"};
    for (const auto& n : rank24_names()) out.push_back(n);
    for (const auto& [n, path] : extra_specs()) out.push_back(n);
    return out;
  }

  std::string canonical(const std::string& name) const {
    if (name == "E8+E8" || name == "E8E8" || name == "E8x2") return "E8^2";
    return name;
  }

  bool known(const std::string& name) const {
    const std::string c = canonical(name);
    if (c == "E8" || c == "E8^2" || plus_rank(c) > 0) return true;
    if (std::filesystem::exists(glue_file(c))) return true;
    return extra_specs().count(c) > 0;
  }

  Lattice get(const std::string& name) {
    const std::string c = canonical(name);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = cache_.find(c); it != cache_.end()) return it->second;
    }
    Lattice l = build(c);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(c, std::move(l)).first->second;
  }

  LatticeResolver resolver() {
    return [this](const std::string& n) { return get(n); };
  }

 private:
  Registry() = default;

  static int plus_rank(const std::string& name) {
    static const std::regex re("D([0-9]+)\\+");
    std::smatch m;
    if (!std::regex_match(name, m, re)) return 0;
    return std::stoi(m[1].str());
  }

  static std::string glue_file(const std::string& name) {
    std::string file = name;
    std::replace(file.begin(), file.end(), '^', '_');
    return data_dir() + "/lattices/" + file + ".json";
  }

  static std::map<std::string, std::string> extra_specs() {
    std::map<std::string, std::string> out;
    const char* dir = std::getenv("THETALAB_REGISTRY_DIR");
    if (!dir || !*dir || !std::filesystem::is_directory(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() != ".json") continue;
      const auto j = detail::read_json_file(entry.path().string());
      out.emplace(j.value("name", entry.path().stem().string()), entry.path().string());
    }
    return out;
  }

  Lattice build(const std::string& name) {
    if (name == "E8") return root_lattice(RootComponent{RootType::E, 8});
    if (name == "E8^2") return direct_sum(get("E8"), get("E8")).renamed("E8^2");
    if (const int n = plus_rank(name); n > 0) return plus_construction(n);
    if (const std::string f = glue_file(name); std::filesystem::exists(f)) {
      return load_lattice_spec(f, resolver()).renamed(name);
    }
    const auto extra = extra_specs();
    if (auto it = extra.find(name); it != extra.end())
      return load_lattice_spec(it->second, resolver()).renamed(name);
    input_error("unknown lattice '" + name + "'");
  }

  std::mutex mutex_;
  std::map<std::string, Lattice> cache_;
};

inline Lattice builtin_lattice(const std::string& name) { return Registry::instance().get(name); }

}  // namespace thetalab
