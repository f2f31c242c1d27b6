#pragma once

// JSON lattice spec files and T_set files.
//
//   {"schema": 1, "name": "...", "gram": [[...], ...]}
//   {"schema": 1, "name": "...", "components": [{"type": "D", "rank": 4}, ...],
//    "glue_words": [[...], ...]}
//   {"schema": 1, "name": "...", "construction": "D_plus", "n": 16}
//   {"schema": 1, "name": "...", "sum": ["E8", "E8"]}
//
//   {"schema": 1, "targets": [[[2, -1], [-1, 2]], ...]}

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thetalab/error.hpp"
#include "thetalab/gram_target.hpp"
#include "thetalab/lattice.hpp"

namespace thetalab {

inline constexpr int kSpecSchema = 1;

using LatticeResolver = std::function<Lattice(const std::string&)>;

namespace detail {

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) input_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    input_error("malformed JSON in " + path + ": " + e.what());
  }
}

inline void check_schema(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object()) input_error(what + ": expected a JSON object");
  if (j.contains("schema") && j.at("schema") != kSpecSchema)
    input_error(what + ": unsupported schema " + j.at("schema").dump());
}

inline IntMatrix int_matrix(const nlohmann::json& rows, const std::string& what) {
  if (!rows.is_array()) input_error(what + ": matrix must be an array of rows");
  const std::size_t n = rows.size();
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) input_error(what + ": matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (!rows[i][j].is_number_integer()) input_error(what + ": non-integer matrix entry");
      m(i, j) = rows[i][j].get<std::int64_t>();
    }
  }
  return m;
}

}  // namespace detail

inline GlueSpec glue_spec_from_json(const nlohmann::json& j) {
  GlueSpec spec;
  spec.name = j.value("name", std::string("glue"));
  try {
    for (const auto& c : j.at("components")) {
      const std::string type = c.at("type").get<std::string>();
      spec.components.push_back(
          parse_component(type + std::to_string(c.at("rank").get<int>())));
    }
    if (j.contains("glue_words"))
      spec.glue_words = j.at("glue_words").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    input_error("malformed glue spec '" + spec.name + "': " + e.what());
  }
  return spec;
}

/// Builds the lattice described by a spec object. `resolve` looks up names
/// used in "sum" specs.
inline Lattice lattice_from_json(const nlohmann::json& j, const LatticeResolver& resolve) {
  detail::check_schema(j, "lattice spec");
  const std::string name = j.value("name", std::string("custom"));
  int forms = 0;
  for (const char* k : {"gram", "components", "construction", "sum"}) forms += j.contains(k);
  if (forms != 1)
    input_error("lattice spec '" + name +
                "' must contain exactly one of gram, components, construction, sum");

  if (j.contains("gram")) {
    return Lattice::from_gram(name, detail::int_matrix(j.at("gram"), name));
  }
  if (j.contains("components")) return glue(glue_spec_from_json(j));
  if (j.contains("construction")) {
    if (j.at("construction") != "D_plus")
      input_error("unknown construction " + j.at("construction").dump());
    if (!j.contains("n") || !j.at("n").is_number_integer())
      input_error("D_plus construction needs an integer n");
    return plus_construction(j.at("n").get<int>()).renamed(name);
  }
  const auto& parts = j.at("sum");
  if (!parts.is_array() || parts.empty()) input_error("sum must be a nonempty list of names");
  Lattice acc = Lattice::zero();
  for (const auto& p : parts) acc = direct_sum(acc, resolve(p.get<std::string>()));
  return acc.renamed(name);
}

inline Lattice load_lattice_spec(const std::string& path, const LatticeResolver& resolve) {
  return lattice_from_json(detail::read_json_file(path), resolve);
}

inline std::vector<GramTarget> targets_from_json(const nlohmann::json& j) {
  detail::check_schema(j, "T_set");
  if (!j.contains("targets") || !j.at("targets").is_array())
    input_error("T_set: missing targets array");
  std::vector<GramTarget> out;
  for (const auto& m : j.at("targets")) {
    GramTarget t = GramTarget::from_matrix(detail::int_matrix(m, "T_set entry"));
    if (!t.admissible())
      input_error("T_set entry " + t.key() + " is not even positive semidefinite");
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<GramTarget> load_targets(const std::string& path) {
  return targets_from_json(detail::read_json_file(path));
}

inline nlohmann::json targets_to_json(const std::vector<GramTarget>& ts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : ts) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t i = 0; i < t.genus(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t k = 0; k < t.genus(); ++k) row.push_back(t(i, k));
      m.push_back(row);
    }
    arr.push_back(m);
  }
  return {{"schema", kSpecSchema}, {"targets", arr}};
}

}  // namespace thetalab
