#include "nodallab/constants_store.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "nodallab/errors.hpp"

#ifndef NODALLAB_DEFAULT_CONSTANTS
#define NODALLAB_DEFAULT_CONSTANTS "data/constants.json"
#endif

namespace nodallab {

std::string default_constants_path() { return NODALLAB_DEFAULT_CONSTANTS; }

std::string ConstantsStore::resolve_path(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("NODAL_LAB_CONSTANTS"); env && *env) return env;
  return default_constants_path();
}

ConstantsStore ConstantsStore::load(const std::string& explicit_path) {
  ConstantsStore store;
  const std::string path = resolve_path(explicit_path);
  std::ifstream is(path, std::ios::binary);
  if (!is) return store;
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("constants file " + path + " is not valid JSON: " + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    StoredConstant c;
    c.value = it.value().at("value").get<double>();
    if (it.value().contains("note")) c.note = it.value().at("note").get<std::string>();
    store.entries_[it.key()] = c;
  }
  return store;
}

bool ConstantsStore::has(const std::string& name) const { return entries_.count(name) != 0; }

double ConstantsStore::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    throw PreconditionViolation("constant '" + name + "' is not in the store");
  return it->second.value;
}

std::optional<StoredConstant> ConstantsStore::find(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ConstantsStore::set(const std::string& name, double value, const std::string& note) {
  entries_[name] = StoredConstant{value, note};
}

void ConstantsStore::save(const std::string& path) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, c] : entries_) j[name] = {{"value", c.value}, {"note", c.note}};
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << j.dump(2) << "\n";
}

}  // namespace nodallab
