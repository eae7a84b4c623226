#pragma once

#include <map>
#include <optional>
#include <string>

namespace nodallab {

/// One frozen numeric constant with a human-readable provenance note.
struct StoredConstant {
  double value = 0.0;
  std::string note;
};

/// Read-mostly store for calibration constants kept in a JSON file of the
/// form {"name": {"value": 1.25, "note": "..."}}.  The default file lives
/// next to the installed data directory; the NODAL_LAB_CONSTANTS environment
/// variable overrides the path, as does an explicit --constants argument.
class ConstantsStore {
 public:
  /// Resolve the path: explicit argument > NODAL_LAB_CONSTANTS > default.
  static std::string resolve_path(const std::string& explicit_path = "");

  /// Load from the resolved path.  A missing file yields an empty store.
  static ConstantsStore load(const std::string& explicit_path = "");

  bool has(const std::string& name) const;
  /// Value lookup; throws PreconditionViolation when absent.
  double get(const std::string& name) const;
  std::optional<StoredConstant> find(const std::string& name) const;
  void set(const std::string& name, double value, const std::string& note);

  void save(const std::string& path) const;
  const std::map<std::string, StoredConstant>& all() const { return entries_; }

 private:
  std::map<std::string, StoredConstant> entries_;
};

/// Compile-time default location (CMake injects the source-tree data dir).
std::string default_constants_path();

}  // namespace nodallab
