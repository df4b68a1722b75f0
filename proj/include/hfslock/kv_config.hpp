#pragma once

// Flat `key = value` configuration files. `#` starts a comment, keys may be
// dotted (`noise.sigma`) to group related settings.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hfslock/half_int.hpp"

namespace hfslock {

class KvConfig {
 public:
  static KvConfig parse(std::istream& in, const std::string& source_name);
  static KvConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value);

  /// Typed getters. The defaulted forms return `fallback` for a missing key;
  /// the others throw ValidationError naming the key. A present but malformed
  /// value always throws, with the file position.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> find_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  HalfInt get_half_int(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;  // comma separated
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Keys never read by a getter; lets commands reject misspelt settings.
  std::vector<std::string> unused_keys() const;
  void reject_unused() const;

  /// Every entry after defaults were resolved, in key order.
  std::map<std::string, std::string> resolved() const;
  void record(const std::string& key, const std::string& value) const { resolved_[key] = value; }

  const std::string& source() const noexcept { return source_; }

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  const Entry* lookup(const std::string& key) const;
  [[noreturn]] void bad_value(const std::string& key, const Entry& e, const std::string& expected) const;

  std::string source_ = "<config>";
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace hfslock
