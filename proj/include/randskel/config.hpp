#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace randskel {

/// Flat key/value document in a TOML-like syntax:
///
///   # comment
///   key = value
///   [section]          # following keys are stored as "section.key"
///   list = 10, 20, 30  # brackets around lists are optional
///
/// Values keep their raw text (quotes stripped); typed getters validate and
/// throw ParameterError naming the offending key.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Keys that start with `prefix` + ".", with the prefix removed.
  KeyValueConfig section(const std::string& prefix) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

  void write(std::ostream& out) const;

private:
  std::map<std::string, std::string> values_;
};

} // namespace randskel
