#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ncorbit {

// Flat `key = value` text. Blank lines and `#` comments are ignored; keys may
// appear at most once. Numeric values accept decimal or scientific notation.
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::istream& in, std::string source_name);
  static KeyValueFile load(const std::filesystem::path& path);

  const std::string& source() const noexcept { return source_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::vector<std::string> keys() const;
  // 1-based line of `key`, or 0 when absent or set programmatically.
  int line(const std::string& key) const;

  // Throws ParseError naming the key when absent or malformed.
  const std::string& require_string(const std::string& key) const;
  double require_double(const std::string& key) const;

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long> get_integer(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<double>> get_double_list(const std::string& key) const;
  std::optional<std::vector<std::string>> get_string_list(const std::string& key) const;

  // Throws ParseError for the first key not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  // Later values win; used to layer command-line overrides on a config file.
  void set(const std::string& key, std::string value, int line = 0);

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

// Strict full-string parse; returns nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace ncorbit
