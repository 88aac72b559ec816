#include "ncorbit/kv_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ncorbit/errors.hpp"

namespace ncorbit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

}  // namespace

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source_name) {
  KeyValueFile kv;
  kv.source_ = std::move(source_name);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(kv.source_, line_no, std::string(line), "expected `key = value`");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(kv.source_, line_no, "<empty>", "missing key");
    if (kv.entries_.count(key)) throw ParseError(kv.source_, line_no, key, "duplicate key");
    kv.entries_[key] = Entry{std::move(value), line_no};
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, path.string(), "cannot open file");
  return parse(in, path.string());
}

std::vector<std::string> KeyValueFile::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, _] : entries_) out.push_back(k);
  return out;
}

int KeyValueFile::line(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

void KeyValueFile::fail(const std::string& key, const std::string& message) const {
  auto it = entries_.find(key);
  throw ParseError(source_, it == entries_.end() ? 0 : it->second.line, key, message);
}

const std::string& KeyValueFile::require_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) fail(key, "required key is missing");
  return it->second.value;
}

double KeyValueFile::require_double(const std::string& key) const {
  auto v = get_double(key);
  if (!v) fail(key, "required key is missing");
  return *v;
}

std::optional<std::string> KeyValueFile::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::optional<double> KeyValueFile::get_double(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  auto v = parse_double(it->second.value);
  if (!v) fail(key, "not a finite number: '" + it->second.value + "'");
  return v;
}

std::optional<long> KeyValueFile::get_integer(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  const std::string& s = it->second.value;
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail(key, "not an integer: '" + s + "'");
  return value;
}

std::optional<bool> KeyValueFile::get_bool(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  std::string s = it->second.value;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  fail(key, "not a boolean: '" + it->second.value + "'");
}

std::optional<std::vector<double>> KeyValueFile::get_double_list(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  std::vector<double> out;
  for (const auto& item : split_list(it->second.value)) {
    auto v = parse_double(item);
    if (!v) fail(key, "not a finite number: '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

std::optional<std::vector<std::string>> KeyValueFile::get_string_list(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return split_list(it->second.value);
}

void KeyValueFile::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    if (!allowed.count(key)) throw ParseError(source_, entry.line, key, "unknown key");
  }
}

void KeyValueFile::set(const std::string& key, std::string value, int line) {
  entries_[key] = Entry{std::move(value), line};
}

}  // namespace ncorbit
