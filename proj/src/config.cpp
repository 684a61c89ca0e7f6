#include "randskel/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "randskel/errors.hpp"

namespace randskel {
namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"')
      quoted = !quoted;
    else if (line[i] == '#' && !quoted)
      return line.substr(0, i);
  }
  return line;
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return v.substr(1, v.size() - 2);
  return v;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParameterError("config key '" + key + "': cannot parse '" + text + "' as a number");
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  // from_chars for double is not available on every libstdc++ we target.
  std::istringstream in(text);
  double value = 0.0;
  in >> value;
  if (in.fail() || !(in >> std::ws).eof())
    throw ParameterError("config key '" + key + "': cannot parse '" + text + "' as a number");
  return value;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string section;
  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw FormatError("unterminated section header", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("expected 'key = value'", line_no);
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = unquote(trim(std::string_view(line).substr(eq + 1)));
    if (key.empty())
      throw FormatError("empty key", line_no);
    if (!section.empty())
      key = section + "." + key;
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ParameterError("cannot open config file '" + path.string() + "'");
  return parse(in);
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ParameterError("missing config key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long long KeyValueConfig::get_int(const std::string& key) const {
  return parse_number<long long>(key, get_string(key));
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key, std::uint64_t fallback) const {
  return contains(key) ? parse_number<std::uint64_t>(key, get_string(key)) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
  std::string text = trim(get_string(key));
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']')
      throw ParameterError("config key '" + key + "': unterminated list");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty())
      items.push_back(item);
  }
  return items;
}

std::vector<long long> KeyValueConfig::get_int_list(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& item : get_list(key))
    out.push_back(parse_number<long long>(key, item));
  return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key))
    out.push_back(parse_double(key, item));
  return out;
}

KeyValueConfig KeyValueConfig::section(const std::string& prefix) const {
  KeyValueConfig out;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : values_)
    if (k.compare(0, p.size(), p) == 0)
      out.values_[k.substr(p.size())] = v;
  return out;
}

void KeyValueConfig::write(std::ostream& out) const {
  for (const auto& [k, v] : values_)
    out << k << " = " << v << '\n';
}

} // namespace randskel
