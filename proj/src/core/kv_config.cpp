#include "hfslock/kv_config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "hfslock/error.hpp"
#include "hfslock/text.hpp"

namespace hfslock {

namespace {

bool valid_key(std::string_view k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  return true;
}

}  // namespace

KvConfig KvConfig::parse(std::istream& in, const std::string& source_name) {
  KvConfig cfg;
  cfg.source_ = source_name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string_view body = text::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source_name, lineno, 1, "expected 'key = value'");
    const auto key = text::trim(body.substr(0, eq));
    const auto value = text::trim(body.substr(eq + 1));
    if (!valid_key(key)) throw ParseError(source_name, lineno, 1, "invalid key '" + std::string(key) + "'");
    if (cfg.entries_.count(std::string(key)))
      throw ParseError(source_name, lineno, 1,
                       "duplicate key '" + std::string(key) + "' (first set on line " +
                           std::to_string(cfg.entries_[std::string(key)].line) + ")");
    cfg.entries_[std::string(key)] = {std::string(value), lineno};
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  return parse(in, path.string());
}

void KvConfig::set(const std::string& key, std::string value) {
  if (!valid_key(key)) throw ValidationError("invalid key '" + key + "'");
  entries_[key] = {std::move(value), 0};
}

const KvConfig::Entry* KvConfig::lookup(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

void KvConfig::bad_value(const std::string& key, const Entry& e, const std::string& expected) const {
  const std::string msg = "field '" + key + "': expected " + expected + ", got '" + e.value + "'";
  if (e.line > 0) throw ParseError(source_, e.line, 1, msg);
  throw ValidationError(msg);
}

std::string KvConfig::get_string(const std::string& key) const {
  const Entry* e = lookup(key);
  if (!e) throw ValidationError(source_ + ": missing required field '" + key + "'");
  record(key, e->value);
  return e->value;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : (record(key, fallback), fallback);
}

std::optional<double> KvConfig::find_double(const std::string& key) const {
  const Entry* e = lookup(key);
  if (!e) return std::nullopt;
  const auto v = text::parse_double(e->value);
  if (!v || !std::isfinite(*v)) bad_value(key, *e, "a finite number");
  record(key, text::format_double(*v));
  return v;
}

double KvConfig::get_double(const std::string& key) const {
  const auto v = find_double(key);
  if (!v) throw ValidationError(source_ + ": missing required field '" + key + "'");
  return *v;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  const auto v = find_double(key);
  if (!v) record(key, text::format_double(fallback));
  return v.value_or(fallback);
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
  const Entry* e = lookup(key);
  if (!e) {
    record(key, std::to_string(fallback));
    return fallback;
  }
  const auto v = text::parse_int(e->value);
  if (!v) bad_value(key, *e, "an integer");
  record(key, std::to_string(*v));
  return *v;
}

std::uint64_t KvConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
  const Entry* e = lookup(key);
  if (!e) {
    record(key, std::to_string(fallback));
    return fallback;
  }
  const auto v = text::parse_int(e->value);
  if (!v || *v < 0) bad_value(key, *e, "a non-negative integer seed");
  record(key, std::to_string(*v));
  return static_cast<std::uint64_t>(*v);
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = lookup(key);
  bool v = fallback;
  if (e) {
    if (e->value == "true" || e->value == "1" || e->value == "yes") v = true;
    else if (e->value == "false" || e->value == "0" || e->value == "no") v = false;
    else bad_value(key, *e, "true or false");
  }
  record(key, v ? "true" : "false");
  return v;
}

HalfInt KvConfig::get_half_int(const std::string& key) const {
  const Entry* e = lookup(key);
  if (!e) throw ValidationError(source_ + ": missing required field '" + key + "'");
  try {
    const HalfInt h = HalfInt::parse(e->value);
    record(key, h.str());
    return h;
  } catch (const ValidationError&) {
    bad_value(key, *e, "a non-negative integer or half-integer such as 7/2");
  }
}

std::vector<double> KvConfig::get_double_list(const std::string& key) const {
  const Entry* e = lookup(key);
  if (!e) throw ValidationError(source_ + ": missing required field '" + key + "'");
  std::vector<double> out;
  std::string canonical;
  for (const auto part : text::split(e->value, ',')) {
    const auto v = text::parse_double(text::trim(part));
    if (!v || !std::isfinite(*v)) bad_value(key, *e, "a comma-separated list of numbers");
    out.push_back(*v);
    canonical += (canonical.empty() ? "" : ",") + text::format_double(*v);
  }
  record(key, canonical);
  return out;
}

std::vector<std::string> KvConfig::get_string_list(const std::string& key) const {
  const Entry* e = lookup(key);
  if (!e) return {};
  std::vector<std::string> out;
  for (const auto part : text::split(e->value, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  record(key, e->value);
  return out;
}

std::vector<std::string> KvConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

void KvConfig::reject_unused() const {
  const auto unused = unused_keys();
  if (unused.empty()) return;
  std::string list;
  for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
  throw ValidationError(source_ + ": unknown field(s): " + list);
}

std::map<std::string, std::string> KvConfig::resolved() const { return resolved_; }

}  // namespace hfslock
