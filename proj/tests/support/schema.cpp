#include "schema.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

namespace schema {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json load(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open schema " + p.string());
  return json::parse(in);
}

class Checker {
 public:
  explicit Checker(fs::path dir) : dir_(std::move(dir)) {}

  void check(const json& doc, const json& s, const json& root, const std::string& path) {
    if (s.contains("$ref")) {
      const std::string ref = s["$ref"];
      if (ref.rfind("#/", 0) == 0) {
        check(doc, root.at(json::json_pointer(ref.substr(1))), root, path);
      } else {
        const json& other = file(ref);
        check(doc, other, other, path);
      }
      return;
    }
    if (s.contains("type") && !type_ok(doc, s["type"])) {
      fail(path, "expected type " + s["type"].dump() + ", got " + doc.type_name());
      return;
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == doc;
      if (!found) fail(path, "value " + doc.dump() + " not in " + s["enum"].dump());
    }
    if (doc.is_number()) {
      const double v = doc.get<double>();
      if (s.contains("minimum") && v < s["minimum"].get<double>()) fail(path, "below minimum");
      if (s.contains("maximum") && v > s["maximum"].get<double>()) fail(path, "above maximum");
    }
    if (doc.is_object()) {
      if (s.contains("required"))
        for (const auto& r : s["required"])
          if (!doc.contains(r.get<std::string>())) fail(path, "missing property " + r.get<std::string>());
      const json props = s.value("properties", json::object());
      for (const auto& [k, v] : doc.items()) {
        if (props.contains(k)) check(v, props[k], root, path + "/" + k);
        else if (s.contains("additionalProperties") && s["additionalProperties"] == false)
          fail(path, "unexpected property " + k);
      }
    }
    if (doc.is_array()) {
      if (s.contains("minItems") && doc.size() < s["minItems"].get<std::size_t>()) fail(path, "too few items");
      if (s.contains("items"))
        for (std::size_t k = 0; k < doc.size(); ++k) check(doc[k], s["items"], root, path + "/" + std::to_string(k));
    }
  }

  std::vector<std::string> errors;

 private:
  static bool one_type(const json& doc, const std::string& t) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "boolean") return doc.is_boolean();
    if (t == "null") return doc.is_null();
    if (t == "integer") return doc.is_number_integer();
    if (t == "number") return doc.is_number();
    throw std::runtime_error("unsupported schema type " + t);
  }

  static bool type_ok(const json& doc, const json& t) {
    if (t.is_string()) return one_type(doc, t.get<std::string>());
    for (const auto& x : t)
      if (one_type(doc, x.get<std::string>())) return true;
    return false;
  }

  const json& file(const std::string& name) {
    auto it = cache_.find(name);
    if (it == cache_.end()) it = cache_.emplace(name, load(dir_ / name)).first;
    return it->second;
  }

  void fail(const std::string& path, const std::string& msg) { errors.push_back((path.empty() ? "/" : path) + ": " + msg); }

  fs::path dir_;
  std::map<std::string, json> cache_;
};

}  // namespace

std::vector<std::string> validate(const json& doc, const fs::path& schema_file) {
  Checker c(schema_file.parent_path());
  const json root = load(schema_file);
  c.check(doc, root, root, "");
  return c.errors;
}

}  // namespace schema
