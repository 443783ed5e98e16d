#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "potlab/error.hpp"

// Checked field access for descriptors; failures name the offending field.
namespace potlab::json_fields {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key) {
  if (!j.is_object()) throw ValidationError("expected an object", "");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing required field", key);
  return *it;
}

inline double number(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw ValidationError("expected a number", key);
  return v.get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j, key);
}

inline int integer_or(const json& j, const std::string& key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError("expected an integer", key);
  return v.get<int>();
}

inline std::string string(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw ValidationError("expected a string", key);
  return v.get<std::string>();
}

inline std::string string_or(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return string(j, key);
}

inline std::vector<double> numbers(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_array()) throw ValidationError("expected an array of numbers", key);
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError("expected a number", key + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<double>());
  }
  return out;
}

inline std::vector<double> numbers_or(const json& j, const std::string& key, std::vector<double> fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return numbers(j, key);
}

/// Runs `parse(sub)` on j[key], prefixing any validation failure with `key`.
template <class Parse>
auto nested(const json& j, const std::string& key, Parse&& parse) {
  const json& sub = require(j, key);
  try {
    return parse(sub);
  } catch (const ValidationError& e) {
    throw e.nested(key);
  }
}

}  // namespace potlab::json_fields
