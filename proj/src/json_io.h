#pragma once

// JSON helpers shared by the scenario and controller file formats.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "netgame/linalg.h"

namespace netgame::json_io {

using Json = nlohmann::json;

/// A JSON value together with its JSON pointer, so errors name the field.
class Field {
 public:
  Field(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const Json& value() const { return *value_; }
  const std::string& path() const { return path_; }

  Field at(std::string_view key) const;
  std::optional<Field> find(std::string_view key) const;
  Field at(std::size_t index) const;
  std::size_t size() const;  // arrays only

  double number() const;
  long long integer() const;
  bool boolean() const;
  std::string string() const;
  /// {"rows": r, "cols": c, "data": [row-major]}.
  Matrix matrix() const;
  /// Plain array of numbers.
  Vector vector() const;

  [[noreturn]] void fail(const std::string& message) const;

 private:
  const Json* value_;
  std::string path_;
};

Json parse_text(std::string_view text);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

/// Stable two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace netgame::json_io
