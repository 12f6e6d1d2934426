#include "json_io.h"

#include <cmath>

#include "netgame/errors.h"

namespace netgame::json_io {

void Field::fail(const std::string& message) const {
  throw ParseError((path_.empty() ? std::string("/") : path_) + ": " + message);
}

Field Field::at(std::string_view key) const {
  if (!value_->is_object()) fail("expected an object");
  const auto it = value_->find(std::string(key));
  if (it == value_->end()) fail("missing field \"" + std::string(key) + "\"");
  return Field(*it, path_ + "/" + std::string(key));
}

std::optional<Field> Field::find(std::string_view key) const {
  if (!value_->is_object()) fail("expected an object");
  const auto it = value_->find(std::string(key));
  if (it == value_->end()) return std::nullopt;
  return Field(*it, path_ + "/" + std::string(key));
}

Field Field::at(std::size_t index) const {
  if (!value_->is_array()) fail("expected an array");
  if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return Field((*value_)[index], path_ + "/" + std::to_string(index));
}

std::size_t Field::size() const {
  if (!value_->is_array()) fail("expected an array");
  return value_->size();
}

double Field::number() const {
  if (!value_->is_number()) fail("expected a number");
  const double x = value_->get<double>();
  if (!std::isfinite(x)) fail("number is not finite");
  return x;
}

long long Field::integer() const {
  if (!value_->is_number_integer()) fail("expected an integer");
  return value_->get<long long>();
}

bool Field::boolean() const {
  if (!value_->is_boolean()) fail("expected true or false");
  return value_->get<bool>();
}

std::string Field::string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

Matrix Field::matrix() const {
  const long long rows = at("rows").integer();
  const long long cols = at("cols").integer();
  if (rows < 0 || cols < 0) fail("matrix dimensions must be non-negative");
  const Field data = at("data");
  if (data.size() != static_cast<std::size_t>(rows * cols)) {
    data.fail("expected " + std::to_string(rows * cols) + " entries for a " +
              std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
              std::to_string(data.size()));
  }
  Matrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      m(r, c) = data.at(static_cast<std::size_t>(r * cols + c)).number();
    }
  }
  return m;
}

Vector Field::vector() const {
  const std::size_t n = size();
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) v(static_cast<Eigen::Index>(k)) = at(k).number();
  return v;
}

Json parse_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..." for syntax errors.
    throw ParseError(e.what());
  }
}

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace netgame::json_io
