#include "lagpot/io.hpp"

#include <algorithm>
#include <cmath>

namespace lagpot {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!ok) throw Error(ErrorCode::ConfigError, where + ": unknown key '" + item.key() + "'");
  }
}

double json_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorCode::ConfigError, where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::ConfigError, where + ": number must be finite");
  return v;
}

Vector json_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, where + ": expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(json_number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

RealMatrix json_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ConfigError, where + ": expected a nonempty list of rows");
  const std::size_t rows = j.size();
  const Vector first = json_vector(j[0], where + "[0]");
  RealMatrix m(rows, first.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = r == 0 ? first : json_vector(j[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) throw Error(ErrorCode::ConfigError, where + ": ragged rows");
    for (std::size_t c = 0; c < row.size(); ++c) m(r, c) = row[c];
  }
  return m;
}

Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

SymForm symform_from_json(const Json& j) {
  check_keys(j, {"n", "entries"}, "form");
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw Error(ErrorCode::ConfigError, "form: 'n' must be a positive integer");
  if (!j.contains("entries")) throw Error(ErrorCode::ConfigError, "form: missing 'entries'");
  const auto n = static_cast<std::size_t>(j["n"].get<long long>());
  RealMatrix m = json_matrix(j["entries"], "form.entries");
  if (m.rows() != 2 * n || m.cols() != 2 * n)
    throw Error(ErrorCode::ConfigError, "form: entries must be 2n x 2n");
  try {
    return SymForm(std::move(m));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, std::string("form: ") + e.what());
  }
}

Json to_json(const SymForm& a) {
  Json j;
  j["n"] = a.n();
  j["entries"] = to_json(a.matrix());
  return j;
}

HermQuadratic hermquad_from_json(const Json& j) {
  check_keys(j, {"c", "b_re", "b_im", "A_re", "A_im"}, "quadratic");
  for (const char* k : {"b_re", "b_im", "A_re", "A_im"})
    if (!j.contains(k)) throw Error(ErrorCode::ConfigError, std::string("quadratic: missing '") + k + "'");
  HermQuadratic h;
  h.c = j.contains("c") ? json_number(j["c"], "quadratic.c") : 0.0;
  const Vector bre = json_vector(j["b_re"], "quadratic.b_re");
  const Vector bim = json_vector(j["b_im"], "quadratic.b_im");
  const RealMatrix are = json_matrix(j["A_re"], "quadratic.A_re");
  const RealMatrix aim = json_matrix(j["A_im"], "quadratic.A_im");
  const std::size_t n = bre.size();
  if (n == 0 || bim.size() != n || are.rows() != n || are.cols() != n || aim.rows() != n || aim.cols() != n)
    throw Error(ErrorCode::ConfigError, "quadratic: b_re, b_im must have length n and A_re, A_im must be n x n");
  h.b.resize(n);
  h.a = ComplexMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h.b[i] = Complex(bre[i], bim[i]);
    for (std::size_t k = 0; k < n; ++k) h.a(i, k) = Complex(are(i, k), aim(i, k));
  }
  try {
    h.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, std::string("quadratic: ") + e.what());
  }
  return h;
}

Json to_json(const HermQuadratic& h) {
  const std::size_t n = h.n();
  Json j;
  j["c"] = h.c;
  Vector bre(n), bim(n);
  RealMatrix are(n, n), aim(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    bre[i] = h.b[i].real();
    bim[i] = h.b[i].imag();
    for (std::size_t k = 0; k < n; ++k) {
      are(i, k) = h.a(i, k).real();
      aim(i, k) = h.a(i, k).imag();
    }
  }
  j["b_re"] = to_json(bre);
  j["b_im"] = to_json(bim);
  j["A_re"] = to_json(are);
  j["A_im"] = to_json(aim);
  return j;
}

Json to_json(const LagFrame& w) {
  Json cols = Json::array();
  for (std::size_t c = 0; c < w.n(); ++c) cols.push_back(to_json(w.column(c)));
  return cols;
}

}  // namespace lagpot
