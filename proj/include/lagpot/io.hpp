#pragma once

// JSON forms of the library's value types. Loaders reject unknown keys and
// malformed shapes with ConfigError.

#include <initializer_list>
#include <string>

#include "json.hpp"
#include "lagpot/laggrass.hpp"
#include "lagpot/pluriharm.hpp"

namespace lagpot {

using Json = nlohmann::ordered_json;

/// Throws ConfigError naming the first key of `j` outside `allowed`.
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

double json_number(const Json& j, const std::string& where);
Vector json_vector(const Json& j, const std::string& where);
RealMatrix json_matrix(const Json& j, const std::string& where);

Json to_json(const RealMatrix& m);  // list of rows
Json to_json(std::span<const double> v);

/// {"n": int, "entries": [[...], ...]}; symmetry is validated by SymForm.
SymForm symform_from_json(const Json& j);
Json to_json(const SymForm& a);

/// {"c": real, "b_re": [...], "b_im": [...], "A_re": [[...]], "A_im": [[...]]}
HermQuadratic hermquad_from_json(const Json& j);
Json to_json(const HermQuadratic& h);

/// Columns of the frame, one list per column vector.
Json to_json(const LagFrame& w);

}  // namespace lagpot
