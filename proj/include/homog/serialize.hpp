#pragma once

#include <json.hpp>

#include "homog/polynomial.hpp"
#include "homog/sym_tensor.hpp"

namespace homog {

using Json = nlohmann::json;

/// {d, terms: [{alpha, num, den}]}; num/den are decimal strings (arbitrary size).
Json to_json(const RationalPolynomial& p);
/// {d, terms: [{alpha, value}]}
Json to_json(const RealPolynomial& p);
Json to_json(const SymTensor<Rational>& t);
Json to_json(const SymTensor<double>& t);

RationalPolynomial rational_polynomial_from_json(const Json& j);
RealPolynomial real_polynomial_from_json(const Json& j);
SymTensor<Rational> rational_tensor_from_json(const Json& j);
SymTensor<double> real_tensor_from_json(const Json& j);

}  // namespace homog
