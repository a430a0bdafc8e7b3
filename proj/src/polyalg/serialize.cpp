#include "homog/serialize.hpp"

namespace homog {

namespace {

Json alpha_json(const MultiIndex& a) { return Json(a.entries()); }

MultiIndex alpha_from(const Json& j, std::size_t d) {
  auto v = j.get<std::vector<int>>();
  if (v.size() != d) throw FormatError("multi-index length does not match d");
  for (int e : v)
    if (e < 0) throw FormatError("negative multi-index entry");
  return MultiIndex(std::move(v));
}

Json rational_entry(const MultiIndex& a, const Rational& c) {
  return Json{{"alpha", alpha_json(a)}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}};
}

Rational rational_from(const Json& t) {
  auto text = [](const Json& v) { return v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>()); };
  Integer num, den;
  if (num.set_str(text(t.at("num")), 10) != 0 || den.set_str(text(t.at("den")), 10) != 0)
    throw FormatError("bad rational coefficient");
  if (sgn(den) == 0) throw FormatError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::size_t dim_from(const Json& j) {
  const long long d = j.at("d").get<long long>();
  if (d < 1) throw FormatError("d must be >= 1");
  return static_cast<std::size_t>(d);
}

}  // namespace

Json to_json(const RationalPolynomial& p) {
  Json terms = Json::array();
  for (const auto& [a, c] : p.terms()) terms.push_back(rational_entry(a, c));
  return Json{{"d", p.dim()}, {"terms", terms}};
}

Json to_json(const RealPolynomial& p) {
  Json terms = Json::array();
  for (const auto& [a, c] : p.terms()) terms.push_back(Json{{"alpha", alpha_json(a)}, {"value", c}});
  return Json{{"d", p.dim()}, {"terms", terms}};
}

Json to_json(const SymTensor<Rational>& t) {
  Json e = Json::array();
  for (const auto& [a, c] : t.entries()) e.push_back(rational_entry(a, c));
  return Json{{"d", t.dim()}, {"order", t.order()}, {"entries", e}};
}

Json to_json(const SymTensor<double>& t) {
  Json e = Json::array();
  for (const auto& [a, c] : t.entries()) e.push_back(Json{{"alpha", alpha_json(a)}, {"value", c}});
  return Json{{"d", t.dim()}, {"order", t.order()}, {"entries", e}};
}

RationalPolynomial rational_polynomial_from_json(const Json& j) {
  try {
    const auto d = dim_from(j);
    RationalPolynomial p(d);
    for (const auto& t : j.at("terms")) p.add_term(alpha_from(t.at("alpha"), d), rational_from(t));
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("polynomial JSON: ") + e.what());
  }
}

RealPolynomial real_polynomial_from_json(const Json& j) {
  try {
    const auto d = dim_from(j);
    RealPolynomial p(d);
    for (const auto& t : j.at("terms")) {
      if (t.contains("value"))
        p.add_term(alpha_from(t.at("alpha"), d), t.at("value").get<double>());
      else
        p.add_term(alpha_from(t.at("alpha"), d), rational_from(t).get_d());
    }
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("polynomial JSON: ") + e.what());
  }
}

SymTensor<Rational> rational_tensor_from_json(const Json& j) {
  try {
    const auto d = dim_from(j);
    SymTensor<Rational> t(d, j.at("order").get<int>());
    for (const auto& e : j.at("entries")) t.set(alpha_from(e.at("alpha"), d), rational_from(e));
    return t;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("tensor JSON: ") + e.what());
  }
}

SymTensor<double> real_tensor_from_json(const Json& j) {
  try {
    const auto d = dim_from(j);
    SymTensor<double> t(d, j.at("order").get<int>());
    for (const auto& e : j.at("entries")) {
      const double v = e.contains("value") ? e.at("value").get<double>() : rational_from(e).get_d();
      t.set(alpha_from(e.at("alpha"), d), v);
    }
    return t;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("tensor JSON: ") + e.what());
  }
}

}  // namespace homog
