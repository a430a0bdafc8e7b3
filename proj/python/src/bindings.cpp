#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homog/algebra.hpp"
#include "homog/field_io.hpp"
#include "homog/harmonic_basis.hpp"
#include "homog/verify.hpp"

namespace py = pybind11;
using namespace homog;

namespace {
struct PolyDict : std::map<std::vector<int>, double> {};
}  // namespace

// polynomials cross the boundary as {exponent tuple: coefficient}
namespace pybind11::detail {
template <>
struct type_caster<PolyDict> {
  PYBIND11_TYPE_CASTER(PolyDict, const_name("dict[tuple[int, ...], float]"));

  bool load(handle src, bool) {
    if (!isinstance<dict>(src)) return false;
    for (auto item : reinterpret_borrow<dict>(src)) {
      std::vector<int> key;
      for (auto e : reinterpret_borrow<sequence>(item.first)) key.push_back(e.cast<int>());
      value[key] += item.second.cast<double>();
    }
    return true;
  }

  static handle cast(const PolyDict& p, return_value_policy, handle) {
    dict out;
    for (const auto& [a, c] : p) {
      tuple key(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) key[i] = int_(a[i]);
      out[key] = float_(c);
    }
    return out.release();
  }
};
}  // namespace pybind11::detail

namespace {

RealPolynomial from_dict(std::size_t d, const PolyDict& p) {
  RealPolynomial out(d);
  for (const auto& [a, c] : p) {
    if (a.size() != d) throw ContractViolation("monomial exponent has the wrong length");
    out.add_term(MultiIndex(a), c);
  }
  return out;
}

PolyDict to_dict(const RealPolynomial& p) {
  PolyDict out;
  for (const auto& [a, c] : p.terms()) out[a.entries()] = c;
  return out;
}

PolyDict tensor_dict(const SymTensor<double>& t) {
  PolyDict out;
  for (const auto& [a, c] : t.entries()) out[a.entries()] = c;
  return out;
}

std::vector<std::vector<double>> matrix_rows(const SquareMatrix<double>& m) {
  std::vector<std::vector<double>> out(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = m(i, j);
  return out;
}

SquareMatrix<double> matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  SquareMatrix<double> m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw ContractViolation("matrix must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

using TablePtr = std::shared_ptr<const CorrectorTable>;
using FieldPtr = std::shared_ptr<const CoefficientField>;

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Periodic correctors, homogenized operators and scaling studies";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<CoefficientField, std::shared_ptr<CoefficientField>>(m, "CoefficientField")
      .def_static("laminate", [](std::size_t d, std::size_t n, double a, double b) {
        return std::make_shared<CoefficientField>(CoefficientField::laminate(d, n, a, b));
      }, py::arg("d"), py::arg("n"), py::arg("a"), py::arg("b"))
      .def_static("checkerboard", [](std::size_t d, std::size_t n, double a, double b) {
        return std::make_shared<CoefficientField>(CoefficientField::checkerboard(d, n, a, b));
      }, py::arg("d"), py::arg("n"), py::arg("a"), py::arg("b"))
      .def_static("smooth", [](std::size_t n, double c) {
        return std::make_shared<CoefficientField>(CoefficientField::smooth(2, n, c));
      }, py::arg("n"), py::arg("c"))
      .def_static("constant", [](std::size_t n, const std::vector<std::vector<double>>& a) {
        const auto mat = matrix_from_rows(a);
        return std::make_shared<CoefficientField>(CoefficientField::constant(mat.size(), n, mat));
      }, py::arg("n"), py::arg("matrix"))
      .def_property_readonly("dim", &CoefficientField::dim)
      .def_property_readonly("n", [](const CoefficientField& a) { return a.shape().n; })
      .def_property_readonly("description", &CoefficientField::description);

  py::class_<CorrectorTable, std::shared_ptr<CorrectorTable>>(m, "CorrectorTable")
      .def_property_readonly("m_max", [](const CorrectorTable& t) { return t.m_max; })
      .def_property_readonly("dim", &CorrectorTable::dim)
      .def_property_readonly("iterations", [](const CorrectorTable& t) { return t.iterations; })
      .def("abar", [](const CorrectorTable& t, int order) {
        if (order < 0 || order > t.m_max) throw ContractViolation("tensor order out of range");
        return tensor_dict(t.abar[order]);
      }, py::arg("order"))
      .def("homogenized_matrix", [](const CorrectorTable& t) { return matrix_rows(homogenized_matrix(t)); })
      .def("corrector", [](const CorrectorTable& t, const std::vector<int>& alpha) {
        const auto* g = t.component(MultiIndex(alpha).order(), MultiIndex(alpha));
        if (!g) return std::vector<double>{};
        return std::vector<double>(g->values().begin(), g->values().end());
      }, py::arg("alpha"))
      .def("write", [](const CorrectorTable& t, const std::string& dir) { return write_corrector_table(t, dir).string(); })
      .def("identities", [](const CorrectorTable& t) {
        const auto r = check_identities(t);
        py::dict out;
        out["threshold"] = r.threshold;
        out["pass"] = r.pass;
        py::list checks;
        for (const auto& c : r.checks) {
          py::dict d;
          d["name"] = c.name;
          d["discrepancy"] = c.discrepancy;
          d["pass"] = c.pass;
          checks.append(d);
        }
        out["checks"] = checks;
        out["odd_ratio"] = r.odd_ratio;
        return out;
      });

  m.def("compute_correctors", [](std::shared_ptr<CoefficientField> a, int m_max, double rel_tol) {
    SolveOptions opt;
    opt.rel_tol = rel_tol;
    return std::make_shared<CorrectorTable>(compute_correctors(FieldPtr(a), m_max, opt));
  }, py::arg("field"), py::arg("m_max"), py::arg("rel_tol") = 1e-10);
  m.def("read_corrector_table", [](const std::string& manifest) {
    return std::make_shared<CorrectorTable>(read_corrector_table(manifest));
  }, py::arg("manifest"));

  m.def("harmonic_dim", &harmonic_dim, py::arg("d"), py::arg("n"));
  m.def("a_harmonic_dim", &a_harmonic_dim, py::arg("d"), py::arg("m"));
  m.def("harmonic_basis", [](std::size_t d, int n) {
    std::vector<PolyDict> out;
    for (const auto& p : orthonormal_harmonic_basis(d, n)) out.push_back(to_dict(p));
    return out;
  }, py::arg("d"), py::arg("n"));
  m.def("laplacian", [](std::size_t d, const PolyDict& p) { return to_dict(laplacian(from_dict(d, p))); },
        py::arg("d"), py::arg("p"));
  m.def("apply_S", [](std::size_t d, const PolyDict& p) { return to_dict(apply_S(from_dict(d, p))); },
        py::arg("d"), py::arg("p"));
  m.def("mean_l2_norm_ellipsoid", [](std::size_t d, const PolyDict& p, const std::vector<std::vector<double>>& abar,
                                     double r) { return mean_l2_norm_ellipsoid(from_dict(d, p), Ellipsoid(matrix_from_rows(abar), r)); },
        py::arg("d"), py::arg("p"), py::arg("abar"), py::arg("r"));
  m.def("three_ellipsoid_ratio", [](std::size_t d, const PolyDict& p, double r, double theta,
                                    const std::vector<std::vector<double>>& abar) {
    return three_ellipsoid_ratio(from_dict(d, p), r, theta, matrix_from_rows(abar));
  }, py::arg("d"), py::arg("p"), py::arg("r"), py::arg("theta"), py::arg("abar"));

  py::class_<HomogenizedOperator, std::shared_ptr<HomogenizedOperator>>(m, "HomogenizedOperator")
      .def_static("from_table", [](const CorrectorTable& t, int max_order) {
        return std::make_shared<HomogenizedOperator>(HomogenizedOperator::from_table(t, max_order));
      }, py::arg("table"), py::arg("max_order") = -1)
      .def_property_readonly("dim", &HomogenizedOperator::dim)
      .def("abar", [](const HomogenizedOperator& op) { return matrix_rows(op.abar()); })
      .def("apply", [](const HomogenizedOperator& op, const PolyDict& p) { return to_dict(apply_A(op, from_dict(op.dim(), p))); })
      .def("harmonic_seed", [](const HomogenizedOperator& op, int m, std::uint64_t seed) {
        return to_dict(abar_harmonic_from(op, random_harmonic_seed(op.dim(), m, seed)));
      }, py::arg("m"), py::arg("seed"));

  py::class_<AHarmonicPolynomial>(m, "AHarmonicPolynomial")
      .def_property_readonly("q", [](const AHarmonicPolynomial& q) { return to_dict(q.q); })
      .def_property_readonly("seed", [](const AHarmonicPolynomial& q) { return to_dict(q.seed); })
      .def_property_readonly("degree", &AHarmonicPolynomial::degree)
      .def("harmonic_approximation_error", [](const AHarmonicPolynomial& q, double r) {
        return harmonic_approximation(q, r).rel_error;
      }, py::arg("r"));
  m.def("build_A_harmonic", [](std::shared_ptr<HomogenizedOperator> op, const PolyDict& p) {
    return build_A_harmonic(std::shared_ptr<const HomogenizedOperator>(op), from_dict(op->dim(), p));
  }, py::arg("op"), py::arg("seed"));

  py::class_<HeterogeneousPolynomial>(m, "HeterogeneousPolynomial")
      .def("__call__", [](const HeterogeneousPolynomial& psi, const std::vector<double>& x) {
        if (x.size() != psi.dim()) throw ContractViolation("point has the wrong dimension");
        return psi(x);
      })
      .def("residual", [](const HeterogeneousPolynomial& psi) { return residual_psi(psi); })
      .def("poly_error", [](const HeterogeneousPolynomial& psi, double r) { return psi_poly_error(psi, r); }, py::arg("r"))
      .def("norm", [](const HeterogeneousPolynomial& psi, double r, int samples) {
        const auto n = norm_on_ellipsoid(psi, Ellipsoid(psi.q().op->abar(), r), samples);
        return py::make_tuple(n.value, n.error);
      }, py::arg("r"), py::arg("samples_per_unit") = 8)
      .def("three_ellipsoid_ratio", [](const HeterogeneousPolynomial& psi, double r, double theta) {
        return three_ellipsoid_ratio(psi, r, theta);
      }, py::arg("r"), py::arg("theta") = 0.5);
  m.def("build_heterogeneous", [](const AHarmonicPolynomial& q, std::shared_ptr<CorrectorTable> t, bool allow_truncated) {
    return build_heterogeneous(q, TablePtr(t), allow_truncated);
  }, py::arg("q"), py::arg("table"), py::arg("allow_truncated") = false);

  m.def("run_scaling_study", [](std::shared_ptr<CorrectorTable> t, const std::vector<int>& m_list,
                                const std::vector<double>& r_list, double theta, std::uint64_t rng_seed,
                                bool negative_control) {
    ScalingConfig cfg;
    cfg.m_list = m_list;
    cfg.r_list = r_list;
    cfg.theta = theta;
    cfg.rng_seed = rng_seed;
    cfg.negative_control = negative_control;
    const auto rep = run_scaling_study(cfg, TablePtr(t));
    return py::make_tuple(rep.csv(), rep.summary().dump());
  }, py::arg("table"), py::arg("m_list"), py::arg("r_list"), py::arg("theta") = 0.5, py::arg("rng_seed") = 20240601,
     py::arg("negative_control") = false);
}
