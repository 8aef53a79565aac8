#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "upieces/errors.hpp"
#include "upieces/json_io.hpp"
#include "upieces/suites.hpp"

namespace py = pybind11;
using namespace upieces;

namespace {

using Rows = std::vector<std::vector<int>>;

Family family_of(const std::string& group) {
  if (group == "gl") return Family::GL;
  if (group == "sp") return Family::Sp;
  throw InvalidInput("group must be \"gl\" or \"sp\", got \"" + group + "\"");
}

GroupSpec spec_of(const std::string& group, std::size_t dim, int q) {
  GroupSpec spec{family_of(group), dim, q};
  spec.validate();
  return spec;
}

Matrix matrix_of(const Rows& rows, int q) {
  const Field f = Field::make(q);
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw InvalidInput("matrix rows differ in length");
    for (int x : r)
      if (x < 0 || x >= q) throw InvalidInput("matrix entry " + std::to_string(x) + " is not in F_" + std::to_string(q));
  }
  if (rows.empty() || rows.size() != rows.front().size()) throw InvalidInput("matrix must be square and nonempty");
  return Matrix::from_rows(f, rows);
}

PieceLabel label_of_args(const std::vector<int>& lambda, const std::vector<int>& J) {
  return label_from_json(Json{{"lambda", lambda}, {"J", J}});
}

py::dict label_dict(const PieceLabel& l) {
  py::dict d;
  d["lambda"] = l.lambda.parts;
  d["J"] = std::vector<int>(l.J.begin(), l.J.end());
  return d;
}

/// JSON values become the matching Python objects.
py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unipotent pieces of GL and Sp over small finite fields";

  auto base = py::register_exception<Error>(m, "UpiecesError", PyExc_ValueError);
  py::register_exception<ScaleExceeded>(m, "ScaleExceeded", base.ptr());

  m.def("label", [](const Rows& rows, int q, const std::string& group) {
        const Matrix u = matrix_of(rows, q);
        return label_dict(label_of(u, spec_of(group, u.rows(), q)));
      },
      py::arg("rows"), py::arg("q"), py::arg("group") = "sp",
      "Piece label {'lambda', 'J'} of a unipotent matrix.");

  m.def("splitting_invariant", [](const Rows& rows, int q) {
        const Matrix u = matrix_of(rows, q);
        const SymplecticSpace s = standard_symplectic(u.rows(), q);
        return to_python(to_json(splitting_invariant(u - Matrix::identity(u.field(), u.rows()), s)));
      },
      py::arg("rows"), py::arg("q"),
      "The invariant (I, J, c, L, Lprime) of a unipotent of the standard symplectic group.");

  m.def("dk_filtration", [](const Rows& rows, int q) { return to_python(to_json(dk_filtration(matrix_of(rows, q)))); },
        py::arg("rows"), py::arg("q"), "Canonical filtration of a nilpotent matrix.");

  m.def("admissible_labels", [](const std::string& group, std::size_t dim, int q) {
        py::list out;
        for (const auto& l : admissible_labels(spec_of(group, dim, q))) out.append(label_dict(l));
        return out;
      },
      py::arg("group"), py::arg("dim"), py::arg("q"));

  m.def("canonical_representative",
        [](const std::vector<int>& lambda, const std::vector<int>& J, const std::string& group, int q) {
          const PieceLabel l = label_of_args(lambda, J);
          return canonical_representative(l, spec_of(group, static_cast<std::size_t>(l.lambda.total()), q)).to_rows();
        },
        py::arg("lambda_"), py::arg("J"), py::arg("group"), py::arg("q"));

  m.def("construct_n", [](const std::vector<int>& lambda, const std::vector<int>& J, int q) {
        const PieceLabel l = label_of_args(lambda, J);
        return construct_N(l, spec_of("sp", static_cast<std::size_t>(l.lambda.total()), q)).to_rows();
      },
      py::arg("lambda_"), py::arg("J"), py::arg("q"),
      "Nilpotent N with 1 + N symplectic and of the given label.");

  m.def("enumerate", [](const std::string& group, std::size_t dim, int q, unsigned jobs) {
        VerifyOptions options;
        options.jobs = jobs;
        options.sample = 0;
        options.label_all = false;
        ClassReport report;
        {
          py::gil_scoped_release release;
          report = verify_pieces(spec_of(group, dim, q), options);
        }
        py::list out;
        for (const auto& rec : report.labels) out.append(to_python(to_json(rec)));
        return out;
      },
      py::arg("group"), py::arg("dim"), py::arg("q"), py::arg("jobs") = 1,
      "Class report: one record per label with its size and conjugacy class sizes.");

  m.def("piece_counts", [](const std::string& group, std::size_t dim, const std::vector<int>& qs, unsigned jobs) {
        for (int q : qs) spec_of(group, dim, q);
        CountReport report;
        {
          py::gil_scoped_release release;
          report = piece_count_polynomials(family_of(group), dim, qs, jobs);
        }
        py::list out;
        for (const auto& p : report.pieces) out.append(to_python(to_json(p)));
        return out;
      },
      py::arg("group"), py::arg("dim"), py::arg("qs"), py::arg("jobs") = 1);

  m.def("gaussian_count", &gaussian_count, py::arg("d"), py::arg("dp"), py::arg("q"));
  m.def("count_sym_nondeg", &count_sym_nondeg, py::arg("d"), py::arg("q"));
  m.def("interpolate", [](const std::vector<std::pair<std::int64_t, std::int64_t>>& points) {
        return interpolate_int(points).coefficients;
      },
      py::arg("points"), "Integer coefficients, constant term first, of the interpolating polynomial.");

  m.def("run_suite", [](const std::string& name, const std::string& group, std::size_t dim, int q,
                        std::size_t max_dim) {
        SuiteOptions options;
        options.spec = GroupSpec{family_of(group), dim, q};
        options.max_dim = max_dim;
        SuiteResult r;
        {
          py::gil_scoped_release release;
          r = run_suite(name, options);
        }
        py::dict d;
        d["suite"] = r.suite;
        d["scope"] = r.scope;
        d["ok"] = r.ok();
        d["checked"] = r.checked;
        d["failure_count"] = r.failure_count;
        return d;
      },
      py::arg("name"), py::arg("group") = "sp", py::arg("dim") = 0, py::arg("q") = 2, py::arg("max_dim") = 0);
}
