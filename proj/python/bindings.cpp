#include "penpls/cg.hpp"
#include "penpls/error.hpp"
#include "penpls/gam.hpp"
#include "penpls/io.hpp"
#include "penpls/kernel_pls.hpp"
#include "penpls/penalty.hpp"
#include "penpls/pls.hpp"
#include "penpls/selection.hpp"
#include "penpls/splines.hpp"
#include "penpls/testkit.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <variant>

namespace py = pybind11;
using namespace penpls;

namespace {

// lam is one shared value or one value per predictor
PenaltySpec penalty_from(const Eigen::MatrixXd& X, const std::variant<double, std::vector<double>>& lam, int K,
                         int q) {
  if (const double* v = std::get_if<double>(&lam)) return PenaltySpec::shared(static_cast<int>(X.cols()), *v, K, q);
  return PenaltySpec{std::get<std::vector<double>>(lam), q, K};
}

}  // namespace

PYBIND11_MODULE(_penpls, m) {
  m.doc() = "Penalized partial least squares for additive B-spline models";

  auto base = py::register_exception<Error>(m, "PenplsError", PyExc_RuntimeError);
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", base);
  py::register_exception<DegenerateVariable>(m, "DegenerateVariable", base);
  py::register_exception<ShapeError>(m, "ShapeError", base);
  py::register_exception<NumericalError>(m, "NumericalError", base);
  py::register_exception<DegenerateResponse>(m, "DegenerateResponse", base);
  py::register_exception<PreconditionViolation>(m, "PreconditionViolation", base);
  py::register_exception<InvalidKernel>(m, "InvalidKernel", base);
  py::register_exception<DataError>(m, "DataError", base);

  // splines
  py::class_<SplineBasis>(m, "SplineBasis")
      .def(py::init<int, std::vector<double>>(), py::arg("degree"), py::arg("knots"))
      .def_property_readonly("degree", &SplineBasis::degree)
      .def_property_readonly("size", &SplineBasis::size)
      .def_property_readonly("knots", &SplineBasis::knots)
      .def_property_readonly("lower", &SplineBasis::lower)
      .def_property_readonly("upper", &SplineBasis::upper)
      .def("eval", &SplineBasis::eval, py::arg("x"));
  m.def(
      "make_basis", [](const std::vector<double>& v, int K, int degree) { return make_basis(v, K, degree); },
      py::arg("values"), py::arg("K") = kDefaultBasisSize, py::arg("degree") = kDefaultDegree);
  py::class_<BasisExpansion>(m, "BasisExpansion")
      .def_static("fit", &BasisExpansion::fit, py::arg("X"), py::arg("K") = kDefaultBasisSize,
                  py::arg("degree") = kDefaultDegree)
      .def_property_readonly("variables", &BasisExpansion::variables)
      .def_property_readonly("columns", &BasisExpansion::columns)
      .def("basis", &BasisExpansion::basis, py::arg("j"));
  m.def("transform", &transform, py::arg("X"), py::arg("expansion"));

  // penalty
  m.def("difference_matrix", &difference_matrix, py::arg("K"));
  m.def("penalty_kernel", &penalty_kernel, py::arg("K"), py::arg("q") = kDefaultDiffOrder);
  m.def(
      "assemble_penalty",
      [](const std::vector<double>& lambdas, int K, int q) { return assemble_penalty(PenaltySpec{lambdas, q, K}); },
      py::arg("lambdas"), py::arg("K"), py::arg("q") = kDefaultDiffOrder);
  py::class_<Preconditioner>(m, "Preconditioner")
      .def_property_readonly("dimension", &Preconditioner::dimension)
      .def("apply", py::overload_cast<const Eigen::VectorXd&>(&Preconditioner::apply, py::const_), py::arg("v"))
      .def("dense", &Preconditioner::dense);
  m.def(
      "make_preconditioner",
      [](const std::vector<double>& lambdas, int K, int q) { return make_preconditioner(PenaltySpec{lambdas, q, K}); },
      py::arg("lambdas"), py::arg("K"), py::arg("q") = kDefaultDiffOrder);
  m.def("identity_preconditioner", &identity_preconditioner, py::arg("dimension"));

  // pls
  py::class_<PlsFit>(m, "PlsFit")
      .def_readonly("W", &PlsFit::W)
      .def_readonly("Wtilde", &PlsFit::Wtilde)
      .def_readonly("T", &PlsFit::T)
      .def_readonly("beta_path", &PlsFit::betaPath)
      .def_readonly("R", &PlsFit::R)
      .def_property_readonly("components", &PlsFit::components)
      .def_property_readonly("beta", &PlsFit::beta);
  m.def(
      "nipals_fit", [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int mm) { return nipals_fit(X, y, FitConfig{mm}); },
      py::arg("X"), py::arg("y"), py::arg("m"));
  m.def(
      "penalized_pls_fit",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M, int mm) {
        return penalized_pls_fit(X, y, M, FitConfig{mm});
      },
      py::arg("X"), py::arg("y"), py::arg("M"), py::arg("m"));
  m.def("closed_form_beta", &closed_form_beta, py::arg("X"), py::arg("y"), py::arg("W"));

  // kernel
  py::class_<KernelFit>(m, "KernelFit")
      .def_readonly("alpha_path", &KernelFit::alphaPath)
      .def_readonly("fitted", &KernelFit::fitted)
      .def_readonly("T", &KernelFit::T)
      .def_property_readonly("components", &KernelFit::components)
      .def_property_readonly("alpha", &KernelFit::alpha);
  m.def("gram_matrix", &gram_matrix, py::arg("X"), py::arg("M"));
  m.def("kernel_penalized_pls_fit", &kernel_penalized_pls_fit, py::arg("K"), py::arg("y"), py::arg("m"),
        py::arg("tol") = 1e-10);
  m.def("primal_coefficients", &primal_coefficients, py::arg("X"), py::arg("M"), py::arg("alpha"));

  // cg
  m.def("pcg_iterates", &pcg_iterates, py::arg("X"), py::arg("y"), py::arg("M"), py::arg("m"));

  // gam
  py::class_<GamModel>(m, "GamModel")
      .def_readonly("beta", &GamModel::beta)
      .def_readonly("intercept", &GamModel::intercept)
      .def_readonly("fitted", &GamModel::fitted)
      .def_readonly("components", &GamModel::components)
      .def_readonly("requested_components", &GamModel::requestedComponents)
      .def_readonly("response_scale", &GamModel::responseScale)
      .def_readonly("expansion", &GamModel::expansion)
      .def_property_readonly("variables", &GamModel::variables)
      .def_property_readonly("lambdas", [](const GamModel& g) { return g.penalty.lambdas; })
      .def("predict", [](const GamModel& g, const Eigen::MatrixXd& X) { return predict(g, X); }, py::arg("X"))
      .def(
          "fitted_function",
          [](const GamModel& g, int j, int gridSize) {
            const auto f = fitted_function(g, j, gridSize);
            return py::make_tuple(f.grid, f.values);
          },
          py::arg("j"), py::arg("grid_size") = 200);
  m.def(
      "fit_gam",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::variant<double, std::vector<double>>& lam, int mm, int K, int degree, int q,
         bool normalize) { return fit_gam(X, y, penalty_from(X, lam, K, q), BasisConfig{K, degree}, mm, normalize); },
      py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("m"), py::arg("K") = kDefaultBasisSize,
      py::arg("degree") = kDefaultDegree, py::arg("q") = kDefaultDiffOrder, py::arg("normalize") = false);
  m.def("roughness", &roughness, py::arg("values"));

  // selection
  m.def("default_lambda_grid", &default_lambda_grid);
  m.def(
      "loocv",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<double>& lambdas, int mMax, int K,
         int degree, int q, bool normalize, unsigned threads) {
        CvOptions o;
        o.basis = BasisConfig{K, degree};
        o.q = q;
        o.normalizeResponse = normalize;
        o.threads = threads;
        CvResult r;
        {
          py::gil_scoped_release release;
          r = loocv(X, y, lambdas, mMax, o);
        }
        py::dict d;
        d["lambdas"] = r.grid.lambdas;
        d["errors"] = r.grid.errors;
        d["lambda_opt"] = r.choice.lambdaOpt;
        d["m_opt"] = r.choice.mOpt;
        d["loo_error"] = r.choice.looError;
        return d;
      },
      py::arg("X"), py::arg("y"), py::arg("lambdas"), py::arg("m_max"), py::arg("K") = kDefaultBasisSize,
      py::arg("degree") = kDefaultDegree, py::arg("q") = kDefaultDiffOrder, py::arg("normalize") = false,
      py::arg("threads") = 0);

  // persistence
  m.def(
      "save_model",
      [](const std::filesystem::path& path, const GamModel& g, std::vector<std::string> names, std::string response) {
        ModelFile f;
        f.model = g;
        f.names = std::move(names);
        f.response = std::move(response);
        f.timestamp = utc_timestamp();
        save_model(path, f);
      },
      py::arg("path"), py::arg("model"), py::arg("names"), py::arg("response") = "y");
  m.def(
      "load_model",
      [](const std::filesystem::path& path) {
        auto f = load_model(path);
        return py::make_tuple(f.model, f.names, f.response);
      },
      py::arg("path"));

  // synthetic data
  m.def(
      "gen_additive",
      [](std::uint64_t seed, int n, int p, double noise, const std::vector<std::string>& truths) {
        testkit::SyntheticSpec s;
        s.seed = seed;
        s.n = n;
        s.p = p;
        s.noise = noise;
        s.truths.clear();
        for (const auto& t : truths) s.truths.push_back(testkit::parse_truth(t));
        const auto d = testkit::gen_additive(s);
        return py::make_tuple(d.X, d.y);
      },
      py::arg("seed"), py::arg("n"), py::arg("p"), py::arg("noise") = 0.0,
      py::arg("truths") = std::vector<std::string>{"sine"});
}
