// penpls: fit, cross-validate and apply penalized-PLS additive models.
#include "penpls/error.hpp"
#include "penpls/gam.hpp"
#include "penpls/io.hpp"
#include "penpls/selection.hpp"
#include "penpls/testkit.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace penpls;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ModelOptions {
  int basisSize = kDefaultBasisSize;
  int degree = kDefaultDegree;
  int diffOrder = kDefaultDiffOrder;
  bool normalize = false;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--basis-size", o.basisSize, "B-spline basis functions per predictor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--degree", o.degree, "spline degree")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--diff-order", o.diffOrder, "order of the coefficient difference penalty")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--normalize-response", o.normalize, "scale the response to unit variance before fitting");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto v = parse_double(tok);
    if (!v) throw CLI::ValidationError("--lambda-grid", "not a number: '" + tok + "'");
    if (*v < 0.0) throw CLI::ValidationError("--lambda-grid", "values must be >= 0");
    out.push_back(*v);
  }
  if (out.empty()) throw CLI::ValidationError("--lambda-grid", "empty list");
  return out;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  std::string data, response = "y", out;
  double lambda = 1.0;
  int components = 5;
  ModelOptions model;
};

int run_fit(const FitArgs& a) {
  const Dataset ds = ingest(a.data, a.response);
  const auto penalty = PenaltySpec::shared(static_cast<int>(ds.names.size()), a.lambda, a.model.basisSize,
                                           a.model.diffOrder);
  ModelFile mf;
  mf.model = fit_gam(ds.X, ds.y, penalty, BasisConfig{a.model.basisSize, a.model.degree}, a.components,
                     a.model.normalize);
  mf.names = ds.names;
  mf.response = ds.response;
  mf.datasetChecksum = ds.checksum;
  mf.timestamp = utc_timestamp();
  save_model(a.out, mf);

  const double mse = (ds.y - mf.model.fitted).squaredNorm() / static_cast<double>(ds.rows());
  if (mf.model.truncated())
    std::cerr << "warning: only " << mf.model.components << " of " << mf.model.requestedComponents
              << " components could be extracted\n";
  std::cout << "model=" << a.out << '\n'
            << "n=" << ds.rows() << '\n'
            << "predictors=" << ds.names.size() << '\n'
            << "requested_components=" << mf.model.requestedComponents << '\n'
            << "components=" << mf.model.components << '\n'
            << "training_mse=" << format_double(mse) << '\n';
  return 0;
}

// ---- cv --------------------------------------------------------------------

struct CvArgs {
  std::string data, response = "y", lambdaGrid, out;
  int maxComponents = 10;
  unsigned threads = 0;
  ModelOptions model;
};

int run_cv(const CvArgs& a) {
  const std::vector<double> lambdas = a.lambdaGrid.empty() ? default_lambda_grid() : parse_list(a.lambdaGrid);
  const Dataset ds = ingest(a.data, a.response);
  CvOptions opts;
  opts.basis = BasisConfig{a.model.basisSize, a.model.degree};
  opts.q = a.model.diffOrder;
  opts.normalizeResponse = a.model.normalize;
  opts.threads = a.threads;
  opts.names = ds.names;
  const CvResult res = loocv(ds.X, ds.y, lambdas, a.maxComponents, opts);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw DataError("cannot write '" + a.out + "'");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "lambda";
  for (int m = 1; m <= res.grid.mMax; ++m) out << ',' << m;
  out << '\n';
  for (std::size_t l = 0; l < res.grid.lambdas.size(); ++l) {
    out << format_double(res.grid.lambdas[l]);
    for (int m = 0; m < res.grid.mMax; ++m) out << ',' << format_double(res.grid.errors(l, m));
    out << '\n';
  }
  out << "chosen: lambda=" << format_double(res.choice.lambdaOpt) << ", m=" << res.choice.mOpt
      << ", loo=" << format_double(res.choice.looError) << '\n';
  return 0;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string model, data, response, out;
};

int run_predict(const PredictArgs& a) {
  const ModelFile mf = load_model(a.model);
  const std::string response = a.response.empty() ? mf.response : a.response;
  const Dataset ds = ingest_optional_response(a.data, response);
  const Eigen::MatrixXd X = align_columns(ds, mf.names);
  const Eigen::VectorXd pred = predict(mf.model, X);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw DataError("cannot write '" + a.out + "'");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  for (Eigen::Index i = 0; i < pred.size(); ++i) out << format_double17(pred[i]) << '\n';
  if (!ds.response.empty()) {
    const double mse = (ds.y - pred).squaredNorm() / static_cast<double>(pred.size());
    (a.out.empty() ? std::cerr : std::cout) << "mse=" << format_double(mse) << '\n';
  }
  return 0;
}

// ---- curves ----------------------------------------------------------------

struct CurvesArgs {
  std::string model, outDir = ".", prefix = "curve_";
  int gridSize = 200;
};

int run_curves(const CurvesArgs& a) {
  const ModelFile mf = load_model(a.model);
  fs::create_directories(a.outDir);
  for (int j = 0; j < mf.model.variables(); ++j) {
    const FittedFunction f = fitted_function(mf.model, j, a.gridSize);
    const fs::path path = fs::path(a.outDir) / (a.prefix + mf.names[j] + ".csv");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    Eigen::MatrixXd rows(f.grid.size(), 2);
    rows << f.grid, f.values;
    write_csv(out, {"x", "f"}, rows);
    std::cout << path.string() << '\n';
  }
  return 0;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 1;
  int n = 100, p = 2;
  double noise = 0.1;
  std::string truths = "sine,quadratic", out;
};

int run_synth(const SynthArgs& a) {
  testkit::SyntheticSpec spec;
  spec.seed = a.seed;
  spec.n = a.n;
  spec.p = a.p;
  spec.noise = a.noise;
  spec.truths.clear();
  std::stringstream ss(a.truths);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      spec.truths.push_back(testkit::parse_truth(tok));
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--truths", e.what());
    }
  }
  const auto d = testkit::gen_additive(spec);
  std::vector<std::string> header;
  for (int j = 0; j < a.p; ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("y");
  Eigen::MatrixXd rows(a.n, a.p + 1);
  rows << d.X, d.y;
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw DataError("cannot write '" + a.out + "'");
  }
  write_csv(a.out.empty() ? std::cout : file, header, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized partial least squares for additive B-spline models"};
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit a model and write it to a model file");
  fit->add_option("--data", fa.data, "comma-delimited input with header row")->required();
  fit->add_option("--response", fa.response, "response column name")->capture_default_str();
  fit->add_option("-o,--out", fa.out, "model file to write")->required();
  fit->add_option("--lambda", fa.lambda, "smoothing parameter shared by all predictors")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  fit->add_option("--components", fa.components, "number of PLS components")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_model_options(fit, fa.model);

  CvArgs ca;
  auto* cv = app.add_subcommand("cv", "leave-one-out error over a (lambda, components) grid");
  cv->add_option("--data", ca.data, "comma-delimited input with header row")->required();
  cv->add_option("--response", ca.response, "response column name")->capture_default_str();
  cv->add_option("--lambda-grid", ca.lambdaGrid,
                 "comma-separated lambda values (default: 20 log-spaced values from 1e-2 to 1e6)");
  cv->add_option("--max-components", ca.maxComponents, "largest number of components scored")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cv->add_option("--threads", ca.threads, "worker threads, 0 = all cores")->capture_default_str();
  cv->add_option("-o,--out", ca.out, "write the grid here instead of stdout");
  add_model_options(cv, ca.model);

  PredictArgs pa;
  auto* pr = app.add_subcommand("predict", "predict new observations, one value per line");
  pr->add_option("--model", pa.model, "model file")->required();
  pr->add_option("--data", pa.data, "comma-delimited input with header row")->required();
  pr->add_option("--response", pa.response, "response column; if present in the data the MSE is reported "
                                             "(default: the model's response name)");
  pr->add_option("-o,--out", pa.out, "write predictions here instead of stdout");

  CurvesArgs cu;
  auto* curves = app.add_subcommand("curves", "export fitted per-predictor functions as x,f tables");
  curves->add_option("--model", cu.model, "model file")->required();
  curves->add_option("--out-dir", cu.outDir, "output directory")->capture_default_str();
  curves->add_option("--prefix", cu.prefix, "file name prefix")->capture_default_str();
  curves->add_option("--grid-size", cu.gridSize, "grid points per predictor")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 24));

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "write a seeded synthetic additive dataset");
  synth->add_option("--seed", sa.seed, "generator seed")->capture_default_str();
  synth->add_option("--n", sa.n, "observations")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--p", sa.p, "predictors")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--noise", sa.noise, "Gaussian noise standard deviation")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--truths", sa.truths, "comma list of linear|quadratic|sine|step, cycled over predictors")
      ->capture_default_str();
  synth->add_option("-o,--out", sa.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit) return run_fit(fa);
    if (*cv) return run_cv(ca);
    if (*pr) return run_predict(pa);
    if (*curves) return run_curves(cu);
    if (*synth) return run_synth(sa);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidConfiguration& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
