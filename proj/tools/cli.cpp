#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qnewton/dataset.hpp"
#include "qnewton/error.hpp"
#include "qnewton/io.hpp"
#include "qnewton/lsm.hpp"
#include "qnewton/newton.hpp"
#include "qnewton/qae.hpp"
#include "qnewton/regression.hpp"
#include "qnewton/report.hpp"
#include "qnewton/rng.hpp"
#include "qnewton/sweep.hpp"

namespace qnewton::cli {

namespace {

using nlohmann::json;

struct RegressArgs {
  std::string dataset;
  std::string bounds;
  std::string mode = "exact";
  std::string pattern = "adversarial";
  double eps = 0.01;
  std::optional<double> kappa;
  std::optional<double> c;
  double gamma = 0.01;
  std::uint64_t seed = 0;
};

struct CalibrateArgs {
  std::vector<double> amplitudes{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<std::uint64_t> grids{16, 64, 256, 1024};
  std::uint64_t runs = 1000;
  std::uint64_t repeats = 1;
  std::uint64_t seed = 0;
};

int regress(const RegressArgs& a, std::ostream& out) {
  RegressionTable table = split_regression_table(read_csv_file(a.dataset));
  std::optional<Dataset> data;
  if (!a.bounds.empty()) {
    const BoundsSidecar b = parse_bounds(read_json_file(a.bounds));
    data = rescale(table.x, table.y, b.x, b.y);
  } else {
    data.emplace(std::move(table.x), std::move(table.y));
  }
  const RegressionMode mode = parse_mode(a.mode);
  const NormalEquations measured = compute_normal_equations_exact(*data);
  const double kappa = a.kappa.value_or(measured.kappa);
  const double c = a.c.value_or(std::min(measured.c, 1.0));
  const HybridOptions opts{a.eps, kappa, c, a.gamma, a.seed};
  const RegressionResult naive = naive_regress(*data);

  RegressionResult result = naive;
  if (mode == RegressionMode::kQae) {
    const SimulatedQae engine;
    result = hybrid_regress(*data, opts, engine);
  } else if (mode == RegressionMode::kInject) {
    InjectionPattern pattern;
    if (a.pattern == "adversarial") {
      pattern = InjectionPattern::kAdversarial;
    } else if (a.pattern == "random") {
      pattern = InjectionPattern::kRandomSigns;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "pattern must be adversarial or random");
    }
    result = injected_regress(*data, opts, pattern);
  }

  json j = regression_report(result, kappa, c, a.seed);
  j["measured"] = {{"kappa", measured.kappa}, {"c", measured.c}};
  j["inputs_conservative"] = kappa >= measured.kappa && c <= measured.c;
  if (mode != RegressionMode::kExact) {
    j["verifier"] = to_json(verify_error_bound(result.coefficients, naive.coefficients,
                                               result.eps_prime_used, data->dim(), kappa, c));
  }
  out << j.dump(2) << '\n';
  return 0;
}

int newton(const std::string& path, std::ostream& out) {
  const std::filesystem::path p(path);
  NewtonProblem prob = parse_newton_problem(read_json_file(p), p.parent_path());
  const Vector a0(prob.a0);
  const SumObjective& obj = *prob.objective;
  const Vector a_star = obj.closed_form_minimizer().value_or(exact_minimizer(obj, a0));
  prob.options.a_star = a_star;

  IterationTrace trace = [&] {
    switch (prob.engine) {
      case NewtonEngine::kCmc: return run_cmc_newton(obj, prob.cert, a0, prob.options);
      case NewtonEngine::kExact: {
        const ExactAmplitudeEstimator engine;
        return run_qae_newton(obj, prob.cert, a0, prob.options, engine);
      }
      case NewtonEngine::kQae: break;
    }
    const SimulatedQae engine;
    return run_qae_newton(obj, prob.cert, a0, prob.options, engine);
  }();

  json j = to_json(trace);
  j["family"] = std::string(obj.family());
  j["mu"] = prob.cert.mu;
  j["m_lip"] = prob.cert.m_lip;
  j["seed"] = prob.options.seed;
  j["gamma"] = prob.options.gamma;
  j["a_star"] = to_json(a_star);
  j["lemma2"] = to_json(lemma2_check(trace, prob.cert, prob.options.eps));
  out << j.dump(2) << '\n';
  return 0;
}

int calibrate(const CalibrateArgs& a, std::ostream& out) {
  if (a.runs == 0) throw Error(ErrorCode::kInvalidArgument, "runs must be >= 1");
  out << kSweepSchemaLine << '\n';
  out << "amplitude,grid_size,repeats,runs,successes,success_fraction,error_bound\n";
  for (std::size_t ai = 0; ai < a.amplitudes.size(); ++ai) {
    for (std::size_t mi = 0; mi < a.grids.size(); ++mi) {
      const double amp = a.amplitudes[ai];
      const std::uint64_t m = a.grids[mi];
      const double bound = single_run_error_bound(m);
      std::uint64_t ok = 0;
      for (std::uint64_t run = 0; run < a.runs; ++run) {
        const QaeConfig cfg{m, a.repeats, derive_stream(a.seed, ai, mi, run)};
        const EstimatorReport rep = qae_estimate(AmplitudeOracle{amp, {}}, cfg);
        if (std::abs(rep.estimate - amp) <= bound) ++ok;
      }
      out << format_number(amp) << ',' << m << ',' << a.repeats << ',' << a.runs << ',' << ok
          << ',' << format_number(static_cast<double>(ok) / static_cast<double>(a.runs)) << ','
          << format_number(bound) << '\n';
    }
  }
  return 0;
}

int sweep(const std::string& path, const std::string& output, std::ostream& out) {
  const std::vector<SweepRow> rows = run_sweep(parse_sweep_spec(read_json_file(path)));
  if (output.empty()) {
    write_sweep_csv(out, rows);
  } else {
    std::ofstream f(output);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + output);
    write_sweep_csv(f, rows);
  }
  return 0;
}

int lsm_demo(const std::string& path, std::ostream& out) {
  const LsmDemoSpec spec = parse_lsm_spec(read_json_file(path));
  const SimulatedQae engine;
  const LsmDemoResult r = run_lsm_demo(spec.lsm, spec.eps, spec.gamma, spec.seed, engine);
  json j = to_json(r);
  j["qae_seed"] = spec.seed;
  out << j.dump(2) << '\n';
  return 0;
}

void usage_error(std::ostream& err, const std::string& message) {
  err << json{{"error", "UsageError"}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid amplitude-estimation regression and Newton experiments", "qnewton-lab"};
  app.require_subcommand(1);

  RegressArgs ra;
  auto* reg = app.add_subcommand("regress", "Fit least-squares coefficients from a dataset CSV");
  reg->add_option("dataset", ra.dataset, "CSV with header x1,...,xd,y")->required();
  reg->add_option("--bounds", ra.bounds, "JSON sidecar with L, U, L_y, U_y for rescaling");
  reg->add_option("--mode", ra.mode, "exact, qae or inject")
      ->check(CLI::IsMember({"exact", "qae", "inject"}));
  reg->add_option("--pattern", ra.pattern, "inject mode sign pattern: adversarial or random")
      ->check(CLI::IsMember({"adversarial", "random"}));
  reg->add_option("--eps", ra.eps, "target coefficient error");
  reg->add_option("--kappa", ra.kappa, "certified bound on cond(X); default: measured");
  reg->add_option("--c", ra.c, "certified lower bound on diag(W); default: measured");
  reg->add_option("--gamma", ra.gamma, "allowed failure probability");
  reg->add_option("--seed", ra.seed, "RNG seed");

  std::string problem_path;
  auto* nwt = app.add_subcommand("newton", "Run QAE- or CMC-based Newton on a problem JSON");
  nwt->add_option("problem", problem_path, "problem JSON")->required();

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("qae-calibrate", "Single-run QAE accuracy over an amplitude grid");
  cal->add_option("--amplitudes", ca.amplitudes, "amplitudes in [0, 1]")->delimiter(',');
  cal->add_option("--grids", ca.grids, "grid sizes (powers of two >= 4)")->delimiter(',');
  cal->add_option("--runs", ca.runs, "runs per point");
  cal->add_option("--repeats", ca.repeats, "median repeats per run (odd)");
  cal->add_option("--seed", ca.seed, "RNG seed");

  std::string sweep_path;
  std::string sweep_out;
  auto* swp = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  swp->add_option("spec", sweep_path, "sweep JSON")->required();
  swp->add_option("-o,--output", sweep_out, "write CSV here instead of stdout");

  std::string lsm_path;
  auto* lsm = app.add_subcommand("lsm-demo", "Compare hybrid and classical LSM regressions");
  lsm->add_option("spec", lsm_path, "LSM JSON")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  if (argv.empty()) argv.push_back("qnewton-lab");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    usage_error(err, e.what());
    return 2;
  }

  try {
    if (*reg) return regress(ra, out);
    if (*nwt) return newton(problem_path, out);
    if (*cal) return calibrate(ca, out);
    if (*swp) return sweep(sweep_path, sweep_out, out);
    if (*lsm) return lsm_demo(lsm_path, out);
  } catch (const Error& e) {
    err << error_report(e.code(), e.what()).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  usage_error(err, "no subcommand given");
  return 2;
}

}  // namespace qnewton::cli
