#include "qnewton/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "qnewton/error.hpp"
#include "qnewton/newton.hpp"
#include "qnewton/regression.hpp"
#include "qnewton/rng.hpp"
#include "qnewton/synthetic.hpp"

namespace qnewton {

std::string_view sweep_mode_name(SweepMode m) {
  switch (m) {
    case SweepMode::kRegression: return "regression";
    case SweepMode::kQaeNewton: return "qae_newton";
    case SweepMode::kCmcNewton: return "cmc_newton";
  }
  return "regression";
}

std::string_view sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kEps: return "eps";
    case SweepAxis::kD: return "d";
    case SweepAxis::kKappa: return "kappa";
    case SweepAxis::kNData: return "n_data";
  }
  return "eps";
}

SweepMode parse_sweep_mode(std::string_view s) {
  for (SweepMode m : {SweepMode::kRegression, SweepMode::kQaeNewton, SweepMode::kCmcNewton}) {
    if (s == sweep_mode_name(m)) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown sweep mode '" + std::string(s) + "'");
}

SweepAxis parse_sweep_axis(std::string_view s) {
  for (SweepAxis a : {SweepAxis::kEps, SweepAxis::kD, SweepAxis::kKappa, SweepAxis::kNData}) {
    if (s == sweep_axis_name(a)) return a;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown sweep axis '" + std::string(s) + "'");
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
  if (spec.trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (spec.axis == SweepAxis::kKappa && spec.mode != SweepMode::kRegression) {
    throw Error(ErrorCode::kInvalidArgument, "kappa axis applies to regression sweeps only");
  }
  for (double v : spec.values) {
    switch (spec.axis) {
      case SweepAxis::kEps:
        if (!(v > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps values must be positive");
        break;
      case SweepAxis::kKappa:
        if (!(v >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "kappa values must be >= 1");
        break;
      case SweepAxis::kD:
      case SweepAxis::kNData:
        if (!(v >= 1.0) || v != std::floor(v)) {
          throw Error(ErrorCode::kInvalidArgument, "d and n_data values must be positive integers");
        }
        break;
    }
  }
}

namespace {

struct PointParams {
  double eps;
  std::size_t d;
  double kappa;
  std::size_t n_data;
};

PointParams params_for(const SweepSpec& spec, double value) {
  PointParams p{spec.fixed.eps, spec.fixed.d, spec.fixed.kappa, spec.fixed.n_data};
  switch (spec.axis) {
    case SweepAxis::kEps: p.eps = value; break;
    case SweepAxis::kD: p.d = static_cast<std::size_t>(value); break;
    case SweepAxis::kKappa: p.kappa = value; break;
    case SweepAxis::kNData: p.n_data = static_cast<std::size_t>(value); break;
  }
  return p;
}

std::uint64_t tally(const QueryTally& q, const char* name) {
  const auto it = q.find(name);
  return it == q.end() ? 0 : it->second;
}

void fill_queries(SweepRow& row, const QueryTally& q) {
  row.q_px = tally(q, "P_x");
  row.q_py = tally(q, "P_y");
  row.q_pc = tally(q, "P_c");
  row.q_pi = tally(q, "P_i");
  row.q_pij = tally(q, "P_ij");
}

void run_regression_row(const SweepSpec& spec, const PointParams& p, SweepRow& row) {
  const SyntheticData syn = generate_synthetic(
      SyntheticSpec{p.d, p.n_data, p.kappa, spec.fixed.noise, derive_stream(spec.seed, row.trial)});
  row.kappa = syn.kappa;
  row.c = std::min(syn.c, 1.0);
  const HybridOptions opts{p.eps, syn.kappa, row.c, spec.fixed.gamma, row.seed};
  const SimulatedQae engine;
  const RegressionResult hybrid = hybrid_regress(syn.data, opts, engine);
  const RegressionResult naive = naive_regress(syn.data);
  row.eps_prime = hybrid.eps_prime_used;
  row.grid_size = hybrid.report->grid_size;
  row.repeats = hybrid.report->repeats;
  fill_queries(row, hybrid.report->queries);
  row.achieved_error = max_norm(hybrid.coefficients - naive.coefficients);
}

void run_newton_row(const SweepSpec& spec, const PointParams& p, SweepRow& row) {
  CounterRng rng(derive_stream(spec.seed, row.trial, p.d, p.n_data));
  std::vector<double> centres(p.n_data * p.d);
  for (double& v : centres) v = rng.uniform();
  const auto obj = make_quadratic(Matrix(p.n_data, p.d, std::move(centres)), 0.0,
                                  spec.fixed.region_radius);
  const Vector a_star = *obj->closed_form_minimizer();

  // Start 0.9 delta0 away from a* along a random direction.
  std::vector<double> dir(p.d);
  for (double& v : dir) v = rng.normal();
  const Vector u(dir);
  const Vector a0 = a_star + (0.9 * spec.fixed.delta0 / euclidean_norm(u)) * u;

  const ConvexityCertificate cert{spec.fixed.mu, spec.fixed.m_lip};
  NewtonOptions opts;
  opts.eps = p.eps;
  opts.gamma = spec.fixed.gamma;
  opts.delta0 = spec.fixed.delta0;
  opts.seed = row.seed;
  opts.a_star = a_star;

  IterationTrace trace = [&] {
    if (spec.mode == SweepMode::kQaeNewton) {
      const SimulatedQae engine;
      return run_qae_newton(*obj, cert, a0, opts, engine);
    }
    return run_cmc_newton(*obj, cert, a0, opts);
  }();
  row.eps_prime = trace.tol.eps_g;
  row.eps_h = trace.tol.eps_h;
  row.n_it = trace.tol.n_it;
  if (spec.mode == SweepMode::kQaeNewton) {
    const DerivativeBounds& b = obj->bounds();
    const double conf = 1.0 - spec.fixed.gamma /
                                  (static_cast<double>(trace.tol.n_it) *
                                   static_cast<double>(p.d * p.d));
    row.grid_size = grid_for_error(
        std::min(trace.tol.eps_g / (b.gradient.upper - b.gradient.lower), 0.5));
    row.grid_size_h =
        grid_for_error(std::min(trace.tol.eps_h / (b.hessian.upper - b.hessian.lower), 0.5));
    row.repeats = repeats_for_confidence(1.0 - conf);
  } else {
    row.samples_g = trace.grad_samples;
    row.samples_h = trace.hess_samples;
  }
  fill_queries(row, trace.total_queries());
  row.achieved_error = trace.deltas.back();
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate(spec);
  const std::size_t n_rows = spec.values.size() * spec.trials;
  std::vector<SweepRow> rows(n_rows);
  for (std::size_t point = 0; point < spec.values.size(); ++point) {
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
      SweepRow& row = rows[point * spec.trials + trial];
      const PointParams p = params_for(spec, spec.values[point]);
      row.mode = sweep_mode_name(spec.mode);
      row.axis = sweep_axis_name(spec.axis);
      row.value = spec.values[point];
      row.point = point;
      row.trial = trial;
      row.seed = derive_stream(spec.seed, point, trial, 1);
      row.d = p.d;
      row.n_data = p.n_data;
      row.eps = p.eps;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < n_rows; idx = next++) {
      SweepRow& row = rows[idx];
      const PointParams p = params_for(spec, row.value);
      const auto start = std::chrono::steady_clock::now();
      try {
        if (spec.mode == SweepMode::kRegression) {
          run_regression_row(spec, p, row);
        } else {
          run_newton_row(spec, p, row);
        }
      } catch (const Error& e) {
        row.status = error_code_name(e.code());
      }
      if (spec.record_wall_time) {
        row.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
      }
    }
  };

  std::size_t workers = spec.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_rows);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepSchemaLine << '\n';
  out << "mode,axis,value,trial,seed,d,n_data,kappa,c,eps,eps_prime,eps_h,grid_size,"
         "grid_size_h,repeats,n_it,samples_g,samples_h,queries_P_x,queries_P_y,queries_P_c,"
         "queries_P_i,queries_P_ij,achieved_error,status,wall_time_ms\n";
  const auto f = [](double v) { return format_number(v); };
  for (const SweepRow& r : rows) {
    out << r.mode << ',' << r.axis << ',' << f(r.value) << ',' << r.trial << ',' << r.seed << ','
        << r.d << ',' << r.n_data << ',' << f(r.kappa) << ',' << f(r.c) << ',' << f(r.eps) << ','
        << f(r.eps_prime) << ',' << f(r.eps_h) << ',' << r.grid_size << ',' << r.grid_size_h
        << ',' << r.repeats << ',' << r.n_it << ',' << r.samples_g << ',' << r.samples_h << ','
        << r.q_px << ',' << r.q_py << ',' << r.q_pc << ',' << r.q_pi << ',' << r.q_pij << ','
        << f(r.achieved_error) << ',' << r.status << ',' << f(r.wall_time_ms) << '\n';
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool row_queries_consistent(const SweepRow& r) {
  if (r.status != "ok") return true;
  const std::uint64_t d = r.d;
  const std::uint64_t n_w = d * (d + 1) / 2;
  if (r.mode == "regression") {
    const std::uint64_t per = r.repeats * (2 * r.grid_size - 1);
    return r.q_px == per * (2 * n_w + d) && r.q_py == per * d && r.q_pc == 0 && r.q_pi == 0 &&
           r.q_pij == 0;
  }
  if (r.mode == "qae_newton") {
    const std::uint64_t pi = r.n_it * d * r.repeats * (2 * r.grid_size - 1);
    const std::uint64_t pij = r.n_it * n_w * r.repeats * (2 * r.grid_size_h - 1);
    return r.q_pi == pi && r.q_pij == pij && r.q_pc == pi + pij && r.q_px == 0;
  }
  const std::uint64_t pi = r.n_it * d * r.samples_g;
  const std::uint64_t pij = r.n_it * n_w * r.samples_h;
  return r.q_pi == pi && r.q_pij == pij && r.q_pc == pi + pij;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope fit needs >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "slope fit needs positive values");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error(ErrorCode::kInvalidArgument, "slope fit needs distinct x values");
  return sxy / sxx;
}

}  // namespace qnewton
