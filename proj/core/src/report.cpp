#include "qnewton/report.hpp"

namespace qnewton {

using nlohmann::json;

json to_json(const Vector& v) { return json(v.to_std()); }

json to_json(const QueryTally& q) {
  json j = json::object();
  for (const auto& [name, count] : q) j[name] = count;
  return j;
}

json to_json(const EngineSummary& s) {
  return json{{"n_estimates", s.n_estimates},
              {"grid_size", s.grid_size},
              {"repeats", s.repeats},
              {"per_estimate_confidence", s.per_estimate_confidence},
              {"queries", to_json(s.queries)}};
}

json to_json(const NewtonTolerances& t) {
  return json{{"eps", t.eps},         {"eps_g", t.eps_g},
              {"eps_h", t.eps_h},     {"delta_minus", t.delta_minus},
              {"delta_plus", t.delta_plus}, {"delta0", t.delta0},
              {"delta_tilde0", t.delta_tilde0}, {"n_it", t.n_it}};
}

json to_json(const BoundVerdict& v) {
  return json{{"pass", v.pass},
              {"error_2", v.error_2},
              {"error_inf", v.error_inf},
              {"bound", v.bound},
              {"margin", v.margin}};
}

json to_json(const Lemma2Verdict& v) {
  json steps = json::array();
  for (const StepVerdict& s : v.steps) {
    steps.push_back(json{{"step", s.step},
                         {"delta", s.delta},
                         {"delta_next", s.delta_next},
                         {"update_error", s.update_error},
                         {"applicable", s.applicable},
                         {"bound", s.bound},
                         {"inequality_holds", s.inequality_holds},
                         {"region_holds", s.region_holds}});
  }
  return json{{"steps", steps},
              {"per_step_holds", v.per_step_holds},
              {"trap_holds", v.trap_holds},
              {"terminal_holds", v.terminal_holds},
              {"pass", v.pass()}};
}

json to_json(const IterationTrace& t) {
  json iterates = json::array();
  for (const Vector& a : t.iterates) iterates.push_back(to_json(a));
  json step_q = json::array();
  for (const QueryTally& q : t.step_queries) step_q.push_back(to_json(q));
  json j{{"tolerances", to_json(t.tol)},
         {"iterates", iterates},
         {"final_iterate", to_json(t.iterates.back())},
         {"update_error_norms", t.update_error_norms},
         {"step_queries", step_q},
         {"total_queries", to_json(t.total_queries())}};
  if (!t.deltas.empty()) j["deltas"] = t.deltas;
  if (t.grad_samples != 0) {
    j["samples_per_gradient_entry"] = t.grad_samples;
    j["samples_per_hessian_entry"] = t.hess_samples;
  }
  return j;
}

json to_json(const LsmDemoResult& r) {
  json dates = json::array();
  for (const LsmComparison& c : r.dates) {
    json d{{"step", c.step}, {"status", std::string(status_name(c.status))}, {"n_itm", c.n_itm}};
    if (c.status == LsmDateStatus::kOk) {
      d["kappa"] = c.kappa;
      d["c"] = c.c;
      d["eps_prime"] = c.eps_prime;
      d["classical"] = to_json(*c.classical);
      d["hybrid"] = to_json(*c.hybrid);
      d["gap_inf"] = c.gap_inf;
      d["within_eps"] = c.within_eps;
      d["queries"] = to_json(c.queries);
    }
    dates.push_back(std::move(d));
  }
  const LsmSpec& s = r.spec;
  return json{{"spec",
               {{"n_paths", s.n_paths},
                {"n_steps", s.n_steps},
                {"spot", s.spot},
                {"volatility", s.volatility},
                {"rate", s.rate},
                {"strike", s.strike},
                {"maturity", s.maturity},
                {"basis_degree", s.basis_degree},
                {"seed", s.seed}}},
              {"eps", r.eps},
              {"gamma", r.gamma},
              {"price", r.price},
              {"dates", dates},
              {"all_within_eps", r.all_within_eps()}};
}

json regression_report(const RegressionResult& r, double kappa, double c, std::uint64_t seed) {
  json j{{"coefficients", to_json(r.coefficients)},
         {"mode", std::string(mode_name(r.mode))},
         {"eps", r.eps_target},
         {"eps_prime", r.eps_prime_used},
         {"kappa", kappa},
         {"c", c},
         {"seed", seed}};
  if (r.report) {
    j["queries"] = to_json(r.report->queries);
    j["engine"] = to_json(*r.report);
  } else {
    j["queries"] = json::object();
    j["classical_ops"] = r.classical_ops;
  }
  return j;
}

json error_report(ErrorCode code, const std::string& message) {
  return json{{"error", std::string(error_code_name(code))}, {"message", message}};
}

}  // namespace qnewton
