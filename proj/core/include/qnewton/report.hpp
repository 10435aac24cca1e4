#pragma once

#include <nlohmann/json.hpp>

#include "qnewton/error.hpp"
#include "qnewton/lsm.hpp"
#include "qnewton/newton.hpp"
#include "qnewton/qae.hpp"
#include "qnewton/regression.hpp"

namespace qnewton {

// JSON views of result types. Key order is alphabetical (nlohmann default), so
// equal inputs serialize to identical bytes.
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const QueryTally& q);
nlohmann::json to_json(const EngineSummary& s);
nlohmann::json to_json(const NewtonTolerances& t);
nlohmann::json to_json(const BoundVerdict& v);
nlohmann::json to_json(const Lemma2Verdict& v);
nlohmann::json to_json(const IterationTrace& t);
nlohmann::json to_json(const LsmDemoResult& r);

// {"coefficients", "eps", "eps_prime", "kappa", "c", "queries", "mode", "seed", ...}
nlohmann::json regression_report(const RegressionResult& r, double kappa, double c,
                                 std::uint64_t seed);

nlohmann::json error_report(ErrorCode code, const std::string& message);

}  // namespace qnewton
