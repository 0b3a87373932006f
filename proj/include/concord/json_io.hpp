#pragma once

#include <json.hpp>

#include "concord/consensus.hpp"
#include "concord/estimatability.hpp"
#include "concord/evaluation.hpp"
#include "concord/impute_result.hpp"
#include "concord/multi_impute.hpp"
#include "concord/synthetic.hpp"

namespace concord {

using Json = nlohmann::ordered_json;

Json matrix_json(const Matrix& M);  // NaN becomes null
Json to_json(const RatingMatrix& M);
Json to_json(const EstimatabilityReport& report, const RatingMatrix& M);
Json to_json(const WeightMatrix& W, const RatingMatrix& M);
Json to_json(const PairReport& report, const RatingMatrix& M);
Json to_json(const ImputationResult& result);
Json to_json(const MiResult& result);
Json to_json(const SynthInstance& inst);
Json to_json(const EvalReport& report);

}  // namespace concord
