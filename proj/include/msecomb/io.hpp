#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "msecomb/combine.hpp"
#include "msecomb/expect.hpp"
#include "msecomb/risk.hpp"
#include "msecomb/sim.hpp"

namespace msecomb {

/// Fixed notation with 12 significant digits and '.' as decimal point,
/// independent of the global locale. Non-finite values print as nan/inf/-inf.
std::string format_fixed12(double v);

/// Header `g,value` plus an optional constant parameter column.
void write_curve_csv(std::ostream& os, const RiskCurve& curve, const std::string& param_name = {},
                     double param_value = 0.0);

/// Header `estimator,bias,variance,mse,mc_se`.
void write_mse_csv(std::ostream& os, const MseTable& table);

void write_local_sweep_csv(std::ostream& os, const LocalSweepResult& result);

using nlohmann::json;

void to_json(json& j, const EstimatorInput& v);
void from_json(const json& j, EstimatorInput& v);
void to_json(json& j, const CombinedEstimate& v);
void from_json(const json& j, CombinedEstimate& v);
void to_json(json& j, const EngineConfig& v);
void from_json(const json& j, EngineConfig& v);
void to_json(json& j, const RiskCurve& v);
void from_json(const json& j, RiskCurve& v);
void to_json(json& j, const MinimaxVerdict& v);
void from_json(const json& j, MinimaxVerdict& v);
void to_json(json& j, const IvDgp& v);
void from_json(const json& j, IvDgp& v);
void to_json(json& j, const StratifiedDgp& v);
void from_json(const json& j, StratifiedDgp& v);
void to_json(json& j, const TwoRateDgp& v);
void from_json(const json& j, TwoRateDgp& v);
void to_json(json& j, const DgpSpec& v);
void from_json(const json& j, DgpSpec& v);
void to_json(json& j, const MseRow& v);
void from_json(const json& j, MseRow& v);
void to_json(json& j, const MseTable& v);
void from_json(const json& j, MseTable& v);
void to_json(json& j, const LocalSweepPoint& v);
void from_json(const json& j, LocalSweepPoint& v);

/// Minimax output: {claim, max_gain, max_loss, dominates, engine, grid, ...}.
json claim_to_json(const ClaimVerdict& verdict, const EngineConfig& engine,
                   const std::vector<double>& grid);

}  // namespace msecomb
