#include "msecomb/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace msecomb {

std::string format_fixed12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  int decimals = 11;
  if (v != 0.0) {
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
    decimals = std::clamp(11 - exponent, 0, 340);
  }
  char buf[400];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

void write_curve_csv(std::ostream& os, const RiskCurve& curve, const std::string& param_name,
                     double param_value) {
  os << "g,value";
  if (!param_name.empty()) os << ',' << param_name;
  os << '\n';
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    os << format_fixed12(curve.grid[i]) << ',' << format_fixed12(curve.values[i]);
    if (!param_name.empty()) os << ',' << format_fixed12(param_value);
    os << '\n';
  }
}

void write_mse_csv(std::ostream& os, const MseTable& table) {
  os << "estimator,bias,variance,mse,mc_se\n";
  for (const auto& r : table.rows) {
    os << r.estimator << ',' << format_fixed12(r.bias) << ',' << format_fixed12(r.variance) << ','
       << format_fixed12(r.mse) << ',' << format_fixed12(r.mc_se) << '\n';
  }
}

void write_local_sweep_csv(std::ostream& os, const LocalSweepResult& result) {
  os << "h,g,empirical,empirical_se,predicted,sigma2_c,sigma2_e,mu\n";
  for (const auto& p : result.points) {
    os << format_fixed12(p.h) << ',' << format_fixed12(p.g) << ',' << format_fixed12(p.empirical)
       << ',' << format_fixed12(p.empirical_se) << ',' << format_fixed12(p.predicted) << ','
       << format_fixed12(p.sigma2_c) << ',' << format_fixed12(p.sigma2_e) << ','
       << format_fixed12(p.mu) << '\n';
  }
}

void to_json(json& j, const EstimatorInput& v) {
  j = {{"beta_c", v.beta_c}, {"beta_e", v.beta_e}, {"var_c", v.var_c},
       {"var_e", v.var_e},   {"cov_ce", v.cov_ce}};
}

void from_json(const json& j, EstimatorInput& v) {
  j.at("beta_c").get_to(v.beta_c);
  j.at("beta_e").get_to(v.beta_e);
  j.at("var_c").get_to(v.var_c);
  j.at("var_e").get_to(v.var_e);
  v.cov_ce = j.contains("cov_ce") ? j.at("cov_ce").get<double>() : v.var_e;
}

void to_json(json& j, const CombinedEstimate& v) {
  j = {{"beta", v.beta}, {"weight", v.weight}, {"est_mse", v.est_mse}};
}

void from_json(const json& j, CombinedEstimate& v) {
  j.at("beta").get_to(v.beta);
  j.at("weight").get_to(v.weight);
  j.at("est_mse").get_to(v.est_mse);
}

void to_json(json& j, const EngineConfig& v) {
  j = {{"method", method_name(v.method)}, {"nodes", v.nodes}, {"seed", v.seed},
       {"halton_base", v.halton_base},    {"halton_skip", v.halton_skip}};
}

void from_json(const json& j, EngineConfig& v) {
  v.method = parse_method(j.at("method").get<std::string>());
  j.at("nodes").get_to(v.nodes);
  v.seed = j.value("seed", std::uint64_t{0});
  v.halton_base = j.value("halton_base", 2u);
  v.halton_skip = j.value("halton_skip", std::uint64_t{0});
}

void to_json(json& j, const RiskCurve& v) {
  j = {{"grid", v.grid}, {"values", v.values}, {"max_gain", v.max_gain}, {"max_loss", v.max_loss}};
}

void from_json(const json& j, RiskCurve& v) {
  v = RiskCurve::from_values(j.at("grid").get<std::vector<double>>(),
                             j.at("values").get<std::vector<double>>());
}

void to_json(json& j, const MinimaxVerdict& v) {
  j = {{"max_gain", v.max_gain}, {"max_loss", v.max_loss}, {"dominates", v.dominates}};
}

void from_json(const json& j, MinimaxVerdict& v) {
  j.at("max_gain").get_to(v.max_gain);
  j.at("max_loss").get_to(v.max_loss);
  j.at("dominates").get_to(v.dominates);
}

void to_json(json& j, const IvDgp& v) {
  j = {{"kind", "iv"},
       {"n", v.n},
       {"beta0", v.beta0},
       {"endo", v.endo},
       {"instr_strength", v.instr_strength},
       {"noise_sd", v.noise_sd}};
}

void from_json(const json& j, IvDgp& v) {
  j.at("n").get_to(v.n);
  j.at("beta0").get_to(v.beta0);
  j.at("endo").get_to(v.endo);
  j.at("instr_strength").get_to(v.instr_strength);
  j.at("noise_sd").get_to(v.noise_sd);
}

void to_json(json& j, const StratifiedDgp& v) {
  j = {{"kind", "stratified"},
       {"n", v.n},
       {"strata_count", v.strata_count()},
       {"effects", v.effects},
       {"probs", v.probs},
       {"noise_sd", v.noise_sd}};
}

void from_json(const json& j, StratifiedDgp& v) {
  j.at("n").get_to(v.n);
  j.at("effects").get_to(v.effects);
  j.at("probs").get_to(v.probs);
  j.at("noise_sd").get_to(v.noise_sd);
}

void to_json(json& j, const TwoRateDgp& v) {
  j = {{"kind", "two-rate"},
       {"n", v.n},
       {"effect", v.effect},
       {"cef_shape", v.shape == CefShape::curved ? "curved" : "linear"},
       {"slope", v.slope},
       {"curvature", v.curvature},
       {"cutoff", v.cutoff},
       {"bandwidth_const", v.bandwidth_const},
       {"bandwidth_exponent", v.bandwidth_exponent},
       {"noise_sd", v.noise_sd}};
}

void from_json(const json& j, TwoRateDgp& v) {
  j.at("n").get_to(v.n);
  j.at("effect").get_to(v.effect);
  const auto shape = j.at("cef_shape").get<std::string>();
  if (shape != "linear" && shape != "curved") throw std::invalid_argument("unknown cef_shape " + shape);
  v.shape = shape == "curved" ? CefShape::curved : CefShape::linear;
  j.at("slope").get_to(v.slope);
  j.at("curvature").get_to(v.curvature);
  j.at("cutoff").get_to(v.cutoff);
  j.at("bandwidth_const").get_to(v.bandwidth_const);
  j.at("bandwidth_exponent").get_to(v.bandwidth_exponent);
  j.at("noise_sd").get_to(v.noise_sd);
}

void to_json(json& j, const DgpSpec& v) {
  std::visit([&j](const auto& d) { to_json(j, d); }, v);
}

void from_json(const json& j, DgpSpec& v) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "iv") {
    v = j.get<IvDgp>();
  } else if (kind == "stratified") {
    v = j.get<StratifiedDgp>();
  } else if (kind == "two-rate") {
    v = j.get<TwoRateDgp>();
  } else {
    throw std::invalid_argument("unknown dgp kind '" + kind + "'");
  }
}

void to_json(json& j, const MseRow& v) {
  j = {{"estimator", v.estimator}, {"bias", v.bias},   {"variance", v.variance},
       {"mse", v.mse},             {"mc_se", v.mc_se}};
}

void from_json(const json& j, MseRow& v) {
  j.at("estimator").get_to(v.estimator);
  j.at("bias").get_to(v.bias);
  j.at("variance").get_to(v.variance);
  j.at("mse").get_to(v.mse);
  j.at("mc_se").get_to(v.mc_se);
}

void to_json(json& j, const MseTable& v) {
  j = {{"metadata", {{"dgp", v.dgp}, {"R", v.reps}, {"seed", v.seed}, {"failures", v.failures}}},
       {"rows", v.rows}};
}

void from_json(const json& j, MseTable& v) {
  const auto& meta = j.at("metadata");
  meta.at("dgp").get_to(v.dgp);
  meta.at("R").get_to(v.reps);
  meta.at("seed").get_to(v.seed);
  meta.at("failures").get_to(v.failures);
  j.at("rows").get_to(v.rows);
}

void to_json(json& j, const LocalSweepPoint& v) {
  j = {{"h", v.h},
       {"g", v.g},
       {"empirical", v.empirical},
       {"empirical_se", v.empirical_se},
       {"predicted", v.predicted},
       {"sigma2_c", v.sigma2_c},
       {"sigma2_e", v.sigma2_e},
       {"mu", v.mu}};
}

void from_json(const json& j, LocalSweepPoint& v) {
  j.at("h").get_to(v.h);
  j.at("g").get_to(v.g);
  j.at("empirical").get_to(v.empirical);
  j.at("empirical_se").get_to(v.empirical_se);
  j.at("predicted").get_to(v.predicted);
  j.at("sigma2_c").get_to(v.sigma2_c);
  j.at("sigma2_e").get_to(v.sigma2_e);
  j.at("mu").get_to(v.mu);
}

json claim_to_json(const ClaimVerdict& verdict, const EngineConfig& engine,
                   const std::vector<double>& grid) {
  json j = {{"claim", verdict.claim},
            {"max_gain", verdict.verdict.max_gain},
            {"max_loss", verdict.verdict.max_loss},
            {"dominates", verdict.verdict.dominates},
            {"engine", engine},
            {"grid", {{"min", grid.front()}, {"max", grid.back()}, {"points", grid.size()}}},
            {"validated_region", verdict.in_validated_region}};
  if (verdict.claim == "prop1.3") j["lambda"] = verdict.parameter;
  if (verdict.claim == "thm2.3") j["mu_sd"] = verdict.parameter;
  if (!verdict.note.empty()) j["note"] = verdict.note;
  return j;
}

}  // namespace msecomb
