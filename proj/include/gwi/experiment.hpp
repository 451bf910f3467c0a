#pragma once

#include "gwi/analytics.hpp"
#include "gwi/ensemble.hpp"
#include "gwi/exact_law.hpp"
#include "gwi/process.hpp"
#include "gwi/stats.hpp"
#include "gwi/tailstats.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwi {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Action { kSimulate, kStationary, kAnalytics, kTails, kVerify };

struct ExperimentConfig {
  Action action = Action::kAnalytics;
  ModelParams model;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int n_steps = 10;
  std::size_t path_count = 1000;
  std::size_t mc_count = 100000;
  double tol = 1e-6;
  std::vector<double> levels{0.1, 0.01, 0.001};
  std::string suite;                   // verify only
  double rel_tolerance = 0.2;          // asymptotic tail checks
  std::optional<double> gamma;         // large-deviations suite
  nlohmann::json source;               // the parsed document, for hashing
};

[[nodiscard]] inline Action parse_action(const std::string& s) {
  if (s == "simulate") return Action::kSimulate;
  if (s == "stationary") return Action::kStationary;
  if (s == "analytics") return Action::kAnalytics;
  if (s == "tails") return Action::kTails;
  if (s == "verify") return Action::kVerify;
  throw ConfigError("unknown action '" + s + "'");
}

[[nodiscard]] inline std::string to_string(Action a) {
  switch (a) {
    case Action::kSimulate: return "simulate";
    case Action::kStationary: return "stationary";
    case Action::kAnalytics: return "analytics";
    case Action::kTails: return "tails";
    case Action::kVerify: return "verify";
  }
  return "unknown";
}

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"moments",         "embedding",
                                              "additive",        "stationary-tail",
                                              "regular-variation", "large-deviations"};
  return names;
}

/// Validates a config document. Unknown fields, wrong types and out-of-range
/// values raise ConfigError.
[[nodiscard]] inline ExperimentConfig parse_config(const nlohmann::json& j) {
  static const std::vector<std::string> known{
      "action", "model",   "seed",   "output_dir", "n_steps",   "path_count",
      "mc_count", "tol",   "levels", "suite",      "tolerance", "gamma"};
  if (!j.is_object()) throw ConfigError("config: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("config: unknown field '" + key + "'");
    }
  }
  if (!j.contains("action") || !j.contains("model")) {
    throw ConfigError("config: 'action' and 'model' are required");
  }
  for (const char* key : {"seed", "path_count", "mc_count"}) {
    if (!j.contains(key)) continue;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(std::string("config: '") + key + "' must be a non-negative integer");
    }
  }
  if (j.contains("n_steps") && !j.at("n_steps").is_number_integer()) {
    throw ConfigError("config: 'n_steps' must be an integer");
  }
  ExperimentConfig c;
  c.source = j;
  try {
    c.action = parse_action(j.at("action").get<std::string>());
    c.model = model_from_json(j.at("model"));
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("n_steps")) c.n_steps = j.at("n_steps").get<int>();
    if (j.contains("path_count")) c.path_count = j.at("path_count").get<std::size_t>();
    if (j.contains("mc_count")) c.mc_count = j.at("mc_count").get<std::size_t>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<double>>();
    if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
    if (j.contains("tolerance")) c.rel_tolerance = j.at("tolerance").get<double>();
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.n_steps < 0) throw ConfigError("config: n_steps must be non-negative");
  if (c.path_count < 1 || c.mc_count < 2) {
    throw ConfigError("config: path_count >= 1 and mc_count >= 2 required");
  }
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("config: tol must lie in (0, 1)");
  if (!(c.rel_tolerance > 0.0)) throw ConfigError("config: tolerance must be positive");
  if (c.levels.empty()) throw ConfigError("config: levels must be non-empty");
  for (double l : c.levels) {
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("config: levels must lie in (0, 1)");
  }
  if (c.action == Action::kVerify) {
    const auto& s = verify_suites();
    if (c.suite != "all" && std::find(s.begin(), s.end(), c.suite) == s.end()) {
      throw ConfigError("config: unknown suite '" + c.suite + "'");
    }
  }
  return c;
}

[[nodiscard]] inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Verification outcomes

enum class Status { kPass, kFail, kUnreliable };

[[nodiscard]] inline std::string to_string(Status s) {
  switch (s) {
    case Status::kPass: return "pass";
    case Status::kFail: return "fail";
    case Status::kUnreliable: return "unreliable";
  }
  return "unknown";
}

struct VerificationOutcome {
  std::string name;
  Status status = Status::kFail;
  double observed = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;  // absolute
  double runtime_s = 0.0;
};

/// Pass iff |observed - predicted| <= tolerance, unless flagged unreliable.
[[nodiscard]] inline VerificationOutcome make_outcome(std::string name, double observed,
                                                      double predicted, double tolerance,
                                                      bool unreliable = false) {
  VerificationOutcome o{std::move(name), Status::kFail, observed, predicted, tolerance, 0.0};
  if (unreliable) {
    o.status = Status::kUnreliable;
  } else if (std::isfinite(observed) && std::isfinite(predicted) &&
             std::fabs(observed - predicted) <= tolerance) {
    o.status = Status::kPass;
  }
  return o;
}

/// One-sided variant: pass iff observed <= bound.
[[nodiscard]] inline VerificationOutcome make_upper_outcome(std::string name, double observed,
                                                            double bound) {
  VerificationOutcome o{std::move(name), Status::kFail, observed, bound, 0.0, 0.0};
  if (std::isfinite(observed) && observed <= bound) o.status = Status::kPass;
  return o;
}

namespace detail {

inline std::optional<double> finite_mean(const DistSpec& d) {
  const ExtendedReal m = mean(d);
  if (m.is_infinite()) return std::nullopt;
  return m.value();
}

inline std::vector<VerificationOutcome> verify_moments(const ExperimentConfig& c,
                                                       unsigned threads) {
  std::vector<VerificationOutcome> out;
  const MeanStructure ms = mean_structure(c.model);
  const auto m_eps = finite_mean(c.model.eps);
  const auto ex0 = finite_mean(c.model.x0);
  const auto exm1 = finite_mean(c.model.xm1);
  const int n = std::max(1, c.n_steps);

  if (m_eps && ex0 && exm1) {
    const double predicted = expectation(ms, n, *ex0, *exm1, *m_eps);
    EnsembleOptions opt{c.path_count, c.seed, n, c.tol, threads};
    const SampleSet s = ensemble(EnsembleKind::kPathEndpoint, c.model, opt);
    const auto est = stats::mean_se(s.draws);
    out.push_back(make_outcome("mean_x" + std::to_string(n), est.mean, predicted,
                               3.0 * est.se + 1e-12 * std::max(1.0, std::fabs(predicted))));
  } else {
    out.push_back(make_outcome("mean_x" + std::to_string(n), HUGE_VAL, HUGE_VAL, 0.0, true));
  }

  const ExtendedReal vxi = variance(c.model.xi);
  const ExtendedReal veta = variance(c.model.eta);
  if (vxi.is_finite() && veta.is_finite() && ms.rho > 0.0) {
    const double second = variance_xn(ms, vxi.value(), veta.value(), n) +
                          m_seq(ms, n) * m_seq(ms, n);
    const double bound = second_moment_bound(ms, vxi.value(), veta.value(), n);
    out.push_back(make_upper_outcome("second_moment_bound_x" + std::to_string(n),
                                     second, bound * (1.0 + 1e-12)));
  }
  return out;
}

inline std::vector<VerificationOutcome> verify_embedding(const ExperimentConfig& c) {
  const int n = c.n_steps > 0 ? c.n_steps : 50;
  std::size_t mismatches = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Path p = simulate_path(c.model, n, c.seed, s);
    const TwoTypePath y = simulate_two_type(c.model, n, c.seed, s);
    for (int k = 0; k <= n; ++k) {
      const auto [a, b] = y.vectors[static_cast<std::size_t>(k)];
      mismatches += (a != p.at(k)) + (b != p.at(k - 1));
    }
  }
  return {make_outcome("embedding_mismatches", static_cast<double>(mismatches), 0.0, 0.0)};
}

inline bool small_finite_support(const ModelParams& m) {
  for (const DistSpec* d : {&m.xi, &m.eta, &m.eps, &m.x0, &m.xm1}) {
    const auto top = support_max(*d);
    if (!top || *top > 3) return false;
  }
  return true;
}

inline std::vector<VerificationOutcome> verify_additive(const ExperimentConfig& c,
                                                        unsigned threads) {
  std::vector<VerificationOutcome> out;
  const bool immigration = !is_zero(c.model.eps);
  const int n = std::max(1, c.n_steps);
  if (small_finite_support(c.model) && n <= 3) {
    for (int k = 1; k <= n; ++k) {
      const exact::Pmf a = exact::recursion_pmf(c.model, k);
      const exact::Pmf b = exact::additive_pmf(c.model, k, immigration);
      double worst = 0.0;
      for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        const double pa = i < a.size() ? a[i] : 0.0;
        const double pb = i < b.size() ? b[i] : 0.0;
        worst = std::max(worst, std::fabs(pa - pb));
      }
      out.push_back(make_outcome("additive_pmf_n" + std::to_string(k), worst, 0.0, 1e-9));
    }
    return out;
  }
  EnsembleOptions opt{c.path_count, c.seed, n, c.tol, threads};
  const SampleSet direct = ensemble(EnsembleKind::kPathEndpoint, c.model, opt);
  opt.seed = c.seed ^ 0x5bd1e995ULL;
  const SampleSet additive = ensemble(EnsembleKind::kAdditive, c.model, opt);
  const auto a = stats::mean_se(direct.draws);
  const auto b = stats::mean_se(additive.draws);
  out.push_back(make_outcome("additive_mean_n" + std::to_string(n), b.mean, a.mean,
                             3.0 * std::hypot(a.se, b.se)));
  return out;
}

/// Predicted tail ratio and reference law for the configured model: the
/// stationary tail against eps when eps is regularly varying, otherwise the
/// time-n tail against the heavier initial law.
struct TailSetup {
  bool stationary = true;
  DistSpec reference = Constant(0);
  double predicted = 0.0;
  std::string label;
};

inline TailSetup tail_setup(const ExperimentConfig& c) {
  const MeanStructure ms = mean_structure(c.model);
  TailSetup t;
  if (const auto* e = std::get_if<DiscretePareto>(&c.model.eps)) {
    t.stationary = true;
    t.reference = c.model.eps;
    if (ms.m_eta == 0.0) {
      t.predicted = first_order_constant(ms.m_xi, e->alpha());
      t.label = "first_order";
    } else {
      t.predicted = stationary_tail_constant(ms, e->alpha(), 1e-10).value;
      t.label = "stationary";
    }
    return t;
  }
  const auto b0 = tail_index(c.model.x0);
  const auto bm1 = tail_index(c.model.xm1);
  if (!b0 && !bm1) throw ConfigError("tails: eps, x0 or xm1 must be discrete_pareto");
  if (!is_zero(c.model.eps)) throw ConfigError("tails: initial-law tails need eps = 0");
  t.stationary = false;
  const ExtendedReal beta0 = b0 ? ExtendedReal::finite(*b0) : ExtendedReal::infinity();
  const ExtendedReal betam1 = bm1 ? ExtendedReal::finite(*bm1) : ExtendedReal::infinity();
  const int n = std::max(1, c.n_steps);
  const TailPrediction p = predicted_tail_ratio(ms, n, beta0, betam1);
  // The ratio is taken against the heavier initial tail. With equal index and
  // log factor the two tails differ only by their scales.
  const int cmp = compare_heaviness(c.model.x0, c.model.xm1);
  t.reference = cmp >= 0 ? c.model.x0 : c.model.xm1;
  if (cmp == 0) {
    const auto& d0 = std::get<DiscretePareto>(c.model.x0);
    const auto& dm1 = std::get<DiscretePareto>(c.model.xm1);
    t.predicted = p.coef_x0 + p.coef_xm1 * dm1.scale() / d0.scale();
  } else {
    t.predicted = cmp > 0 ? p.coef_x0 : p.coef_xm1;
  }
  t.label = "time_" + std::to_string(n);
  return t;
}

inline TailReport run_tail_report(const ExperimentConfig& c, unsigned threads,
                                  const TailSetup& t) {
  EnsembleOptions opt{c.mc_count, c.seed, std::max(1, c.n_steps), c.tol, threads};
  const SampleSet s = ensemble(
      t.stationary ? EnsembleKind::kStationary : EnsembleKind::kPathEndpoint, c.model, opt);
  TailReport r = tail_ratio_curve(s, t.reference, c.levels);
  r.predicted_limit = t.predicted;
  return r;
}

inline std::vector<VerificationOutcome> verify_stationary_tail(const ExperimentConfig& c,
                                                               unsigned threads) {
  const TailSetup t = tail_setup(c);
  const TailReport r = run_tail_report(c, threads, t);
  std::vector<VerificationOutcome> out;
  for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
    const bool unreliable = r.levels[i] < 10.0 / static_cast<double>(r.sample_count);
    char level[32];
    std::snprintf(level, sizeof level, "%g", r.levels[i]);
    out.push_back(make_outcome(t.label + "_tail_ratio_level_" + level, r.ratio[i], t.predicted,
                               c.rel_tolerance * t.predicted, unreliable));
  }
  return out;
}

inline const DistSpec* first_regularly_varying(const ModelParams& m) {
  for (const DistSpec* d : {&m.eps, &m.x0, &m.xm1, &m.xi, &m.eta}) {
    if (std::holds_alternative<DiscretePareto>(*d)) return d;
  }
  return nullptr;
}

inline std::vector<VerificationOutcome> verify_regular_variation(const ExperimentConfig& c) {
  const DistSpec* spec = first_regularly_varying(c.model);
  if (spec == nullptr) throw ConfigError("regular-variation: no discrete_pareto law in model");
  std::vector<VerificationOutcome> out;
  const double alpha = std::get<DiscretePareto>(*spec).alpha();
  if (alpha != 1.0) {
    const auto k = karamata_check(*spec, {1e6});
    const double tol = 0.01 * std::fabs(k.front().target);
    out.push_back(make_outcome("karamata_x1e6", k.front().ratio, k.front().target, tol));
  }
  const PotterResult p = potter_check(*spec, 0.1, {2.0, 5.0, 10.0}, 10'000);
  out.push_back(make_outcome("potter_x0_found", p.found ? 1.0 : 0.0, 1.0, 0.0));
  out.push_back(make_outcome("potter_violations", static_cast<double>(p.violations), 0.0, 0.0));
  return out;
}

inline std::vector<VerificationOutcome> verify_large_deviations(const ExperimentConfig& c,
                                                                unsigned threads) {
  const DistSpec* spec = nullptr;
  for (const DistSpec* d : {&c.model.eps, &c.model.x0, &c.model.xm1, &c.model.xi, &c.model.eta}) {
    const auto a = tail_index(*d);
    if (a && *a > 1.0 && *a < 2.0) {
      spec = d;
      break;
    }
  }
  if (spec == nullptr) {
    throw ConfigError("large-deviations: needs a discrete_pareto law with alpha in (1, 2)");
  }
  const double m = mean(*spec).value();
  const double gamma = c.gamma.value_or(std::ceil(m + 0.25));
  const LargeDevReport rep = large_dev_check(*spec, gamma, {1, 2, 4, 8, 16}, {1.0, 2.0, 5.0, 10.0},
                                             c.mc_count, c.seed, threads);
  std::vector<VerificationOutcome> out;
  double n1_dev = 0.0;
  for (const auto& row : rep.rows) {
    if (row.n == 1) n1_dev = std::max(n1_dev, std::fabs(row.ratio - 1.0));
  }
  out.push_back(make_outcome("large_dev_n1_ratio", 1.0 + n1_dev, 1.0, 0.0));
  out.push_back(make_upper_outcome("large_dev_bounded", rep.max_upper_large,
                                   rep.slack * rep.max_upper_small));
  return out;
}

}  // namespace detail

/// Runs one verification suite; `threads` never changes the outcome.
[[nodiscard]] inline std::vector<VerificationOutcome> verify(const std::string& suite,
                                                             const ExperimentConfig& c,
                                                             unsigned threads = 1) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::vector<VerificationOutcome> out;
  if (suite == "moments") {
    out = detail::verify_moments(c, threads);
  } else if (suite == "embedding") {
    out = detail::verify_embedding(c);
  } else if (suite == "additive") {
    out = detail::verify_additive(c, threads);
  } else if (suite == "stationary-tail") {
    out = detail::verify_stationary_tail(c, threads);
  } else if (suite == "regular-variation") {
    out = detail::verify_regular_variation(c);
  } else if (suite == "large-deviations") {
    out = detail::verify_large_deviations(c, threads);
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  for (auto& o : out) o.runtime_s = elapsed / static_cast<double>(out.size());
  return out;
}

// ---------------------------------------------------------------------------
// Runs

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitFailed = 3, kExitUnreliable = 4 };

[[nodiscard]] inline int exit_code(const std::vector<VerificationOutcome>& outcomes) {
  bool unreliable = false;
  for (const auto& o : outcomes) {
    if (o.status == Status::kFail) return kExitFailed;
    unreliable = unreliable || o.status == Status::kUnreliable;
  }
  return unreliable ? kExitUnreliable : kExitOk;
}

namespace detail {

/// Writes via a temporary file and a rename so readers never see partial files.
inline void write_file(const std::filesystem::path& path, const std::string& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << body;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string num(double v) { return fmt17(v); }

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? nlohmann::json("nan") : nlohmann::json(v > 0 ? "inf" : "-inf");
}

inline nlohmann::json extended(const ExtendedReal& v) {
  return v.is_finite() ? nlohmann::json(v.value()) : nlohmann::json("inf");
}

inline nlohmann::json analytics_report(const ExperimentConfig& c) {
  const MeanStructure ms = mean_structure(c.model);
  nlohmann::json r;
  r["inputs"] = {{"model", to_json(c.model)}, {"n_steps", c.n_steps}, {"tol", c.tol}};
  r["lambda_plus"] = ms.lambda_plus;
  r["lambda_minus"] = ms.lambda_minus;
  r["rho"] = ms.rho;
  r["class"] = to_string(ms.criticality);
  r["primitive"] = ms.primitive;

  const int n = c.n_steps;
  nlohmann::json m = nlohmann::json::array();
  for (int k = 0; k <= n; ++k) m.push_back(m_seq(ms, k));
  r["m_seq"] = m;

  const ExtendedReal m_eps = mean(c.model.eps);
  const ExtendedReal ex0 = mean(c.model.x0);
  const ExtendedReal exm1 = mean(c.model.xm1);
  r["mean_eps"] = extended(m_eps);
  if (m_eps.is_finite() && ex0.is_finite() && exm1.is_finite()) {
    r["expectation"] = expectation(ms, n, ex0.value(), exm1.value(), m_eps.value());
  } else {
    r["expectation"] = "inf";
  }
  if (ex0.is_finite() && exm1.is_finite()) {
    r["first_moment_bound"] = first_moment_bound(ms, n, ex0.value(), exm1.value());
  }
  const ExtendedReal vxi = variance(c.model.xi);
  const ExtendedReal veta = variance(c.model.eta);
  if (n >= 1 && vxi.is_finite() && veta.is_finite()) {
    r["variance_xn_from_1_0"] = variance_xn(ms, vxi.value(), veta.value(), n);
    if (ms.rho > 0.0) {
      r["second_moment_bound"] = second_moment_bound(ms, vxi.value(), veta.value(), n);
    }
  }
  if (ms.criticality == Criticality::kSubcritical && m_eps.is_finite()) {
    r["stationary_mean"] = stationary_mean(ms, m_eps.value());
  }
  if (const auto* e = std::get_if<DiscretePareto>(&c.model.eps);
      e != nullptr && ms.criticality == Criticality::kSubcritical && ms.m_xi > 0.0) {
    if (ms.m_eta > 0.0) {
      const TruncatedSeries s = stationary_tail_constant(ms, e->alpha(), c.tol);
      r["stationary_tail_constant"] = {
          {"value", s.value}, {"N_used", s.terms_used}, {"remainder_bound", s.remainder_bound}};
    } else {
      r["first_order_constant"] = first_order_constant(ms.m_xi, e->alpha());
    }
  }
  if (ms.criticality == Criticality::kSubcritical && ms.rho > 0.0) {
    r["truncation"] = {{"tol", c.tol}, {"N", stationary_truncation(ms.rho, c.tol)}};
  }
  return r;
}

}  // namespace detail

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::vector<VerificationOutcome> outcomes;  // verify only
  nlohmann::json summary;
};

/// Config hash over the canonical dump of the validated document.
[[nodiscard]] inline std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a(c.source.dump());
}

/// Executes the configured action and writes its artifacts into
/// c.output_dir. Identical configs give byte-identical CSV files.
[[nodiscard]] inline RunResult run(const ExperimentConfig& c, unsigned threads = 1) {
  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  RunResult res;
  auto emit = [&](const std::string& name, const std::string& body) {
    detail::write_file(dir / name, body);
    res.files.push_back(dir / name);
  };

  nlohmann::json summary{{"action", to_string(c.action)}, {"seed", c.seed}};
  switch (c.action) {
    case Action::kSimulate: {
      std::string csv = "path,n,value\n";
      std::vector<Count> endpoints(c.path_count);
      std::vector<Path> paths(c.path_count);
      parallel_for(c.path_count, threads, [&](std::size_t i) {
        paths[i] = simulate_path(c.model, c.n_steps, c.seed, i);
      });
      for (std::size_t i = 0; i < paths.size(); ++i) {
        for (int k = -1; k <= c.n_steps; ++k) {
          csv += std::to_string(i) + ',' + std::to_string(k) + ',' +
                 std::to_string(paths[i].at(k)) + '\n';
        }
        endpoints[i] = paths[i].at(c.n_steps);
      }
      emit("paths.csv", csv);
      summary["path_count"] = c.path_count;
      summary["n_steps"] = c.n_steps;
      if (endpoints.size() >= 2) {
        const auto est = stats::mean_se(endpoints);
        summary["endpoint_mean"] = est.mean;
        summary["endpoint_se"] = est.se;
      }
      break;
    }
    case Action::kStationary: {
      EnsembleOptions opt{c.mc_count, c.seed, c.n_steps, c.tol, threads};
      SampleSet s;
      try {
        s = ensemble(EnsembleKind::kStationary, c.model, opt);
      } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
      }
      emit("samples.csv", sample_csv(s));
      summary["samples"] = sample_meta_json(s, c.model);
      const auto est = stats::mean_se(s.draws);
      summary["sample_mean"] = est.mean;
      summary["sample_se"] = est.se;
      break;
    }
    case Action::kAnalytics: {
      try {
        summary["report"] = detail::analytics_report(c);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      break;
    }
    case Action::kTails: {
      detail::TailSetup t;
      try {
        t = detail::tail_setup(c);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      const TailReport r = detail::run_tail_report(c, threads, t);
      emit("tail_report.csv", to_csv(r));
      summary["predicted_limit"] = t.predicted;
      summary["kind"] = t.label;
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
        rows.push_back({{"level", r.levels[i]},
                        {"x", r.x_grid[i]},
                        {"ratio", detail::json_number(r.ratio[i])},
                        {"ratio_se", detail::json_number(r.ratio_se(i))},
                        {"unreliable", static_cast<bool>(r.unreliable[i])}});
      }
      summary["rows"] = rows;
      break;
    }
    case Action::kVerify: {
      std::vector<std::string> suites;
      if (c.suite == "all") {
        suites = verify_suites();
      } else {
        suites = {c.suite};
      }
      std::string csv = "suite,check,status,observed,predicted,tolerance\n";
      nlohmann::json checks = nlohmann::json::array();
      for (const auto& suite : suites) {
        std::vector<VerificationOutcome> outcomes;
        try {
          outcomes = verify(suite, c, threads);
        } catch (const PreconditionError& e) {
          throw ConfigError(e.what());
        }
        for (const auto& o : outcomes) {
          csv += suite + ',' + o.name + ',' + to_string(o.status) + ',' + detail::num(o.observed) +
                 ',' + detail::num(o.predicted) + ',' + detail::num(o.tolerance) + '\n';
          checks.push_back({{"suite", suite},
                            {"check", o.name},
                            {"status", to_string(o.status)},
                            {"observed", detail::json_number(o.observed)},
                            {"predicted", detail::json_number(o.predicted)},
                            {"tolerance", detail::json_number(o.tolerance)},
                            {"runtime_s", o.runtime_s}});
          res.outcomes.push_back(o);
        }
      }
      emit("outcomes.csv", csv);
      summary["checks"] = checks;
      res.exit_code = exit_code(res.outcomes);
      summary["exit_code"] = res.exit_code;
      break;
    }
  }

  emit("summary.json", summary.dump(2) + '\n');
  const nlohmann::json manifest{{"config_hash", config_hash(c)},
                                {"seed", c.seed},
                                {"version", kVersion},
                                {"action", to_string(c.action)},
                                {"config", c.source}};
  emit("manifest.json", manifest.dump(2) + '\n');
  res.summary = std::move(summary);
  return res;
}

}  // namespace gwi
