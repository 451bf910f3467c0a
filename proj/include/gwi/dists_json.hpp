#pragma once

#include "gwi/dists.hpp"

#include <json.hpp>

#include <initializer_list>
#include <stdexcept>
#include <string>

namespace gwi {

namespace detail {

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw std::invalid_argument(where + ": unknown field '" + key + "'");
  }
  for (const char* a : allowed) {
    if (std::string(a) != "log_factor" && !j.contains(a)) {
      throw std::invalid_argument(where + ": missing field '" + a + "'");
    }
  }
}

}  // namespace detail

/// {"kind": "discrete_pareto", "alpha": 0.8, "log_factor": 0.0} and friends.
[[nodiscard]] inline nlohmann::json to_json(const DistSpec& spec) {
  using nlohmann::json;
  return std::visit(
      overloaded{
          [](const Constant& c) { return json{{"kind", "constant"}, {"value", c.value()}}; },
          [](const Bernoulli& b) { return json{{"kind", "bernoulli"}, {"p", b.p()}}; },
          [](const Binomial& b) {
            return json{{"kind", "binomial"}, {"n", b.trials()}, {"p", b.p()}};
          },
          [](const Poisson& p) { return json{{"kind", "poisson"}, {"rate", p.rate()}}; },
          [](const Geometric& g) { return json{{"kind", "geometric"}, {"p", g.p()}}; },
          [](const FinitePmf& f) {
            return json{{"kind", "finite_pmf"}, {"weights", f.weights()}};
          },
          [](const DiscretePareto& d) {
            return json{{"kind", "discrete_pareto"},
                        {"alpha", d.alpha()},
                        {"log_factor", d.log_factor()}};
          },
      },
      spec);
}

[[nodiscard]] inline DistSpec dist_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("distribution: expected an object with a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  const std::string where = "distribution '" + kind + "'";
  if (kind == "constant") {
    detail::require_keys(j, {"kind", "value"}, where);
    return Constant(j["value"].get<Count>());
  }
  if (kind == "bernoulli") {
    detail::require_keys(j, {"kind", "p"}, where);
    return Bernoulli(j["p"].get<double>());
  }
  if (kind == "binomial") {
    detail::require_keys(j, {"kind", "n", "p"}, where);
    return Binomial(j["n"].get<Count>(), j["p"].get<double>());
  }
  if (kind == "poisson") {
    detail::require_keys(j, {"kind", "rate"}, where);
    return Poisson(j["rate"].get<double>());
  }
  if (kind == "geometric") {
    detail::require_keys(j, {"kind", "p"}, where);
    return Geometric(j["p"].get<double>());
  }
  if (kind == "finite_pmf") {
    detail::require_keys(j, {"kind", "weights"}, where);
    return FinitePmf(j["weights"].get<std::vector<double>>());
  }
  if (kind == "discrete_pareto") {
    detail::require_keys(j, {"kind", "alpha", "log_factor"}, where);
    return DiscretePareto(j["alpha"].get<double>(), j.value("log_factor", 0.0));
  }
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

/// FNV-1a over a canonical JSON dump; used to tag artifacts with their inputs.
[[nodiscard]] inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gwi
