#pragma once

#include "gwi/process.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace gwi {

/// Runs body(i) for i in [0, count) on up to `threads` workers, each taking a
/// contiguous block. The first exception thrown by any worker is rethrown.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                         std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t block = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * block;
    const std::size_t end = std::min(count, begin + block);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

enum class EnsembleKind { kPathEndpoint, kStationary, kAdditive };

[[nodiscard]] inline std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kPathEndpoint: return "path_endpoint";
    case EnsembleKind::kStationary: return "stationary";
    case EnsembleKind::kAdditive: return "additive";
  }
  return "unknown";
}

struct EnsembleOptions {
  std::size_t count = 1;
  std::uint64_t seed = 0;
  int n_steps = 0;     // path_endpoint and additive
  double tol = 1e-6;   // stationary
  unsigned threads = 1;
};

struct SampleMeta {
  EnsembleKind kind = EnsembleKind::kPathEndpoint;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  int n_steps = 0;
  std::optional<int> truncation;  // N for stationary ensembles
  std::uint64_t params_hash = 0;
};

/// Monte Carlo draws with the metadata needed to reproduce them.
struct SampleSet {
  std::vector<Count> draws;
  SampleMeta meta;
};

/// `count` independent draws; draw i depends only on (seed, i, params), never
/// on the number of workers.
[[nodiscard]] inline SampleSet ensemble(EnsembleKind kind, const ModelParams& params,
                                        const EnsembleOptions& opt) {
  if (opt.count < 1) throw std::invalid_argument("ensemble count must be at least 1");
  SampleSet out;
  out.draws.assign(opt.count, 0);
  out.meta = SampleMeta{kind, opt.seed, opt.count, opt.n_steps, std::nullopt,
                        params_hash(params)};
  const RandomStream master(opt.seed);

  switch (kind) {
    case EnsembleKind::kPathEndpoint:
      parallel_for(opt.count, opt.threads, [&](std::size_t i) {
        out.draws[i] = simulate_endpoint(params, opt.n_steps, opt.seed, i);
      });
      break;
    case EnsembleKind::kStationary: {
      const double rho = detail::checked_stationary_rho(params);
      out.meta.truncation = stationary_truncation(rho, opt.tol);
      parallel_for(opt.count, opt.threads, [&](std::size_t i) {
        out.draws[i] = sample_stationary(params, opt.tol, master.derive(i)).value;
      });
      break;
    }
    case EnsembleKind::kAdditive: {
      const auto form = is_zero(params.eps) ? AdditiveForm::kPure : AdditiveForm::kWithImmigration;
      parallel_for(opt.count, opt.threads, [&](std::size_t i) {
        RandomStream rng = master.derive(i);
        out.draws[i] = sample_additive(opt.n_steps, params, rng, form);
      });
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

[[nodiscard]] inline std::string sample_csv(const SampleSet& s) {
  std::string out = "index,value\n";
  out.reserve(out.size() + s.draws.size() * 8);
  for (std::size_t i = 0; i < s.draws.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(s.draws[i]);
    out += '\n';
  }
  return out;
}

[[nodiscard]] inline nlohmann::json sample_meta_json(const SampleSet& s,
                                                     const ModelParams& params) {
  nlohmann::json j{{"kind", to_string(s.meta.kind)},
                   {"seed", s.meta.seed},
                   {"count", s.meta.count},
                   {"n_steps", s.meta.n_steps},
                   {"params_hash", s.meta.params_hash},
                   {"params", to_json(params)}};
  j["truncation"] = s.meta.truncation ? nlohmann::json(*s.meta.truncation) : nlohmann::json();
  return j;
}

/// Parses the body written by sample_csv.
[[nodiscard]] inline std::vector<Count> parse_sample_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "index,value") {
    throw std::invalid_argument("sample CSV: missing 'index,value' header");
  }
  std::vector<Count> draws;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("sample CSV: malformed row");
    if (std::stoull(line.substr(0, comma)) != draws.size()) {
      throw std::invalid_argument("sample CSV: indices out of order");
    }
    draws.push_back(std::stoull(line.substr(comma + 1)));
  }
  return draws;
}

}  // namespace gwi
