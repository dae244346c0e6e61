#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlink/config.hpp"

namespace tlink {

struct SerPoint {
  double ebn0_db = 0.0;
  long long errors = 0;
  long long symbols = 0;
  double ser() const {
    return symbols > 0 ? static_cast<double>(errors) / static_cast<double>(symbols)
                       : 0.0;
  }
  /// Binomial standard error of the SER estimate.
  double std_error() const {
    if (symbols <= 0) return 0.0;
    const double p = ser();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(symbols));
  }
};

struct SerCurve {
  std::string receiver;
  std::vector<SerPoint> points;
  int trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
};

/// Error/symbol counts of one trial: [stream][ebn0 point] -> {errors, symbols}.
/// Streams follow the configured receiver order; random-coding receivers add
/// an "_s" and an "_c" stream after their combined one.
struct TrialResult {
  std::vector<std::vector<SerPoint>> counts;
};

std::vector<std::string> stream_names(const SimConfig& cfg);

/// One Monte Carlo realization: one channel and grid draw, one noise draw per
/// Eb/N0 point shared by all receivers. Deterministic in (seed, trial_index).
TrialResult run_trial(const SimConfig& cfg, std::uint64_t trial_index);

/// Aggregates run_trial over the configured trial count with the given number
/// of worker threads. Results are independent of the worker count. A set
/// stop flag ends the sweep early with the completed trials aggregated.
std::vector<SerCurve> run_sweep(const SimConfig& cfg, int workers = 1,
                                const std::atomic<bool>* stop_flag = nullptr);

/// CSV with the fixed header receiver,ebn0_db,trials,symbols,errors,ser,stderr.
void write_csv(std::ostream& os, const std::vector<SerCurve>& curves);

struct SelfCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Fast internal consistency battery: algebraic identities, the transmit
/// chain against the contraction model, and noiseless receiver exactness.
std::vector<SelfCheck> run_selftest();

}  // namespace tlink
