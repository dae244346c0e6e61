#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlink/channel.hpp"
#include "tlink/constellation.hpp"
#include "tlink/receivers.hpp"

namespace tlink {

enum class TxMode { Uncoded, Kr, Rc };

std::string mode_name(TxMode m);
TxMode mode_from_name(const std::string& name);

/// Full experiment description. Loadable from a flat key=value file; every
/// field has a CLI override where the tool exposes one.
struct SimConfig {
  // system.*
  Index n = 128;
  Index m_t = 2;
  Index m_r = 2;
  Index k = 8;
  Index q = 1;
  Index cp_len = 32;
  // pilots.*
  Index delta_f = 3;
  Index delta_k = 8;
  // constellation.*
  ConstellationKind const_kind = ConstellationKind::Qam;
  int const_order = 4;
  // channel.*
  std::vector<double> delays_ns{0.0, 110.0, 190.0, 410.0};
  std::vector<double> powers_db{0.0, -9.7, -19.2, -22.8};
  double sample_rate_hz = 1e7;
  /// Direct sample-spaced taps, overriding the ns/dB profile when present.
  std::optional<PowerDelayProfile> taps_override;
  // coding.*
  bool per_subcarrier_coding = false;
  // top level
  TxMode mode = TxMode::Uncoded;
  std::vector<ReceiverKind> receivers{ReceiverKind::Zf, ReceiverKind::Ilsp};
  std::vector<double> ebn0_grid_db{4, 8, 12, 16, 20, 24};
  int trials = 500;
  std::uint64_t seed = 1;

  PowerDelayProfile profile() const;
  Constellation constellation() const;

  /// Noise variance per received entry for a given Eb/N0 in dB: unit-energy
  /// symbols, E_b = 1/log2(order) per transmit stream, M_T streams
  /// superimposed per receive antenna; pilot and prefix overhead excluded.
  double sigma2(double ebn0_db) const;

  void validate() const;

  std::string canonical_text() const;
  std::uint64_t digest() const;
};

/// Parses the flat key=value format (one pair per line, '#' comments).
/// Unknown keys are rejected.
SimConfig parse_config_text(const std::string& text);
SimConfig load_config(const std::string& path);

}  // namespace tlink
