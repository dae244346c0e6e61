#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tlink/tensor.hpp"

namespace tlink {

enum class ConstellationKind { Qam, Psk };

/// Finite symbol alphabet with unit average energy. QAM orders must be even
/// powers of two (square grids, Gray coded per rail); PSK orders are powers
/// of two with a Gray-coded ring. Point index == bit pattern of the symbol.
class Constellation {
 public:
  Constellation(ConstellationKind kind, int order);

  ConstellationKind kind() const { return kind_; }
  int order() const { return order_; }
  int bits_per_symbol() const { return bits_; }
  const std::vector<cxd>& points() const { return points_; }
  cxd point(int index) const { return points_[index]; }

  /// Index of the nearest point (Euclidean); ties break to the smallest index.
  int nearest(cxd value) const;

  cxd modulate(std::uint32_t bits) const { return points_[bits]; }
  std::uint32_t demodulate(cxd value) const {
    return static_cast<std::uint32_t>(nearest(value));
  }

  static std::string kind_name(ConstellationKind k);

 private:
  ConstellationKind kind_;
  int order_;
  int bits_;
  std::vector<cxd> points_;
  // QAM helpers
  int side_ = 0;          // levels per rail
  double scale_ = 1.0;    // rail scaling for unit average energy
  int nearest_qam(cxd value) const;
  int nearest_psk(cxd value) const;
};

/// Entry-wise nearest-point projection onto the alphabet.
Mat project_alphabet(const Mat& m, const Constellation& c);

/// Gray-mapped modulation of a bit string; length must be a multiple of
/// bits_per_symbol.
Vec modulate_bits(const std::vector<std::uint8_t>& bits, const Constellation& c);
std::vector<std::uint8_t> demodulate(const Vec& symbols, const Constellation& c);

}  // namespace tlink
