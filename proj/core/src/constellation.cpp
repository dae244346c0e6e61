#include "tlink/constellation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tlink {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

int gray(int v) { return v ^ (v >> 1); }

}  // namespace

Constellation::Constellation(ConstellationKind kind, int order)
    : kind_(kind), order_(order) {
  if (!is_pow2(order) || order < 2)
    throw std::invalid_argument("constellation order must be a power of two >= 2");
  bits_ = 0;
  for (int v = order; v > 1; v >>= 1) ++bits_;
  points_.resize(order);

  if (kind_ == ConstellationKind::Qam) {
    if (bits_ % 2 != 0)
      throw std::invalid_argument("QAM order must be an even power of two");
    side_ = 1 << (bits_ / 2);
    scale_ = std::sqrt(3.0 / (2.0 * (static_cast<double>(side_) * side_ - 1)));
    // index = [I bits | Q bits], each rail Gray coded over its amplitude rank
    for (int li = 0; li < side_; ++li)
      for (int lq = 0; lq < side_; ++lq) {
        const int idx = (gray(li) << (bits_ / 2)) | gray(lq);
        points_[idx] = cxd((2 * li - (side_ - 1)) * scale_,
                           (2 * lq - (side_ - 1)) * scale_);
      }
  } else {
    // Gray ring: the point at angle rank a carries bit pattern gray(a)
    for (int a = 0; a < order; ++a) {
      const double t = 2.0 * std::numbers::pi * a / order;
      points_[gray(a)] = cxd(std::cos(t), std::sin(t));
    }
  }
}

namespace {

// Exact scan over a small candidate set with the global tie rule: smaller
// distance wins, equal distance goes to the smaller point index.
int pick(const std::vector<cxd>& points, cxd v, const int* cand, int n) {
  int best = cand[0];
  double best_d = std::norm(v - points[best]);
  for (int i = 1; i < n; ++i) {
    const double d = std::norm(v - points[cand[i]]);
    if (d < best_d || (d == best_d && cand[i] < best)) {
      best = cand[i];
      best_d = d;
    }
  }
  return best;
}

}  // namespace

int Constellation::nearest_qam(cxd value) const {
  const int half = bits_ / 2;
  auto rail_levels = [&](double x, int out[2]) {
    const double pos = (x / scale_ + (side_ - 1)) / 2.0;
    long f = std::lround(std::floor(pos));
    if (f < 0) f = 0;
    if (f > side_ - 1) f = side_ - 1;
    out[0] = static_cast<int>(f);
    out[1] = static_cast<int>(f + 1 <= side_ - 1 ? f + 1 : f);
  };
  int li[2], lq[2];
  rail_levels(value.real(), li);
  rail_levels(value.imag(), lq);
  int cand[4], n = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int idx = (gray(li[a]) << half) | gray(lq[b]);
      bool dup = false;
      for (int i = 0; i < n; ++i) dup = dup || cand[i] == idx;
      if (!dup) cand[n++] = idx;
    }
  return pick(points_, value, cand, n);
}

int Constellation::nearest_psk(cxd value) const {
  if (value == cxd(0.0, 0.0)) return 0;  // all points tie; smallest index
  const double af =
      std::arg(value) * order_ / (2.0 * std::numbers::pi);
  long a0 = std::lround(std::floor(af));
  auto wrap = [&](long a) {
    a %= order_;
    if (a < 0) a += order_;
    return static_cast<int>(a);
  };
  int cand[2] = {gray(wrap(a0)), gray(wrap(a0 + 1))};
  if (cand[0] == cand[1]) return cand[0];
  return pick(points_, value, cand, 2);
}

int Constellation::nearest(cxd value) const {
  return kind_ == ConstellationKind::Qam ? nearest_qam(value)
                                         : nearest_psk(value);
}

std::string Constellation::kind_name(ConstellationKind k) {
  return k == ConstellationKind::Qam ? "qam" : "psk";
}

Mat project_alphabet(const Mat& m, const Constellation& c) {
  Mat out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = c.point(c.nearest(m(i, j)));
  return out;
}

Vec modulate_bits(const std::vector<std::uint8_t>& bits, const Constellation& c) {
  const int bps = c.bits_per_symbol();
  if (bits.size() % static_cast<size_t>(bps) != 0)
    throw std::invalid_argument("bit count is not a multiple of bits per symbol");
  Vec out(static_cast<Index>(bits.size()) / bps);
  for (Index s = 0; s < out.size(); ++s) {
    std::uint32_t w = 0;
    for (int b = 0; b < bps; ++b)
      w = (w << 1) | (bits[static_cast<size_t>(s) * bps + b] & 1u);
    out(s) = c.modulate(w);
  }
  return out;
}

std::vector<std::uint8_t> demodulate(const Vec& symbols, const Constellation& c) {
  const int bps = c.bits_per_symbol();
  std::vector<std::uint8_t> bits(static_cast<size_t>(symbols.size()) * bps);
  for (Index s = 0; s < symbols.size(); ++s) {
    const std::uint32_t w = c.demodulate(symbols(s));
    for (int b = 0; b < bps; ++b)
      bits[static_cast<size_t>(s) * bps + b] =
          static_cast<std::uint8_t>((w >> (bps - 1 - b)) & 1u);
  }
  return bits;
}

}  // namespace tlink
