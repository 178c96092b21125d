#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace scldpc {

// Sign-magnitude LLR on a uniform grid: value = steps * kStep with a 10-bit
// magnitude. Stored as a signed step count; sign 0 occurs only at value 0.
class FixedLlr {
 public:
  static constexpr int kMagBits = 10;
  static constexpr int kMaxSteps = (1 << kMagBits) - 1;
  static constexpr double kStep = 1.0 / 16.0;

  constexpr FixedLlr() = default;

  static constexpr FixedLlr from_steps(int steps) {
    FixedLlr v;
    v.steps_ = static_cast<std::int16_t>(steps);
    return v;
  }

  constexpr int steps() const { return steps_; }
  constexpr int magnitude() const { return steps_ < 0 ? -steps_ : steps_; }
  constexpr int sign() const { return (steps_ > 0) - (steps_ < 0); }
  constexpr double value() const { return steps_ * kStep; }

  friend constexpr bool operator==(FixedLlr a, FixedLlr b) { return a.steps_ == b.steps_; }

 private:
  std::int16_t steps_ = 0;
};

// Nearest grid point with saturation; halves round away from zero.
inline FixedLlr quantize(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
  double mag = std::abs(x) / FixedLlr::kStep;
  int steps = static_cast<int>(mag + 0.5);
  if (steps > FixedLlr::kMaxSteps) steps = FixedLlr::kMaxSteps;
  return FixedLlr::from_steps(x < 0 ? -steps : steps);
}

// Exact real-valued check-node combine, written in the min-log form
// r = sign(a)sign(b) * (min(|a|,|b|) + log1p(e^-(|a|+|b|)) - log1p(e^-||a|-|b||)).
inline double box_plus_real(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  double am = std::abs(a), bm = std::abs(b);
  double s = (a < 0) == (b < 0) ? 1.0 : -1.0;
  double m = std::min(am, bm) + std::log1p(std::exp(-(am + bm))) -
             std::log1p(std::exp(-std::abs(am - bm)));
  return s * m;
}

namespace detail {

// Internal combine resolution: 64 sub-steps per LLR step. Wide enough that
// chained combines stay well inside half a step of the exact value before
// the single final rounding.
constexpr int kFinePerStep = 64;

constexpr int kCorrectionTableSize = 8192;

// Correction table g(d) = log(1 + e^-d) sampled on the fine grid. Beyond
// ~7.6 in LLR the correction rounds to zero at this resolution.
inline const std::array<std::int16_t, kCorrectionTableSize>& fine_correction_table() {
  static const std::array<std::int16_t, kCorrectionTableSize> table = [] {
    std::array<std::int16_t, kCorrectionTableSize> t{};
    const double fine = FixedLlr::kStep / kFinePerStep;
    for (int i = 0; i < kCorrectionTableSize; ++i)
      t[i] = static_cast<std::int16_t>(std::lround(std::log1p(std::exp(-i * fine)) / fine));
    return t;
  }();
  return table;
}

inline int fine_correction(int d_fine) {
  return d_fine < kCorrectionTableSize ? fine_correction_table()[d_fine] : 0;
}

// Box-plus on fine-grid integers. Zero annihilates, matching the convention
// that an erased message pins the combine to an erasure.
inline std::int32_t box_plus_fine(std::int32_t a, std::int32_t b) {
  if (a == 0 || b == 0) return 0;
  std::int32_t am = a < 0 ? -a : a;
  std::int32_t bm = b < 0 ? -b : b;
  std::int32_t lo = am < bm ? am : bm;
  std::int32_t hi = am ^ bm ^ lo;
  std::int32_t m = lo - fine_correction(hi - lo) + fine_correction(am + bm);
  if (m < 0) m = 0;
  return ((a ^ b) < 0) ? -m : m;
}

inline std::int32_t to_fine(FixedLlr v) { return v.steps() * kFinePerStep; }

inline FixedLlr from_fine(std::int32_t f) {
  std::int32_t mag = f < 0 ? -f : f;
  std::int32_t steps = (mag + kFinePerStep / 2) / kFinePerStep;
  if (steps > FixedLlr::kMaxSteps) steps = FixedLlr::kMaxSteps;
  return FixedLlr::from_steps(f < 0 ? -steps : steps);
}

}  // namespace detail

// Quantized check-node combine: two table lookups on the fine grid, one
// rounding back to the LLR grid. Agrees with quantize(box_plus_real(..))
// up to rounding ties.
inline FixedLlr box_plus(FixedLlr a, FixedLlr b) {
  return detail::from_fine(detail::box_plus_fine(detail::to_fine(a), detail::to_fine(b)));
}

}  // namespace scldpc
