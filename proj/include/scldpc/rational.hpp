#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace scldpc {

// Exact reduced fraction on int64. Denominator is kept positive; all rate
// arithmetic in this library goes through this type so code rates stay exact.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    reduce();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    // Cross-cancel before multiplying to keep intermediates small.
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    std::int64_t n1 = g1 ? a.num_ / g1 : a.num_;
    std::int64_t d2 = g1 ? b.den_ / g1 : b.den_;
    std::int64_t n2 = g2 ? b.num_ / g2 : b.num_;
    std::int64_t d1 = g2 ? a.den_ / g2 : a.den_;
    return Rational(n1 * n2, d1 * d2);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    std::int64_t g = std::gcd(a.den_, b.den_);
    std::int64_t lb = b.den_ / g;
    return Rational(a.num_ * lb + b.num_ * (a.den_ / g), a.den_ * lb);
  }

 private:
  void reduce() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace scldpc
