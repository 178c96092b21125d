#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "scldpc/rng.hpp"

namespace scldpc {

using LlrBlock = std::vector<double>;

struct ChannelSpec {
  double snr_db = 10.0;       // symbol SNR Es/N0
  int branches = 4;           // receive diversity order
  bool fading_enabled = true;
  double symbol_energy = 1.0;

  double noise_psd() const { return symbol_energy * std::pow(10.0, -snr_db / 10.0); }

  void validate() const {
    if (branches < 1) throw std::invalid_argument("ChannelSpec: branches must be >= 1");
    // +inf SNR is the noiseless degenerate case and is allowed.
    if (std::isnan(snr_db)) throw std::invalid_argument("ChannelSpec: NaN SNR");
  }
};

// Pseudo-random bit flips applied to the all-zero codeword so the modulated
// sequence exercises all constellation points. Counter-based: bit i depends
// only on (seed, i), so any subrange can be regenerated independently.
struct ScrambleSequence {
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> bits;
};

inline ScrambleSequence scramble_allzero(std::size_t n, std::uint64_t seed) {
  if (n % 4 != 0) throw std::invalid_argument("scramble_allzero: length must fill whole symbols");
  ScrambleSequence s;
  s.seed = seed;
  s.bits.resize(n);
  for (std::size_t w = 0; w * 64 < n; ++w) {
    std::uint64_t word = stream_word(seed, w);
    std::size_t limit = std::min<std::size_t>(64, n - w * 64);
    for (std::size_t i = 0; i < limit; ++i) s.bits[w * 64 + i] = (word >> i) & 1;
  }
  return s;
}

namespace detail {

constexpr double kQamScale = 0.31622776601683794;  // 1/sqrt(10), unit mean symbol energy

// Gray-labeled 16-QAM amplitude of a (sign bit, magnitude bit) pair:
// sign bit selects the half-plane, magnitude bit 0 the inner level.
inline double qam_amplitude(int sign_bit, int mag_bit) {
  return (1 - 2 * sign_bit) * (2 - (1 - 2 * mag_bit)) * kQamScale;
}

}  // namespace detail

// Bits [b0 b1 b2 b3] per symbol: b0/b2 address the in-phase sign/magnitude,
// b1/b3 the quadrature. 0000 maps to (1+j)/sqrt(10).
inline std::vector<std::complex<double>> modulate_16qam(std::span<const std::uint8_t> bits) {
  if (bits.size() % 4 != 0)
    throw std::invalid_argument("modulate_16qam: bit count must be a multiple of 4");
  std::vector<std::complex<double>> symbols(bits.size() / 4);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::uint8_t* b = bits.data() + 4 * i;
    symbols[i] = {detail::qam_amplitude(b[0], b[2]), detail::qam_amplitude(b[1], b[3])};
  }
  return symbols;
}

// Received symbols after maximum-ratio combining: y = a*x + n with the
// combined gain a = sqrt(sum |h_i|^2) over iid Rayleigh branches normalized
// to unit mean total power, and complex AWGN of variance noise_psd. With
// fading disabled the gain pins to 1.
struct FadedSymbols {
  std::vector<std::complex<double>> received;
  std::vector<double> gains;
};

inline FadedSymbols apply_channel(std::span<const std::complex<double>> symbols,
                                  const ChannelSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  FadedSymbols out;
  out.received.resize(symbols.size());
  out.gains.resize(symbols.size());
  const double n0 = spec.noise_psd();
  const double branch_sigma = std::sqrt(0.5 / spec.branches);
  const double noise_sigma = std::sqrt(0.5 * n0);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    double gain = 1.0;
    if (spec.fading_enabled) {
      double power = 0.0;
      for (int br = 0; br < spec.branches; ++br) {
        double re = branch_sigma * unit(rng);
        double im = branch_sigma * unit(rng);
        power += re * re + im * im;
      }
      gain = std::sqrt(power);
    }
    std::complex<double> noise{0.0, 0.0};
    if (n0 > 0.0) noise = {noise_sigma * unit(rng), noise_sigma * unit(rng)};
    out.received[i] = gain * symbols[i] + noise;
    out.gains[i] = gain;
  }
  return out;
}

namespace detail {

inline double lse2(double a, double b) {
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// Exact per-component log-MAP: the Gray labeling separates I and Q, so each
// bit LLR is a two-vs-two hypothesis test on one component.
inline void demap_component(double y, double gain, double n0, double& sign_llr,
                            double& mag_llr) {
  const double a1 = gain * 1.0 * kQamScale;
  const double a3 = gain * 3.0 * kQamScale;
  auto metric = [&](double a) {
    double d = y - a;
    return -d * d / n0;
  };
  double p1 = metric(a1), p3 = metric(a3), m1 = metric(-a1), m3 = metric(-a3);
  sign_llr = lse2(p1, p3) - lse2(m1, m3);  // bit 0 puts the point in the positive half
  mag_llr = lse2(p1, m1) - lse2(p3, m3);   // bit 0 selects the inner amplitude
}

}  // namespace detail

// LLRs lambda = log P(bit=0)/P(bit=1) for every transmitted bit, descrambled
// back to the all-zero reference: positions where the scramble flipped the
// bit get their LLR sign flipped.
inline LlrBlock demap_llr(std::span<const std::complex<double>> received,
                          std::span<const double> gains, double n0,
                          const ScrambleSequence& scramble) {
  if (n0 <= 0.0 || !std::isfinite(n0))
    throw std::invalid_argument("demap_llr: noise density must be positive");
  if (received.size() != gains.size())
    throw std::invalid_argument("demap_llr: received/gain length mismatch");
  if (scramble.bits.size() != received.size() * 4)
    throw std::invalid_argument("demap_llr: scramble length mismatch");
  LlrBlock llrs(received.size() * 4);
  for (std::size_t i = 0; i < received.size(); ++i) {
    double* l = llrs.data() + 4 * i;
    detail::demap_component(received[i].real(), gains[i], n0, l[0], l[2]);
    detail::demap_component(received[i].imag(), gains[i], n0, l[1], l[3]);
  }
  for (std::size_t j = 0; j < llrs.size(); ++j)
    if (scramble.bits[j]) llrs[j] = -llrs[j];
  return llrs;
}

// Full pipeline for one all-zero-codeword trial: scramble, modulate, fade,
// demap, descramble. The scramble stream is seeded from the trial engine.
inline LlrBlock generate_allzero_llrs(std::size_t n, const ChannelSpec& spec,
                                      std::mt19937_64& rng) {
  ScrambleSequence scramble = scramble_allzero(n, rng());
  auto symbols = modulate_16qam(scramble.bits);
  FadedSymbols faded = apply_channel(symbols, spec, rng);
  return demap_llr(faded.received, faded.gains, spec.noise_psd(), scramble);
}

}  // namespace scldpc
