#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scldpc/exponent_matrix.hpp"
#include "scldpc/rational.hpp"

namespace scldpc {

// Shape parameters of a terminated, periodically time-varying QC-SC code.
// memory is the syndrome-former memory; period is the number of distinct
// shift slots the time axis cycles through.
struct CodeSpec {
  int vn_blocks = 2;       // block columns per coupling instant (b)
  int cn_blocks = 1;       // block rows per instant of each component (c)
  int memory = 4;          // coupling memory (number of delayed components)
  int period = 3;          // time-variation period of the shift tables
  int lifting = 256;       // circulant size
  int coupling_len = 100;  // coupling instants, termination included

  int msg_instants() const { return coupling_len - memory; }
  int term_instants() const { return memory; }
  int block_rows() const { return cn_blocks * (coupling_len + memory); }
  int block_cols() const { return vn_blocks * coupling_len; }
  std::int64_t n_bits() const { return static_cast<std::int64_t>(block_cols()) * lifting; }
  std::int64_t k_bits() const {
    return static_cast<std::int64_t>(msg_instants()) * (vn_blocks - cn_blocks) * lifting;
  }
  // One decoding layer per lifted-row group; rows of a block row are
  // orthogonal, so the layer unit is the block row.
  int layer_count() const { return block_rows(); }

  void validate() const {
    if (cn_blocks != 1) throw std::invalid_argument("CodeSpec: cn_blocks must be 1");
    if (vn_blocks <= cn_blocks) throw std::invalid_argument("CodeSpec: need vn_blocks > cn_blocks");
    if (memory < 1) throw std::invalid_argument("CodeSpec: memory must be >= 1");
    if (period < 1) throw std::invalid_argument("CodeSpec: period must be >= 1");
    if (lifting < 1) throw std::invalid_argument("CodeSpec: lifting must be >= 1");
    if (coupling_len <= memory)
      throw std::invalid_argument("CodeSpec: coupling_len must exceed memory");
    if (vn_blocks * (memory + 1) > 64)
      throw std::invalid_argument("CodeSpec: layer degree exceeds mask width");
  }
};

// Shift tables of the component submatrices: one c x b table per
// (delay, time slot) pair, row-major. Entry >= 0 is a circulant exponent.
struct SubcodeShifts {
  int vn_blocks = 0;
  int cn_blocks = 0;
  int memory = 0;
  int period = 0;
  std::vector<int> v;  // [(delay * period + slot) * c * b + r * b + col]

  static SubcodeShifts zeros(const CodeSpec& spec) {
    SubcodeShifts s;
    s.vn_blocks = spec.vn_blocks;
    s.cn_blocks = spec.cn_blocks;
    s.memory = spec.memory;
    s.period = spec.period;
    s.v.assign(static_cast<std::size_t>(spec.memory + 1) * spec.period * spec.cn_blocks *
                   spec.vn_blocks,
               0);
    return s;
  }

  int& at(int delay, int slot, int r, int col) {
    return v[offset(delay, slot, r, col)];
  }
  int at(int delay, int slot, int r, int col) const {
    return v[offset(delay, slot, r, col)];
  }

 private:
  std::size_t offset(int delay, int slot, int r, int col) const {
    return ((static_cast<std::size_t>(delay) * period + slot) * cn_blocks + r) * vn_blocks + col;
  }
};

// One block edge of a decoding layer: the block column it touches and the
// circulant exponent on it.
struct BlockEdge {
  std::int32_t vn_block;
  std::int32_t shift;
};

// A sampled code instance: the terminated coupled exponent matrix plus the
// per-layer adjacency the decoder iterates over. layers[l] is sorted by
// block column, so edge order is ascending in coupling instant.
struct CodeRealization {
  CodeSpec spec;
  SubcodeShifts shifts;
  ExponentMatrix coupled;
  std::vector<std::vector<BlockEdge>> layers;
  std::vector<std::size_t> layer_msg_base;  // message-array offset per layer, in block edges
  std::size_t total_block_edges = 0;

  int instant_of(std::int32_t vn_block) const { return vn_block / spec.vn_blocks; }
};

// Assembles the terminated coupled matrix from component shift tables.
// Block row r holds the delay-(r - t) component of instant t, evaluated in
// slot r mod period; the diagonal band covers 0 <= r - t <= memory, and the
// trailing memory block rows terminate the chain with the same tables.
inline CodeRealization build_coupled(const CodeSpec& spec, const SubcodeShifts& shifts) {
  spec.validate();
  if (shifts.vn_blocks != spec.vn_blocks || shifts.cn_blocks != spec.cn_blocks ||
      shifts.memory != spec.memory || shifts.period != spec.period)
    throw std::invalid_argument("build_coupled: shift tables do not match spec");

  CodeRealization real;
  real.spec = spec;
  real.shifts = shifts;
  const int M = spec.block_rows();
  real.coupled = ExponentMatrix(M, spec.block_cols());
  for (int r = 0; r < M; ++r) {
    int slot = r % spec.period;
    for (int t = r - spec.memory; t <= r; ++t) {
      if (t < 0 || t >= spec.coupling_len) continue;
      int delay = r - t;
      for (int col = 0; col < spec.vn_blocks; ++col) {
        int s = shifts.at(delay, slot, 0, col);
        if (s < 0 || s >= spec.lifting)
          throw std::invalid_argument("build_coupled: shift outside [0, lifting)");
        real.coupled.at(r, t * spec.vn_blocks + col) = s;
      }
    }
  }

  real.layers.resize(M);
  real.layer_msg_base.resize(M);
  std::size_t base = 0;
  for (int l = 0; l < M; ++l) {
    real.layer_msg_base[l] = base;
    for (int bc = 0; bc < spec.block_cols(); ++bc) {
      int s = real.coupled.at(l, bc);
      if (s != ExponentMatrix::kEmpty) real.layers[l].push_back({bc, s});
    }
    base += real.layers[l].size();
  }
  real.total_block_edges = base;
  return real;
}

// Draws component shift tables uniformly and rejects any draw whose coupled
// matrix lifts with 4-cycles; throws after resample_limit failed draws.
inline CodeRealization sample_realization(const CodeSpec& spec, std::mt19937_64& rng,
                                          int resample_limit = 1000) {
  spec.validate();
  if (resample_limit < 1) throw std::invalid_argument("sample_realization: limit must be >= 1");
  std::uniform_int_distribution<int> dist(0, spec.lifting - 1);
  for (int attempt = 0; attempt < resample_limit; ++attempt) {
    SubcodeShifts shifts = SubcodeShifts::zeros(spec);
    for (int delay = 0; delay <= spec.memory; ++delay)
      for (int slot = 0; slot < spec.period; ++slot)
        for (int r = 0; r < spec.cn_blocks; ++r)
          for (int col = 0; col < spec.vn_blocks; ++col)
            shifts.at(delay, slot, r, col) = dist(rng);
    CodeRealization real = build_coupled(spec, shifts);
    if (!has_four_cycle(real.coupled, spec.lifting)) return real;
  }
  throw std::runtime_error("sample_realization: no 4-cycle-free draw within resample limit");
}

struct CodeRates {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t constraint_bits = 0;  // decoding-window span in bits
  Rational rate_terminated{0, 1};
  Rational rate_asymptotic{0, 1};
};

// Exact design rates. Termination costs a factor J_m / (J_m + J_t) relative
// to the unterminated rate (b - c) / b.
inline CodeRates code_rates(const CodeSpec& spec) {
  spec.validate();
  CodeRates r;
  r.n = spec.n_bits();
  r.k = spec.k_bits();
  r.constraint_bits =
      static_cast<std::int64_t>(spec.vn_blocks) * spec.lifting * (spec.memory + 1);
  r.rate_asymptotic = Rational(spec.vn_blocks - spec.cn_blocks, spec.vn_blocks);
  r.rate_terminated =
      Rational(spec.msg_instants(), spec.msg_instants() + spec.term_instants()) *
      r.rate_asymptotic;
  return r;
}

// Block-edge count of each layer. Ends of the chain see fewer instants, so
// the profile ramps up over the first `memory` layers and back down over the
// last `memory`.
inline std::vector<int> layer_profile(const CodeRealization& real) {
  std::vector<int> profile(real.layers.size());
  for (std::size_t l = 0; l < real.layers.size(); ++l)
    profile[l] = static_cast<int>(real.layers[l].size());
  return profile;
}

// Text form of a realization: a header line "b c memory period lifting
// coupling_len", then one line per (delay, slot) table with its c*b shifts
// row-major, delay-major ordering.
inline std::string dump_realization(const CodeRealization& real) {
  std::ostringstream os;
  const CodeSpec& s = real.spec;
  os << s.vn_blocks << ' ' << s.cn_blocks << ' ' << s.memory << ' ' << s.period << ' '
     << s.lifting << ' ' << s.coupling_len << '\n';
  for (int delay = 0; delay <= s.memory; ++delay) {
    for (int slot = 0; slot < s.period; ++slot) {
      for (int r = 0; r < s.cn_blocks; ++r) {
        for (int col = 0; col < s.vn_blocks; ++col) {
          if (r != 0 || col != 0) os << ' ';
          os << real.shifts.at(delay, slot, r, col);
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

inline CodeRealization parse_realization(std::string_view text) {
  std::istringstream is{std::string(text)};
  CodeSpec spec;
  if (!(is >> spec.vn_blocks >> spec.cn_blocks >> spec.memory >> spec.period >> spec.lifting >>
        spec.coupling_len))
    throw std::invalid_argument("parse_realization: bad header");
  spec.validate();
  SubcodeShifts shifts = SubcodeShifts::zeros(spec);
  for (int delay = 0; delay <= spec.memory; ++delay)
    for (int slot = 0; slot < spec.period; ++slot)
      for (int r = 0; r < spec.cn_blocks; ++r)
        for (int col = 0; col < spec.vn_blocks; ++col)
          if (!(is >> shifts.at(delay, slot, r, col)))
            throw std::invalid_argument("parse_realization: truncated shift tables");
  return build_coupled(spec, shifts);
}

}  // namespace scldpc
