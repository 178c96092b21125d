#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scldpc/decoder.hpp"

namespace scldpc {

enum class Strategy { kFullBlock, kVnCentered, kCnCentered };
enum class EtSet { kTarget, kComplete, kAll, kNone };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kFullBlock: return "full_block";
    case Strategy::kVnCentered: return "vn_centered";
    case Strategy::kCnCentered: return "cn_centered";
  }
  return "?";
}

inline const char* to_string(EtSet s) {
  switch (s) {
    case EtSet::kTarget: return "target";
    case EtSet::kComplete: return "complete";
    case EtSet::kAll: return "all";
    case EtSet::kNone: return "none";
  }
  return "?";
}

// Contiguous layer range [begin, end) covered by window position omega.
struct WindowLayers {
  int begin = 0;
  int end = 0;
};

inline int window_position_count(const CodeSpec& spec, int window) {
  return spec.layer_count() - window + 1;
}

inline WindowLayers window_layers(int omega, int window, int layer_count) {
  if (window < 1 || window > layer_count)
    throw std::invalid_argument("window_layers: window size outside [1, layer_count]");
  if (omega < 0 || omega + window > layer_count)
    throw std::invalid_argument("window_layers: position out of range");
  return WindowLayers{omega, omega + window};
}

// Edge mask of one layer under a window anchored at omega. A VN-centered
// window updates only edges belonging to coupling instants inside the
// window's variable span (t >= omega; the upper end is bounded by the layer
// adjacency itself). A CN-centered window updates a layer's full adjacency.
inline LayerMask layer_mask(const CodeRealization& real, int l, int omega, Strategy strategy) {
  const auto& edges = real.layers[static_cast<std::size_t>(l)];
  if (strategy != Strategy::kVnCentered) return full_mask(edges.size());
  LayerMask mask = 0;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (real.instant_of(edges[e].vn_block) >= omega) mask |= LayerMask{1} << e;
  return mask;
}

// Masks for every layer of the window at omega, in layer order.
inline std::vector<LayerMask> vn_mask(const CodeRealization& real, int omega, int window,
                                      Strategy strategy) {
  WindowLayers wl = window_layers(omega, window, real.spec.layer_count());
  std::vector<LayerMask> masks;
  masks.reserve(static_cast<std::size_t>(window));
  for (int l = wl.begin; l < wl.end; ++l) masks.push_back(layer_mask(real, l, omega, strategy));
  return masks;
}

// Layers whose parity gates early termination at position omega. kTarget
// covers the layers adjacent to the instant about to leave the window,
// kComplete the layers all of whose instants lie inside it.
inline std::vector<int> et_layer_set(int omega, int window, int memory, EtSet set) {
  std::vector<int> layers;
  int last = omega + window - 1;
  switch (set) {
    case EtSet::kTarget:
      for (int l = omega; l <= std::min(omega + memory, last); ++l) layers.push_back(l);
      break;
    case EtSet::kComplete:
      for (int l = omega; l <= std::min(omega + window - memory - 1, last); ++l)
        layers.push_back(l);
      break;
    case EtSet::kAll:
      for (int l = omega; l <= last; ++l) layers.push_back(l);
      break;
    case EtSet::kNone:
      break;
  }
  return layers;
}

// The ET sets only separate meaningfully when the window clears 2*memory+1.
inline std::optional<std::string> window_size_warning(int window, int memory) {
  if (window <= 2 * memory + 1)
    return "window " + std::to_string(window) + " <= 2*memory+1 = " +
           std::to_string(2 * memory + 1) + "; termination sets overlap";
  return std::nullopt;
}

// --- complexity accounting -------------------------------------------------
//
// The unit of work is one committed block edge (one message update per
// lifted check in a block row). Counts depend only on the code shape, so
// they are computed on a zero-shift structural realization via the same
// mask logic the decoder executes.

namespace detail {

inline const CodeRealization& structural_realization(const CodeSpec& spec) {
  thread_local std::optional<CodeRealization> cache;
  thread_local CodeSpec cached_spec;
  if (!cache || cached_spec.vn_blocks != spec.vn_blocks ||
      cached_spec.cn_blocks != spec.cn_blocks || cached_spec.memory != spec.memory ||
      cached_spec.period != spec.period || cached_spec.lifting != spec.lifting ||
      cached_spec.coupling_len != spec.coupling_len) {
    cache = build_coupled(spec, SubcodeShifts::zeros(spec));
    cached_spec = spec;
  }
  return *cache;
}

}  // namespace detail

// Block edges of layer l: vn_blocks per instant the layer touches.
inline int layer_degree(const CodeSpec& spec, int l) {
  int lo = std::max(0, l - spec.memory);
  int hi = std::min(l, spec.coupling_len - 1);
  return hi < lo ? 0 : spec.vn_blocks * (hi - lo + 1);
}

// Message updates of one full-block iteration: every block edge once.
inline std::uint64_t i1_full_block(const CodeSpec& spec) {
  std::uint64_t sum = 0;
  for (int l = 0; l < spec.layer_count(); ++l) sum += static_cast<std::uint64_t>(layer_degree(spec, l));
  return sum;
}

// Message updates of one iteration of a mid-chain window (boundary effects
// excluded): the per-iteration cost quoted for a configuration.
inline std::uint64_t nmsg_middle(const CodeSpec& spec, Strategy strategy, int window) {
  if (window < 1) throw std::invalid_argument("nmsg_middle: window must be >= 1");
  if (strategy == Strategy::kFullBlock)
    throw std::invalid_argument("nmsg_middle: defined for windowed strategies only");
  if (strategy == Strategy::kCnCentered)
    return static_cast<std::uint64_t>(spec.vn_blocks) * (spec.memory + 1) * window;
  // VN-centered: layer omega+delta keeps instants in [max(omega, l-memory), l],
  // i.e. min(delta, memory)+1 instants when no chain boundary interferes.
  std::uint64_t sum = 0;
  for (int delta = 0; delta < window; ++delta)
    sum += static_cast<std::uint64_t>(spec.vn_blocks) * (std::min(delta, spec.memory) + 1);
  return sum;
}

// Message updates of one sweep over all window positions (one iteration
// each), boundary truncation included. This is the per-iteration complexity
// a budget is divided by.
inline std::uint64_t i1_per_iteration(const CodeSpec& spec, Strategy strategy, int window) {
  spec.validate();
  if (strategy == Strategy::kFullBlock) return i1_full_block(spec);
  const CodeRealization& real = detail::structural_realization(spec);
  const int positions = window_position_count(spec, window);
  if (positions < 1) throw std::invalid_argument("i1_per_iteration: window exceeds layer count");
  std::uint64_t sum = 0;
  for (int omega = 0; omega < positions; ++omega)
    for (int l = omega; l < omega + window; ++l)
      sum += static_cast<std::uint64_t>(
          std::popcount(layer_mask(real, l, omega, strategy)));
  return sum;
}

// Equal-complexity budget: every configuration may spend at most the
// full-block reference total imax_fbd * i1_full_block.
struct BudgetSpec {
  int imax_fbd = 200;
  std::uint64_t i1_fbd = 0;
  std::uint64_t nmu_max = 0;

  static BudgetSpec reference(const CodeSpec& spec, int imax_fbd = 200) {
    if (imax_fbd < 1) throw std::invalid_argument("BudgetSpec: imax_fbd must be >= 1");
    BudgetSpec b;
    b.imax_fbd = imax_fbd;
    b.i1_fbd = i1_full_block(spec);
    b.nmu_max = static_cast<std::uint64_t>(imax_fbd) * b.i1_fbd;
    return b;
  }
};

struct DerivedBudget {
  std::uint64_t i1 = 0;       // updates per iteration of this configuration
  int imax = 0;               // per-window iteration cap
  std::uint64_t nmu_max = 0;  // imax * i1, never above the reference budget
};

inline DerivedBudget derive_imax(const BudgetSpec& budget, const CodeSpec& spec,
                                 Strategy strategy, int window) {
  DerivedBudget d;
  d.i1 = i1_per_iteration(spec, strategy, window);
  if (d.i1 == 0) throw std::invalid_argument("derive_imax: configuration performs no updates");
  d.imax = static_cast<int>(budget.nmu_max / d.i1);
  if (d.imax < 1) throw std::invalid_argument("derive_imax: budget below one iteration");
  d.nmu_max = static_cast<std::uint64_t>(d.imax) * d.i1;
  return d;
}

// --- decoding --------------------------------------------------------------

struct WindowConfig {
  int window = 0;
  Strategy strategy = Strategy::kVnCentered;
  EtSet et = EtSet::kTarget;
  int imax_per_window = 0;
};

struct DecodeOutcome {
  bool success = false;                        // all info bits decoded to 0
  std::uint64_t nmu = 0;                       // committed block-edge updates
  std::vector<std::uint16_t> per_window_iters;
  std::vector<std::uint8_t> decisions;
};

namespace detail {

// Info bits under the all-zero convention: the first (b - c) block columns
// of every message-carrying instant.
inline bool info_bits_zero(const CodeSpec& spec, std::span<const std::uint8_t> bits) {
  const int theta = spec.lifting;
  const int info_blocks = spec.vn_blocks - spec.cn_blocks;
  for (int t = 0; t < spec.msg_instants(); ++t) {
    const std::size_t base = static_cast<std::size_t>(t) * spec.vn_blocks * theta;
    for (int col = 0; col < info_blocks; ++col)
      for (int z = 0; z < theta; ++z)
        if (bits[base + static_cast<std::size_t>(col) * theta + z]) return false;
  }
  return true;
}

}  // namespace detail

// Sliding-window layered decoding with parity-gated early termination.
// State (posteriors and messages) carries across window positions; each
// position runs up to imax_per_window sweeps over its layers and advances
// early once every layer in its termination set was satisfied within one
// sweep. Decisions are taken once, after the last position.
template <class A>
DecodeOutcome decode_windowed(std::span<const double> llrs, const CodeRealization& real,
                              const WindowConfig& cfg, const LayerObserver<A>& observer = {}) {
  const CodeSpec& spec = real.spec;
  const int M = spec.layer_count();
  if (cfg.window < 1 || cfg.window > M)
    throw std::invalid_argument("decode_windowed: window size outside [1, layer_count]");
  if (cfg.imax_per_window < 1)
    throw std::invalid_argument("decode_windowed: iteration cap must be >= 1");
  if (cfg.strategy == Strategy::kFullBlock && cfg.window != M)
    throw std::invalid_argument("decode_windowed: full-block strategy requires a full window");

  DecoderState<A> state;
  state.init(real, llrs);

  const int positions = window_position_count(spec, cfg.window);
  DecodeOutcome out;
  out.per_window_iters.reserve(static_cast<std::size_t>(positions));

  std::vector<LayerMask> masks;
  std::vector<char> layer_parity(static_cast<std::size_t>(cfg.window), 0);

  for (int omega = 0; omega < positions; ++omega) {
    masks = vn_mask(real, omega, cfg.window, cfg.strategy);
    std::vector<int> et_layers = et_layer_set(omega, cfg.window, spec.memory, cfg.et);
    int iters = 0;
    for (; iters < cfg.imax_per_window;) {
      ++iters;
      for (int delta = 0; delta < cfg.window; ++delta) {
        LayerResult r = process_layer<A>(state, layer(real, omega + delta),
                                         masks[static_cast<std::size_t>(delta)], observer);
        layer_parity[static_cast<std::size_t>(delta)] = r.parity_ok ? 1 : 0;
        out.nmu += r.updates;
      }
      if (cfg.et != EtSet::kNone) {
        bool all_ok = true;
        for (int l : et_layers)
          all_ok = all_ok && layer_parity[static_cast<std::size_t>(l - omega)] != 0;
        if (all_ok) break;
      }
    }
    out.per_window_iters.push_back(static_cast<std::uint16_t>(iters));
  }

  out.decisions = hard_decisions(state);
  out.success = detail::info_bits_zero(spec, out.decisions);
  return out;
}

// Full-block decoding as the single-position degenerate window: every layer
// every iteration, termination gated on all layers (or disabled).
template <class A>
DecodeOutcome decode_fbd(std::span<const double> llrs, const CodeRealization& real, int imax,
                         bool early_termination = true,
                         const LayerObserver<A>& observer = {}) {
  WindowConfig cfg;
  cfg.window = real.spec.layer_count();
  cfg.strategy = Strategy::kFullBlock;
  cfg.et = early_termination ? EtSet::kAll : EtSet::kNone;
  cfg.imax_per_window = imax;
  return decode_windowed<A>(llrs, real, cfg, observer);
}

}  // namespace scldpc
