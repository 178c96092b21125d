#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scldpc/code.hpp"
#include "scldpc/fixed_point.hpp"

namespace scldpc {

// Arithmetic backends for the layered decoder. FixedArith is the production
// datapath: grid-quantized messages with a fine-grid combine accumulator.
// Posteriors live on the same grid but in a wide accumulator: the running sum
// lambda + sum(R) must never saturate, or the q = L - R extrinsics collapse
// and flip signs once messages approach the magnitude ceiling. Combine inputs
// are clamped back to the message range; commits use the unclamped q so the
// integer conservation L = lambda + sum(R) is exact. RealArith runs the same
// schedule in doubles and serves as the reference implementation in tests.
struct FixedArith {
  using Value = FixedLlr;
  using Acc = std::int32_t;        // fine combine accumulator
  using Posterior = std::int32_t;  // grid steps, wide; |L| <= (1 + col weight) * 1023

  static Value from_llr(double x) { return quantize(x); }
  static int sign(Value a) { return a.sign(); }
  static std::int32_t magnitude(Value a) { return a.magnitude(); }
  static Value make(int sign, std::int32_t mag) {
    return FixedLlr::from_steps(sign * mag);
  }

  static Posterior posterior(Value v) { return v.steps(); }
  static Posterior extrinsic(Posterior l, Value r) { return l - r.steps(); }
  static Value clip(Posterior q) {
    if (q > FixedLlr::kMaxSteps) q = FixedLlr::kMaxSteps;
    if (q < -FixedLlr::kMaxSteps) q = -FixedLlr::kMaxSteps;
    return FixedLlr::from_steps(q);
  }
  static Posterior commit(Posterior q, Value fresh) { return q + fresh.steps(); }
  static bool posterior_non_negative(Posterior l) { return l >= 0; }

  static Acc to_acc(Value v) { return detail::to_fine(v); }
  static Acc box_plus_acc(Acc a, Acc b) { return detail::box_plus_fine(a, b); }
  static Value from_acc(Acc a) { return detail::from_fine(a); }
};

struct RealArith {
  using Value = double;
  using Acc = double;
  using Posterior = double;

  static Value from_llr(double x) { return x; }
  static int sign(Value a) { return (a > 0.0) - (a < 0.0); }
  static double magnitude(Value a) { return a < 0.0 ? -a : a; }
  static Value make(int sign, double mag) { return sign * mag; }

  static Posterior posterior(Value v) { return v; }
  static Posterior extrinsic(Posterior l, Value r) { return l - r; }
  static Value clip(Posterior q) { return q; }
  static Posterior commit(Posterior q, Value fresh) { return q + fresh; }
  static bool posterior_non_negative(Posterior l) { return l >= 0.0; }

  static Acc to_acc(Value v) { return v; }
  static Acc box_plus_acc(Acc a, Acc b) { return box_plus_real(a, b); }
  static Value from_acc(Acc a) { return a; }
};

namespace detail {

// Running sign product with erasure (zero) tracking; `excluding` yields the
// extrinsic sign product seen by one edge.
template <class A>
struct SignFold {
  int zero_count = 0;
  int product = 1;  // over nonzero signs

  void absorb(typename A::Value v) {
    int s = A::sign(v);
    if (s == 0)
      ++zero_count;
    else
      product *= s;
  }
  int excluding(typename A::Value v) const {
    int s = A::sign(v);
    int zc = zero_count - (s == 0 ? 1 : 0);
    if (zc > 0) return 0;
    return s == 0 ? product : product * s;  // dividing out a +/-1 equals multiplying
  }
};

}  // namespace detail

// Min-sum check-node update: each edge gets the sign product and minimum
// magnitude of the other edges. Two-minimum sweep; zeros behave as erasures
// through the sign product.
template <class A>
void cn_update_msa(std::span<const typename A::Value> in, std::span<typename A::Value> out) {
  const std::size_t d = in.size();
  if (d < 2) throw std::invalid_argument("cn_update_msa: degree must be >= 2");
  auto min1 = A::magnitude(in[0]);
  auto min2 = min1;
  std::size_t arg1 = 0;
  detail::SignFold<A> signs;
  signs.absorb(in[0]);
  for (std::size_t e = 1; e < d; ++e) {
    auto m = A::magnitude(in[e]);
    if (m < min1) {
      min2 = min1;
      min1 = m;
      arg1 = e;
    } else if (e == 1 || m < min2) {
      min2 = m;
    }
    signs.absorb(in[e]);
  }
  for (std::size_t e = 0; e < d; ++e)
    out[e] = A::make(signs.excluding(in[e]), e == arg1 ? min2 : min1);
}

// Blended check-node update: the weakest edge (minimum input magnitude, ties
// to the lowest index) receives the full box-plus fold of the other edges;
// every other edge receives the magnitude of the all-input fold with its own
// extrinsic sign product. One exact output where it matters, min-sum cost
// elsewhere.
template <class A>
void cn_update_blend(std::span<const typename A::Value> in, std::span<typename A::Value> out) {
  const std::size_t d = in.size();
  if (d < 2) throw std::invalid_argument("cn_update_blend: degree must be >= 2");
  std::size_t weakest = 0;
  auto min_mag = A::magnitude(in[0]);
  detail::SignFold<A> signs;
  signs.absorb(in[0]);
  for (std::size_t e = 1; e < d; ++e) {
    auto m = A::magnitude(in[e]);
    if (m < min_mag) {
      min_mag = m;
      weakest = e;
    }
    signs.absorb(in[e]);
  }
  using Acc = typename A::Acc;
  Acc fold_excl{};
  bool first = true;
  for (std::size_t e = 0; e < d; ++e) {
    if (e == weakest) continue;
    Acc v = A::to_acc(in[e]);
    fold_excl = first ? v : A::box_plus_acc(fold_excl, v);
    first = false;
  }
  Acc fold_all = A::box_plus_acc(fold_excl, A::to_acc(in[weakest]));
  auto shared_mag = A::magnitude(A::from_acc(fold_all));
  for (std::size_t e = 0; e < d; ++e)
    out[e] = e == weakest ? A::from_acc(fold_excl) : A::make(signs.excluding(in[e]), shared_mag);
}

// Layer view: one block row of the coupled matrix, i.e. `lifting` mutually
// orthogonal check nodes sharing the same block adjacency.
struct Layer {
  int index = 0;
  std::span<const BlockEdge> edges;
  std::size_t msg_base = 0;  // offset into the message array, in block edges
};

inline Layer layer(const CodeRealization& real, int l) {
  if (l < 0 || l >= static_cast<int>(real.layers.size()))
    throw std::out_of_range("layer: index out of range");
  return Layer{l, std::span<const BlockEdge>(real.layers[l]), real.layer_msg_base[l]};
}

// Edge subset of a layer as a bitmask over its block-edge indices.
using LayerMask = std::uint64_t;

inline LayerMask full_mask(std::size_t degree) {
  return degree >= 64 ? ~LayerMask{0} : ((LayerMask{1} << degree) - 1);
}

struct LayerResult {
  bool parity_ok = false;
  std::uint64_t updates = 0;  // block edges committed
};

template <class A>
struct DecoderState;

// Observer invoked after each processed layer; reference-mode tests hook
// message/posterior conservation checks in here.
template <class A>
using LayerObserver = std::function<void(const DecoderState<A>&, const Layer&)>;

template <class A>
struct DecoderState {
  const CodeRealization* code = nullptr;
  std::vector<typename A::Posterior> posteriors;  // per lifted variable
  std::vector<typename A::Value> messages;        // per lifted edge, layer-major
  std::uint64_t update_counter = 0;

  void init(const CodeRealization& real, std::span<const double> llrs) {
    if (llrs.size() != static_cast<std::size_t>(real.spec.n_bits()))
      throw std::invalid_argument("DecoderState: LLR length does not match code length");
    code = &real;
    posteriors.resize(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i)
      posteriors[i] = A::posterior(A::from_llr(llrs[i]));
    messages.assign(real.total_block_edges * real.spec.lifting, typename A::Value{});
    update_counter = 0;
  }
};

// One serial step of the layered schedule over every check node of a layer.
// All adjacent variables contribute their current extrinsic q = L - R to the
// combine and to the parity record, but only edges in `mask` commit a new
// message and posterior; the rest are read-only context. Returns whether all
// checks of the layer were satisfied by the q signs seen here, and the
// number of committed block edges.
template <class A>
LayerResult process_layer(DecoderState<A>& state, const Layer& lyr, LayerMask mask,
                          const LayerObserver<A>& observer = {}) {
  const CodeRealization& real = *state.code;
  const int theta = real.spec.lifting;
  const std::size_t d = lyr.edges.size();
  if (d > 64) throw std::invalid_argument("process_layer: layer degree exceeds mask width");
  mask &= full_mask(d);

  typename A::Posterior raw[64];
  typename A::Value q[64];
  typename A::Value fresh[64];
  std::uint32_t vn[64];
  bool parity_ok = true;

  auto* msgs = state.messages.data() + lyr.msg_base * theta;
  for (int z = 0; z < theta; ++z) {
    int sign_prod = 1;
    for (std::size_t e = 0; e < d; ++e) {
      const BlockEdge& be = lyr.edges[e];
      int zz = z + be.shift;
      if (zz >= theta) zz -= theta;
      vn[e] = static_cast<std::uint32_t>(be.vn_block) * theta + zz;
      raw[e] = A::extrinsic(state.posteriors[vn[e]], msgs[e * static_cast<std::size_t>(theta) + z]);
      q[e] = A::clip(raw[e]);
      int s = A::sign(q[e]);
      sign_prod = s == 0 ? 0 : sign_prod * s;
    }
    parity_ok = parity_ok && sign_prod >= 0;
    cn_update_blend<A>(std::span<const typename A::Value>(q, d),
                       std::span<typename A::Value>(fresh, d));
    for (LayerMask rest = mask; rest != 0; rest &= rest - 1) {
      std::size_t e = static_cast<std::size_t>(std::countr_zero(rest));
      msgs[e * static_cast<std::size_t>(theta) + z] = fresh[e];
      state.posteriors[vn[e]] = A::commit(raw[e], fresh[e]);
    }
  }
  std::uint64_t updates = static_cast<std::uint64_t>(std::popcount(mask));
  state.update_counter += updates;
  if (observer) observer(state, lyr);
  return LayerResult{parity_ok, updates};
}

// Hard decisions from posterior signs; nonnegative decodes to bit 0.
template <class A>
std::vector<std::uint8_t> hard_decisions(const DecoderState<A>& state) {
  std::vector<std::uint8_t> bits(state.posteriors.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = A::posterior_non_negative(state.posteriors[i]) ? 0 : 1;
  return bits;
}

}  // namespace scldpc
