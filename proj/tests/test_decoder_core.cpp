#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "scldpc/decoder.hpp"
#include "scldpc/fixed_point.hpp"

using namespace scldpc;

namespace {

// Independent reference: the tanh-product form of the check-node combine.
double box_plus_tanh(double a, double b) {
  return 2.0 * std::atanh(std::tanh(a / 2.0) * std::tanh(b / 2.0));
}

// Exact SPA extrinsic for edge `e`: fold of all other inputs.
double spa_extrinsic(const std::vector<double>& in, std::size_t e) {
  double acc = 0.0;
  bool first = true;
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (k == e) continue;
    acc = first ? in[k] : box_plus_real(acc, in[k]);
    first = false;
  }
  return acc;
}

CodeSpec tiny_spec() {
  CodeSpec spec;
  spec.vn_blocks = 2;
  spec.cn_blocks = 1;
  spec.memory = 4;
  spec.period = 3;
  spec.lifting = 32;
  spec.coupling_len = 10;
  return spec;
}

}  // namespace

TEST_CASE("quantize rounds to the grid with saturation") {
  REQUIRE(quantize(0.0).steps() == 0);
  REQUIRE(quantize(2.0).steps() == 32);
  REQUIRE(quantize(-3.5).steps() == -56);
  REQUIRE(quantize(0.03).steps() == 0);       // below half a step
  REQUIRE(quantize(0.03125).steps() == 1);    // exactly half rounds away from zero
  REQUIRE(quantize(-0.03125).steps() == -1);
  REQUIRE(quantize(1000.0).steps() == 1023);  // saturates at the magnitude cap
  REQUIRE(quantize(-1e12).steps() == -1023);
  REQUIRE(quantize(0.0).sign() == 0);
  REQUIRE(quantize(-0.5).sign() == -1);
  REQUIRE_THROWS_AS(quantize(std::nan("")), std::invalid_argument);
  REQUIRE_THROWS_AS(quantize(INFINITY), std::invalid_argument);
}

TEST_CASE("real box-plus matches the tanh-product form") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> dist(0.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    double a = dist(rng), b = dist(rng);
    double ref = box_plus_tanh(a, b);
    REQUIRE(box_plus_real(a, b) == Catch::Approx(ref).margin(1e-11));
  }
  REQUIRE(box_plus_real(0.0, 5.0) == 0.0);
  REQUIRE(box_plus_real(5.0, 0.0) == 0.0);
}

TEST_CASE("quantized box-plus on worked examples") {
  FixedLlr a = quantize(2.0);   // 32 steps
  FixedLlr b = quantize(-3.5);  // -56 steps
  // Exact combine is -1.80267, i.e. -28.84 steps.
  REQUIRE(box_plus(a, b).steps() == -29);
  REQUIRE(box_plus(b, a).steps() == -29);
  REQUIRE(box_plus(FixedLlr{}, a).steps() == 0);  // zero annihilates
  FixedLlr top = FixedLlr::from_steps(FixedLlr::kMaxSteps);
  // At saturation the correction is a bare -log(2).
  REQUIRE(box_plus(top, top).steps() == quantize(top.value() - std::log(2.0)).steps());
}

TEST_CASE("quantized box-plus equals the quantized exact combine") {
  std::mt19937_64 rng(321);
  std::normal_distribution<double> dist(0.0, 4.0);
  int exact_matches = 0;
  for (int i = 0; i < 10000; ++i) {
    FixedLlr a = quantize(dist(rng));
    FixedLlr b = quantize(dist(rng));
    FixedLlr got = box_plus(a, b);
    FixedLlr want = quantize(box_plus_real(a.value(), b.value()));
    // Ties between adjacent grid points may fall either way; never further.
    REQUIRE(std::abs(got.steps() - want.steps()) <= 1);
    exact_matches += got.steps() == want.steps();
    REQUIRE(got.magnitude() <= std::min(a.magnitude(), b.magnitude()));
  }
  REQUIRE(exact_matches > 9900);
}

TEST_CASE("min-sum update on worked examples") {
  std::vector<double> in{2.0, -3.5, 1.0};
  std::vector<double> out(3);
  cn_update_msa<RealArith>(in, out);
  REQUIRE(out == std::vector<double>{-1.0, 1.0, -2.0});

  std::vector<FixedLlr> fin{quantize(2.0), quantize(-3.5), quantize(1.0)};
  std::vector<FixedLlr> fout(3);
  cn_update_msa<FixedArith>(fin, fout);
  REQUIRE(fout[0].steps() == -16);
  REQUIRE(fout[1].steps() == 16);
  REQUIRE(fout[2].steps() == -32);

  std::vector<double> pair{2.0, -3.5};
  std::vector<double> pout(2);
  cn_update_msa<RealArith>(pair, pout);
  REQUIRE(pout == std::vector<double>{-3.5, 2.0});

  std::vector<double> zin{0.0, 3.0, -1.0};
  std::vector<double> zout(3);
  cn_update_msa<RealArith>(zin, zout);
  REQUIRE(zout[0] == -1.0);  // the two live inputs
  REQUIRE(zout[1] == 0.0);   // the erased input wipes the others
  REQUIRE(zout[2] == 0.0);

  std::vector<double> two{1.0};
  std::vector<double> tout(1);
  REQUIRE_THROWS_AS(cn_update_msa<RealArith>(two, tout), std::invalid_argument);
}

TEST_CASE("min-sum magnitudes dominate the exact extrinsic with matching signs") {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> dist(0.0, 3.0);
  std::vector<double> in(10), out(10);
  for (int it = 0; it < 10000; ++it) {
    for (double& v : in) v = dist(rng);
    cn_update_msa<RealArith>(in, out);
    for (std::size_t e = 0; e < in.size(); ++e) {
      double exact = spa_extrinsic(in, e);
      REQUIRE(std::abs(out[e]) >= std::abs(exact) - 1e-12);
      if (exact != 0.0) REQUIRE(RealArith::sign(out[e]) == RealArith::sign(exact));
    }
  }
}

TEST_CASE("blend update: weakest edge gets the exact extrinsic") {
  std::vector<double> in{2.0, -3.5, 1.0};
  std::vector<double> out(3);
  cn_update_blend<RealArith>(in, out);
  // Weakest input is index 2; its output is the exact fold of the others.
  REQUIRE(out[2] == Catch::Approx(-1.8026651652878183).epsilon(1e-12));
  // The remaining edges share the all-input fold magnitude with their own
  // extrinsic sign products.
  REQUIRE(out[0] == Catch::Approx(-0.6886050835009624).epsilon(1e-12));
  REQUIRE(out[1] == Catch::Approx(0.6886050835009624).epsilon(1e-12));

  std::vector<FixedLlr> fin{quantize(2.0), quantize(-3.5), quantize(1.0)};
  std::vector<FixedLlr> fout(3);
  cn_update_blend<FixedArith>(fin, fout);
  REQUIRE(fout[2].steps() == -29);
  REQUIRE(fout[0].steps() == -11);
  REQUIRE(fout[1].steps() == 11);
}

TEST_CASE("blend update: magnitude ties choose the lowest edge index") {
  std::vector<double> in{1.0, 1.0, -2.0};
  std::vector<double> out(3);
  cn_update_blend<RealArith>(in, out);
  double fold_excl0 = box_plus_real(1.0, -2.0);
  double fold_all = box_plus_real(box_plus_real(1.0, 1.0), -2.0);
  REQUIRE(out[0] == Catch::Approx(fold_excl0).epsilon(1e-12));
  REQUIRE(out[1] == Catch::Approx(-std::abs(fold_all)).epsilon(1e-12));
  REQUIRE(out[2] == Catch::Approx(std::abs(fold_all)).epsilon(1e-12));
}

TEST_CASE("blend update degree 2 reduces to exact message exchange") {
  std::vector<double> in{0.5, 2.5};
  std::vector<double> out(2);
  cn_update_blend<RealArith>(in, out);
  REQUIRE(out[0] == 2.5);
  REQUIRE(out[1] == Catch::Approx(std::abs(box_plus_real(0.5, 2.5))).epsilon(1e-12));
}

TEST_CASE("fixed-point blend weakest edge tracks the exact extrinsic") {
  std::mt19937_64 rng(555);
  std::normal_distribution<double> dist(0.0, 3.0);
  std::vector<FixedLlr> fin(10);
  std::vector<FixedLlr> fout(10);
  std::vector<double> exact_in(10);
  const double tol = 2.0 * FixedLlr::kStep;
  for (int it = 0; it < 10000; ++it) {
    std::size_t weakest = 0;
    for (std::size_t e = 0; e < fin.size(); ++e) {
      fin[e] = quantize(dist(rng));
      exact_in[e] = fin[e].value();
      if (fin[e].magnitude() < fin[weakest].magnitude()) weakest = e;
    }
    cn_update_blend<FixedArith>(fin, fout);
    double exact = spa_extrinsic(exact_in, weakest);
    REQUIRE(std::abs(fout[weakest].value() - exact) <= tol);
  }
}

TEST_CASE("layer processing commits only masked edges") {
  CodeSpec spec = tiny_spec();
  std::mt19937_64 rng(17);
  CodeRealization real = sample_realization(spec, rng);
  std::vector<double> llrs(static_cast<std::size_t>(spec.n_bits()));
  std::normal_distribution<double> dist(2.0, 2.0);
  for (double& v : llrs) v = dist(rng);

  const int l = 6;  // interior layer, full degree
  Layer lyr = layer(real, l);
  REQUIRE(lyr.edges.size() == 10);

  DecoderState<FixedArith> masked_state;
  masked_state.init(real, llrs);
  std::vector<FixedArith::Posterior> prior_posteriors = masked_state.posteriors;

  const LayerMask mask = 0b0000110011;  // edges 0,1,4,5
  LayerResult res = process_layer<FixedArith>(masked_state, lyr, mask);
  REQUIRE(res.updates == 4);
  REQUIRE(masked_state.update_counter == 4);

  // Unmasked edges keep zero messages; masked edges committed something.
  const int theta = spec.lifting;
  for (std::size_t e = 0; e < lyr.edges.size(); ++e) {
    bool in_mask = (mask >> e) & 1;
    bool any_nonzero = false;
    for (int z = 0; z < theta; ++z)
      any_nonzero |= masked_state.messages[(lyr.msg_base + e) * theta + z].steps() != 0;
    REQUIRE(any_nonzero == in_mask);
  }

  // Posteriors moved exactly on the variables of masked edges.
  for (std::size_t e = 0; e < lyr.edges.size(); ++e) {
    bool in_mask = (mask >> e) & 1;
    bool any_moved = false;
    for (int z = 0; z < theta; ++z) {
      int zz = (z + lyr.edges[e].shift) % theta;
      std::size_t vn = static_cast<std::size_t>(lyr.edges[e].vn_block) * theta + zz;
      any_moved |= !(masked_state.posteriors[vn] == prior_posteriors[vn]);
    }
    REQUIRE(any_moved == in_mask);
  }
}

TEST_CASE("layer parity reflects the q sign product") {
  CodeSpec spec = tiny_spec();
  std::mt19937_64 rng(18);
  CodeRealization real = sample_realization(spec, rng);
  std::vector<double> llrs(static_cast<std::size_t>(spec.n_bits()), 4.0);

  DecoderState<FixedArith> state;
  state.init(real, llrs);
  Layer lyr = layer(real, 5);
  // All-positive posteriors with zero messages: every check satisfied.
  REQUIRE(process_layer<FixedArith>(state, lyr, full_mask(lyr.edges.size())).parity_ok);

  // Flip a single variable strongly negative: exactly the checks touching it fail.
  DecoderState<FixedArith> state2;
  llrs[static_cast<std::size_t>(lyr.edges[3].vn_block) * spec.lifting + 7] = -9.0;
  state2.init(real, llrs);
  REQUIRE_FALSE(process_layer<FixedArith>(state2, lyr, full_mask(lyr.edges.size())).parity_ok);
}

TEST_CASE("update counts are lifting-independent") {
  CodeSpec spec = tiny_spec();
  for (int theta : {32, 64}) {
    spec.lifting = theta;
    CodeRealization real = build_coupled(spec, SubcodeShifts::zeros(spec));
    std::vector<double> llrs(static_cast<std::size_t>(spec.n_bits()), 1.0);
    DecoderState<FixedArith> state;
    state.init(real, llrs);
    Layer lyr = layer(real, 6);
    REQUIRE(process_layer<FixedArith>(state, lyr, full_mask(lyr.edges.size())).updates == 10);
  }
}

TEST_CASE("reference-mode layers conserve posterior = prior + message sum") {
  CodeSpec spec = tiny_spec();
  std::mt19937_64 rng(19);
  CodeRealization real = sample_realization(spec, rng);
  const int theta = spec.lifting;
  std::vector<double> llrs(static_cast<std::size_t>(spec.n_bits()));
  std::normal_distribution<double> dist(1.0, 2.5);
  for (double& v : llrs) v = dist(rng);

  DecoderState<RealArith> state;
  state.init(real, llrs);

  // Incident message indices per variable, over the whole matrix.
  std::vector<std::vector<std::size_t>> incident(llrs.size());
  for (std::size_t l = 0; l < real.layers.size(); ++l) {
    for (std::size_t e = 0; e < real.layers[l].size(); ++e) {
      const BlockEdge& be = real.layers[l][e];
      for (int z = 0; z < theta; ++z) {
        std::size_t vn =
            static_cast<std::size_t>(be.vn_block) * theta + (z + be.shift) % theta;
        incident[vn].push_back((real.layer_msg_base[l] + e) * theta + z);
      }
    }
  }

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t l = 0; l < real.layers.size(); ++l) {
      Layer lyr = layer(real, static_cast<int>(l));
      process_layer<RealArith>(state, lyr, full_mask(lyr.edges.size()));
      for (std::size_t vn = 0; vn < llrs.size(); ++vn) {
        double sum = llrs[vn];
        for (std::size_t mi : incident[vn]) sum += state.messages[mi];
        REQUIRE(std::abs(state.posteriors[vn] - sum) < 1e-9);
      }
    }
  }
}

TEST_CASE("fixed-point posteriors conserve steps exactly and never flip on strong input") {
  // Strong homogeneous input drives messages to the magnitude ceiling after a
  // few sweeps. With a saturating posterior store, q = L - R would collapse
  // there and commit sign flips; the wide accumulator must keep the integer
  // identity L = lambda + sum(R) exact and every posterior strictly positive.
  CodeSpec spec = tiny_spec();
  std::mt19937_64 rng(23);
  CodeRealization real = sample_realization(spec, rng);
  const int theta = spec.lifting;
  std::vector<double> llrs(static_cast<std::size_t>(spec.n_bits()), 8.0);

  DecoderState<FixedArith> state;
  state.init(real, llrs);

  std::vector<std::vector<std::size_t>> incident(llrs.size());
  for (std::size_t l = 0; l < real.layers.size(); ++l) {
    for (std::size_t e = 0; e < real.layers[l].size(); ++e) {
      const BlockEdge& be = real.layers[l][e];
      for (int z = 0; z < theta; ++z) {
        std::size_t vn =
            static_cast<std::size_t>(be.vn_block) * theta + (z + be.shift) % theta;
        incident[vn].push_back((real.layer_msg_base[l] + e) * theta + z);
      }
    }
  }

  std::int32_t max_msg = 0;
  for (int sweep = 0; sweep < 8; ++sweep) {
    for (std::size_t l = 0; l < real.layers.size(); ++l) {
      Layer lyr = layer(real, static_cast<int>(l));
      process_layer<FixedArith>(state, lyr, full_mask(lyr.edges.size()));
    }
    for (std::size_t vn = 0; vn < llrs.size(); ++vn) {
      std::int32_t sum = quantize(llrs[vn]).steps();
      for (std::size_t mi : incident[vn]) sum += state.messages[mi].steps();
      REQUIRE(state.posteriors[vn] == sum);
      REQUIRE(state.posteriors[vn] > 0);
      REQUIRE(state.posteriors[vn] <= 6 * FixedLlr::kMaxSteps);  // 1 + column weight
    }
    for (const FixedLlr& m : state.messages) max_msg = std::max<std::int32_t>(max_msg, m.magnitude());
  }
  REQUIRE(max_msg == FixedLlr::kMaxSteps);  // the ceiling regime was actually exercised
}

TEST_CASE("hard decisions map nonnegative posteriors to zero") {
  CodeSpec spec = tiny_spec();
  CodeRealization real = build_coupled(spec, SubcodeShifts::zeros(spec));
  std::vector<double> llrs(static_cast<std::size_t>(spec.n_bits()), 1.0);
  llrs[3] = -0.2;
  llrs[7] = 0.0;
  DecoderState<FixedArith> state;
  state.init(real, llrs);
  auto bits = hard_decisions(state);
  REQUIRE(bits[0] == 0);
  REQUIRE(bits[3] == 1);
  REQUIRE(bits[7] == 0);
}
