#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "scldpc/channel.hpp"
#include "scldpc/code.hpp"
#include "scldpc/rng.hpp"
#include "scldpc/window.hpp"

namespace scldpc {

// One decoder configuration of a sweep.
struct DecoderRowSpec {
  Strategy strategy = Strategy::kFullBlock;
  int window = 0;  // ignored for full block
  EtSet et = EtSet::kAll;

  std::string label() const {
    switch (strategy) {
      case Strategy::kFullBlock: return std::string("fbd_") + to_string(et);
      case Strategy::kVnCentered:
        return "vn_w" + std::to_string(window) + "_" + to_string(et);
      case Strategy::kCnCentered:
        return "cn_w" + std::to_string(window) + "_" + to_string(et);
    }
    return "?";
  }
};

struct RunConfig {
  CodeSpec code;
  int resample_limit = 1000;
  ChannelSpec channel;  // snr_db is taken from snr_grid per point
  std::vector<double> snr_grid;
  int imax_fbd = 200;
  std::vector<DecoderRowSpec> rows;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_path = "results.csv";
  bool freeze_realization = false;

  void validate() const {
    code.validate();
    channel.validate();
    if (snr_grid.empty()) throw std::invalid_argument("RunConfig: empty SNR grid");
    if (rows.empty()) throw std::invalid_argument("RunConfig: empty decoder row list");
    if (trials < 1) throw std::invalid_argument("RunConfig: trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("RunConfig: workers must be >= 1");
    if (imax_fbd < 1) throw std::invalid_argument("RunConfig: imax_fbd must be >= 1");
    for (const DecoderRowSpec& row : rows)
      if (row.strategy != Strategy::kFullBlock &&
          (row.window < 1 || row.window > code.layer_count()))
        throw std::invalid_argument("RunConfig: row window outside [1, layer_count]");
  }
};

// Aggregated measurement of one (decoder row, SNR) cell. Counters are exact
// integers so aggregation order cannot perturb the result.
struct ResultRow {
  std::string decoder;
  std::string strategy;
  int window = 0;
  std::string et_set;
  double snr_db = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t block_errors = 0;
  double bler = 0.0;
  double bler_lo = 0.0;
  double bler_hi = 0.0;
  double anmu = 0.0;
  double rel_anmu = 0.0;
  int imax = 0;
  std::uint64_t nmu_max = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// 95% Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t n,
                                double z = 1.959963984540054) {
  if (n == 0) throw std::invalid_argument("wilson_interval: zero sample count");
  double p = static_cast<double>(successes) / static_cast<double>(n);
  double nn = static_cast<double>(n);
  double z2 = z * z;
  double denom = 1.0 + z2 / nn;
  double center = (p + z2 / (2.0 * nn)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  double lo = center - half, hi = center + half;
  // The interval must contain the point estimate; anchor the degenerate tails
  // exactly rather than leaving them to rounding.
  if (successes == 0) lo = 0.0;
  if (successes == n) hi = 1.0;
  return Interval{lo < 0.0 ? 0.0 : lo, hi > 1.0 ? 1.0 : hi};
}

namespace detail {

constexpr std::uint64_t kFrozenRealizationSalt = 0x66726f7a656eULL;

inline std::uint64_t snr_salt(double snr_db) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(snr_db * 1000.0)));
}

struct RowBudget {
  WindowConfig wcfg;
  std::uint64_t i1 = 0;
  std::uint64_t nmu_max = 0;
};

inline RowBudget row_budget(const RunConfig& cfg, const DecoderRowSpec& row) {
  BudgetSpec ref = BudgetSpec::reference(cfg.code, cfg.imax_fbd);
  RowBudget rb;
  rb.wcfg.strategy = row.strategy;
  rb.wcfg.et = row.et;
  if (row.strategy == Strategy::kFullBlock) {
    rb.wcfg.window = cfg.code.layer_count();
    rb.wcfg.imax_per_window = cfg.imax_fbd;
    rb.i1 = ref.i1_fbd;
    rb.nmu_max = ref.nmu_max;
  } else {
    rb.wcfg.window = row.window;
    DerivedBudget d = derive_imax(ref, cfg.code, row.strategy, row.window);
    rb.wcfg.imax_per_window = d.imax;
    rb.i1 = d.i1;
    rb.nmu_max = d.nmu_max;
  }
  return rb;
}

}  // namespace detail

// Runs `cfg.trials` independent all-zero-codeword trials of one decoder row
// at one SNR. Trial t draws everything from a seed derived from (master
// seed, SNR, t) alone: the same noise and code realizations are replayed for
// every decoder row, and the partition of trials across workers cannot
// change any output.
inline ResultRow run_point(const RunConfig& cfg, const DecoderRowSpec& row, double snr_db) {
  cfg.validate();
  const detail::RowBudget rb = detail::row_budget(cfg, row);

  ChannelSpec ch = cfg.channel;
  ch.snr_db = snr_db;

  std::optional<CodeRealization> frozen;
  if (cfg.freeze_realization) {
    std::mt19937_64 eng(derive_seed(cfg.seed, detail::kFrozenRealizationSalt));
    frozen = sample_realization(cfg.code, eng, cfg.resample_limit);
  }

  const std::uint64_t point_salt = detail::snr_salt(snr_db);
  const std::size_t n = static_cast<std::size_t>(cfg.code.n_bits());

  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> block_errors{0};
  std::atomic<std::uint64_t> total_nmu{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    try {
      for (std::uint64_t t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1)) {
        std::mt19937_64 eng(derive_seed(cfg.seed, point_salt, t));
        const CodeRealization* real = frozen ? &*frozen : nullptr;
        CodeRealization sampled;
        if (!real) {
          sampled = sample_realization(cfg.code, eng, cfg.resample_limit);
          real = &sampled;
        }
        LlrBlock llrs = generate_allzero_llrs(n, ch, eng);
        DecodeOutcome outcome = decode_windowed<FixedArith>(llrs, *real, rb.wcfg);
        if (!outcome.success) block_errors.fetch_add(1, std::memory_order_relaxed);
        total_nmu.fetch_add(outcome.nmu, std::memory_order_relaxed);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  const int nworkers =
      static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.workers), cfg.trials));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ResultRow out;
  out.decoder = row.label();
  out.strategy = to_string(row.strategy);
  out.window = rb.wcfg.window;
  out.et_set = to_string(row.et);
  out.snr_db = snr_db;
  out.trials = cfg.trials;
  out.block_errors = block_errors.load();
  out.bler = static_cast<double>(out.block_errors) / static_cast<double>(out.trials);
  Interval ci = wilson_interval(out.block_errors, out.trials);
  out.bler_lo = ci.lo;
  out.bler_hi = ci.hi;
  out.anmu = static_cast<double>(total_nmu.load()) / static_cast<double>(out.trials);
  out.rel_anmu = static_cast<double>(total_nmu.load()) /
                 (static_cast<double>(out.trials) * static_cast<double>(rb.nmu_max));
  out.imax = rb.wcfg.imax_per_window;
  out.nmu_max = rb.nmu_max;
  out.seed = cfg.seed;
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_atomic(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace detail

inline const char* csv_header() {
  return "decoder,strategy,window,et_set,snr_db,trials,block_errors,bler,bler_lo,bler_hi,anmu,"
         "rel_anmu,imax,nmu_max,seed";
}

inline std::string to_csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << r.decoder << ',' << r.strategy << ',' << r.window << ',' << r.et_set << ','
     << detail::format_double(r.snr_db) << ',' << r.trials << ',' << r.block_errors << ','
     << detail::format_double(r.bler) << ',' << detail::format_double(r.bler_lo) << ','
     << detail::format_double(r.bler_hi) << ',' << detail::format_double(r.anmu) << ','
     << detail::format_double(r.rel_anmu) << ',' << r.imax << ',' << r.nmu_max << ',' << r.seed;
  return os.str();
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const ResultRow& r : rows) os << to_csv_line(r) << '\n';
  return os.str();
}

inline ResultRow parse_csv_line(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  f.push_back(cur);
  if (f.size() != 15) throw std::invalid_argument("parse_csv_line: expected 15 fields");
  ResultRow r;
  r.decoder = f[0];
  r.strategy = f[1];
  r.window = std::stoi(f[2]);
  r.et_set = f[3];
  r.snr_db = std::stod(f[4]);
  r.trials = std::stoull(f[5]);
  r.block_errors = std::stoull(f[6]);
  r.bler = std::stod(f[7]);
  r.bler_lo = std::stod(f[8]);
  r.bler_hi = std::stod(f[9]);
  r.anmu = std::stod(f[10]);
  r.rel_anmu = std::stod(f[11]);
  r.imax = std::stoi(f[12]);
  r.nmu_max = std::stoull(f[13]);
  r.seed = std::stoull(f[14]);
  return r;
}

inline nlohmann::ordered_json to_json(const ResultRow& r) {
  nlohmann::ordered_json j;
  j["decoder"] = r.decoder;
  j["strategy"] = r.strategy;
  j["window"] = r.window;
  j["et_set"] = r.et_set;
  j["snr_db"] = r.snr_db;
  j["trials"] = r.trials;
  j["block_errors"] = r.block_errors;
  j["bler"] = r.bler;
  j["bler_lo"] = r.bler_lo;
  j["bler_hi"] = r.bler_hi;
  j["anmu"] = r.anmu;
  j["rel_anmu"] = r.rel_anmu;
  j["imax"] = r.imax;
  j["nmu_max"] = r.nmu_max;
  j["seed"] = r.seed;
  return j;
}

// Full sweep: decoder rows outer, SNR grid inner, each cell via run_point.
// Results are written to cfg.out_path as CSV and to the same path with a
// .jsonl extension, both via temp-file-and-rename. `progress` (if given) is
// called with each finished row.
inline std::vector<ResultRow> run_sweep(
    const RunConfig& cfg, const std::function<void(const ResultRow&)>& progress = {}) {
  cfg.validate();
  std::vector<ResultRow> rows;
  rows.reserve(cfg.rows.size() * cfg.snr_grid.size());
  for (const DecoderRowSpec& row : cfg.rows) {
    for (double snr : cfg.snr_grid) {
      rows.push_back(run_point(cfg, row, snr));
      if (progress) progress(rows.back());
    }
  }
  detail::write_atomic(cfg.out_path, to_csv(rows));
  std::string jsonl;
  for (const ResultRow& r : rows) jsonl += to_json(r).dump() + "\n";
  std::filesystem::path jpath(cfg.out_path);
  jpath.replace_extension(".jsonl");
  detail::write_atomic(jpath.string(), jsonl);
  return rows;
}

// --- budget table ------------------------------------------------------

struct ComplexityRow {
  std::string label;
  Strategy strategy = Strategy::kFullBlock;
  int window = 0;          // 0 for full block
  std::uint64_t nmsg = 0;  // mid-chain per-iteration cost; 0 for full block
  std::uint64_t i1 = 0;
  int imax = 0;
  std::uint64_t nmu_max = 0;
};

// The canonical comparison set: full-block reference plus the studied
// VN- and CN-centered window sizes.
inline std::vector<std::pair<Strategy, int>> default_table_configs() {
  return {{Strategy::kFullBlock, 0}, {Strategy::kVnCentered, 12}, {Strategy::kVnCentered, 14},
          {Strategy::kVnCentered, 16}, {Strategy::kVnCentered, 20}, {Strategy::kCnCentered, 10},
          {Strategy::kCnCentered, 12}, {Strategy::kCnCentered, 14}};
}

inline std::vector<ComplexityRow> complexity_table(
    const CodeSpec& spec, int imax_fbd = 200,
    const std::vector<std::pair<Strategy, int>>& configs = default_table_configs()) {
  BudgetSpec ref = BudgetSpec::reference(spec, imax_fbd);
  std::vector<ComplexityRow> rows;
  for (auto [strategy, window] : configs) {
    ComplexityRow r;
    r.strategy = strategy;
    r.window = window;
    if (strategy == Strategy::kFullBlock) {
      r.label = "fbd";
      r.i1 = ref.i1_fbd;
      r.imax = ref.imax_fbd;
      r.nmu_max = ref.nmu_max;
    } else {
      r.label = std::string(strategy == Strategy::kVnCentered ? "vn_w" : "cn_w") +
                std::to_string(window);
      r.nmsg = nmsg_middle(spec, strategy, window);
      DerivedBudget d = derive_imax(ref, spec, strategy, window);
      r.i1 = d.i1;
      r.imax = d.imax;
      r.nmu_max = d.nmu_max;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// Fraction of the reference budget a configuration cannot spend because the
// iteration cap is integral.
inline double budget_deviation(const CodeSpec& spec, int imax_fbd, Strategy strategy,
                               int window) {
  BudgetSpec ref = BudgetSpec::reference(spec, imax_fbd);
  if (strategy == Strategy::kFullBlock) return 0.0;
  DerivedBudget d = derive_imax(ref, spec, strategy, window);
  return static_cast<double>(ref.nmu_max - d.nmu_max) / static_cast<double>(ref.nmu_max);
}

}  // namespace scldpc
