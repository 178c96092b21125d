// Command-line front end: Monte-Carlo sweeps, the derived budget table, and
// realization generation for terminated spatially coupled QC codes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "scldpc/scldpc.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_simulate(const std::string& config_path, const std::optional<std::string>& snr_override,
                 const std::optional<std::uint64_t>& trials,
                 const std::optional<std::uint64_t>& seed, const std::optional<int>& workers,
                 const std::optional<std::string>& out) {
  scldpc::RunConfig cfg = scldpc::parse_run_config(read_file(config_path));
  if (snr_override) {
    scldpc::detail::IniEntry e;
    e.section = "channel";
    e.key = "snr_db";
    e.value = *snr_override;
    cfg.snr_grid.clear();
    scldpc::detail::parse_snr_tokens(e, cfg.snr_grid);
  }
  if (trials) cfg.trials = *trials;
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  if (out) cfg.out_path = *out;
  cfg.validate();

  for (const scldpc::DecoderRowSpec& row : cfg.rows) {
    if (row.strategy == scldpc::Strategy::kFullBlock) continue;
    if (auto warn = scldpc::window_size_warning(row.window, cfg.code.memory))
      std::cerr << "warning: row " << row.label() << ": " << *warn << "\n";
  }

  std::cout << scldpc::csv_header() << "\n";
  scldpc::run_sweep(cfg, [](const scldpc::ResultRow& r) {
    std::cout << scldpc::to_csv_line(r) << "\n" << std::flush;
  });
  std::cerr << "wrote " << cfg.out_path << "\n";
  return 0;
}

int run_table(const std::string& config_path) {
  scldpc::CodeSpec spec;
  int imax_fbd = 200;
  if (!config_path.empty()) {
    scldpc::RunConfig cfg = scldpc::parse_run_config(read_file(config_path));
    spec = cfg.code;
    imax_fbd = cfg.imax_fbd;
  }
  auto rows = scldpc::complexity_table(spec, imax_fbd);
  std::printf("%-8s %6s %8s %6s %10s\n", "decoder", "W", "N_msg", "I_max", "N_max");
  for (const auto& r : rows) {
    if (r.strategy == scldpc::Strategy::kFullBlock)
      std::printf("%-8s %6s %8s %6d %10llu\n", r.label.c_str(), "-", "-", r.imax,
                  static_cast<unsigned long long>(r.nmu_max));
    else
      std::printf("%-8s %6d %8llu %6d %10llu\n", r.label.c_str(), r.window,
                  static_cast<unsigned long long>(r.nmsg), r.imax,
                  static_cast<unsigned long long>(r.nmu_max));
  }
  return 0;
}

int run_codegen(std::uint64_t seed, const std::string& out, const scldpc::CodeSpec& spec,
                int resample_limit) {
  std::mt19937_64 eng(seed);
  scldpc::CodeRealization real = scldpc::sample_realization(spec, eng, resample_limit);
  std::string text = scldpc::dump_realization(real);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + out);
    os << text;
    std::cerr << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Windowed-decoding simulator for terminated spatially coupled QC-LDPC codes"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo sweep from an INI config");
  std::string config_path;
  std::optional<std::string> snr_override;
  std::optional<std::uint64_t> trials, seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  sim->add_option("--config", config_path, "INI configuration file")->required();
  sim->add_option("--snr", snr_override, "override SNR grid, e.g. '8 9' or '8:0.5:10'");
  sim->add_option("--trials", trials, "override trials per point");
  sim->add_option("--seed", seed, "override master seed");
  sim->add_option("--workers", workers, "override worker thread count");
  sim->add_option("--out", out, "override output CSV path");

  auto* table = app.add_subcommand("table", "print the derived equal-budget iteration table");
  std::string table_config;
  table->add_option("--config", table_config, "INI config supplying the code shape (optional)");

  auto* codegen = app.add_subcommand("codegen", "sample a 4-cycle-free realization and dump it");
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  scldpc::CodeSpec gen_spec;
  int gen_resample = 1000;
  codegen->add_option("--seed", gen_seed, "sampling seed");
  codegen->add_option("--out", gen_out, "output path ('-' for stdout)");
  codegen->add_option("--b", gen_spec.vn_blocks, "block columns per instant");
  codegen->add_option("--c", gen_spec.cn_blocks, "block rows per instant");
  codegen->add_option("--psi", gen_spec.memory, "coupling memory");
  codegen->add_option("--period", gen_spec.period, "time-variation period");
  codegen->add_option("--theta", gen_spec.lifting, "circulant size");
  codegen->add_option("--coupling-len", gen_spec.coupling_len, "coupling length");
  codegen->add_option("--resample-limit", gen_resample, "rejection sampling attempt cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(config_path, snr_override, trials, seed, workers, out);
    if (table->parsed()) return run_table(table_config);
    if (codegen->parsed()) return run_codegen(gen_seed, gen_out, gen_spec, gen_resample);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
