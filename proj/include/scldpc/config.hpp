#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scldpc/harness.hpp"

namespace scldpc {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

// Minimal strict INI: [section] headers, key = value pairs, # or ;
// comments. Keys may repeat. Anything else is an error with its line number.
inline std::vector<IniEntry> parse_ini(std::string_view text) {
  std::vector<IniEntry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": empty section name");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    IniEntry e;
    e.section = section;
    e.key = trim(std::string_view(line).substr(0, eq));
    e.value = trim(std::string_view(line).substr(eq + 1));
    e.line = line_no;
    if (e.key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (e.section.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": key outside any section");
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::string entry_context(const IniEntry& e) {
  return "config line " + std::to_string(e.line) + " [" + e.section + "] " + e.key;
}

inline long long parse_int(const IniEntry& e) {
  long long v = 0;
  auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc{} || res.ptr != e.value.data() + e.value.size())
    throw std::invalid_argument(entry_context(e) + ": expected integer, got '" + e.value + "'");
  return v;
}

inline double parse_number(const std::string& s, const IniEntry& e) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument(entry_context(e) + ": expected number, got '" + s + "'");
  }
}

inline bool parse_bool(const IniEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw std::invalid_argument(entry_context(e) + ": expected boolean, got '" + e.value + "'");
}

// SNR grids accept plain values and begin:step:end ranges (end inclusive),
// whitespace separated, e.g. "6 7 8:0.5:10".
inline void parse_snr_tokens(const IniEntry& e, std::vector<double>& grid) {
  std::istringstream is(e.value);
  std::string tok;
  while (is >> tok) {
    std::size_t c1 = tok.find(':');
    if (c1 == std::string::npos) {
      grid.push_back(parse_number(tok, e));
      continue;
    }
    std::size_t c2 = tok.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw std::invalid_argument(entry_context(e) + ": range needs begin:step:end");
    double begin = parse_number(tok.substr(0, c1), e);
    double step = parse_number(tok.substr(c1 + 1, c2 - c1 - 1), e);
    double end = parse_number(tok.substr(c2 + 1), e);
    if (step <= 0.0)
      throw std::invalid_argument(entry_context(e) + ": range step must be positive");
    for (int i = 0;; ++i) {
      double v = begin + i * step;
      if (v > end + step * 1e-9) break;
      grid.push_back(v);
    }
  }
}

// Decoder rows: "fbd", "fbd:ET", "vn:W", "vn:W:ET", "cn:W:ET" with ET in
// {target, complete, all, none}. Defaults: all for fbd, target for windows.
inline DecoderRowSpec parse_row(const IniEntry& e) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  const std::string& v = e.value;
  while (true) {
    std::size_t c = v.find(':', start);
    parts.push_back(trim(std::string_view(v).substr(start, c - start)));
    if (c == std::string::npos) break;
    start = c + 1;
  }
  auto parse_et = [&](const std::string& s) {
    if (s == "target") return EtSet::kTarget;
    if (s == "complete") return EtSet::kComplete;
    if (s == "all") return EtSet::kAll;
    if (s == "none") return EtSet::kNone;
    throw std::invalid_argument(entry_context(e) + ": unknown termination set '" + s + "'");
  };
  DecoderRowSpec row;
  if (parts[0] == "fbd") {
    if (parts.size() > 2)
      throw std::invalid_argument(entry_context(e) + ": fbd row takes at most one option");
    row.strategy = Strategy::kFullBlock;
    row.et = parts.size() == 2 ? parse_et(parts[1]) : EtSet::kAll;
    return row;
  }
  if (parts[0] != "vn" && parts[0] != "cn")
    throw std::invalid_argument(entry_context(e) + ": unknown decoder '" + parts[0] + "'");
  if (parts.size() < 2 || parts.size() > 3)
    throw std::invalid_argument(entry_context(e) + ": window rows are vn:W[:et] or cn:W[:et]");
  row.strategy = parts[0] == "vn" ? Strategy::kVnCentered : Strategy::kCnCentered;
  IniEntry we = e;
  we.value = parts[1];
  row.window = static_cast<int>(parse_int(we));
  row.et = parts.size() == 3 ? parse_et(parts[2]) : EtSet::kTarget;
  return row;
}

}  // namespace detail

// Builds a run configuration from INI text. Unknown sections or keys are
// hard errors; every recognized key is listed here.
inline RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  cfg.snr_grid.clear();
  cfg.rows.clear();
  bool snr_seen = false;
  for (const detail::IniEntry& e : detail::parse_ini(text)) {
    if (e.section == "code") {
      if (e.key == "b") cfg.code.vn_blocks = static_cast<int>(detail::parse_int(e));
      else if (e.key == "c") cfg.code.cn_blocks = static_cast<int>(detail::parse_int(e));
      else if (e.key == "psi") cfg.code.memory = static_cast<int>(detail::parse_int(e));
      else if (e.key == "period") cfg.code.period = static_cast<int>(detail::parse_int(e));
      else if (e.key == "theta") cfg.code.lifting = static_cast<int>(detail::parse_int(e));
      else if (e.key == "coupling_len")
        cfg.code.coupling_len = static_cast<int>(detail::parse_int(e));
      else if (e.key == "resample_limit")
        cfg.resample_limit = static_cast<int>(detail::parse_int(e));
      else
        throw std::invalid_argument(detail::entry_context(e) + ": unknown key");
    } else if (e.section == "channel") {
      if (e.key == "fading") cfg.channel.fading_enabled = detail::parse_bool(e);
      else if (e.key == "branches") cfg.channel.branches = static_cast<int>(detail::parse_int(e));
      else if (e.key == "snr_db") {
        detail::parse_snr_tokens(e, cfg.snr_grid);
        snr_seen = true;
      } else
        throw std::invalid_argument(detail::entry_context(e) + ": unknown key");
    } else if (e.section == "budget") {
      if (e.key == "imax_fbd") cfg.imax_fbd = static_cast<int>(detail::parse_int(e));
      else
        throw std::invalid_argument(detail::entry_context(e) + ": unknown key");
    } else if (e.section == "decoders") {
      if (e.key == "row") cfg.rows.push_back(detail::parse_row(e));
      else
        throw std::invalid_argument(detail::entry_context(e) + ": unknown key");
    } else if (e.section == "run") {
      if (e.key == "trials") cfg.trials = static_cast<std::uint64_t>(detail::parse_int(e));
      else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(e));
      else if (e.key == "workers") cfg.workers = static_cast<int>(detail::parse_int(e));
      else if (e.key == "out") cfg.out_path = e.value;
      else if (e.key == "freeze_realization") cfg.freeze_realization = detail::parse_bool(e);
      else
        throw std::invalid_argument(detail::entry_context(e) + ": unknown key");
    } else {
      throw std::invalid_argument("config line " + std::to_string(e.line) +
                                  ": unknown section [" + e.section + "]");
    }
  }
  if (!snr_seen) cfg.snr_grid = {10.0};
  return cfg;
}

}  // namespace scldpc
