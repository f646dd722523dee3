#include "vlsc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "vlsc/asymptotics.hpp"
#include "vlsc/bounds.hpp"
#include "vlsc/codes.hpp"
#include "vlsc/errors.hpp"
#include "vlsc/spectrum.hpp"

namespace vlsc::cli {

namespace {

using Json = nlohmann::ordered_json;

struct None {};
using Cell = std::variant<None, double, std::int64_t, std::string>;

struct Report {
  std::string command;
  int base = 2;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool scalar = false;  // exactly one row, emitted as a JSON object
  std::vector<std::pair<std::string, Cell>> summary;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError(key, "'" + t + "' is not a number");
  }
  return v;
}

std::int64_t parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ValidationError(key, "'" + t + "' is not an integer");
  }
  return v;
}

std::vector<double> parse_probs(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item, key));
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, None>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      c);
}

Json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, None>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_double(v);
          return v;
        } else {
          return v;
        }
      },
      c);
}

Cell optional_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{None{}}; }

std::string unit_note(int base) {
  return "rates in base-" + std::to_string(base) + " log units per symbol; counts are exact decimal integers";
}

std::string render_csv(const Report& r) {
  std::ostringstream os;
  os << "# vlsc " << r.command << "; " << unit_note(r.base) << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
  for (const auto& [key, value] : r.summary) os << "# " << key << "=" << csv_cell(value) << "\n";
  return os.str();
}

std::string render_json(const Report& r) {
  Json j;
  j["command"] = r.command;
  j["unit"] = unit_note(r.base);
  if (r.scalar && r.rows.size() == 1) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) j[r.columns[i]] = json_cell(r.rows[0][i]);
  } else {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < r.columns.size(); ++i) obj[r.columns[i]] = json_cell(row[i]);
      rows.push_back(std::move(obj));
    }
    j["rows"] = std::move(rows);
  }
  if (!r.summary.empty()) {
    Json summary = Json::object();
    for (const auto& [key, value] : r.summary) summary[key] = json_cell(value);
    j["summary"] = std::move(summary);
  }
  return j.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

Distribution distribution_from(const std::map<std::string, std::string>& kv, const std::string& key, int base) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ValidationError(key, "missing from source file");
  try {
    return make_distribution(parse_probs(it->second, key), base);
  } catch (const ValidationError& e) {
    if (e.key() == "probs") throw ValidationError(key, e.what());
    throw;
  }
}

// Everything a command may read; each command validates what it uses.
struct RunConfig {
  std::string source_path;
  std::optional<int> n;
  std::string n_grid;
  std::string eps = "";
  std::optional<double> delta;
  std::optional<std::string> eta_grid;
  std::optional<double> eta;
  std::optional<double> gamma;
  std::string slack_scale = "linear";
  std::optional<std::string> rate;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  double tail_fraction = 0.5;
  std::uint64_t max_types = SpectrumLimits{}.max_type_classes;
  std::string format = "csv";
  std::string out_path;
};

int require_n(const RunConfig& cfg) {
  if (!cfg.n) throw ValidationError("n", "required");
  if (*cfg.n < 1) throw ValidationError("n", "block length must be at least 1");
  return *cfg.n;
}

double require_eps(const RunConfig& cfg) {
  if (cfg.eps.empty()) throw ValidationError("eps", "required");
  const double eps = parse_real(cfg.eps, "eps");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  return eps;
}

double require_delta(const RunConfig& cfg) {
  if (!cfg.delta) throw ValidationError("delta", "required");
  if (!(*cfg.delta >= 0.0 && *cfg.delta < 1.0)) throw ValidationError("delta", "overflow budget must lie in [0, 1)");
  return *cfg.delta;
}

std::vector<int> require_n_grid(const RunConfig& cfg) {
  auto grid = parse_int_grid(cfg.n_grid, "n_grid");
  if (grid.empty()) throw ValidationError("n_grid", "block-length grid is empty");
  for (int n : grid) {
    if (n < 1) throw ValidationError("n_grid", "block lengths must be at least 1");
  }
  return grid;
}

const Distribution& require_iid(const SourceConfig& src) {
  if (src.kind != SourceKind::Iid) throw ValidationError("model", "this command needs model = iid");
  return src.first;
}

Report cmd_spectrum(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  const int n = require_n(cfg);
  const Spectrum s = spectrum_of(src, n, limits);
  Report r{"spectrum", s.base, {"rate", "count", "mass"}, {}, false, {}};
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    r.rows.push_back({s.rate(i), to_decimal(s.atoms[i].count), s.atoms[i].mass});
  }
  r.summary.emplace_back("n", std::int64_t{n});
  return r;
}

Report cmd_tradeoff(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  const int n = require_n(cfg);
  if (!cfg.eta_grid) throw ValidationError("eta_grid", "required");
  if (cfg.eps.empty()) throw ValidationError("eps", "required");
  const auto etas = parse_real_grid(*cfg.eta_grid, "eta_grid");
  const auto epss = parse_real_grid(cfg.eps, "eps");
  for (double e : etas) {
    if (!(e >= 1.0)) throw ValidationError("eta_grid", "thresholds must be >= 1");
  }
  for (double e : epss) {
    if (!(e >= 0.0 && e < 1.0)) throw ValidationError("eps", "error budgets must lie in [0, 1)");
  }
  const Spectrum s = spectrum_of(src, n, limits);
  Report r{"tradeoff", s.base, {"eta", "eps", "delta_star", "M", "exact"}, {}, false, {}};
  for (double eps : epss) {
    for (double eta : etas) {
      const auto p = optimal_tradeoff(s, eta, eps);
      r.rows.push_back({eta, eps, p.delta_star, to_decimal(p.budget), std::int64_t{p.exact ? 1 : 0}});
    }
  }
  r.summary.emplace_back("n", std::int64_t{n});
  return r;
}

Report cmd_threshold(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  const double eps = require_eps(cfg);
  const double delta = require_delta(cfg);
  if (!(eps + delta < 1.0)) throw ValidationError("delta", "eps + delta must be below 1");
  std::vector<int> grid;
  if (cfg.n) {
    grid.push_back(require_n(cfg));
  } else {
    grid = require_n_grid(cfg);
  }
  Report r{"threshold", src.first.base, {"n", "eps", "delta", "eta_star", "rate"}, {}, false, {}};
  for (int n : grid) {
    const Spectrum s = spectrum_of(src, n, limits);
    const auto eta = optimal_threshold(s, eps, delta);
    r.rows.push_back({std::int64_t{n}, eps, delta, eta, static_cast<double>(eta) / n});
  }
  return r;
}

struct BoundsOutcome {
  Report report;
  bool violated = false;
};

BoundsOutcome cmd_bounds(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  const int n = require_n(cfg);
  const double eps = require_eps(cfg);
  if (!cfg.gamma) throw ValidationError("gamma", "required");
  if (!(*cfg.gamma > 0.0)) throw ValidationError("gamma", "gamma must be positive");
  if (!cfg.eta_grid) throw ValidationError("eta_grid", "required");
  const auto etas = parse_real_grid(*cfg.eta_grid, "eta_grid");
  for (double e : etas) {
    if (!(e >= 1.0)) throw ValidationError("eta_grid", "thresholds must be >= 1");
  }
  SlackRule rule;
  rule.gamma = *cfg.gamma;
  if (cfg.slack_scale == "linear") {
    rule.scale = SlackRule::Scale::Linear;
  } else if (cfg.slack_scale == "sqrt") {
    rule.scale = SlackRule::Scale::Sqrt;
  } else {
    throw ValidationError("slack_scale", "must be 'linear' or 'sqrt'");
  }
  const Spectrum s = spectrum_of(src, n, limits);
  BoundsOutcome out;
  out.report = Report{"bounds", s.base, {"eta", "lower", "exact", "upper", "a_n", "optimal"}, {}, false, {}};
  for (const auto& b : sandwich_sweep(s, eps, etas, rule)) {
    out.report.rows.push_back({b.eta, b.lower, b.exact_code_overflow, b.upper, b.a_n, b.exact_optimal});
    if (!b.sandwich_holds()) out.violated = true;
  }
  out.report.summary.emplace_back("n", std::int64_t{n});
  out.report.summary.emplace_back("eps", eps);
  out.report.summary.emplace_back("gamma", *cfg.gamma);
  return out;
}

Report cmd_converge(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  const auto& d = require_iid(src);
  const double eps = require_eps(cfg);
  const double delta = require_delta(cfg);
  const auto grid = require_n_grid(cfg);
  const auto rep = convergence_study(d, eps, delta, grid, limits);
  Report r{"converge",
           d.base,
           {"n", "eta_star", "first_order_gap", "second_order_value", "L_pred", "gap"},
           {},
           false,
           {}};
  for (const auto& m : rep.measurements) {
    r.rows.push_back(
        {std::int64_t{m.n}, m.eta_star, m.first_order_gap, m.second_order_value, rep.L_pred, m.second_order_gap});
  }
  r.summary.emplace_back("H", rep.H);
  r.summary.emplace_back("V", rep.V);
  return r;
}

Report cmd_optimistic(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  if (src.kind != SourceKind::Switching) throw ValidationError("model", "optimistic needs model = switching");
  const double eps = require_eps(cfg);
  const double delta = require_delta(cfg);
  const auto grid = require_n_grid(cfg);
  const SwitchingSchedule sched = make_schedule(src.first, *src.second, src.rule);
  const auto rep = optimistic_study(sched, eps, delta, grid, cfg.tail_fraction, limits);
  Report r{"optimistic", src.first.base, {"n", "value", "component_active"}, {}, false, {}};
  for (const auto& p : rep.points) {
    r.rows.push_back({std::int64_t{p.n}, p.value, static_cast<std::int64_t>(p.component + 1)});
  }
  r.summary.emplace_back("limsup_estimate", rep.limsup_estimate);
  r.summary.emplace_back("liminf_estimate", rep.liminf_estimate);
  r.summary.emplace_back("component_entropy_max", rep.component_entropy_max);
  r.summary.emplace_back("component_entropy_min", rep.component_entropy_min);
  return r;
}

Report cmd_asymptotics(const RunConfig& cfg, const SourceConfig& src) {
  const auto& d = require_iid(src);
  const double eps = require_eps(cfg);
  const double delta = require_delta(cfg);
  const auto rep = asymptotic_report(d, eps, delta);
  Report r{"asymptotics", d.base, {"H", "V", "R1", "R2", "L_pred", "kpv"}, {}, true, {}};
  std::vector<Cell> row{rep.H, rep.V, rep.R1, rep.R2, rep.L_pred, optional_cell(rep.kpv)};
  if (cfg.rate) {
    double rate = rep.H;
    if (*cfg.rate != "H") {
      rate = parse_real(*cfg.rate, "rate");
      const double gap = std::fabs(rate - rep.H);
      if (gap != 0.0 && gap <= 1e-9) {
        throw ValidationError("rate", "within 1e-9 of the entropy; pass --rate H to evaluate at R = H");
      }
    }
    r.columns.push_back("rate");
    r.columns.push_back("L_at_rate");
    row.emplace_back(rate);
    row.emplace_back(second_order_threshold(d, eps, delta, rate));
  }
  r.rows.push_back(std::move(row));
  return r;
}

Report cmd_simulate(const RunConfig& cfg, const SourceConfig& src, const SpectrumLimits& limits) {
  const auto& d = require_iid(src);
  const int n = require_n(cfg);
  const double eps = require_eps(cfg);
  if (cfg.samples < 1) throw ValidationError("samples", "sample count must be at least 1");
  const double eta = cfg.eta ? *cfg.eta : std::max(1.0, n * entropy(d));
  if (!(eta >= 1.0)) throw ValidationError("eta", "overflow threshold must be >= 1");
  const Spectrum s = iid_spectrum(d, n, limits);
  const CodeSpec code = construct_theorem2_code(s, eps);
  const auto samples = sample_sequences(d, n, cfg.samples, cfg.seed);
  const auto stats = simulate_roundtrip(s, code, samples, eta);
  Report r{"simulate",
           d.base,
           {"n", "eps", "eta", "samples", "seed", "empirical_error", "exact_error", "empirical_overflow",
            "exact_overflow"},
           {},
           true,
           {}};
  r.rows.push_back({std::int64_t{n}, eps, eta, static_cast<std::int64_t>(stats.samples),
                    static_cast<std::int64_t>(cfg.seed), stats.error_rate, code.error_mass, stats.overflow_rate,
                    code_overflow(code, eta)});
  return r;
}

}  // namespace

SourceConfig parse_source(std::istream& in) {
  static const std::vector<std::string> known{"model", "probs", "base", "K", "probs2", "weight", "switch_even",
                                              "switch_base"};
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("source", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(key, "unknown key on line " + std::to_string(line_no));
    }
    if (key == "K") key = "base";
    if (!kv.emplace(key, value).second) throw ValidationError(key, "given more than once");
  }

  SourceConfig src;
  const std::string model = kv.count("model") ? kv.at("model") : "iid";
  int base = 2;
  if (kv.count("base")) base = static_cast<int>(parse_integer(kv.at("base"), "base"));
  if (base < 2) throw ValidationError("base", "code alphabet size K must be at least 2");
  src.first = distribution_from(kv, "probs", base);
  if (model == "iid") {
    src.kind = SourceKind::Iid;
    for (const char* k : {"probs2", "weight", "switch_even", "switch_base"}) {
      if (kv.count(k)) throw ValidationError(k, "not used by model = iid");
    }
  } else if (model == "mixed") {
    src.kind = SourceKind::Mixed;
    src.second = distribution_from(kv, "probs2", base);
    if (!kv.count("weight")) throw ValidationError("weight", "missing from source file");
    src.weight = parse_real(kv.at("weight"), "weight");
    if (!(src.weight > 0.0 && src.weight < 1.0)) throw ValidationError("weight", "must lie in (0, 1)");
    if (src.second->alphabet_size() != src.first.alphabet_size()) {
      throw ValidationError("probs2", "mixture components must share one alphabet");
    }
  } else if (model == "switching") {
    src.kind = SourceKind::Switching;
    src.second = distribution_from(kv, "probs2", base);
    if (kv.count("switch_even")) {
      const auto which = parse_integer(kv.at("switch_even"), "switch_even");
      if (which != 1 && which != 2) throw ValidationError("switch_even", "must be 1 or 2");
      src.rule.even_component = static_cast<std::size_t>(which - 1);
    }
    if (kv.count("switch_base")) {
      src.rule.log_base = static_cast<int>(parse_integer(kv.at("switch_base"), "switch_base"));
    }
    make_schedule(src.first, *src.second, src.rule);  // validates
  } else {
    throw ValidationError("model", "must be iid, mixed or switching");
  }
  return src;
}

SourceConfig load_source(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("source", "cannot read '" + path + "'");
  return parse_source(f);
}

Spectrum spectrum_of(const SourceConfig& src, int n, const SpectrumLimits& limits) {
  switch (src.kind) {
    case SourceKind::Iid:
      return iid_spectrum(src.first, n, limits);
    case SourceKind::Mixed:
      return mixed_spectrum(src.first, *src.second, src.weight, n, limits);
    case SourceKind::Switching:
      return switching_spectrum(make_schedule(src.first, *src.second, src.rule), n, limits);
  }
  throw std::logic_error("unknown source kind");
}

std::vector<double> parse_real_grid(const std::string& text, const std::string& key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_real(parts[0], key));
      continue;
    }
    if (parts.size() > 3) throw ValidationError(key, "bad grid item '" + item + "'");
    const double a = parse_real(parts[0], key);
    const double b = parse_real(parts[1], key);
    const std::string step_text = parts.size() == 3 ? parts[2] : "1";
    const bool geometric = !step_text.empty() && step_text[0] == '*';
    const double step = parse_real(geometric ? step_text.substr(1) : step_text, key);
    if (geometric ? !(step > 1.0 && a > 0.0) : !(step > 0.0)) {
      throw ValidationError(key, "grid step must move toward the end point in '" + item + "'");
    }
    const double slack = 1e-9 * std::max(1.0, std::fabs(b));
    if (geometric) {
      for (double v = a; v <= b + slack; v *= step) out.push_back(v);
    } else {
      const auto count = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9));
      for (std::int64_t i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
    }
    if (out.size() > 10'000'000) throw ValidationError(key, "grid too large");
  }
  return out;
}

std::vector<int> parse_int_grid(const std::string& text, const std::string& key) {
  std::vector<int> out;
  for (double v : parse_real_grid(text, key)) {
    const double r = std::round(v);
    if (std::fabs(v - r) > 1e-9 || r < std::numeric_limits<int>::min() || r > std::numeric_limits<int>::max()) {
      throw ValidationError(key, "grid values must be integers");
    }
    out.push_back(static_cast<int>(r));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact finite-blocklength analysis of variable-length source codes with nonvanishing error", "vlsc"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--source", cfg.source_path, "Source definition file")->required();
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out_path, "Output file (default: stdout)");
    sub->add_option("--max-types", cfg.max_types, "Ceiling on type classes per spectrum");
  };
  const auto add_n = [&](CLI::App* sub) { sub->add_option("--n", cfg.n, "Block length"); };
  const auto add_eps = [&](CLI::App* sub) { sub->add_option("--eps", cfg.eps, "Error budget"); };
  const auto add_delta = [&](CLI::App* sub) { sub->add_option("--delta", cfg.delta, "Overflow budget"); };
  const auto add_n_grid = [&](CLI::App* sub) { sub->add_option("--n-grid", cfg.n_grid, "Block-length grid"); };

  auto* spectrum = app.add_subcommand("spectrum", "Atoms of the self-information spectrum");
  common(spectrum);
  add_n(spectrum);

  auto* tradeoff = app.add_subcommand("tradeoff", "Exact minimal overflow over an (eta, eps) grid");
  common(tradeoff);
  add_n(tradeoff);
  tradeoff->add_option("--eps", cfg.eps, "Error budget grid");
  tradeoff->add_option("--eta-grid", cfg.eta_grid, "Threshold grid");

  auto* threshold = app.add_subcommand("threshold", "Exact optimal integer threshold");
  common(threshold);
  add_n(threshold);
  add_n_grid(threshold);
  add_eps(threshold);
  add_delta(threshold);

  auto* bounds = app.add_subcommand("bounds", "Achievability/converse sandwich over a threshold grid");
  common(bounds);
  add_n(bounds);
  add_eps(bounds);
  bounds->add_option("--eta-grid", cfg.eta_grid, "Threshold grid");
  bounds->add_option("--gamma", cfg.gamma, "Slack exponent (a_n = K^{-n gamma} or K^{-sqrt(n) gamma})");
  bounds->add_option("--slack-scale", cfg.slack_scale, "linear | sqrt");

  auto* converge = app.add_subcommand("converge", "Optimal thresholds against first/second-order predictions");
  common(converge);
  add_n_grid(converge);
  add_eps(converge);
  add_delta(converge);

  auto* optimistic = app.add_subcommand("optimistic", "Quantile rates along a switching source's n-grid");
  common(optimistic);
  add_n_grid(optimistic);
  add_eps(optimistic);
  add_delta(optimistic);
  optimistic->add_option("--tail-fraction", cfg.tail_fraction, "Fraction of the grid used for the estimates");

  auto* asymptotics = app.add_subcommand("asymptotics", "Closed-form first/second-order constants");
  common(asymptotics);
  add_eps(asymptotics);
  add_delta(asymptotics);
  asymptotics->add_option("--rate", cfg.rate, "First-order rate R (number or H)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo round trip of the threshold code");
  common(simulate);
  add_n(simulate);
  add_eps(simulate);
  simulate->add_option("--eta", cfg.eta, "Overflow threshold (default n*H)");
  simulate->add_option("--samples", cfg.samples, "Number of sampled sequences");
  simulate->add_option("--seed", cfg.seed, "Random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    const SourceConfig src = load_source(cfg.source_path);
    SpectrumLimits limits;
    limits.max_type_classes = cfg.max_types;
    Report report;
    bool violated = false;
    if (spectrum->parsed()) {
      report = cmd_spectrum(cfg, src, limits);
    } else if (tradeoff->parsed()) {
      report = cmd_tradeoff(cfg, src, limits);
    } else if (threshold->parsed()) {
      report = cmd_threshold(cfg, src, limits);
    } else if (bounds->parsed()) {
      auto outcome = cmd_bounds(cfg, src, limits);
      report = std::move(outcome.report);
      violated = outcome.violated;
    } else if (converge->parsed()) {
      report = cmd_converge(cfg, src, limits);
    } else if (optimistic->parsed()) {
      report = cmd_optimistic(cfg, src, limits);
    } else if (asymptotics->parsed()) {
      report = cmd_asymptotics(cfg, src);
    } else {
      report = cmd_simulate(cfg, src, limits);
    }
    const std::string text = cfg.format == "json" ? render_json(report) : render_csv(report);
    if (cfg.out_path.empty()) {
      out << text;
    } else {
      write_atomically(cfg.out_path, text);
    }
    if (violated) {
      err << "error: a finite-blocklength bound was violated; see the report\n";
      return kTheoremViolation;
    }
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << "\n";
    return kResourceLimit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace vlsc::cli
