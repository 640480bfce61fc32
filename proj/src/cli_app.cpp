#include "isacfb/cli_app.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "isacfb/mc_sim.hpp"
#include "isacfb/tradeoff.hpp"

namespace isacfb {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// all numeric output passes through here: 9 significant digits keeps diffs
// stable across runs and platforms
std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double round_g9(double v) { return std::strtod(fmt_g9(v).c_str(), nullptr); }

struct Table {
  std::vector<std::pair<std::string, ordered_json>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;
};

std::string cell_to_csv(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_float()) return fmt_g9(v.get<double>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  std::string s = v.get<std::string>();
  if (s.find(',') != std::string::npos) s = "\"" + s + "\"";
  return s;
}

void write_csv(const Table& t, std::ostream& os) {
  for (const auto& [k, v] : t.meta) os << "# " << k << " = " << cell_to_csv(v) << "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
  }
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << cell_to_csv(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
  }
}

void write_json(const Table& t, std::ostream& os) {
  ordered_json j;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  j["meta"] = std::move(meta);
  j["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  j["rows"] = std::move(rows);
  os << j.dump(2) << "\n";
}

void emit(const Table& t, const std::string& format, const std::string& out_path,
          std::ostream& out) {
  std::ostringstream buf;
  if (format == "csv") {
    write_csv(t, buf);
  } else {
    write_json(t, buf);
  }
  if (out_path.empty()) {
    out << buf.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + out_path);
    f << buf.str();
  }
}

ordered_json num(double v) { return round_g9(v); }

// "start:stop:count" inclusive linear grid
std::vector<double> parse_grid(const std::string& spec, const std::string& name) {
  double start = 0.0, stop = 0.0;
  long count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || !is.eof()) {
    throw ConfigError(name + ": expected start:stop:count, got '" + spec + "'");
  }
  if (count < 1) throw ConfigError(name + ": count must be >= 1, got " + std::to_string(count));
  if (stop < start) throw ConfigError(name + ": stop must be >= start");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = start;
  } else {
    for (long i = 0; i < count; ++i) {
      grid[i] = start + (stop - start) * static_cast<double>(i) / (count - 1);
    }
  }
  return grid;
}

struct ChannelSource {
  std::string path;
  double binary_q = -1.0;

  StateDMC load() const {
    const bool has_file = !path.empty();
    const bool has_q = binary_q >= 0.0;
    if (has_file == has_q) {
      throw ConfigError("exactly one of --channel and --binary-q is required");
    }
    if (has_file) return StateDMC::load_json(path);
    if (!(binary_q > 0.0 && binary_q < 1.0)) {
      throw ConfigError("--binary-q must lie strictly inside (0,1)");
    }
    return make_binary_channel(binary_q);
  }

  ordered_json describe() const {
    ordered_json j = ordered_json::object();
    if (!path.empty()) {
      j["file"] = path;
      j["spec"] = ordered_json::parse(StateDMC::load_json(path).dump_json());
    } else {
      j["binary_q"] = num(binary_q);
    }
    return j;
  }
};

void add_channel_flags(CLI::App* cmd, ChannelSource& src) {
  cmd->add_option("--channel", src.path, "channel specification file (JSON)");
  cmd->add_option("--binary-q", src.binary_q,
                  "multiplicative-Bernoulli binary channel with state probability q");
}

std::vector<ordered_json> tradeoff_row(const TradeoffPoint& pt, bool budget_ok) {
  return {num(pt.distortion_budget), pt.n,           num(pt.rate_ach),
          pt.ach_feasible,           num(pt.rate_conv), pt.conv_feasible,
          num(pt.rate_second_order), budget_ok};
}

const std::vector<std::string> kTradeoffColumns = {
    "D",         "n",         "rate_ach",          "ach_feasible",
    "rate_conv", "conv_feasible", "rate_second_order", "budget_ok"};

std::string join_probs(const InputDist& px) {
  std::string s;
  for (int i = 0; i < px.size(); ++i) {
    if (i) s += ';';
    s += fmt_g9(px.probs[i]);
  }
  return s;
}

// ---- subcommand bodies ----------------------------------------------------

struct CommonOpts {
  double eps = 0.05;
  std::vector<long long> n_list;
  std::string format = "csv";
  std::string out_path;
};

void cmd_bounds(const ChannelSource& src, const CommonOpts& o, std::optional<double> budget,
                std::ostream& out) {
  const StateDMC dmc = src.load();
  const double dmin = d_min(dmc).first;
  const double dtriv = d_trivial(dmc);
  const double d_used = budget.value_or(dtriv);
  if (d_used + 1e-12 < dmin) {
    throw InfeasibleError("requested distortion budget " + fmt_g9(d_used) +
                          " is below the best achievable distortion " + fmt_g9(dmin));
  }
  Table t;
  t.meta = {{"eps", num(o.eps)}, {"d_budget", num(d_used)}, {"d_min", num(dmin)},
            {"d_trivial", num(dtriv)}};
  t.columns = {"n",          "d_budget",      "rate_ach",  "ach_feasible", "k_used",
               "input_ach",  "rate_conv",     "conv_feasible", "delta_used",
               "input_conv", "rate_second_order"};
  for (long long n : o.n_list) {
    const MaxRateResult ach = max_rate(dmc, n, o.eps, d_used, BoundSide::achievability);
    const MaxRateResult conv = max_rate(dmc, n, o.eps, d_used, BoundSide::converse);
    const MaxRateResult second = max_rate(dmc, n, o.eps, d_used, BoundSide::second_order);
    const double k_used =
        ach.bound_feasible && ach.inner.params_used.k_coeff ? *ach.inner.params_used.k_coeff : 0.0;
    const double delta_used =
        conv.bound_feasible && conv.inner.params_used.delta ? *conv.inner.params_used.delta : 0.0;
    t.rows.push_back({n, num(d_used), num(ach.rate), ach.bound_feasible, num(k_used),
                      join_probs(ach.input), num(conv.rate), conv.bound_feasible, num(delta_used),
                      join_probs(conv.input), num(second.rate)});
  }
  emit(t, o.format, o.out_path, out);
}

void cmd_sweep(const ChannelSource& src, const CommonOpts& o, const std::string& grid_spec,
               std::ostream& out, Table* captured = nullptr) {
  const StateDMC dmc = src.load();
  std::vector<double> grid =
      grid_spec.empty() ? default_distortion_grid(dmc) : parse_grid(grid_spec, "--d-grid");
  const double dmin = d_min(dmc).first;
  bool any_ok = false;
  for (double d : grid) any_ok = any_ok || d + 1e-12 >= dmin;
  if (!any_ok) {
    throw InfeasibleError("every grid budget lies below the best achievable distortion " +
                          fmt_g9(dmin));
  }
  Table t;
  t.meta = {{"eps", num(o.eps)}, {"d_min", num(dmin)}, {"d_trivial", num(d_trivial(dmc))}};
  t.columns = kTradeoffColumns;
  for (long long n : o.n_list) {
    const std::vector<TradeoffPoint> pts = sweep(dmc, n, o.eps, grid);
    for (const TradeoffPoint& pt : pts) {
      t.rows.push_back(tradeoff_row(pt, pt.distortion_budget + 1e-12 >= dmin));
    }
  }
  emit(t, o.format, o.out_path, out);
  if (captured) *captured = t;
}

void cmd_binary_example(double q, const CommonOpts& o, const std::string& grid_spec,
                        std::ostream& out) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("--binary-q must lie strictly inside (0,1)");
  const BinaryClosedForms cf = binary_closed_forms(q, 0.5);
  const double d_comm = binary_closed_forms(q, cf.alpha_star).distortion;
  const StateDMC dmc = make_binary_channel(q);
  const std::vector<double> grid =
      grid_spec.empty() ? default_distortion_grid(dmc) : parse_grid(grid_spec, "--d-grid");
  Table t;
  t.meta = {{"q", num(q)},
            {"eps", num(o.eps)},
            {"capacity", num(cf.capacity)},
            {"alpha_star", num(cf.alpha_star)},
            {"d_comm", num(d_comm)}};
  t.columns = kTradeoffColumns;
  for (long long n : o.n_list) {
    for (const TradeoffPoint& pt : sweep(dmc, n, o.eps, grid)) {
      t.rows.push_back(tradeoff_row(pt, true));
    }
  }
  emit(t, o.format, o.out_path, out);
}

void cmd_baselines(const ChannelSource& src, const CommonOpts& o, const std::string& gamma_spec,
                   std::ostream& out) {
  if (o.n_list.size() != 1) throw ConfigError("baselines: exactly one --n is required");
  const long long n = o.n_list.front();
  const std::vector<double> gammas =
      gamma_spec.empty() ? parse_grid("0:1:11", "--gamma-grid")
                         : parse_grid(gamma_spec, "--gamma-grid");
  const StateDMC dmc = src.load();
  const SharingSummary s = resource_sharing_summary(dmc, n, o.eps);

  Table t;
  t.meta = {{"eps", num(o.eps)},          {"n", n},
            {"r_max", num(s.r_max)},      {"r_sense", num(s.r_sense)},
            {"d_comm", num(s.d_comm)},    {"d_min", num(s.d_min_value)},
            {"d_trivial", num(s.d_trivial_value)}};
  t.columns = {"gamma", "variant", "rate", "distortion", "joint_rate", "joint_feasible"};
  auto add_rows = [&](const BaselinePoint& p, const std::string& variant) {
    const MaxRateResult joint = max_rate(dmc, n, o.eps, p.distortion, BoundSide::achievability);
    // the joint curve has a point here only when the bound certifies a
    // positive rate; at small distortions the finite-n bound certifies none
    const double joint_rate =
        joint.request_feasible && joint.bound_feasible ? std::max(0.0, joint.rate) : 0.0;
    const bool has_point = joint_rate > 0.0;
    t.rows.push_back({num(p.gamma), variant, num(p.rate), num(p.distortion), num(joint_rate),
                      has_point});
  };
  for (double g : gammas) add_rows(basic_resource_sharing(s, g), "basic");
  for (double g : gammas) add_rows(improved_resource_sharing(s, g), "improved");
  emit(t, o.format, o.out_path, out);
}

struct SimulateOpts {
  long long n = 0;
  double alpha = -1.0;
  std::string input_csv;
  std::uint64_t msg_count = 0;
  double rate = -1.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string decoder = "maxinfo";
  double threshold_gamma = std::numeric_limits<double>::quiet_NaN();
  int threads = 1;
  bool fixed_codebook = false;
};

void cmd_simulate(const ChannelSource& src, const SimulateOpts& so, const std::string& format,
                  const std::string& out_path, std::ostream& out) {
  const StateDMC dmc = src.load();
  if (so.n < 1) throw ConfigError("simulate: --n must be >= 1");
  if (so.trials < 1) throw ConfigError("simulate: --trials must be >= 1");

  InputDist px;
  if (so.alpha >= 0.0 && !so.input_csv.empty()) {
    throw ConfigError("simulate: give either --alpha or --input, not both");
  }
  if (so.alpha >= 0.0) {
    if (dmc.x_size() != 2) throw ConfigError("simulate: --alpha needs a two-letter input alphabet");
    if (so.alpha > 1.0) throw ConfigError("simulate: --alpha must lie in [0,1]");
    px = make_binary_input(so.alpha);
  } else if (!so.input_csv.empty()) {
    std::vector<double> probs;
    std::istringstream is(so.input_csv);
    std::string tok;
    while (std::getline(is, tok, ',')) probs.push_back(std::strtod(tok.c_str(), nullptr));
    if (static_cast<int>(probs.size()) != dmc.x_size()) {
      throw ConfigError("simulate: --input length does not match the input alphabet");
    }
    try {
      px = InputDist::make(probs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("simulate: ") + e.what());
    }
  } else {
    throw ConfigError("simulate: one of --alpha or --input is required");
  }

  std::uint64_t msg_count = so.msg_count;
  if (msg_count == 0 && so.rate >= 0.0) {
    const double bits = so.rate * static_cast<double>(so.n);
    if (bits >= 62.0) {
      throw ConfigError("simulate: rate " + std::to_string(so.rate) + " at n=" +
                        std::to_string(so.n) + " implies 2^" + std::to_string(bits) +
                        " messages, far beyond the codebook cap");
    }
    msg_count = static_cast<std::uint64_t>(std::floor(std::exp2(bits)));
  }
  if (msg_count < 1) throw ConfigError("simulate: one of --msg-count or --rate is required");

  CodeParams params;
  params.n = static_cast<int>(so.n);
  params.msg_count = msg_count;
  params.input_dist = px;
  params.seed = so.seed;
  Decoder decoder;
  if (so.decoder == "maxinfo") {
    decoder = Decoder::maxinfo;
  } else if (so.decoder == "threshold") {
    decoder = Decoder::threshold;
    if (std::isnan(so.threshold_gamma)) {
      throw ConfigError("simulate: --threshold-gamma is required with --decoder threshold");
    }
    params.threshold_gamma = so.threshold_gamma;
  } else {
    throw ConfigError("simulate: --decoder must be maxinfo or threshold");
  }
  // report the desk-scale violation before any work starts
  if (params.msg_count > params.symbol_cap / static_cast<std::uint64_t>(params.n)) {
    throw ConfigError("simulate: codebook of " + std::to_string(params.msg_count) + " x " +
                      std::to_string(params.n) + " symbols exceeds the cap of " +
                      std::to_string(params.symbol_cap));
  }

  RunOptions ro;
  ro.threads = so.threads;
  ro.fresh_codebook = !so.fixed_codebook;
  const SimReport rep = run_experiment(dmc, params, so.trials, decoder, ro);

  ordered_json config = ordered_json::object();
  config["channel"] = src.describe();
  config["n"] = so.n;
  config["msg_count"] = msg_count;
  config["rate_bits_per_use"] = num(std::log2(static_cast<double>(msg_count)) / so.n);
  {
    ordered_json arr = ordered_json::array();
    for (double p : px.probs) arr.push_back(num(p));
    config["input"] = std::move(arr);
  }
  config["decoder"] = so.decoder;
  if (params.threshold_gamma) {
    config["threshold_gamma"] = num(*params.threshold_gamma);
  } else {
    config["threshold_gamma"] = nullptr;
  }
  config["trials"] = so.trials;
  config["seed"] = so.seed;
  // thread count is deliberately not echoed: it cannot change the result
  config["fresh_codebook"] = ro.fresh_codebook;

  ordered_json report = ordered_json::object();
  report["trials"] = rep.trials;
  report["errors"] = rep.errors;
  report["eps_hat"] = num(rep.eps_hat);
  report["eps_wilson95"] = ordered_json::array({num(rep.eps_lo), num(rep.eps_hi)});
  report["distortion_hat"] = num(rep.distortion_hat);
  report["distortion_normal95"] = ordered_json::array({num(rep.dist_lo), num(rep.dist_hi)});
  report["distortion_stderr"] = num(rep.dist_stderr);

  if (format == "csv") {
    Table t;
    t.meta = {{"seed", so.seed}, {"decoder", so.decoder}};
    t.columns = {"trials",        "errors",  "eps_hat",        "eps_lo",
                 "eps_hi",        "distortion_hat", "dist_lo", "dist_hi"};
    t.rows.push_back({rep.trials, rep.errors, num(rep.eps_hat), num(rep.eps_lo), num(rep.eps_hi),
                      num(rep.distortion_hat), num(rep.dist_lo), num(rep.dist_hi)});
    emit(t, format, out_path, out);
  } else {
    ordered_json j;
    j["config"] = std::move(config);
    j["report"] = std::move(report);
    std::ostringstream buf;
    buf << j.dump(2) << "\n";
    if (out_path.empty()) {
      out << buf.str();
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ConfigError("cannot open output file: " + out_path);
      f << buf.str();
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"finite-blocklength bounds and Monte Carlo validation for ISAC over "
               "state-dependent discrete memoryless channels"};
  app.require_subcommand(1);

  ChannelSource src_bounds, src_sweep, src_base, src_sim;
  CommonOpts o_bounds, o_sweep, o_base, o_example;
  double budget_opt = -1.0;
  std::string dgrid_sweep, dgrid_example, gamma_grid;
  double example_q = -1.0;
  SimulateOpts so;
  std::string sim_format = "json", sim_out;

  auto add_common = [&](CLI::App* cmd, CommonOpts& o, bool need_n = true) {
    cmd->add_option("--eps", o.eps, "target error probability in (0,1)");
    auto* n_opt = cmd->add_option("--n", o.n_list, "blocklength (repeatable)");
    if (need_n) n_opt->required();
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out_path, "write output to this file instead of stdout");
  };

  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds", "achievability, converse and second-order rates at one distortion budget");
  add_channel_flags(bounds_cmd, src_bounds);
  add_common(bounds_cmd, o_bounds);
  bounds_cmd->add_option("--d-budget", budget_opt,
                         "distortion budget (default: unconstrained)");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "rate-distortion-error tradeoff curve over a budget grid");
  add_channel_flags(sweep_cmd, src_sweep);
  add_common(sweep_cmd, o_sweep);
  sweep_cmd->add_option("--d-grid", dgrid_sweep, "budget grid start:stop:count");

  CLI::App* base_cmd = app.add_subcommand(
      "baselines", "basic and improved resource-sharing baselines with the matched joint curve");
  add_channel_flags(base_cmd, src_base);
  add_common(base_cmd, o_base);
  base_cmd->add_option("--gamma-grid", gamma_grid, "time-sharing grid start:stop:count");

  CLI::App* example_cmd = app.add_subcommand(
      "binary-example", "binary multiplicative-Bernoulli channel tradeoff with closed-form anchors");
  example_cmd->add_option("--binary-q", example_q, "state probability q")->required();
  add_common(example_cmd, o_example);
  example_cmd->add_option("--d-grid", dgrid_example, "budget grid start:stop:count");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo random-coding experiment");
  add_channel_flags(sim_cmd, src_sim);
  sim_cmd->add_option("--n", so.n, "blocklength")->required();
  sim_cmd->add_option("--alpha", so.alpha, "binary input parameter Pr[X=1]");
  sim_cmd->add_option("--input", so.input_csv, "input pmf, comma separated");
  sim_cmd->add_option("--msg-count", so.msg_count, "number of messages M");
  sim_cmd->add_option("--rate", so.rate, "operating rate; M = floor(2^{n rate})");
  sim_cmd->add_option("--trials", so.trials, "number of independent trials")->required();
  sim_cmd->add_option("--seed", so.seed, "master seed");
  sim_cmd->add_option("--decoder", so.decoder, "maxinfo or threshold");
  sim_cmd->add_option("--threshold-gamma", so.threshold_gamma, "threshold in bits");
  sim_cmd->add_option("--threads", so.threads, "worker threads (result is thread-invariant)");
  sim_cmd->add_flag("--fixed-codebook", so.fixed_codebook,
                    "reuse one codebook across trials instead of redrawing");
  sim_cmd->add_option("--format", sim_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_option("--out", sim_out, "write output to this file instead of stdout");

  std::vector<const char*> argv;
  argv.push_back("isacfb");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (bounds_cmd->parsed()) {
      std::optional<double> budget;
      if (budget_opt >= 0.0) budget = budget_opt;
      cmd_bounds(src_bounds, o_bounds, budget, out);
    } else if (sweep_cmd->parsed()) {
      cmd_sweep(src_sweep, o_sweep, dgrid_sweep, out);
    } else if (base_cmd->parsed()) {
      cmd_baselines(src_base, o_base, gamma_grid, out);
    } else if (example_cmd->parsed()) {
      cmd_binary_example(example_q, o_example, dgrid_example, out);
    } else if (sim_cmd->parsed()) {
      cmd_simulate(src_sim, so, sim_format, sim_out, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "infeasible request: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::length_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace isacfb
