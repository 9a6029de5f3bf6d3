#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gebridge/diagnostics.hpp"
#include "gebridge/ge_bridge.hpp"
#include "gebridge/io.hpp"
#include "gebridge/reference_table.hpp"
#include "gebridge/scaling.hpp"
#include "gebridge/trace_sim.hpp"
#include "parallel.hpp"

namespace gebridge::cli {

namespace {

using nlohmann::json;
using io::format_number;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOpts {
  std::string config;
  std::string format = "csv";
  std::string output;
};

struct ModelOpts {
  std::string kernel = "sqexp";
  double tc = 1.0;
  double sigma2 = 1.0;
  double d = 1.0;
  double s = 0.0;
};

struct McOpts {
  std::size_t reps = 250;
  std::size_t slots = 1200;
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  std::string aggregation = "pooled";
};

void add_output(CLI::App* sub, OutputOpts& o) {
  sub->add_option("--config", o.config, "key=value file; command-line flags take precedence");
  sub->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--output,-o", o.output, "Write to this file instead of stdout");
}

void add_model(CLI::App* sub, ModelOpts& m, bool with_tc = true) {
  sub->add_option("--kernel", m.kernel, "sqexp or exp")->capture_default_str();
  if (with_tc) sub->add_option("--tc", m.tc, "Correlation length t_c")->capture_default_str();
  sub->add_option("--sigma2", m.sigma2, "Marginal variance")->capture_default_str();
  sub->add_option("--d", m.d, "Slot duration")->capture_default_str();
  sub->add_option("--s", m.s, "Normalized threshold S / sigma")->capture_default_str();
}

void add_mc(CLI::App* sub, McOpts& mc) {
  sub->add_option("--reps", mc.reps, "Independent replications")->capture_default_str();
  sub->add_option("--slots", mc.slots, "Slots per replication")->capture_default_str();
  sub->add_option("--seed", mc.seed, "RNG seed")->capture_default_str();
  sub->add_option("--jobs,-j", mc.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--aggregation", mc.aggregation, "pooled or per-replication")
      ->check(CLI::IsMember({"pooled", "per-replication"}))
      ->capture_default_str();
}

Aggregation parse_aggregation(const std::string& s) {
  return s == "per-replication" ? Aggregation::PerReplication : Aggregation::Pooled;
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ", ")) out.push_back(parse_double(tok, what));
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::vector<KernelFamily> parse_families(const std::string& s) {
  std::vector<KernelFamily> out;
  for (const auto& tok : split(s, ", ")) {
    if (tok == "both" || tok == "all") {
      out.push_back(KernelFamily::SquaredExponential);
      out.push_back(KernelFamily::Exponential);
    } else {
      out.push_back(parse_kernel_family(tok));
    }
  }
  if (out.empty()) throw UsageError("kernel list is empty");
  return out;
}

KernelSpec kernel_of(const ModelOpts& m, double tc) {
  KernelSpec k{parse_kernel_family(m.kernel), m.sigma2, tc};
  k.validate();
  return k;
}

LinkConfig link_of(const ModelOpts& m) {
  LinkConfig c{m.d, m.s};
  c.validate();
  return c;
}

SimPlan plan_of(const KernelSpec& k, const LinkConfig& c, const McOpts& mc) {
  SimPlan p{k, c, mc.slots, mc.reps, mc.seed};
  p.validate();
  return p;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::ostringstream os;
  io::write_csv_line(os, fields);
  return os.str();
}

std::string seed_header(const McOpts& mc) {
  return "# seed=" + std::to_string(mc.seed) + " n_reps=" + std::to_string(mc.reps) +
         " n_slots=" + std::to_string(mc.slots) + " aggregation=" + mc.aggregation + "\n";
}

json plan_json(const McOpts& mc) {
  return {{"seed", mc.seed}, {"n_reps", mc.reps}, {"n_slots", mc.slots}, {"aggregation", mc.aggregation}};
}

void write_traces_file(const std::string& path, const std::string& fmt,
                       std::span<const BinaryTrace> traces) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::FormatError("cannot open '" + path + "' for writing");
  if (fmt == "binary")
    io::write_traces_binary(f, traces);
  else
    io::write_traces_text(f, traces);
  if (!f) throw io::FormatError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// params
// ---------------------------------------------------------------------------

struct ParamsCmd {
  OutputOpts out;
  ModelOpts model;
  std::optional<double> rho;
  std::string tc_grid;
};

std::string run_params(const ParamsCmd& c, int& /*status*/) {
  const LinkConfig cfg = link_of(c.model);
  struct Row {
    std::string kernel;
    double tc;
    GeParams ge;
  };
  std::vector<Row> rows;
  if (c.rho) {
    rows.push_back({"raw", std::numeric_limits<double>::quiet_NaN(), ge_params_from_rho(Correlation(*c.rho), cfg)});
  } else {
    const auto grid = c.tc_grid.empty() ? std::vector<double>{c.model.tc} : parse_list(c.tc_grid, "--tc-grid");
    for (double tc : grid) {
      const KernelSpec k = kernel_of(c.model, tc);
      rows.push_back({std::string(to_string(k.family)), tc, ge_params(k, cfg)});
    }
  }

  if (c.out.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j = {{"kernel", r.kernel}, {"link", io::to_json(cfg)}, {"ge", io::to_json(r.ge)}};
      j["t_c"] = std::isnan(r.tc) ? json(nullptr) : json(r.tc);
      arr.push_back(j);
    }
    return json{{"command", "params"}, {"rows", arr}}.dump(2) + "\n";
  }
  std::vector<std::string> header = {"kernel", "t_c", "d", "s_over_sigma"};
  for (auto& h : io::ge_params_csv_header()) header.push_back(h);
  std::string text = csv_line(header);
  for (const auto& r : rows) {
    std::vector<std::string> f = {r.kernel, std::isnan(r.tc) ? "" : format_number(r.tc), format_number(cfg.d),
                                  format_number(cfg.s_norm)};
    for (auto& v : io::ge_params_csv_row(r.ge)) f.push_back(v);
    text += csv_line(f);
  }
  return text;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCmd {
  OutputOpts out;
  ModelOpts model;
  McOpts mc;
  std::string method = "auto";
  std::string traces;
  std::string trace_format = "text";
};

std::string run_simulate(const SimulateCmd& c, int& /*status*/) {
  const SimPlan plan = plan_of(kernel_of(c.model, c.model.tc), link_of(c.model), c.mc);
  const SamplerMethod method = c.method == "factorization"    ? SamplerMethod::Factorization
                               : c.method == "autoregressive" ? SamplerMethod::Autoregressive
                                                              : SamplerMethod::Auto;
  const PathSampler sampler(plan, method);
  const auto traces = simulate_traces(sampler, c.mc.jobs);
  if (!c.traces.empty()) write_traces_file(c.traces, c.trace_format, traces);

  const Aggregation agg = parse_aggregation(c.mc.aggregation);
  const auto tr = estimate_transitions(traces, agg);
  const auto pe = empirical_persistence(traces, plan.cfg, agg);
  const auto ge = ge_params(plan.kernel, plan.cfg);

  if (c.out.format == "json") {
    json j = {{"command", "simulate"},
              {"plan", plan_json(c.mc)},
              {"kernel", io::to_json(plan.kernel)},
              {"link", io::to_json(plan.cfg)},
              {"sampler", {{"method", to_string(sampler.method())}, {"jitter", sampler.jitter()}}},
              {"transitions", io::to_json(tr)},
              {"persistence", io::to_json(pe)},
              {"exact", io::to_json(ge)}};
    j["traces_file"] = c.traces.empty() ? json(nullptr) : json(c.traces);
    return j.dump(2) + "\n";
  }
  std::string text = seed_header(c.mc);
  text += "# kernel=" + std::string(to_string(plan.kernel.family)) + " t_c=" + format_number(plan.kernel.t_c) +
          " s_over_sigma=" + format_number(plan.cfg.s_norm) + " sampler=" + to_string(sampler.method()) +
          " jitter=" + format_number(sampler.jitter()) + "\n";
  text += csv_line({"quantity", "estimate", "ci95_lo", "ci95_hi", "exact"});
  text += csv_line({"p01", format_number(tr.p01_hat), format_number(tr.ci95_p01.lo), format_number(tr.ci95_p01.hi),
                    format_number(ge.p01)});
  text += csv_line({"p10", format_number(tr.p10_hat), format_number(tr.ci95_p10.lo), format_number(tr.ci95_p10.hi),
                    format_number(ge.p10)});
  text += csv_line({"pi0", format_number(pe.pi0_hat), "", "", format_number(ge.pi0)});
  text += csv_line({"persistence", format_number(pe.value), format_number(pe.ci95.lo), format_number(pe.ci95.hi),
                    format_number(ge.persistence)});
  return text;
}

// ---------------------------------------------------------------------------
// validate-table
// ---------------------------------------------------------------------------

struct ValidateCmd {
  OutputOpts out;
  McOpts mc;
  std::string grid;
  bool strict = false;
  double tolerance = 0.03;
  double err_tolerance = 3.0;
};

struct GridPoint {
  double tc;
  double s;
  KernelFamily family;
};

std::vector<GridPoint> parse_grid(const std::string& spec) {
  std::vector<double> tcs = {2, 5, 8, 10, 15};
  std::vector<double> ss = {0, 0.5, 1};
  std::vector<KernelFamily> fams = {KernelFamily::SquaredExponential, KernelFamily::Exponential};
  for (const auto& tok : split(spec, " ;")) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw UsageError("--grid entries look like key=v1,v2; got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "tc")
      tcs = parse_list(val, "grid tc");
    else if (key == "s")
      ss = parse_list(val, "grid s");
    else if (key == "kernel")
      fams = parse_families(val);
    else
      throw UsageError("unknown --grid key '" + key + "' (expected tc, s or kernel)");
  }
  std::vector<GridPoint> out;
  for (double tc : tcs)
    for (double s : ss)
      for (auto f : fams) out.push_back({tc, s, f});
  return out;
}

std::string run_validate(const ValidateCmd& c, int& status) {
  const auto grid = parse_grid(c.grid);
  const Aggregation agg = parse_aggregation(c.mc.aggregation);

  struct Row {
    GridPoint at;
    std::optional<FidelityReport> report;
    const ReferenceRow* ref = nullptr;
    std::string status;
  };
  std::vector<Row> rows(grid.size());
  detail::parallel_for(grid.size(), c.mc.jobs, [&](std::size_t i) {
    Row& row = rows[i];
    row.at = grid[i];
    row.ref = find_reference(grid[i].tc, grid[i].s, grid[i].family);
    try {
      const SimPlan plan = plan_of({grid[i].family, 1.0, grid[i].tc}, {1.0, grid[i].s}, c.mc);
      ReportOptions opt;
      opt.aggregation = agg;
      row.report = build_report(plan, opt);
      if (!row.ref) {
        row.status = "no_reference";
      } else {
        const auto& r = *row.report;
        const bool ok = std::abs(r.max_markov_gap - row.ref->max_gap) <= c.tolerance &&
                        std::abs(r.dtv_ge - row.ref->dtv_ge) <= c.tolerance &&
                        std::abs(r.dtv_second - row.ref->dtv_second) <= c.tolerance &&
                        r.persistence_rel_err_pct <= c.err_tolerance;
        row.status = ok ? "pass" : "fail";
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  });

  bool any_error = false, any_fail = false;
  for (const auto& r : rows) {
    if (!r.report) any_error = true;
    if (r.status == "fail") any_fail = true;
  }
  if (any_error)
    status = kUsageError;
  else if (c.strict && any_fail)
    status = kStrictFailure;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (c.out.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j;
      j["tc_over_d"] = r.at.tc;
      j["s_over_sigma"] = r.at.s;
      j["kernel"] = std::string(to_string(r.at.family));
      j["report"] = r.report ? io::to_json(*r.report) : json(nullptr);
      j["reference"] = r.ref ? json{{"max_gap", r.ref->max_gap},
                                    {"dtv_ge", r.ref->dtv_ge},
                                    {"dtv_second", r.ref->dtv_second},
                                    {"err_pct", r.ref->err_pct}}
                             : json(nullptr);
      j["status"] = r.status;
      arr.push_back(j);
    }
    json out = {{"command", "validate-table"},
                {"plan", plan_json(c.mc)},
                {"tolerance", c.tolerance},
                {"err_tolerance", c.err_tolerance},
                {"rows", arr}};
    return out.dump(2) + "\n";
  }

  std::string text = seed_header(c.mc);
  auto header = io::report_csv_header();
  for (const char* h : {"ref_max_gap", "ref_dtv_ge", "ref_dtv_second", "ref_err_pct", "status"}) header.push_back(h);
  text += csv_line(header);
  for (const auto& r : rows) {
    std::vector<std::string> f;
    if (r.report) {
      f = io::report_csv_row(*r.report);
    } else {
      f = {format_number(r.at.tc), format_number(r.at.s), std::string(to_string(r.at.family))};
      f.resize(header.size() - 5);
    }
    for (double v : {r.ref ? r.ref->max_gap : nan, r.ref ? r.ref->dtv_ge : nan, r.ref ? r.ref->dtv_second : nan,
                     r.ref ? r.ref->err_pct : nan})
      f.push_back(format_number(v));
    std::string st = r.status;
    for (auto& ch : st)
      if (ch == ',' || ch == '\n') ch = ' ';
    f.push_back(st);
    text += csv_line(f);
  }
  return text;
}

// ---------------------------------------------------------------------------
// scaling
// ---------------------------------------------------------------------------

struct ScalingCmd {
  OutputOpts out;
  ModelOpts model;
  McOpts mc;
  std::string tc_grid = "20,30,40,50,60,70,80,90,100";
  bool monte_carlo = true;
};

std::string run_scaling(const ScalingCmd& c, int& /*status*/) {
  const auto grid = parse_list(c.tc_grid, "--tc-grid");
  const LinkConfig cfg = link_of(c.model);
  const KernelFamily fam = parse_kernel_family(c.model.kernel);
  const auto curve = scaling_curve(fam, c.model.sigma2, cfg, grid);

  struct Mc {
    bool done = false;
    PersistenceEstimate est;
    std::string error;
  };
  std::vector<Mc> mc(curve.size());
  if (c.monte_carlo) {
    detail::parallel_for(curve.size(), c.mc.jobs, [&](std::size_t i) {
      if (curve[i].frozen) return;
      try {
        const SimPlan plan = plan_of({fam, c.model.sigma2, curve[i].t_c}, cfg, c.mc);
        const auto traces = simulate_traces(plan);
        mc[i].est = empirical_persistence(traces, cfg, parse_aggregation(c.mc.aggregation));
        mc[i].done = true;
      } catch (const std::exception& e) {
        mc[i].error = e.what();
      }
    });
  }

  const std::vector<ScalingPoint> top(curve.begin() + static_cast<std::ptrdiff_t>(curve.size() / 2), curve.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  LineFit lin{nan, nan}, loglog{nan, nan};
  std::string fit_note;
  try {
    lin = linear_fit(top);
    loglog = loglog_fit(top);
  } catch (const DomainError& e) {
    fit_note = e.what();
  }

  auto flags_of = [&](std::size_t i) {
    std::string f;
    if (curve[i].frozen) f = "frozen_channel";
    if (!mc[i].error.empty()) f += std::string(f.empty() ? "" : ";") + "mc_error";
    return f;
  };

  if (c.out.format == "json") {
    json pts = json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const auto& p = curve[i];
      json j = {{"t_c", p.t_c}, {"rho", p.rho}, {"asymptote", p.asymptote}, {"frozen", p.frozen}};
      j["exact"] = p.frozen ? json(nullptr) : json(p.exact);
      j["mc"] = mc[i].done ? io::to_json(mc[i].est) : json(nullptr);
      j["flags"] = flags_of(i);
      pts.push_back(j);
    }
    json fit = {{"points", "top_half"}, {"n", top.size()}};
    fit["linear_slope"] = std::isnan(lin.slope) ? json(nullptr) : json(lin.slope);
    fit["loglog_exponent"] = std::isnan(loglog.slope) ? json(nullptr) : json(loglog.slope);
    fit["note"] = fit_note;
    json out = {{"command", "scaling"},
                {"kernel", std::string(to_string(fam))},
                {"link", io::to_json(cfg)},
                {"asymptotic_coefficient", asymptotic_coefficient(cfg.s_norm)},
                {"points", pts},
                {"fit", fit}};
    out["plan"] = c.monte_carlo ? plan_json(c.mc) : json(nullptr);
    return out.dump(2) + "\n";
  }

  std::string text;
  if (c.monte_carlo) text += seed_header(c.mc);
  text += "# kernel=" + std::string(to_string(fam)) + " s_over_sigma=" + format_number(cfg.s_norm) +
          " fit_points=top_half linear_slope=" + format_number(lin.slope) +
          " loglog_exponent=" + format_number(loglog.slope) + "\n";
  text += csv_line({"t_c", "rho", "exact", "asymptote", "mc", "mc_ci95_lo", "mc_ci95_hi", "flags"});
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i];
    text += csv_line({format_number(p.t_c), format_number(p.rho), format_number(p.exact), format_number(p.asymptote),
                      mc[i].done ? format_number(mc[i].est.value) : "",
                      mc[i].done ? format_number(mc[i].est.ci95.lo) : "",
                      mc[i].done ? format_number(mc[i].est.ci95.hi) : "", flags_of(i)});
  }
  return text;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

struct DiagnoseCmd {
  OutputOpts out;
  McOpts mc;
  std::string kernels = "both";
  std::string tc_grid = "8";
  std::string s_grid = "0";
  int state = 1;
  std::string traces;
  std::string trace_format = "text";
};

std::string run_diagnose(const DiagnoseCmd& c, int& /*status*/) {
  const auto fams = parse_families(c.kernels);
  const auto tcs = parse_list(c.tc_grid, "--tc-grid");
  const auto ss = parse_list(c.s_grid, "--s-grid");
  std::vector<SimPlan> plans;
  for (auto f : fams)
    for (double tc : tcs)
      for (double s : ss) plans.push_back(plan_of({f, 1.0, tc}, {1.0, s}, c.mc));
  if (!c.traces.empty() && plans.size() != 1)
    throw UsageError("--traces needs exactly one kernel / t_c / s combination");

  ReportOptions opt;
  opt.run_state = c.state;
  opt.aggregation = parse_aggregation(c.mc.aggregation);
  std::vector<FidelityReport> reports(plans.size());
  if (!c.traces.empty()) {
    const auto traces = simulate_traces(plans[0], SamplerMethod::Auto, c.mc.jobs);
    write_traces_file(c.traces, c.trace_format, traces);
    reports[0] = build_report_from_traces(plans[0], traces, opt);
  } else {
    detail::parallel_for(plans.size(), c.mc.jobs, [&](std::size_t i) { reports[i] = build_report(plans[i], opt); });
  }

  if (c.out.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(io::to_json(r));
    return json{{"command", "diagnose"}, {"plan", plan_json(c.mc)}, {"reports", arr}}.dump(2) + "\n";
  }
  static const char* kContexts[4] = {"00", "01", "10", "11"};
  std::string text = seed_header(c.mc);
  text += "# run_state=" + std::to_string(c.state) + "\n";
  text += csv_line({"kind", "kernel", "tc_over_d", "s_over_sigma", "index", "empirical", "exact", "ge", "second_order"});
  for (const auto& r : reports) {
    const std::string kern(to_string(r.kernel.family));
    const std::string tc = format_number(r.tc_over_d), s = format_number(r.cfg.s_norm);
    for (int k = 0; k < 4; ++k)
      text += csv_line({"gap", kern, tc, s, kContexts[k], format_number(r.gaps_empirical.gap[k]),
                        format_number(r.gaps_exact.gap[k]), "", ""});
    for (std::size_t k = 1; k <= r.runs_ge.k_max(); ++k)
      text += csv_line({"pmf", kern, tc, s, std::to_string(k), r.n_runs ? format_number(r.runs_empirical.at(k)) : "",
                        "", format_number(r.runs_ge.at(k)), format_number(r.runs_second.at(k))});
    text += csv_line({"pmf", kern, tc, s, "tail", r.n_runs ? format_number(r.runs_empirical.tail_mass) : "", "",
                      format_number(r.runs_ge.tail_mass), format_number(r.runs_second.tail_mass)});
    text += csv_line({"dtv", kern, tc, s, "", "", "", format_number(r.dtv_ge), format_number(r.dtv_second)});
  }
  return text;
}

// ---------------------------------------------------------------------------

// Inserts config-file assignments right after the subcommand name so later
// command-line flags override them.
std::vector<std::string> with_config(const std::vector<std::string>& args, CLI::App& app) {
  if (args.empty() || args[0].empty() || args[0][0] == '-') return args;
  CLI::App* sub = nullptr;
  for (auto* candidate : app.get_subcommands([](CLI::App*) { return true; }))
    if (candidate->get_name() == args[0]) sub = candidate;
  if (sub == nullptr) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto kv = io::load_key_value_file(path);
  std::vector<std::string> out = {args[0]};
  for (const auto& [key, value] : kv) {
    if (key == "config") continue;
    if (sub->get_option_no_throw("--" + key) != nullptr) {
      out.push_back("--" + key + "=" + value);
      continue;
    }
    bool elsewhere = false;
    for (const auto* other : app.get_subcommands([](CLI::App*) { return true; }))
      if (other->get_option_no_throw("--" + key) != nullptr) elsewhere = true;
    if (!elsewhere) throw UsageError("config file '" + path + "': unknown key '" + key + "'");
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void emit(const std::string& text, const OutputOpts& o, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw io::FormatError("cannot open '" + o.output + "' for writing");
  f << text;
  if (!f) throw io::FormatError("failed writing '" + o.output + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gilbert-Elliott parameters from thresholded Gaussian fading", "gebridge"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  ParamsCmd params;
  auto* p = app.add_subcommand("params", "Closed-form link parameters");
  add_output(p, params.out);
  add_model(p, params.model);
  p->add_option("--rho", params.rho, "Use this one-step correlation directly, bypassing the kernel");
  p->add_option("--tc-grid", params.tc_grid, "Comma-separated t_c values (one row each)");

  SimulateCmd sim;
  auto* s = app.add_subcommand("simulate", "Simulate traces and estimate transition statistics");
  add_output(s, sim.out);
  add_model(s, sim.model);
  add_mc(s, sim.mc);
  s->add_option("--method", sim.method, "Path sampler")
      ->check(CLI::IsMember({"auto", "factorization", "autoregressive"}))
      ->capture_default_str();
  s->add_option("--traces", sim.traces, "Write the traces to this file");
  s->add_option("--trace-format", sim.trace_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();

  ValidateCmd val;
  auto* v = app.add_subcommand("validate-table", "Fidelity grid against the reference table");
  add_output(v, val.out);
  add_mc(v, val.mc);
  v->add_option("--grid", val.grid, "Subset, e.g. \"tc=2,5 s=0 kernel=sqexp\"");
  v->add_flag("--strict", val.strict, "Exit 3 when a row misses its tolerance");
  v->add_option("--tolerance", val.tolerance, "Absolute tolerance on gap and TV columns")->capture_default_str();
  v->add_option("--err-tolerance", val.err_tolerance, "Bound on the persistence error in percent")
      ->capture_default_str();

  ScalingCmd sc;
  auto* g = app.add_subcommand("scaling", "Persistence against t_c: exact, asymptote, Monte Carlo");
  add_output(g, sc.out);
  add_model(g, sc.model, false);
  add_mc(g, sc.mc);
  g->add_option("--tc-grid", sc.tc_grid, "Comma-separated t_c values")->capture_default_str();
  g->add_flag("--mc,!--no-mc", sc.monte_carlo, "Include Monte Carlo estimates");

  DiagnoseCmd dg;
  auto* d = app.add_subcommand("diagnose", "Markov gaps and run-length distributions");
  add_output(d, dg.out);
  add_mc(d, dg.mc);
  d->add_option("--kernel", dg.kernels, "sqexp, exp or both")->capture_default_str();
  d->add_option("--tc-grid", dg.tc_grid, "Comma-separated t_c values")->capture_default_str();
  d->add_option("--s-grid", dg.s_grid, "Comma-separated thresholds")->capture_default_str();
  d->add_option("--state", dg.state, "Run state for the run-length laws")
      ->check(CLI::IsMember({0, 1}))
      ->capture_default_str();
  d->add_option("--traces", dg.traces, "Write the traces to this file (single configuration only)");
  d->add_option("--trace-format", dg.trace_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();

  try {
    auto full = with_config(args, app);
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  int status = kOk;
  try {
    std::string text;
    const OutputOpts* o = nullptr;
    if (p->parsed()) {
      text = run_params(params, status);
      o = &params.out;
    } else if (s->parsed()) {
      text = run_simulate(sim, status);
      o = &sim.out;
    } else if (v->parsed()) {
      text = run_validate(val, status);
      o = &val.out;
    } else if (g->parsed()) {
      text = run_scaling(sc, status);
      o = &sc.out;
    } else {
      text = run_diagnose(dg, status);
      o = &dg.out;
    }
    emit(text, *o, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  if (status == kUsageError) err << "error: one or more grid rows failed to compute\n";
  if (status == kStrictFailure) err << "validate-table: one or more rows outside tolerance\n";
  return status;
}

}  // namespace gebridge::cli
