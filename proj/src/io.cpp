#include "gebridge/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

namespace gebridge::io {

using nlohmann::json;

void write_traces_text(std::ostream& out, std::span<const BinaryTrace> traces) {
  for (const auto& t : traces) {
    std::string line(t.bits.size(), '0');
    for (std::size_t n = 0; n < t.bits.size(); ++n)
      if (t.bits[n]) line[n] = '1';
    out << line << '\n';
  }
}

std::vector<BinaryTrace> read_traces_text(std::istream& in) {
  std::vector<BinaryTrace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    BinaryTrace t;
    t.rep = traces.size();
    t.bits.reserve(line.size());
    for (char ch : line) {
      if (ch != '0' && ch != '1')
        throw FormatError("trace text line " + std::to_string(line_no) + ": expected only 0/1");
      t.bits.push_back(ch == '1' ? 1 : 0);
    }
    traces.push_back(std::move(t));
  }
  return traces;
}

void write_trace_binary(std::ostream& out, const BinaryTrace& trace) {
  if (trace.bits.size() > UINT32_MAX) throw FormatError("trace too long for the GEB1 format");
  const auto n = static_cast<std::uint32_t>(trace.bits.size());
  out.write(kTraceMagic, 4);
  const std::array<char, 4> len = {static_cast<char>(n & 0xFF), static_cast<char>((n >> 8) & 0xFF),
                                   static_cast<char>((n >> 16) & 0xFF),
                                   static_cast<char>((n >> 24) & 0xFF)};
  out.write(len.data(), 4);
  std::vector<char> packed((n + 7) / 8, 0);
  for (std::uint32_t i = 0; i < n; ++i)
    if (trace.bits[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
  out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
}

void write_traces_binary(std::ostream& out, std::span<const BinaryTrace> traces) {
  for (const auto& t : traces) write_trace_binary(out, t);
}

std::vector<BinaryTrace> read_traces_binary(std::istream& in) {
  std::vector<BinaryTrace> traces;
  while (true) {
    std::array<char, 8> header{};
    in.read(header.data(), 8);
    if (in.gcount() == 0) break;
    if (in.gcount() != 8) throw FormatError("GEB1: truncated record header");
    if (!std::equal(header.begin(), header.begin() + 4, kTraceMagic))
      throw FormatError("GEB1: bad magic");
    std::uint32_t n = 0;
    for (int b = 3; b >= 0; --b)
      n = (n << 8) | static_cast<std::uint8_t>(header[static_cast<std::size_t>(4 + b)]);
    std::vector<char> packed((n + 7) / 8);
    in.read(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (static_cast<std::size_t>(in.gcount()) != packed.size())
      throw FormatError("GEB1: truncated payload");
    BinaryTrace t;
    t.rep = traces.size();
    t.bits.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
      t.bits[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1);
    traces.push_back(std::move(t));
  }
  return traces;
}

json to_json(const KernelSpec& k) {
  return {{"family", std::string(to_string(k.family))}, {"sigma2", k.sigma2}, {"t_c", k.t_c}};
}

json to_json(const LinkConfig& cfg) { return {{"d", cfg.d}, {"s_norm", cfg.s_norm}}; }

json to_json(const GeParams& g) {
  return {{"rho", g.rho},       {"p01", g.p01},       {"p10", g.p10},
          {"pi0", g.pi0},       {"pi1", g.pi1},       {"dwell0", g.dwell0},
          {"dwell1", g.dwell1}, {"persistence", g.persistence},
          {"q", g.q},           {"n_cross", g.n_cross}};
}

json to_json(const MarkovGaps& g) {
  return {{"gap", g.gap},         {"max", g.max()},
          {"order2", g.order2},   {"order1", g.order1},
          {"se", g.se},           {"context_counts", g.context_counts},
          {"insufficient", g.insufficient}};
}

json to_json(const RunLengthDist& d) {
  return {{"state", d.state}, {"k_max", d.k_max()}, {"pmf", d.pmf}, {"tail_mass", d.tail_mass}};
}

json to_json(const TransitionEstimate& e) {
  return {{"p01_hat", e.p01_hat},
          {"p10_hat", e.p10_hat},
          {"ci95_p01", {e.ci95_p01.lo, e.ci95_p01.hi}},
          {"ci95_p10", {e.ci95_p10.lo, e.ci95_p10.hi}},
          {"counts", e.counts},
          {"degenerate_reps", e.degenerate_reps},
          {"n_reps", e.n_reps},
          {"aggregation", to_string(e.aggregation)}};
}

json to_json(const PersistenceEstimate& e) {
  return {{"value", e.value},
          {"ci95", {e.ci95.lo, e.ci95.hi}},
          {"pi0_hat", e.pi0_hat},
          {"degenerate_reps", e.degenerate_reps},
          {"aggregation", to_string(e.aggregation)}};
}

json to_json(const FidelityReport& r) {
  json j;
  j["kernel"] = to_json(r.kernel);
  j["link"] = to_json(r.cfg);
  j["tc_over_d"] = r.tc_over_d;
  j["s_over_sigma"] = r.cfg.s_norm;
  j["seed"] = r.seed;
  j["n_reps"] = r.n_reps;
  j["n_slots"] = r.n_slots;
  j["ge"] = to_json(r.ge);
  j["max_markov_gap"] = r.max_markov_gap;
  j["max_markov_gap_exact"] = r.max_markov_gap_exact;
  j["gaps_empirical"] = to_json(r.gaps_empirical);
  j["gaps_exact"] = r.has_exact_gaps ? to_json(r.gaps_exact) : json(nullptr);
  j["dtv_ge"] = r.dtv_ge;
  j["dtv_second"] = r.dtv_second;
  j["run_state"] = r.run_state;
  j["n_runs"] = r.n_runs;
  j["second_order"] = {{"entry", r.second_order.entry},
                       {"stay", r.second_order.stay},
                       {"n_entry", r.second_order.n_entry},
                       {"n_stay", r.second_order.n_stay},
                       {"insufficient", r.second_order.insufficient}};
  j["runs_empirical"] = r.n_runs > 0 ? to_json(r.runs_empirical) : json(nullptr);
  j["runs_ge"] = to_json(r.runs_ge);
  j["runs_second"] = to_json(r.runs_second);
  j["transitions"] = to_json(r.transitions);
  j["persistence_mc"] = to_json(r.persistence_mc);
  j["persistence_exact"] = r.persistence_exact;
  j["persistence_rel_err_pct"] = r.persistence_rel_err_pct;
  j["sampler_jitter"] = r.sampler_jitter;
  j["flags"] = r.flags;
  j["policies"] = {{"run_censoring", "drop runs touching either trace boundary"},
                   {"k_max", "ceil(10 * mean dwell), capped at n_slots"},
                   {"gap_and_tv_counts", "pooled across replications"},
                   {"transition_aggregation", to_string(r.transitions.aggregation)}};
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  k.family = parse_kernel_family(j.at("family").get<std::string>());
  k.sigma2 = j.value("sigma2", 1.0);
  k.t_c = j.at("t_c").get<double>();
  k.validate();
  return k;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_csv_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::vector<std::string> ge_params_csv_header() {
  return {"rho", "p01", "p10", "pi0", "pi1", "dwell0", "dwell1", "persistence", "q", "n_cross"};
}

std::vector<std::string> ge_params_csv_row(const GeParams& g) {
  return {format_number(g.rho),    format_number(g.p01),    format_number(g.p10),
          format_number(g.pi0),    format_number(g.pi1),    format_number(g.dwell0),
          format_number(g.dwell1), format_number(g.persistence), format_number(g.q),
          format_number(g.n_cross)};
}

std::vector<std::string> report_csv_header() {
  return {"tc_over_d",         "s_over_sigma",     "kernel",          "max_gap",
          "dtv_ge",            "dtv_second",       "err_pct",         "max_gap_exact",
          "persistence_exact", "persistence_mc",   "persistence_ci_lo", "persistence_ci_hi",
          "n_runs",            "k_max",            "flags"};
}

std::vector<std::string> report_csv_row(const FidelityReport& r) {
  std::string flags;
  for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
  return {format_number(r.tc_over_d),
          format_number(r.cfg.s_norm),
          std::string(to_string(r.kernel.family)),
          format_number(r.max_markov_gap),
          format_number(r.dtv_ge),
          format_number(r.dtv_second),
          format_number(r.persistence_rel_err_pct),
          format_number(r.max_markov_gap_exact),
          format_number(r.persistence_exact),
          format_number(r.persistence_mc.value),
          format_number(r.persistence_mc.ci95.lo),
          format_number(r.persistence_mc.ci95.hi),
          std::to_string(r.n_runs),
          std::to_string(r.runs_ge.k_max()),
          flags};
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_value(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw FormatError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> load_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file '" + path + "'");
  return parse_key_value(in);
}

}  // namespace gebridge::io
