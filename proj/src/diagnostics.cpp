#include "gebridge/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace gebridge {

double MarkovGaps::max() const { return *std::max_element(gap.begin(), gap.end()); }

MarkovGaps markov_gap_exact(const KernelSpec& kernel, const LinkConfig& cfg) {
  cfg.validate();
  return markov_gap_exact_from_correlations(one_step_correlation(kernel, cfg.d),
                                            lag_k_correlation(kernel, cfg.d, 2), cfg.s_norm);
}

MarkovGaps markov_gap_exact_from_correlations(Correlation rho1, Correlation rho2, double s_norm) {
  const LinkConfig cfg{1.0, s_norm};
  cfg.validate();
  const double s = s_norm;
  const double q = normal_cdf(s);
  const double lower12 = bivariate_orthant_cdf(s, rho1);  // (Z0,Z1) and (Z1,Z2)
  const double lower02 = bivariate_orthant_cdf(s, rho2);
  const double lower012 = trivariate_orthant({s, s, s}, rho1, rho2);

  // P(Z_k < s for every k in mask), mask bit k <-> sample k.
  auto lower = [&](unsigned mask) {
    switch (mask) {
      case 0b000:
        return 1.0;
      case 0b001:
      case 0b010:
      case 0b100:
        return q;
      case 0b011:
      case 0b110:
        return lower12;
      case 0b101:
        return lower02;
      default:
        return lower012;
    }
  };
  // P(B0 = b0, B1 = b1, B2 = b2) by inclusion-exclusion over the ">= s" bits.
  auto joint = [&](int b0, int b1, int b2) {
    const unsigned ones = (b0 ? 1u : 0u) | (b1 ? 2u : 0u) | (b2 ? 4u : 0u);
    const unsigned zeros = ~ones & 0b111u;
    double p = 0.0;
    for (unsigned sub = ones;; sub = (sub - 1) & ones) {
      const int sign = (std::popcount(sub) % 2 == 0) ? 1 : -1;
      p += sign * lower(zeros | sub);
      if (sub == 0) break;
    }
    return std::max(p, 0.0);
  };

  const GeParams ge = ge_params_from_rho(rho1, cfg);
  MarkovGaps g;
  g.order1 = {ge.p01, 1.0 - ge.p10};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double up = joint(i, j, 1);
      const double down = joint(i, j, 0);
      const auto idx = static_cast<std::size_t>(2 * i + j);
      g.order2[idx] = up / (up + down);
      g.gap[idx] = std::abs(g.order2[idx] - g.order1[static_cast<std::size_t>(j)]);
    }
  }
  return g;
}

MarkovGaps markov_gap_empirical(std::span<const BinaryTrace> traces, std::uint64_t min_context) {
  if (traces.empty()) throw DomainError("at least one trace is required");
  // triples[2*i + j][k] counts (B- = i, B = j, B+ = k)
  std::array<std::array<std::uint64_t, 2>, 4> triples{};
  for (const auto& t : traces) {
    const auto& b = t.bits;
    for (std::size_t n = 1; n + 1 < b.size(); ++n) {
      ++triples[static_cast<std::size_t>(2 * (b[n - 1] ? 1 : 0) + (b[n] ? 1 : 0))][b[n + 1] ? 1 : 0];
    }
  }
  MarkovGaps g;
  for (int j = 0; j < 2; ++j) {
    std::uint64_t ones = 0;
    std::uint64_t total = 0;
    for (int i = 0; i < 2; ++i) {
      const auto& c = triples[static_cast<std::size_t>(2 * i + j)];
      ones += c[1];
      total += c[0] + c[1];
    }
    g.order1[static_cast<std::size_t>(j)] =
        (static_cast<double>(ones) + 0.5) / (static_cast<double>(total) + 1.0);
  }
  for (std::size_t idx = 0; idx < 4; ++idx) {
    const auto& c = triples[idx];
    const std::uint64_t n = c[0] + c[1];
    const double p = (static_cast<double>(c[1]) + 0.5) / (static_cast<double>(n) + 1.0);
    g.order2[idx] = p;
    g.gap[idx] = std::abs(p - g.order1[idx % 2]);
    g.se[idx] = std::sqrt(p * (1.0 - p) / (static_cast<double>(n) + 1.0));
    g.context_counts[idx] = n;
    if (n < min_context) g.insufficient = true;
  }
  return g;
}

double RunLengthDist::mean_truncated() const {
  double m = 0.0;
  for (std::size_t k = 1; k <= pmf.size(); ++k) m += static_cast<double>(k) * pmf[k - 1];
  return m;
}

std::vector<std::size_t> extract_runs(const BinaryTrace& trace, int state) {
  if (state != 0 && state != 1) throw DomainError("state must be 0 or 1");
  const auto target = static_cast<std::uint8_t>(state);
  const auto& b = trace.bits;
  std::vector<std::size_t> runs;
  std::size_t start = 0;
  while (start < b.size()) {
    std::size_t end = start;
    while (end < b.size() && (b[end] != 0) == (b[start] != 0)) ++end;
    const bool interior = start > 0 && end < b.size();
    if (interior && (b[start] != 0) == (target != 0)) runs.push_back(end - start);
    start = end;
  }
  return runs;
}

std::vector<std::size_t> extract_runs(std::span<const BinaryTrace> traces, int state) {
  std::vector<std::size_t> all;
  for (const auto& t : traces) {
    const auto r = extract_runs(t, state);
    all.insert(all.end(), r.begin(), r.end());
  }
  return all;
}

namespace {

void require_k_max(std::size_t k_max) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
}

}  // namespace

RunLengthDist empirical_runlength(std::span<const std::size_t> runs, std::size_t k_max, int state) {
  require_k_max(k_max);
  if (runs.empty()) throw DomainError("no complete runs to build a distribution from");
  std::vector<std::uint64_t> counts(k_max, 0);
  std::uint64_t beyond = 0;
  for (std::size_t len : runs) {
    if (len == 0) throw DomainError("run lengths must be >= 1");
    if (len > k_max) {
      ++beyond;
    } else {
      ++counts[len - 1];
    }
  }
  const auto total = static_cast<double>(runs.size());
  RunLengthDist dist;
  dist.state = state;
  dist.pmf.resize(k_max);
  for (std::size_t k = 0; k < k_max; ++k) dist.pmf[k] = static_cast<double>(counts[k]) / total;
  dist.tail_mass = static_cast<double>(beyond) / total;
  return dist;
}

RunLengthDist ge_runlength_pmf(double p_exit, std::size_t k_max, int state) {
  require_k_max(k_max);
  if (!(p_exit > 0.0 && p_exit <= 1.0)) throw DomainError("p_exit must lie in (0, 1]");
  RunLengthDist dist;
  dist.state = state;
  dist.pmf.resize(k_max);
  double survive = 1.0;  // (1 - p)^(k-1)
  for (std::size_t k = 0; k < k_max; ++k) {
    dist.pmf[k] = survive * p_exit;
    survive *= 1.0 - p_exit;
  }
  dist.tail_mass = survive;
  return dist;
}

SecondOrderFit fit_second_order(std::span<const BinaryTrace> traces, int state,
                                std::uint64_t min_context) {
  if (state != 0 && state != 1) throw DomainError("state must be 0 or 1");
  if (traces.empty()) throw DomainError("at least one trace is required");
  const bool target = state == 1;
  std::uint64_t entry_n = 0, entry_stay = 0, stay_n = 0, stay_stay = 0;
  for (const auto& t : traces) {
    const auto& b = t.bits;
    for (std::size_t n = 1; n + 1 < b.size(); ++n) {
      if ((b[n] != 0) != target) continue;
      const bool stays = (b[n + 1] != 0) == target;
      if ((b[n - 1] != 0) == target) {
        ++stay_n;
        if (stays) ++stay_stay;
      } else {
        ++entry_n;
        if (stays) ++entry_stay;
      }
    }
  }
  SecondOrderFit fit;
  fit.state = state;
  fit.n_entry = entry_n;
  fit.n_stay = stay_n;
  fit.entry = (static_cast<double>(entry_stay) + 0.5) / (static_cast<double>(entry_n) + 1.0);
  fit.stay = (static_cast<double>(stay_stay) + 0.5) / (static_cast<double>(stay_n) + 1.0);
  fit.insufficient = entry_n < min_context || stay_n < min_context;
  return fit;
}

RunLengthDist second_order_runlength_pmf(double entry, double stay, std::size_t k_max, int state) {
  require_k_max(k_max);
  if (!(entry >= 0.0 && entry <= 1.0 && stay >= 0.0 && stay <= 1.0))
    throw DomainError("continuation probabilities must lie in [0, 1]");
  RunLengthDist dist;
  dist.state = state;
  dist.pmf.resize(k_max);
  dist.pmf[0] = 1.0 - entry;
  double reach = entry;  // P(L >= k) for k >= 2
  for (std::size_t k = 1; k < k_max; ++k) {
    dist.pmf[k] = reach * (1.0 - stay);
    reach *= stay;
  }
  dist.tail_mass = reach;
  return dist;
}

double tv_distance(const RunLengthDist& p, const RunLengthDist& q) {
  if (p.k_max() != q.k_max()) throw DomainError("run-length distributions have different k_max");
  if (p.state != q.state) throw DomainError("run-length distributions describe different states");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.pmf.size(); ++k) sum += std::abs(p.pmf[k] - q.pmf[k]);
  sum += std::abs(p.tail_mass - q.tail_mass);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

std::size_t default_k_max(double p_exit, std::size_t n_slots) {
  if (!(p_exit > 0.0 && p_exit <= 1.0)) throw DomainError("p_exit must lie in (0, 1]");
  const double k = std::ceil(10.0 / p_exit);
  const auto cap = static_cast<double>(std::max<std::size_t>(n_slots, 1));
  return static_cast<std::size_t>(std::min(k, cap));
}

FidelityReport build_report(const SimPlan& plan, const ReportOptions& options) {
  plan.validate();
  const PathSampler sampler(plan);
  const auto traces = simulate_traces(sampler, options.jobs);
  auto report = build_report_from_traces(plan, traces, options);
  report.sampler_jitter = sampler.jitter();
  if (sampler.jitter() > 0.0) {
    std::ostringstream os;
    os << "covariance_jitter=" << sampler.jitter();
    report.flags.push_back(os.str());
  }
  return report;
}

FidelityReport build_report_from_traces(const SimPlan& plan, std::span<const BinaryTrace> traces,
                                        const ReportOptions& options) {
  plan.validate();
  if (options.run_state != 0 && options.run_state != 1) throw DomainError("state must be 0 or 1");
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  FidelityReport r;
  r.kernel = plan.kernel;
  r.cfg = plan.cfg;
  r.tc_over_d = plan.kernel.t_c / plan.cfg.d;
  r.seed = plan.seed;
  r.n_reps = traces.size();
  r.n_slots = plan.n_slots;
  r.run_state = options.run_state;
  r.ge = ge_params(plan.kernel, plan.cfg);

  r.gaps_empirical = markov_gap_empirical(traces);
  r.max_markov_gap = r.gaps_empirical.max();
  if (r.gaps_empirical.insufficient) r.flags.emplace_back("insufficient_context");
  r.max_markov_gap_exact = kNaN;
  if (options.exact_gaps) {
    r.gaps_exact = markov_gap_exact(plan.kernel, plan.cfg);
    r.has_exact_gaps = true;
    r.max_markov_gap_exact = r.gaps_exact.max();
  }

  const double p_exit = options.run_state == 1 ? r.ge.p10 : r.ge.p01;
  const std::size_t k_max = default_k_max(p_exit, plan.n_slots);
  const auto runs = extract_runs(traces, options.run_state);
  r.n_runs = runs.size();
  r.runs_ge = ge_runlength_pmf(p_exit, k_max, options.run_state);
  r.second_order = fit_second_order(traces, options.run_state);
  if (r.second_order.insufficient) r.flags.emplace_back("insufficient_second_order_context");
  r.runs_second = second_order_runlength_pmf(r.second_order.entry, r.second_order.stay, k_max,
                                             options.run_state);
  if (runs.empty()) {
    r.flags.emplace_back("no_complete_runs");
    r.dtv_ge = kNaN;
    r.dtv_second = kNaN;
  } else {
    r.runs_empirical = empirical_runlength(runs, k_max, options.run_state);
    r.dtv_ge = tv_distance(r.runs_empirical, r.runs_ge);
    r.dtv_second = tv_distance(r.runs_empirical, r.runs_second);
  }

  r.transitions = estimate_transitions(traces, options.aggregation);
  r.persistence_mc = empirical_persistence(traces, plan.cfg, options.aggregation);
  if (r.transitions.degenerate_reps > 0)
    r.flags.push_back("degenerate_replications=" + std::to_string(r.transitions.degenerate_reps));
  r.persistence_exact = r.ge.persistence;
  r.persistence_rel_err_pct =
      100.0 * std::abs(r.persistence_mc.value - r.persistence_exact) / r.persistence_exact;
  return r;
}

}  // namespace gebridge
