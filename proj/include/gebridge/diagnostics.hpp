#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gebridge/ge_bridge.hpp"
#include "gebridge/kernels.hpp"
#include "gebridge/trace_sim.hpp"

namespace gebridge {

/// Minimum pooled occurrences of a two-bit context before an empirical
/// conditional probability is trusted.
inline constexpr std::uint64_t kMinContextCount = 100;

/// One-step Markov gap |P(B+ = 1 | B- = i, B = j) - P(B+ = 1 | B = j)| for
/// the four contexts (i, j). Index with at(i, j) or gap[2 * i + j].
struct MarkovGaps {
  std::array<double, 4> gap{};
  std::array<double, 4> order2{};  // P(B+ = 1 | B- = i, B = j)
  std::array<double, 2> order1{};  // P(B+ = 1 | B = j)
  /// Binomial standard error of each order-2 conditional (empirical only).
  std::array<double, 4> se{};
  /// Pooled context occurrences (empirical only).
  std::array<std::uint64_t, 4> context_counts{};
  bool insufficient = false;

  [[nodiscard]] double at(int i, int j) const { return gap[static_cast<std::size_t>(2 * i + j)]; }
  [[nodiscard]] double max() const;
};

/// Exact gaps from the trivariate law of three consecutive samples.
MarkovGaps markov_gap_exact(const KernelSpec& kernel, const LinkConfig& cfg);
MarkovGaps markov_gap_exact_from_correlations(Correlation rho1, Correlation rho2, double s_norm);

/// Jeffreys-smoothed conditional frequencies of bit triples pooled over all
/// traces. Flags `insufficient` when a context occurs fewer than
/// `min_context` times.
MarkovGaps markov_gap_empirical(std::span<const BinaryTrace> traces,
                                std::uint64_t min_context = kMinContextCount);

/// Run-length law on k = 1..k_max plus a single bucket for k > k_max.
struct RunLengthDist {
  std::vector<double> pmf;  // pmf[k - 1] = P(L = k)
  double tail_mass = 0.0;   // P(L > k_max)
  int state = 1;

  [[nodiscard]] std::size_t k_max() const noexcept { return pmf.size(); }
  [[nodiscard]] double at(std::size_t k) const { return k >= 1 && k <= pmf.size() ? pmf[k - 1] : 0.0; }
  [[nodiscard]] double mean_truncated() const;
};

/// Lengths of maximal blocks of `state`. Blocks touching either end of the
/// trace are censored (dropped).
std::vector<std::size_t> extract_runs(const BinaryTrace& trace, int state);

/// All complete runs of `state` across traces, in trace order.
std::vector<std::size_t> extract_runs(std::span<const BinaryTrace> traces, int state);

/// Empirical distribution of the given run lengths. Throws DomainError when
/// `runs` is empty.
RunLengthDist empirical_runlength(std::span<const std::size_t> runs, std::size_t k_max, int state);

/// Geometric law (1 - p)^(k-1) p of a first-order chain leaving the state
/// with probability p_exit per slot.
RunLengthDist ge_runlength_pmf(double p_exit, std::size_t k_max, int state = 1);

/// Order-2 continuation probabilities for runs of one state:
///   entry = P(stay | previous slot was the other state, current is `state`)
///   stay  = P(stay | previous and current slots are both `state`)
struct SecondOrderFit {
  double entry = 0.0;
  double stay = 0.0;
  std::uint64_t n_entry = 0;
  std::uint64_t n_stay = 0;
  int state = 1;
  bool insufficient = false;
};

SecondOrderFit fit_second_order(std::span<const BinaryTrace> traces, int state,
                                std::uint64_t min_context = kMinContextCount);

/// P(L = 1) = 1 - entry, P(L = k >= 2) = entry * stay^(k-2) * (1 - stay).
RunLengthDist second_order_runlength_pmf(double entry, double stay, std::size_t k_max,
                                         int state = 1);

/// Half the L1 distance over 1..k_max plus the tail bucket.
double tv_distance(const RunLengthDist& p, const RunLengthDist& q);

/// ceil(10 * mean dwell in slots), capped at n_slots.
std::size_t default_k_max(double p_exit, std::size_t n_slots);

/// Fidelity of the matched first-order chain for one configuration.
struct FidelityReport {
  KernelSpec kernel;
  LinkConfig cfg;
  double tc_over_d = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_reps = 0;
  std::size_t n_slots = 0;

  GeParams ge;
  MarkovGaps gaps_empirical;
  MarkovGaps gaps_exact;
  bool has_exact_gaps = false;
  double max_markov_gap = 0.0;        // empirical
  double max_markov_gap_exact = 0.0;  // NaN when not computed

  int run_state = 1;
  std::size_t n_runs = 0;
  RunLengthDist runs_empirical;
  RunLengthDist runs_ge;
  RunLengthDist runs_second;
  SecondOrderFit second_order;
  double dtv_ge = 0.0;
  double dtv_second = 0.0;

  TransitionEstimate transitions;
  PersistenceEstimate persistence_mc;
  double persistence_exact = 0.0;
  double persistence_rel_err_pct = 0.0;

  double sampler_jitter = 0.0;
  std::vector<std::string> flags;
};

struct ReportOptions {
  int run_state = 1;
  bool exact_gaps = true;
  unsigned jobs = 1;
  Aggregation aggregation = Aggregation::Pooled;
};

/// Simulates the plan and evaluates every fidelity diagnostic against the
/// closed-form parameters.
FidelityReport build_report(const SimPlan& plan, const ReportOptions& options = {});

/// Same as build_report but on traces the caller already simulated.
FidelityReport build_report_from_traces(const SimPlan& plan, std::span<const BinaryTrace> traces,
                                        const ReportOptions& options = {});

}  // namespace gebridge
