#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gebridge/ge_bridge.hpp"
#include "gebridge/kernels.hpp"

namespace gebridge {

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Monte Carlo plan: n_reps independent sequences of n_slots samples each.
struct SimPlan {
  KernelSpec kernel;
  LinkConfig cfg;
  std::size_t n_slots = 1200;
  std::size_t n_reps = 250;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
};

/// Thresholded slot sequence. bits[n] = 1 iff X(nD) >= S.
struct BinaryTrace {
  std::vector<std::uint8_t> bits;
  std::uint64_t seed = 0;
  std::size_t rep = 0;
};

enum class SamplerMethod {
  Auto,            // autoregressive for the exponential kernel, factorization otherwise
  Factorization,   // lower Cholesky factor of the full slot covariance
  Autoregressive,  // exact AR(1) recursion; exponential kernel only
};

/// Draws exact samples of the stationary process at the slot boundaries.
///
/// The covariance factor is computed once at construction and shared by
/// copies. Replication `rep` uses the standard normals keyed by
/// (seed, rep, slot), so any replication can be regenerated in isolation.
class PathSampler {
 public:
  explicit PathSampler(const SimPlan& plan, SamplerMethod method = SamplerMethod::Auto);

  [[nodiscard]] std::vector<double> sample(std::size_t rep) const;

  [[nodiscard]] SamplerMethod method() const noexcept { return method_; }
  /// Diagonal jitter (absolute, in variance units) that was needed to factor
  /// the covariance; 0 when the plain factorization succeeded.
  [[nodiscard]] double jitter() const noexcept { return jitter_; }
  [[nodiscard]] const SimPlan& plan() const noexcept { return plan_; }

  struct Factor;  // opaque covariance factor

 private:
  SimPlan plan_;
  SamplerMethod method_;
  double jitter_ = 0.0;
  std::shared_ptr<const Factor> factor_;
};

std::vector<double> sample_gaussian_path(const SimPlan& plan, std::size_t rep);

/// Applies bit = (x >= s_abs) to every sample.
BinaryTrace threshold(std::span<const double> path, double s_abs);

/// Samples and thresholds every replication of the plan at S = s_norm * sigma.
/// `jobs` bounds the worker threads; output order is by replication.
std::vector<BinaryTrace> simulate_traces(const SimPlan& plan,
                                         SamplerMethod method = SamplerMethod::Auto,
                                         unsigned jobs = 1);
std::vector<BinaryTrace> simulate_traces(const PathSampler& sampler, unsigned jobs = 1);

/// How per-replication counts are combined into a point estimate.
enum class Aggregation {
  Pooled,          // Jeffreys-smoothed ratio of counts summed over replications
  PerReplication,  // Jeffreys-smoothed estimate per replication, then averaged
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct TransitionEstimate {
  double p01_hat = 0.0;
  double p10_hat = 0.0;
  Interval ci95_p01;
  Interval ci95_p10;
  /// counts[i][j] = number of i -> j transitions, summed over replications.
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  /// Replications that never visited one of the two conditioning states.
  std::size_t degenerate_reps = 0;
  std::size_t n_reps = 0;
  Aggregation aggregation = Aggregation::Pooled;
};

struct PersistenceEstimate {
  double value = 0.0;
  Interval ci95;
  double pi0_hat = 0.0;
  std::size_t degenerate_reps = 0;
  Aggregation aggregation = Aggregation::Pooled;
};

/// Transition probabilities with a 1/2 pseudo-count on each transition and
/// 95% normal intervals whose standard error is taken across replications
/// (leave-one-replication-out jackknife when pooled).
TransitionEstimate estimate_transitions(std::span<const BinaryTrace> traces,
                                        Aggregation aggregation = Aggregation::Pooled);

/// d * (pi0 / p01 + pi1 / p10) with the empirical occupancy and the
/// smoothed transition estimates.
PersistenceEstimate empirical_persistence(std::span<const BinaryTrace> traces,
                                          const LinkConfig& cfg,
                                          Aggregation aggregation = Aggregation::Pooled);

std::string to_string(SamplerMethod method);
std::string to_string(Aggregation aggregation);

}  // namespace gebridge
