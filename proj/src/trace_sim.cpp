#include "gebridge/trace_sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gebridge/rng.hpp"
#include "parallel.hpp"

namespace gebridge {

void SimPlan::validate() const {
  kernel.validate();
  cfg.validate();
  if (n_slots < 2) throw DomainError("n_slots must be >= 2");
  if (n_reps < 1) throw DomainError("n_reps must be >= 1");
}

struct PathSampler::Factor {
  Eigen::MatrixXd lower;
};

namespace {

std::shared_ptr<const PathSampler::Factor> factorize(const SimPlan& plan, double& jitter_used);

}  // namespace

PathSampler::PathSampler(const SimPlan& plan, SamplerMethod method) : plan_(plan), method_(method) {
  plan_.validate();
  if (method_ == SamplerMethod::Auto) {
    method_ = plan_.kernel.family == KernelFamily::Exponential ? SamplerMethod::Autoregressive
                                                                : SamplerMethod::Factorization;
  }
  if (method_ == SamplerMethod::Autoregressive &&
      plan_.kernel.family != KernelFamily::Exponential) {
    throw DomainError("the autoregressive sampler is exact only for the exponential kernel");
  }
  if (method_ == SamplerMethod::Factorization) factor_ = factorize(plan_, jitter_);
}

namespace {

std::shared_ptr<const PathSampler::Factor> factorize(const SimPlan& plan, double& jitter_used) {
  const auto n = static_cast<Eigen::Index>(plan.n_slots);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = evaluate(plan.kernel, static_cast<double>(i - j) * plan.cfg.d);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }

  static constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
  std::ostringstream tried;
  for (double rel : kJitterLadder) {
    const double jitter = rel * plan.kernel.sigma2;
    Eigen::MatrixXd work = cov;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      jitter_used = jitter;
      auto factor = std::make_shared<PathSampler::Factor>();
      factor->lower = llt.matrixL();
      return factor;
    }
    tried << (rel == 0.0 ? "" : ", ") << rel;
  }
  throw std::runtime_error("covariance factorization failed; relative diagonal jitter tried: 0" +
                           tried.str());
}

}  // namespace

std::vector<double> PathSampler::sample(std::size_t rep) const {
  if (rep >= plan_.n_reps) throw DomainError("replication index out of range");
  const std::size_t n = plan_.n_slots;
  const double sigma = std::sqrt(plan_.kernel.sigma2);
  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = normal_quantile(keyed_uniform(plan_.seed, rep, k));

  std::vector<double> x(n);
  if (method_ == SamplerMethod::Autoregressive) {
    const double rho = one_step_correlation(plan_.kernel, plan_.cfg.d).value();
    const double innovation_sd = sigma * std::sqrt((1.0 - rho) * (1.0 + rho));
    x[0] = sigma * z[0];
    for (std::size_t k = 1; k < n; ++k) x[k] = rho * x[k - 1] + innovation_sd * z[k];
    return x;
  }
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(n));
  Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
  xv.noalias() = factor_->lower.triangularView<Eigen::Lower>() * zv;
  return x;
}

std::vector<double> sample_gaussian_path(const SimPlan& plan, std::size_t rep) {
  return PathSampler(plan).sample(rep);
}

BinaryTrace threshold(std::span<const double> path, double s_abs) {
  BinaryTrace trace;
  trace.bits.reserve(path.size());
  for (double x : path) trace.bits.push_back(x >= s_abs ? 1 : 0);
  return trace;
}

std::vector<BinaryTrace> simulate_traces(const SimPlan& plan, SamplerMethod method,
                                         unsigned jobs) {
  return simulate_traces(PathSampler(plan, method), jobs);
}

std::vector<BinaryTrace> simulate_traces(const PathSampler& sampler, unsigned jobs) {
  const SimPlan& plan = sampler.plan();
  const double s_abs = plan.cfg.s_norm * std::sqrt(plan.kernel.sigma2);
  std::vector<BinaryTrace> traces(plan.n_reps);
  detail::parallel_for(plan.n_reps, jobs, [&](std::size_t rep) {
    const auto path = sampler.sample(rep);
    traces[rep] = threshold(path, s_abs);
    traces[rep].seed = plan.seed;
    traces[rep].rep = rep;
  });
  return traces;
}

namespace {

struct RepCounts {
  std::array<std::array<std::uint64_t, 2>, 2> trans{};
  std::uint64_t zeros = 0;
  std::uint64_t slots = 0;

  [[nodiscard]] std::uint64_t from(int i) const { return trans[i][0] + trans[i][1]; }
  [[nodiscard]] bool degenerate() const { return from(0) == 0 || from(1) == 0; }

  RepCounts& operator+=(const RepCounts& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) trans[i][j] += o.trans[i][j];
    zeros += o.zeros;
    slots += o.slots;
    return *this;
  }
  RepCounts& operator-=(const RepCounts& o) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) trans[i][j] -= o.trans[i][j];
    zeros -= o.zeros;
    slots -= o.slots;
    return *this;
  }
};

RepCounts count(const BinaryTrace& t) {
  if (t.bits.size() < 2) throw DomainError("trace must contain at least two slots");
  RepCounts c;
  c.slots = t.bits.size();
  for (std::size_t n = 0; n < t.bits.size(); ++n) {
    if (t.bits[n] == 0) ++c.zeros;
    if (n + 1 < t.bits.size()) ++c.trans[t.bits[n] ? 1 : 0][t.bits[n + 1] ? 1 : 0];
  }
  return c;
}

std::vector<RepCounts> count_all(std::span<const BinaryTrace> traces) {
  if (traces.empty()) throw DomainError("at least one trace is required");
  std::vector<RepCounts> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(count(t));
  return out;
}

// Jeffreys: (n_{i->j} + 1/2) / (n_{i->.} + 1)
double smoothed(const RepCounts& c, int from, int to) {
  return (static_cast<double>(c.trans[from][to]) + 0.5) / (static_cast<double>(c.from(from)) + 1.0);
}

double persistence_of(const RepCounts& c, double d) {
  const double pi0 = static_cast<double>(c.zeros) / static_cast<double>(c.slots);
  return d * (pi0 / smoothed(c, 0, 1) + (1.0 - pi0) / smoothed(c, 1, 0));
}

constexpr double kZ95 = 1.96;

Interval around(double centre, double se) { return {centre - kZ95 * se, centre + kZ95 * se}; }

struct MeanSe {
  double mean;
  double se;
};

template <class Stat>
MeanSe per_replication(const std::vector<RepCounts>& reps, Stat stat) {
  const auto r = static_cast<double>(reps.size());
  double sum = 0.0;
  for (const auto& c : reps) sum += stat(c);
  const double mean = sum / r;
  if (reps.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& c : reps) ss += (stat(c) - mean) * (stat(c) - mean);
  return {mean, std::sqrt(ss / (r - 1.0) / r)};
}

// Statistic of the pooled counts, with a leave-one-replication-out jackknife SE.
template <class Stat>
MeanSe pooled(const std::vector<RepCounts>& reps, Stat stat) {
  RepCounts total;
  for (const auto& c : reps) total += c;
  const double value = stat(total);
  if (reps.size() < 2) return {value, 0.0};
  std::vector<double> loo;
  loo.reserve(reps.size());
  for (const auto& c : reps) {
    RepCounts rest = total;
    rest -= c;
    loo.push_back(stat(rest));
  }
  const auto r = static_cast<double>(reps.size());
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= r;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return {value, std::sqrt((r - 1.0) / r * ss)};
}

template <class Stat>
MeanSe aggregate(const std::vector<RepCounts>& reps, Aggregation how, Stat stat) {
  return how == Aggregation::Pooled ? pooled(reps, stat) : per_replication(reps, stat);
}

}  // namespace

TransitionEstimate estimate_transitions(std::span<const BinaryTrace> traces,
                                        Aggregation aggregation) {
  const auto reps = count_all(traces);
  TransitionEstimate est;
  est.aggregation = aggregation;
  est.n_reps = reps.size();
  for (const auto& c : reps) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) est.counts[i][j] += c.trans[i][j];
    if (c.degenerate()) ++est.degenerate_reps;
  }
  const auto p01 = aggregate(reps, aggregation, [](const RepCounts& c) { return smoothed(c, 0, 1); });
  const auto p10 = aggregate(reps, aggregation, [](const RepCounts& c) { return smoothed(c, 1, 0); });
  est.p01_hat = p01.mean;
  est.p10_hat = p10.mean;
  est.ci95_p01 = around(p01.mean, p01.se);
  est.ci95_p10 = around(p10.mean, p10.se);
  return est;
}

PersistenceEstimate empirical_persistence(std::span<const BinaryTrace> traces,
                                          const LinkConfig& cfg, Aggregation aggregation) {
  cfg.validate();
  const auto reps = count_all(traces);
  PersistenceEstimate est;
  est.aggregation = aggregation;
  std::uint64_t zeros = 0;
  std::uint64_t slots = 0;
  for (const auto& c : reps) {
    zeros += c.zeros;
    slots += c.slots;
    if (c.degenerate()) ++est.degenerate_reps;
  }
  est.pi0_hat = static_cast<double>(zeros) / static_cast<double>(slots);
  const double d = cfg.d;
  const auto e = aggregate(reps, aggregation, [d](const RepCounts& c) { return persistence_of(c, d); });
  est.value = e.mean;
  est.ci95 = around(e.mean, e.se);
  return est;
}

std::string to_string(SamplerMethod method) {
  switch (method) {
    case SamplerMethod::Auto:
      return "auto";
    case SamplerMethod::Factorization:
      return "factorization";
    case SamplerMethod::Autoregressive:
      return "autoregressive";
  }
  return "unknown";
}

std::string to_string(Aggregation aggregation) {
  return aggregation == Aggregation::Pooled ? "pooled" : "per-replication";
}

}  // namespace gebridge
