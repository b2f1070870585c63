#ifndef VCD_THEORY_HPP
#define VCD_THEORY_HPP

// Sample-size and deviation bounds for the noisy detector, and Monte Carlo
// checks of its limiting behaviour.
//
// Both sample bounds share the form
//
//   m >= (1 + eps) / (sqrt(delta + 1) - 1)^2 *
//        ( sum_{i != j <= k} l_i l_j / (l_i - l_j)^2
//          + (n - k) sum_{i <= k} l_i s2 / (s2 - l_i)^2 )
//
// with k = d1 + d2 (target present) or k = d1 (target absent). The
// probability that the deviation bound holds is 1 - exp(-k n eps^2 / C) for
// an unspecified constant C, so only the exponent argument k n eps^2 is
// reported. Deviation bounds are leading order: delta^d2 for T^2 under the
// target-present hypothesis, s_{d1-1}(Q_C^T P_S^perp Q_C) delta for
// |T^2 - tau^2| under the target-absent one.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "vcd/detector.hpp"
#include "vcd/geometry.hpp"
#include "vcd/scenario.hpp"

namespace vcd {

struct BoundInputs {
  // Descending. Either just the k signal eigenvalues or the full spectrum
  // with trailing entries equal to noise_variance.
  std::vector<double> eigenvalues;
  double noise_variance = 1.0;
  std::size_t ambient_dim = 0;
  // 0 means "number of eigenvalues strictly above noise_variance".
  std::size_t signal_rank = 0;
  double delta = 0.1;
  double epsilon = 0.5;
  // Needed for the target-present deviation bound delta^d2.
  std::optional<std::size_t> target_dim;
};

struct BoundReport {
  std::uint64_t m_required = 1;
  // Leading-order value; nullopt when the required dimension or bases were
  // not supplied.
  std::optional<double> deviation_bound;
  double exponent_argument = 0.0;
};

BoundReport sample_bound_target_present(const BoundInputs& in);
BoundReport sample_bound_target_absent(const BoundInputs& in);
// Same, with the deviation bound evaluated from the two bases.
BoundReport sample_bound_target_absent(const BoundInputs& in, const SubspaceBasis& target,
                                       const SubspaceBasis& clutter);

// The bracketed spectral sum of the bound (exposed for tests and reports).
double bound_spectral_sum(const BoundInputs& in);

// Volume correlation of target and clutter; the target-absent limit of T.
// Throws DegenerateGeometryError when it is below 1e-12.
double tau(const SubspaceBasis& target, const SubspaceBasis& clutter);

void to_json(nlohmann::json& j, const BoundReport& r);

struct Quantiles {
  std::size_t count = 0;
  double q10 = 0.0;
  double median = 0.0;
  double q90 = 0.0;
};

// Linear-interpolation quantile (the "type 7" definition) of unsorted data.
double quantile(std::vector<double> values, double p);
Quantiles summarize_values(const std::vector<double>& values);

struct ConvergenceSummary {
  double tau = 0.0;
  // Index m-1 holds quantiles of 1/T(m) over trials.
  std::vector<Quantiles> present;
  std::vector<Quantiles> absent;
  // Median |1/T(m) - 1/tau| over absent trials at the first and last m.
  double absent_gap_first = 0.0;
  double absent_gap_last = 0.0;
  bool absent_converging = false;
  // Median present 1/T at the last m divided by the median absent 1/T there.
  double present_ratio = 0.0;
  bool present_diverging = false;
};

struct ConvergenceOptions {
  std::size_t trials = 10;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double divergence_factor = 10.0;
  std::size_t parallelism = 1;
};

// Runs `trials` detectors per hypothesis over full trajectories of
// opts.samples samples (decisions disabled), each trial on its own seeded
// stream, and summarizes 1/T per m.
ConvergenceSummary validate_convergence(const Scenario& sc, const DetectorConfig& cfg,
                                        const ConvergenceOptions& opts);

}  // namespace vcd

#endif  // VCD_THEORY_HPP
