#ifndef VCD_DETECTOR_HPP
#define VCD_DETECTOR_HPP

// Volume-correlation subspace detector.
//
// Each ingested sample updates the running covariance
//
//   R(i) = ((i-1)/i) R(i-1) + (1/i) y y^T,
//
// the top-k_i eigenvectors Q of R(i) are taken as the estimated
// signal(-plus-clutter) subspace, and the statistic
//
//   T(i) = Vol([Q, Q_S]) = det^{1/2}(Q^T P_S^perp Q)
//
// is appended to the trajectory. Under the target-absent hypothesis 1/T
// settles at a finite plateau; with a target present it diverges.
//
// Decision rule after every sample:
//   1/T > divergence_threshold (or T <= zero_volume_tol)  -> TargetPresent
//   |1/T(j) - 1/T(j-1)| < stall_epsilon * 1/T(j) for the last
//     stall_patience increments                            -> TargetAbsent
//   otherwise                                              -> Undecided

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vcd/geometry.hpp"

namespace vcd {

enum class Verdict { Undecided, TargetPresent, TargetAbsent };

std::string_view to_string(Verdict v);

struct Decision {
  Verdict verdict = Verdict::Undecided;
  std::optional<std::size_t> decided_at;

  bool decided() const { return verdict != Verdict::Undecided; }
};

struct TrajectoryPoint {
  std::size_t index = 0;  // 1-based sample count
  double t = 1.0;
  double inv_t = 1.0;
  std::size_t rank = 0;
};

inline constexpr double kInvTCap = 1e308;

struct DetectorConfig {
  SubspaceBasis target_basis;
  // Known noise variance; enables the threshold rank rule. Zero selects the
  // noiseless regime (rank = count of eigenvalues above the numerical floor).
  std::optional<double> noise_variance_hint;
  double rank_gap_factor = 2.0;
  double divergence_threshold = 1e6;
  double stall_epsilon = 1e-3;
  std::size_t stall_patience = 5;
  std::size_t max_samples = 512;
  double zero_volume_tol = 1e-8;
  // When false the trajectory is recorded but no decision is ever taken.
  bool decisions_enabled = true;

  void validate() const;
};

// Signal rank from descending covariance eigenvalues.
//
// Eigenvalues at or below 1e-12 * lambda_1 are treated as exact zeros.
// With a noise hint s2: k = #{lambda_j > rank_gap_factor * s2} (zeros never
// count). Without one: k = the largest j <= min(i-1, n-1) maximizing
// lambda_j / lambda_{j+1} (a zero denominator gives +infinity; j with
// lambda_j = 0 is not a candidate); k = 0 if there is no candidate.
// k is capped at min(i, n-1).
std::size_t estimate_rank(std::span<const double> eigenvalues, const DetectorConfig& cfg,
                          std::size_t sample_count);

Decision decide(std::span<const TrajectoryPoint> trajectory, const DetectorConfig& cfg);

class VcDetector {
 public:
  explicit VcDetector(DetectorConfig cfg);

  // Throws UsageError once a decision has been reached and InputError on a
  // length mismatch or non-finite entries.
  void ingest(const Vector& y);

  std::size_t sample_count() const { return count_; }
  const Matrix& covariance() const { return covariance_; }
  // Eigenvalues of covariance(), descending, length n.
  const Vector& eigenvalues() const { return eigenvalues_; }
  std::size_t estimated_rank() const { return rank_; }
  // Top-k_i eigenvectors of covariance() (n x k_i, orthonormal).
  const Matrix& signal_basis() const { return signal_basis_; }
  const std::vector<TrajectoryPoint>& trajectory() const { return trajectory_; }
  const Decision& decision() const { return decision_; }
  const DetectorConfig& config() const { return cfg_; }
  Index ambient_dim() const { return cfg_.target_basis.ambient_dim(); }

 private:
  void update_spectrum_from_samples();
  void update_spectrum_from_covariance();

  DetectorConfig cfg_;
  std::size_t count_ = 0;
  Matrix covariance_;
  Vector eigenvalues_;
  std::size_t rank_ = 0;
  Matrix signal_basis_;
  std::vector<TrajectoryPoint> trajectory_;
  Decision decision_;

  // While count_ <= n the samples Y = [y_1 .. y_i] are kept factored as
  // Y = basis_ * coeffs_ (basis_ orthonormal, n x r); the leading
  // eigenpairs of Y Y^T / i then come from an SVD of the small r x i
  // coefficient matrix. Past n samples the covariance is decomposed
  // directly.
  bool factored_ = true;
  Matrix basis_;
  Matrix coeffs_;
};

struct StreamResult {
  Decision decision;
  std::vector<TrajectoryPoint> trajectory;
};

// Pulls samples until a decision is reached, the source returns nullopt or
// cfg.max_samples samples have been ingested.
StreamResult run_stream(const DetectorConfig& cfg,
                        const std::function<std::optional<Vector>()>& next_sample);
StreamResult run_stream(const DetectorConfig& cfg, std::span<const Vector> samples);

struct BreakpointResult {
  std::optional<std::size_t> breakpoint;
  bool target_present = false;
  // log of the column-normalized stacked volume Vol([Q_S, y_1/|y_1|, ...])
  // after each sample, up to and including the breakpoint.
  std::vector<double> stacked_log_volumes;
};

// Noiseless procedure: accumulate samples until the (column-normalized)
// volume of [Q_S, y_1, ..., y_m] drops to <= tol; at that breakpoint the
// target is declared present iff the normalized volume of [y_1, ..., y_m]
// alone is still > tol. No breakpoint within the samples -> nullopt.
BreakpointResult noiseless_breakpoint(const SubspaceBasis& target_basis,
                                      std::span<const Vector> samples, double tol = 1e-8);

// CSV with header `i,T,inv_T,k_i,decision`; the decision column is empty
// except on the row where the decision was taken.
void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryPoint> trajectory,
                          const Decision& decision);

}  // namespace vcd

#endif  // VCD_DETECTOR_HPP
