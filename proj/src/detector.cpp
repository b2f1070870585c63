#include "vcd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "vcd/error.hpp"
#include "vcd/io.hpp"

namespace vcd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Residual of y against an orthonormal basis, two projection passes.
Vector project_out(const Matrix& q, const Vector& y, Vector* coeffs) {
  Vector r = y;
  Vector c = Vector::Zero(q.cols());
  if (q.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      const Vector d = q.transpose() * r;
      r.noalias() -= q * d;
      c += d;
    }
  }
  if (coeffs) *coeffs = std::move(c);
  return r;
}

void append_column(Matrix& q, const Vector& v) {
  q.conservativeResize(q.rows(), q.cols() + 1);
  q.col(q.cols() - 1) = v;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::TargetPresent:
      return "TargetPresent";
    case Verdict::TargetAbsent:
      return "TargetAbsent";
    case Verdict::Undecided:
      break;
  }
  return "Undecided";
}

void DetectorConfig::validate() const {
  if (target_basis.ambient_dim() < 1 || target_basis.dim() < 1) {
    throw InputError("detector: target basis must be a non-empty subspace");
  }
  if (noise_variance_hint && !(*noise_variance_hint >= 0.0 && std::isfinite(*noise_variance_hint))) {
    throw InputError("detector: noise variance hint must be finite and non-negative");
  }
  if (!(rank_gap_factor > 0.0)) throw InputError("detector: rank_gap_factor must be > 0");
  if (!(divergence_threshold > 1.0)) throw InputError("detector: divergence_threshold must be > 1");
  if (!(stall_epsilon > 0.0)) throw InputError("detector: stall_epsilon must be > 0");
  if (stall_patience < 1) throw InputError("detector: stall_patience must be >= 1");
  if (max_samples < 1) throw InputError("detector: max_samples must be >= 1");
  if (!(zero_volume_tol > 0.0)) throw InputError("detector: zero_volume_tol must be > 0");
}

std::size_t estimate_rank(std::span<const double> eigenvalues, const DetectorConfig& cfg,
                          std::size_t sample_count) {
  if (eigenvalues.empty()) throw InputError("estimate_rank: empty eigenvalue list");
  for (std::size_t j = 1; j < eigenvalues.size(); ++j) {
    if (eigenvalues[j] > eigenvalues[j - 1]) {
      throw InputError("estimate_rank: eigenvalues must be non-increasing");
    }
  }
  const std::size_t n = eigenvalues.size();
  const double top = eigenvalues.front();
  if (!(top > 0.0)) return 0;
  const double floor = kRelativeRankFloor * top;
  auto nonzero = [&](std::size_t j) { return eigenvalues[j] > floor; };

  std::size_t k = 0;
  if (cfg.noise_variance_hint) {
    const double threshold = std::max(cfg.rank_gap_factor * *cfg.noise_variance_hint, floor);
    while (k < n && eigenvalues[k] > threshold) ++k;
  } else {
    const std::size_t last = std::min(sample_count == 0 ? 0 : sample_count - 1, n - 1);
    double best = -1.0;
    for (std::size_t j = 1; j <= last; ++j) {
      if (!nonzero(j - 1)) break;
      const double ratio = nonzero(j) ? eigenvalues[j - 1] / eigenvalues[j]
                                      : std::numeric_limits<double>::infinity();
      if (ratio >= best) {
        best = ratio;
        k = j;
      }
    }
  }
  return std::min({k, sample_count, n - 1});
}

Decision decide(std::span<const TrajectoryPoint> trajectory, const DetectorConfig& cfg) {
  if (trajectory.empty()) return {};
  const TrajectoryPoint& last = trajectory.back();
  if (last.t <= cfg.zero_volume_tol || last.inv_t > cfg.divergence_threshold) {
    return {Verdict::TargetPresent, last.index};
  }
  const std::size_t p = cfg.stall_patience;
  if (trajectory.size() >= 2 && trajectory.size() > p) {
    bool stalled = true;
    for (std::size_t j = trajectory.size() - p; j < trajectory.size(); ++j) {
      const double step = std::abs(trajectory[j].inv_t - trajectory[j - 1].inv_t);
      if (!(step < cfg.stall_epsilon * trajectory[j].inv_t)) {
        stalled = false;
        break;
      }
    }
    if (stalled) return {Verdict::TargetAbsent, last.index};
  }
  return {};
}

VcDetector::VcDetector(DetectorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const Index n = ambient_dim();
  covariance_ = Matrix::Zero(n, n);
  eigenvalues_ = Vector::Zero(n);
  signal_basis_ = Matrix(n, 0);
  basis_ = Matrix(n, 0);
  coeffs_ = Matrix(0, 0);
}

void VcDetector::ingest(const Vector& y) {
  if (decision_.decided()) {
    throw UsageError("ingest: detector already decided " + std::string(to_string(decision_.verdict)) +
                     " at sample " + std::to_string(*decision_.decided_at));
  }
  const Index n = ambient_dim();
  if (y.size() != n) {
    throw InputError("ingest: sample length " + std::to_string(y.size()) +
                     " does not match ambient dimension " + std::to_string(n));
  }
  require_finite(y, "ingest");

  ++count_;
  const double i = static_cast<double>(count_);
  covariance_ *= (i - 1.0) / i;
  covariance_.noalias() += (y / i) * y.transpose();

  if (factored_ && static_cast<Index>(count_) <= n) {
    Vector c;
    const Vector residual = project_out(basis_, y, &c);
    const double rn = residual.norm();
    const Index r = basis_.cols();
    const Index cols = static_cast<Index>(count_);
    if (rn > kRelativeRankFloor * y.norm() && r < n) {
      append_column(basis_, residual / rn);
      coeffs_.conservativeResize(r + 1, cols);
      coeffs_.row(r).head(cols - 1).setZero();
      coeffs_.col(cols - 1).head(r) = c;
      coeffs_(r, cols - 1) = rn;
    } else {
      coeffs_.conservativeResize(r, cols);
      coeffs_.col(cols - 1) = c;
    }
    update_spectrum_from_samples();
  } else {
    if (factored_) {
      factored_ = false;
      basis_.resize(n, 0);
      coeffs_.resize(0, 0);
    }
    update_spectrum_from_covariance();
  }

  const double log_t = stacked_log_volume(cfg_.target_basis, signal_basis_);
  TrajectoryPoint pt;
  pt.index = count_;
  pt.rank = rank_;
  if (log_t == kNegInf) {
    pt.t = 0.0;
    pt.inv_t = kInvTCap;
  } else {
    pt.t = std::min(1.0, std::exp(log_t));
    pt.inv_t = std::clamp(std::exp(-log_t), 1.0, kInvTCap);
  }
  trajectory_.push_back(pt);
  if (cfg_.decisions_enabled) decision_ = decide(trajectory_, cfg_);
}

void VcDetector::update_spectrum_from_samples() {
  const Index n = ambient_dim();
  const Index r = basis_.cols();
  eigenvalues_.setZero(n);
  if (r == 0) {
    rank_ = 0;
    signal_basis_.resize(n, 0);
    return;
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(count_));
  Eigen::BDCSVD<Matrix> svd(coeffs_ * scale, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  eigenvalues_.head(s.size()) = s.cwiseAbs2();
  rank_ = estimate_rank(std::span<const double>(eigenvalues_.data(), static_cast<std::size_t>(n)),
                        cfg_, count_);
  const Index k = std::min<Index>(static_cast<Index>(rank_), s.size());
  rank_ = static_cast<std::size_t>(k);
  signal_basis_.noalias() = basis_ * svd.matrixU().leftCols(k);
}

void VcDetector::update_spectrum_from_covariance() {
  const EigenPairs eig = symmetric_eig(covariance_);
  eigenvalues_ = eig.values;
  rank_ = estimate_rank(
      std::span<const double>(eigenvalues_.data(), static_cast<std::size_t>(eigenvalues_.size())),
      cfg_, count_);
  signal_basis_ = eig.vectors.leftCols(static_cast<Index>(rank_));
}

StreamResult run_stream(const DetectorConfig& cfg,
                        const std::function<std::optional<Vector>()>& next_sample) {
  VcDetector det(cfg);
  while (!det.decision().decided() && det.sample_count() < cfg.max_samples) {
    std::optional<Vector> y = next_sample();
    if (!y) break;
    det.ingest(*y);
  }
  return {det.decision(), det.trajectory()};
}

StreamResult run_stream(const DetectorConfig& cfg, std::span<const Vector> samples) {
  std::size_t pos = 0;
  return run_stream(cfg, [&]() -> std::optional<Vector> {
    if (pos >= samples.size()) return std::nullopt;
    return samples[pos++];
  });
}

BreakpointResult noiseless_breakpoint(const SubspaceBasis& target_basis,
                                      std::span<const Vector> samples, double tol) {
  if (!(tol > 0.0)) throw InputError("noiseless_breakpoint: tol must be positive");
  const Index n = target_basis.ambient_dim();
  const double log_tol = std::log(tol);

  Matrix stacked = target_basis.matrix();
  Matrix alone(n, 0);
  double log_stacked = 0.0;
  double log_alone = 0.0;
  BreakpointResult out;

  for (std::size_t m = 0; m < samples.size(); ++m) {
    const Vector& y = samples[m];
    if (y.size() != n) {
      throw InputError("noiseless_breakpoint: sample " + std::to_string(m + 1) + " has length " +
                       std::to_string(y.size()) + ", expected " + std::to_string(n));
    }
    require_finite(y, "noiseless_breakpoint");
    const double ny = y.norm();
    const Vector rs = project_out(stacked, y, nullptr);
    const Vector ra = project_out(alone, y, nullptr);
    const double fs = ny > 0.0 ? rs.norm() / ny : 0.0;
    const double fa = ny > 0.0 ? ra.norm() / ny : 0.0;
    log_stacked += fs > 0.0 ? std::log(fs) : kNegInf;
    log_alone += fa > 0.0 ? std::log(fa) : kNegInf;
    out.stacked_log_volumes.push_back(log_stacked);

    if (log_stacked <= log_tol) {
      out.breakpoint = m + 1;
      out.target_present = log_alone > log_tol;
      return out;
    }
    append_column(stacked, rs / rs.norm());
    if (fa > 0.0) append_column(alone, ra / ra.norm());
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryPoint> trajectory,
                          const Decision& decision) {
  os << "i,T,inv_T,k_i,decision\n";
  for (const TrajectoryPoint& p : trajectory) {
    os << p.index << ',' << format_double(p.t) << ',' << format_double(p.inv_t) << ',' << p.rank
       << ',';
    if (decision.decided() && decision.decided_at == p.index) os << to_string(decision.verdict);
    os << '\n';
  }
}

}  // namespace vcd
