#include "vcd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vcd/error.hpp"

namespace vcd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_nonempty(const Matrix& X, const char* what) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw InputError(std::string(what) + ": matrix must have at least one row and one column");
  }
}

void require_same_ambient(const SubspaceBasis& a, const SubspaceBasis& b, const char* what) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw InputError(std::string(what) + ": ambient dimension mismatch (" +
                     std::to_string(a.ambient_dim()) + " vs " + std::to_string(b.ambient_dim()) +
                     ")");
  }
}

// Sum of logs of the first d entries of a descending list, with entries
// below `floor` mapped to -infinity.
double log_product(const Vector& sv, Index d, double floor) {
  double acc = 0.0;
  for (Index i = 0; i < d; ++i) {
    if (!(sv(i) > floor)) return kNegInf;
    acc += std::log(sv(i));
  }
  return acc;
}

}  // namespace

void require_finite(const Matrix& X, const char* what) {
  if (!X.allFinite()) {
    throw InputError(std::string(what) + ": non-finite entry");
  }
}

SubspaceBasis SubspaceBasis::from_orthonormal(Matrix basis, double tol) {
  require_finite(basis, "SubspaceBasis");
  if (basis.cols() > basis.rows()) {
    throw InputError("SubspaceBasis: more columns than ambient dimension");
  }
  if (basis.cols() > 0) {
    const Matrix gram = basis.transpose() * basis;
    const double dev = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (dev > tol) {
      throw InputError("SubspaceBasis: columns are not orthonormal (deviation " +
                       std::to_string(dev) + ")");
    }
  }
  return SubspaceBasis(std::move(basis));
}

SubspaceBasis SubspaceBasis::zero(Index ambient_dim) {
  if (ambient_dim < 0) throw InputError("SubspaceBasis: negative ambient dimension");
  return SubspaceBasis(Matrix(ambient_dim, 0));
}

SubspaceBasis orthonormalize(const Matrix& X, double tol) {
  require_finite(X, "orthonormalize");
  if (!(tol > 0.0)) throw InputError("orthonormalize: tol must be positive");

  const Index n = X.rows();
  const double scale = X.norm();
  Matrix q(n, std::min(n, X.cols()));
  Index r = 0;
  if (scale == 0.0) return SubspaceBasis::zero(n);

  for (Index j = 0; j < X.cols() && r < n; ++j) {
    Vector v = X.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = q.leftCols(r).transpose() * v;
      v.noalias() -= q.leftCols(r) * c;
    }
    const double norm = v.norm();
    if (norm < tol * scale) continue;
    q.col(r++) = v / norm;
  }
  return SubspaceBasis::from_orthonormal(q.leftCols(r), 1e-8);
}

Vector singular_values(const Matrix& X) {
  if (X.size() == 0) return Vector();
  // JacobiSVD keeps small singular values accurate relative to the large
  // ones, which matters for volumes near zero.
  Eigen::JacobiSVD<Matrix> svd(X);
  return svd.singularValues();
}

double log_volume(const Matrix& X, Index d) {
  require_nonempty(X, "log_volume");
  require_finite(X, "log_volume");
  if (d < 1 || d > X.cols()) {
    throw InputError("log_volume: d must satisfy 1 <= d <= cols (d=" + std::to_string(d) +
                     ", cols=" + std::to_string(X.cols()) + ")");
  }
  if (d > X.rows()) return kNegInf;
  const Vector sv = singular_values(X);
  return log_product(sv, d, kRelativeRankFloor * sv(0));
}

double volume(const Matrix& X, Index d) {
  require_nonempty(X, "volume");
  require_finite(X, "volume");
  if (d < 1 || d > X.cols()) {
    throw InputError("volume: d must satisfy 1 <= d <= cols (d=" + std::to_string(d) +
                     ", cols=" + std::to_string(X.cols()) + ")");
  }
  if (d > X.rows()) return 0.0;
  const Vector sv = singular_values(X);
  const double floor = kRelativeRankFloor * sv(0);
  double prod = 1.0;
  for (Index i = 0; i < d; ++i) {
    if (!(sv(i) > floor)) return 0.0;
    prod *= sv(i);
  }
  return prod;
}

PrincipalAngleSet principal_angles(const SubspaceBasis& a, const SubspaceBasis& b) {
  require_same_ambient(a, b, "principal_angles");
  if (a.dim() < 1 || b.dim() < 1) {
    throw InputError("principal_angles: both subspaces must have dimension >= 1");
  }
  const Vector cosines = singular_values(a.matrix().transpose() * b.matrix());
  PrincipalAngleSet out;
  out.angles.reserve(static_cast<std::size_t>(cosines.size()));
  for (Index i = 0; i < cosines.size(); ++i) {
    out.angles.push_back(std::acos(std::clamp(cosines(i), 0.0, 1.0)));
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

double stacked_log_volume(const SubspaceBasis& fixed, const Matrix& q) {
  if (q.rows() != fixed.ambient_dim()) {
    throw InputError("stacked_log_volume: row mismatch");
  }
  if (q.cols() == 0) return 0.0;
  if (fixed.dim() + q.cols() > fixed.ambient_dim()) return kNegInf;
  Matrix residual = q;
  if (fixed.dim() > 0) residual.noalias() -= fixed.matrix() * (fixed.matrix().transpose() * q);
  // |det R| of a column-pivoted QR equals the product of all singular
  // values; the pivoted diagonal is rank revealing, so the floor test is
  // applied to it directly.
  const Eigen::ColPivHouseholderQR<Matrix> qr(residual);
  const Vector diag = qr.matrixR().diagonal().cwiseAbs();
  return log_product(diag, q.cols(), kRelativeRankFloor);
}

double volume_correlation(const SubspaceBasis& a, const SubspaceBasis& b) {
  require_same_ambient(a, b, "volume_correlation");
  const double lv = stacked_log_volume(a, b.matrix());
  return std::min(1.0, std::exp(lv));
}

double incremental_volume_factor(const Matrix& X, const Matrix& y_prev, const Vector& y) {
  const Index n = y.size();
  if ((X.cols() > 0 && X.rows() != n) || (y_prev.cols() > 0 && y_prev.rows() != n)) {
    throw InputError("incremental_volume_factor: row dimension mismatch");
  }
  require_finite(y, "incremental_volume_factor");
  Matrix stacked(n, X.cols() + y_prev.cols());
  stacked << X, y_prev;
  Vector r = y;
  if (stacked.cols() > 0) {
    const SubspaceBasis basis = orthonormalize(stacked, 1e-12);
    const Matrix& q = basis.matrix();
    for (int pass = 0; pass < 2; ++pass) r.noalias() -= q * (q.transpose() * r);
  }
  return r.norm();
}

Vector projector_complement_apply(const SubspaceBasis& b, const Vector& v) {
  if (v.size() != b.ambient_dim()) {
    throw InputError("projector_complement_apply: vector length " + std::to_string(v.size()) +
                     " does not match ambient dimension " + std::to_string(b.ambient_dim()));
  }
  if (b.dim() == 0) return v;
  return v - b.matrix() * (b.matrix().transpose() * v);
}

EigenPairs symmetric_eig(const Matrix& S) {
  require_nonempty(S, "symmetric_eig");
  require_finite(S, "symmetric_eig");
  if (S.rows() != S.cols()) throw InputError("symmetric_eig: matrix is not square");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw InputError("symmetric_eig: matrix is not symmetric (deviation " +
                     std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success) {
    throw InputError("symmetric_eig: eigensolver did not converge");
  }
  // Eigen returns ascending order.
  EigenPairs out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double elementary_symmetric(std::span<const double> values, std::size_t k) {
  if (k > values.size()) {
    throw InputError("elementary_symmetric: k=" + std::to_string(k) + " exceeds list length " +
                     std::to_string(values.size()));
  }
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (double v : values) {
    for (std::size_t j = k; j >= 1; --j) e[j] += v * e[j - 1];
  }
  return e[k];
}

}  // namespace vcd
