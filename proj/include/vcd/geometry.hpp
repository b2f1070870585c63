#ifndef VCD_GEOMETRY_HPP
#define VCD_GEOMETRY_HPP

// Dense geometric primitives on real subspaces.
//
// Matrices are Eigen column-major double matrices throughout. A subspace of
// R^n is carried as an n x d matrix with orthonormal columns (SubspaceBasis).
//
// Numerical rank convention: a singular value below 1e-12 times the largest
// singular value of the same matrix counts as zero. Stacked volumes of
// orthonormal blocks use the absolute floor 1e-12, since their natural
// scale is 1.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vcd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kRelativeRankFloor = 1e-12;

class SubspaceBasis {
 public:
  // The zero subspace of R^0.
  SubspaceBasis() = default;

  // Wraps `basis` after checking that its columns are orthonormal within
  // `tol` (max-abs deviation of basis^T basis from identity). Throws
  // InputError otherwise.
  static SubspaceBasis from_orthonormal(Matrix basis, double tol = 1e-10);

  // The zero subspace of R^n (n x 0 basis).
  static SubspaceBasis zero(Index ambient_dim);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  const Matrix& matrix() const { return basis_; }

 private:
  explicit SubspaceBasis(Matrix basis) : basis_(std::move(basis)) {}

  Matrix basis_;
};

// Principal angles, ascending, each in [0, pi/2].
struct PrincipalAngleSet {
  std::vector<double> angles;
};

// Full symmetric eigendecomposition, eigenvalues descending; column j of
// `vectors` pairs with values[j].
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

// Orthonormal basis for the column space of X. Uses classical Gram-Schmidt
// with a second projection pass; a column whose residual norm falls below
// tol * ||X||_F is dropped. An all-zero X yields a zero-dimensional basis.
SubspaceBasis orthonormalize(const Matrix& X, double tol = 1e-10);

// Singular values of X in descending order.
Vector singular_values(const Matrix& X);

// Product of the d largest singular values of X (0 if rank(X) < d).
double volume(const Matrix& X, Index d);

// Sum of the logs of the d largest singular values; -infinity if any of them
// is below the rank floor. Use this instead of volume() when many factors
// are multiplied.
double log_volume(const Matrix& X, Index d);

PrincipalAngleSet principal_angles(const SubspaceBasis& a, const SubspaceBasis& b);

// Vol([A, B]) / (Vol(A) Vol(B)) for orthonormal A, B. Evaluated in the Gram
// form det^{1/2}(B^T P_A^perp B), which equals the product of the sines of
// the principal angles. Returns 0 when dim A + dim B exceeds the ambient
// dimension.
double volume_correlation(const SubspaceBasis& a, const SubspaceBasis& b);

// log Vol([fixed, Q]) for a block Q with orthonormal columns, computed as
// the log volume of P_fixed^perp Q (k x k Gram instead of (k+d) x (k+d)).
// Returns 0 for an empty Q and -infinity when the blocks share a direction.
double stacked_log_volume(const SubspaceBasis& fixed, const Matrix& q);

// ||P^perp_{[X, Yprev]} y||: the factor by which appending y to [X, Yprev]
// multiplies its volume. Either X or Yprev may have zero columns.
double incremental_volume_factor(const Matrix& X, const Matrix& y_prev, const Vector& y);

// v - B (B^T v).
Vector projector_complement_apply(const SubspaceBasis& b, const Vector& v);

// Spectral decomposition of a symmetric matrix (symmetric within 1e-10
// relative). Eigenvalues are returned in descending order.
EigenPairs symmetric_eig(const Matrix& S);

// k-th elementary symmetric polynomial of `values`; e_0 = 1.
double elementary_symmetric(std::span<const double> values, std::size_t k);

// Throws InputError if any entry of X is not finite.
void require_finite(const Matrix& X, const char* what);

}  // namespace vcd

#endif  // VCD_GEOMETRY_HPP
