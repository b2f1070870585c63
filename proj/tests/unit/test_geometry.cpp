#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "vcd/error.hpp"
#include "vcd/geometry.hpp"
#include "vcd/random.hpp"

using namespace vcd;

namespace {

SubspaceBasis span_of_axes(Index n, std::initializer_list<Index> axes) {
  Matrix m = Matrix::Zero(n, static_cast<Index>(axes.size()));
  Index c = 0;
  for (Index a : axes) m(a, c++) = 1.0;
  return SubspaceBasis::from_orthonormal(m);
}

SubspaceBasis line(double angle) {
  Matrix m(2, 1);
  m << std::cos(angle), std::sin(angle);
  return SubspaceBasis::from_orthonormal(m);
}

Matrix random_orthogonal(Index d, RandomStream& rng) {
  return orthonormalize(rng.normal_matrix(d, d)).matrix();
}

}  // namespace

TEST_CASE("orthonormalize") {
  SUBCASE("identity is already orthonormal") {
    const SubspaceBasis b = orthonormalize(Matrix::Identity(3, 3));
    CHECK(b.dim() == 3);
    CHECK((b.matrix() - Matrix::Identity(3, 3)).norm() < 1e-15);
  }
  SUBCASE("proportional columns collapse to one direction") {
    Matrix x(3, 2);
    x << 1, 2, 2, 4, 0, 0;
    const SubspaceBasis b = orthonormalize(x, 1e-8);
    REQUIRE(b.dim() == 1);
    Vector expected(3);
    expected << 1, 2, 0;
    expected /= std::sqrt(5.0);
    CHECK(std::abs(std::abs(b.matrix().col(0).dot(expected)) - 1.0) < 1e-14);
  }
  SUBCASE("random Gaussian block keeps full rank") {
    RandomStream rng(11);
    const SubspaceBasis b = orthonormalize(rng.normal_matrix(6, 3));
    REQUIRE(b.dim() == 3);
    const Matrix gram = b.matrix().transpose() * b.matrix();
    CHECK((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(oracle::determinant(gram) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("all-zero input gives the zero subspace") {
    const SubspaceBasis b = orthonormalize(Matrix::Zero(4, 2));
    CHECK(b.dim() == 0);
    CHECK(b.ambient_dim() == 4);
  }
  SUBCASE("non-finite entries are rejected") {
    Matrix x = Matrix::Identity(2, 2);
    x(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(orthonormalize(x), InputError);
  }
  SUBCASE("stays orthonormal at n = 1024") {
    RandomStream rng(5);
    const SubspaceBasis b = orthonormalize(rng.normal_matrix(1024, 60));
    const Matrix gram = b.matrix().transpose() * b.matrix();
    CHECK((gram - Matrix::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("volume") {
  CHECK(volume(Matrix::Identity(4, 4), 4) == doctest::Approx(1.0));
  Matrix x(3, 2);
  x << 3, 0, 0, 4, 0, 0;
  CHECK(volume(x, 2) == doctest::Approx(12.0).epsilon(1e-14));
  Matrix r(2, 2);
  r << 1, 2, 2, 4;
  CHECK(volume(r, 2) == 0.0);
  CHECK(volume(r, 1) == doctest::Approx(5.0));
  CHECK_THROWS_AS(volume(x, 3), InputError);
  CHECK_THROWS_AS(volume(x, 0), InputError);

  RandomStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = rng.normal_matrix(8, 3);
    const double expected = oracle::gram_volume(m);
    CHECK(std::abs(volume(m, 3) - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("log_volume") {
  CHECK(log_volume(Matrix::Identity(4, 4), 4) == doctest::Approx(0.0));
  Matrix r(3, 3);
  r << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  CHECK(log_volume(r, 3) == -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(log_volume(r, 2)));

  RandomStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = rng.normal_matrix(8, 3);
    const double expected = std::log(oracle::gram_volume(m));
    CHECK(log_volume(m, 3) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(std::exp(log_volume(m, 3)) - volume(m, 3)) <= 1e-9 * volume(m, 3));
  }
  CHECK_THROWS_AS(log_volume(r, 4), InputError);
}

TEST_CASE("principal_angles") {
  const double half_pi = std::numbers::pi / 2;
  SUBCASE("identical subspaces") {
    const auto b = span_of_axes(4, {0, 1});
    const auto a = principal_angles(b, b).angles;
    REQUIRE(a.size() == 2);
    CHECK(a[0] == doctest::Approx(0.0));
    CHECK(a[1] == doctest::Approx(0.0));
  }
  SUBCASE("orthogonal lines") {
    const auto a = principal_angles(span_of_axes(4, {0}), span_of_axes(4, {1})).angles;
    REQUIRE(a.size() == 1);
    CHECK(a[0] == doctest::Approx(half_pi));
  }
  SUBCASE("one shared direction, one orthogonal") {
    const auto a = principal_angles(span_of_axes(4, {0, 1}), span_of_axes(4, {1, 2})).angles;
    REQUIRE(a.size() == 2);
    CHECK(a[0] == doctest::Approx(0.0));
    CHECK(a[1] == doctest::Approx(half_pi));
  }
  SUBCASE("random pairs match the sequential maximization definition") {
    RandomStream rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      const SubspaceBasis a = orthonormalize(rng.normal_matrix(10, 2));
      const SubspaceBasis b = orthonormalize(rng.normal_matrix(10, 2));
      const auto got = principal_angles(a, b).angles;
      const auto expected = oracle::principal_angles_by_maximization(a.matrix(), b.matrix());
      REQUIRE(got.size() == expected.size());
      for (std::size_t j = 0; j < got.size(); ++j) CHECK(std::abs(got[j] - expected[j]) < 1e-6);
    }
  }
  SUBCASE("output is sorted and within [0, pi/2]") {
    RandomStream rng(8);
    const auto a = principal_angles(orthonormalize(rng.normal_matrix(12, 5)),
                                    orthonormalize(rng.normal_matrix(12, 3)))
                       .angles;
    REQUIRE(a.size() == 3);
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j] >= 0.0);
      CHECK(a[j] <= half_pi);
      if (j) CHECK(a[j] >= a[j - 1]);
    }
  }
  CHECK_THROWS_AS(principal_angles(span_of_axes(3, {0}), span_of_axes(4, {0})), InputError);
  CHECK_THROWS_AS(principal_angles(SubspaceBasis::zero(3), span_of_axes(3, {0})), InputError);
}

TEST_CASE("volume_correlation") {
  CHECK(volume_correlation(span_of_axes(5, {0, 1}), span_of_axes(5, {2, 3, 4})) ==
        doctest::Approx(1.0));
  CHECK(volume_correlation(span_of_axes(5, {0, 1}), span_of_axes(5, {1, 2})) == 0.0);
  CHECK(volume_correlation(line(0.0), line(std::numbers::pi / 6)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(volume_correlation(span_of_axes(3, {0}), span_of_axes(4, {1})), InputError);

  SUBCASE("equals the product of sines and ignores the choice of basis") {
    RandomStream rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = 6 + trial % 20;
      const Index d1 = 1 + trial % 3;
      const Index d2 = 1 + (trial / 3) % 3;
      const SubspaceBasis a = orthonormalize(rng.normal_matrix(n, d1));
      const SubspaceBasis b = orthonormalize(rng.normal_matrix(n, d2));
      double sines = 1.0;
      for (double t : principal_angles(a, b).angles) sines *= std::sin(t);
      const double corr = volume_correlation(a, b);
      CHECK(std::abs(corr - sines) < 1e-10);
      CHECK(corr >= 0.0);
      CHECK(corr <= 1.0);
      CHECK(std::abs(volume_correlation(b, a) - corr) < 1e-10);
      const SubspaceBasis rotated =
          SubspaceBasis::from_orthonormal(b.matrix() * random_orthogonal(d2, rng));
      CHECK(std::abs(volume_correlation(a, rotated) - corr) < 1e-10);
      // Stacked-volume definition with generic (non-orthonormal) bases.
      const Matrix ga = a.matrix() * rng.normal_matrix(d1, d1);
      const Matrix gb = b.matrix() * rng.normal_matrix(d2, d2);
      Matrix both(n, d1 + d2);
      both << ga, gb;
      const double ratio = oracle::gram_volume(both) / (oracle::gram_volume(ga) * oracle::gram_volume(gb));
      CHECK(std::abs(ratio - corr) < 1e-9);
    }
  }
  SUBCASE("oversized pair has zero correlation") {
    RandomStream rng(2);
    CHECK(volume_correlation(orthonormalize(rng.normal_matrix(4, 3)),
                             orthonormalize(rng.normal_matrix(4, 2))) == 0.0);
  }
}

TEST_CASE("incremental_volume_factor") {
  const Index n = 10;
  RandomStream rng(31);
  const Matrix x = rng.normal_matrix(n, 3);
  const Matrix yprev = rng.normal_matrix(n, 2);
  Matrix both(n, 5);
  both << x, yprev;

  SUBCASE("orthogonal unit vector leaves the volume unchanged") {
    const SubspaceBasis q = orthonormalize(both);
    Vector y = rng.normal_vector(n);
    y -= q.matrix() * (q.matrix().transpose() * y);
    y.normalize();
    CHECK(incremental_volume_factor(x, yprev, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("vector in the span gives zero") {
    const Vector y = both * rng.normal_vector(5);
    CHECK(incremental_volume_factor(x, yprev, y) < 1e-12 * y.norm());
  }
  SUBCASE("factor is the ratio of the two volumes") {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector y = rng.normal_vector(n);
      Matrix all(n, 6);
      all << x, yprev, y;
      const double expected = oracle::gram_volume(all) / oracle::gram_volume(both);
      CHECK(std::abs(incremental_volume_factor(x, yprev, y) - expected) <= 1e-9 * expected);
    }
  }
  SUBCASE("either block may be empty") {
    const Vector y = rng.normal_vector(n);
    CHECK(incremental_volume_factor(Matrix(n, 0), Matrix(n, 0), y) == doctest::Approx(y.norm()));
  }
  SUBCASE("chain of factors reproduces the direct volume") {
    Matrix ys(n, 0);
    double prod = 1.0;
    for (int k = 0; k < 6; ++k) {
      const Vector y = rng.normal_vector(n);
      prod *= incremental_volume_factor(x, ys, y);
      ys.conservativeResize(n, ys.cols() + 1);
      ys.col(ys.cols() - 1) = y;
    }
    Matrix all(n, 3 + ys.cols());
    all << x, ys;
    const double direct = oracle::gram_volume(all) / oracle::gram_volume(x);
    CHECK(std::abs(prod - direct) <= 1e-8 * direct);
  }
  CHECK_THROWS_AS(incremental_volume_factor(x, yprev, Vector::Ones(n + 1)), InputError);
}

TEST_CASE("projector_complement_apply") {
  RandomStream rng(41);
  const SubspaceBasis b = orthonormalize(rng.normal_matrix(9, 4));
  const Vector inside = b.matrix() * rng.normal_vector(4);
  CHECK(projector_complement_apply(b, inside).norm() < 1e-12 * inside.norm());

  Vector outside = rng.normal_vector(9);
  outside -= b.matrix() * (b.matrix().transpose() * outside);
  CHECK((projector_complement_apply(b, outside) - outside).norm() < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = rng.normal_vector(9);
    const Vector r = projector_complement_apply(b, v);
    CHECK((b.matrix().transpose() * r).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((projector_complement_apply(b, r) - r).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(projector_complement_apply(b, Vector::Ones(8)), InputError);
}

TEST_CASE("symmetric_eig") {
  SUBCASE("diagonal input") {
    const Matrix s = Vector::Map(std::vector<double>{3, 1, 2}.data(), 3).asDiagonal();
    const EigenPairs e = symmetric_eig(s);
    CHECK(e.values(0) == doctest::Approx(3));
    CHECK(e.values(1) == doctest::Approx(2));
    CHECK(e.values(2) == doctest::Approx(1));
    Matrix perm = Matrix::Zero(3, 3);
    perm(0, 0) = perm(2, 1) = perm(1, 2) = 1.0;
    CHECK((e.vectors.cwiseAbs() - perm).norm() < 1e-14);
  }
  SUBCASE("identity") {
    const EigenPairs e = symmetric_eig(Matrix::Identity(4, 4));
    CHECK((e.values - Vector::Ones(4)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("constructed spectrum is recovered") {
    RandomStream rng(51);
    const Matrix q = random_orthogonal(3, rng);
    const Matrix s = q * Vector::Map(std::vector<double>{5, 2, 1}.data(), 3).asDiagonal() *
                     q.transpose();
    const EigenPairs e = symmetric_eig(0.5 * (s + s.transpose()));
    CHECK(std::abs(e.values(0) - 5) < 1e-9);
    CHECK(std::abs(e.values(1) - 2) < 1e-9);
    CHECK(std::abs(e.values(2) - 1) < 1e-9);
  }
  SUBCASE("orthonormal vectors and reconstruction") {
    RandomStream rng(52);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix a = rng.normal_matrix(12, 12);
      const Matrix s = a + a.transpose();
      const EigenPairs e = symmetric_eig(s);
      for (Index j = 1; j < e.values.size(); ++j) CHECK(e.values(j) <= e.values(j - 1));
      CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() <
            1e-8);
      const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
      CHECK((rebuilt - s).norm() <= 1e-8 * s.norm());
    }
  }
  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 2) = 1e-3;
  CHECK_THROWS_AS(symmetric_eig(asym), InputError);
  CHECK_THROWS_AS(symmetric_eig(Matrix::Ones(2, 3)), InputError);
}

TEST_CASE("elementary_symmetric") {
  const std::vector<double> v123{1, 2, 3};
  CHECK(elementary_symmetric(v123, 2) == doctest::Approx(11));
  CHECK(elementary_symmetric(v123, 0) == 1.0);
  CHECK(elementary_symmetric(std::vector<double>{}, 0) == 1.0);
  CHECK(elementary_symmetric(std::vector<double>{2, 2, 2, 2}, 3) == doctest::Approx(32));
  CHECK_THROWS_AS(elementary_symmetric(v123, 4), InputError);

  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> vals(6);
    for (double& x : vals) x = u(gen);
    CHECK(elementary_symmetric(vals, 3) ==
          doctest::Approx(oracle::subset_product_sum(vals, 3)).epsilon(1e-12));
    // Generating function at t = 1.
    double lhs = 1.0;
    for (double x : vals) lhs *= 1.0 + x;
    double rhs = 0.0;
    for (std::size_t k = 0; k <= vals.size(); ++k) rhs += elementary_symmetric(vals, k);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * lhs);
  }
}

TEST_CASE("SubspaceBasis validation") {
  Matrix m(3, 2);
  m << 1, 1, 0, 0, 0, 0;
  CHECK_THROWS_AS(SubspaceBasis::from_orthonormal(m), InputError);
  CHECK_THROWS_AS(SubspaceBasis::from_orthonormal(Matrix::Identity(2, 3)), InputError);
  CHECK(SubspaceBasis::zero(5).dim() == 0);
}
