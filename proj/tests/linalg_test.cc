#include "netgame/linalg.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "netgame/errors.h"
#include "test_util.h"

namespace netgame {
namespace {

using linalg::Polynomial;
using testing::random_hurwitz;
using testing::random_matrix;
using testing::random_nonsingular;

std::vector<std::complex<double>> sorted(const ComplexList& v) {
  std::vector<std::complex<double>> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

TEST(EigenvaluesTest, RotationGenerator) {
  const double w = std::numbers::pi / 10;
  const auto ev = sorted(linalg::eigenvalues(testing::rotation_generator(w)));
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0].real(), 0.0, 1e-14);
  EXPECT_NEAR(ev[0].imag(), -w, 1e-14);
  EXPECT_NEAR(ev[1].imag(), w, 1e-14);
}

TEST(EigenvaluesTest, IdentityAndCompanion) {
  for (const auto& z : sorted(linalg::eigenvalues(Matrix::Identity(2, 2)))) {
    EXPECT_NEAR(z.real(), 1.0, 1e-15);
    EXPECT_EQ(z.imag(), 0.0);
  }
  Matrix m(2, 2);
  m << 0, 1, -2, -3;
  const auto ev = sorted(linalg::eigenvalues(m));
  EXPECT_NEAR(ev[0].real(), -2.0, 1e-12);
  EXPECT_NEAR(ev[1].real(), -1.0, 1e-12);
}

TEST(EigenvaluesTest, NonSquareThrows) {
  EXPECT_THROW(linalg::eigenvalues(Matrix::Zero(2, 3)), DimensionError);
  EXPECT_THROW(linalg::is_hurwitz(Matrix::Zero(3, 2)), DimensionError);
}

TEST(EigenvaluesTest, TraceAndDeterminantOnRandom8x8) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = random_matrix(rng, 8, 8);
    const ComplexList ev = linalg::eigenvalues(m);
    const std::complex<double> sum = ev.sum();
    const std::complex<double> prod = ev.prod();
    EXPECT_NEAR(sum.real(), m.trace(), 1e-8 * m.norm());
    EXPECT_NEAR(sum.imag(), 0.0, 1e-8 * m.norm());
    const double det = m.determinant();
    EXPECT_NEAR(prod.real(), det, 1e-6 * std::abs(det));
  }
}

TEST(IsHurwitzTest, Examples) {
  const auto neg = linalg::is_hurwitz(-Matrix::Identity(3, 3));
  EXPECT_TRUE(neg.hurwitz);
  EXPECT_DOUBLE_EQ(neg.abscissa, -1.0);

  Matrix di(2, 2);
  di << 0, 1, 0, 0;
  const auto d = linalg::is_hurwitz(di);
  EXPECT_FALSE(d.hurwitz);
  EXPECT_NEAR(d.abscissa, 0.0, 1e-15);

  Matrix m(2, 2);
  m << 0, 1, -2, -3;
  const auto r = linalg::is_hurwitz(m, 0.5);
  EXPECT_TRUE(r.hurwitz);
  EXPECT_NEAR(r.abscissa, -1.0, 1e-12);
  EXPECT_FALSE(linalg::is_hurwitz(m, 1.0).hurwitz);
}

TEST(RankTest, Examples) {
  EXPECT_EQ(linalg::rank(Matrix::Zero(2, 3)), 0);
  EXPECT_EQ(linalg::rank(Matrix::Identity(4, 4)), 4);
  Matrix m(2, 2);
  m << 1, 2, 2, 4;
  EXPECT_EQ(linalg::rank(m), 1);
  EXPECT_EQ(linalg::rank(Matrix::Identity(3, 3) * 1e-3, 1e-2), 0);
}

TEST(RankTest, InvariantUnderTransposeAndNonsingularScaling) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = dim(rng), cols = dim(rng);
    const int inner = std::uniform_int_distribution<int>(1, std::min(rows, cols))(rng);
    const Matrix m = random_matrix(rng, rows, inner) * random_matrix(rng, inner, cols);
    const int r = linalg::rank(m);
    EXPECT_EQ(r, inner);
    EXPECT_EQ(linalg::rank(m.transpose()), r);
    EXPECT_EQ(linalg::rank(random_nonsingular(rng, rows) * m), r);
  }
}

TEST(SolveLinearTest, Examples) {
  Vector b(2);
  b << 3, -1;
  EXPECT_TRUE(linalg::solve_linear(Matrix::Identity(2, 2), b).isApprox(b));

  Matrix a(2, 2);
  a << 4, -2, -2, 4;
  Vector rhs(2);
  rhs << 2, 6;
  const Matrix x = linalg::solve_linear(a, rhs);
  EXPECT_NEAR(x(0), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(x(1), 7.0 / 3.0, 1e-14);
}

TEST(SolveLinearTest, SingularCarriesConditionEstimate) {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  Vector b(2);
  b << 1, 0;
  try {
    linalg::solve_linear(a, b);
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_LT(e.rcond(), 1e-12);
  }
  EXPECT_THROW(linalg::solve_linear(Matrix::Identity(2, 2), Vector::Ones(3)), DimensionError);
}

TEST(SolveSylvesterTest, ScalarAndColumn) {
  // X B - A X = C with A = -1, B = 0, C = -1 gives X = -1.
  const Matrix x = linalg::solve_sylvester(-Matrix::Identity(1, 1), Matrix::Zero(1, 1),
                                           -Matrix::Identity(1, 1));
  EXPECT_NEAR(x(0, 0), -1.0, 1e-15);

  Matrix c(2, 1);
  c << 1, 2;
  const Matrix y = linalg::solve_sylvester(-Matrix::Identity(2, 2), Matrix::Zero(1, 1), c);
  EXPECT_TRUE(y.isApprox(c, 1e-15));
}

TEST(SolveSylvesterTest, SharedSpectrumThrows) {
  EXPECT_THROW(linalg::solve_sylvester(Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                                       Matrix::Ones(1, 1)),
               NonUniqueSolutionError);
  EXPECT_THROW(linalg::solve_sylvester(Matrix::Identity(2, 2), Matrix::Zero(1, 1),
                                       Matrix::Ones(3, 1)),
               DimensionError);
}

TEST(SolveSylvesterTest, ResidualOnSeparatedSpectra) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 9, q = 1 + trial % 4;
    const Matrix a = random_hurwitz(rng, n);
    // B with eigenvalues on the imaginary axis or to the right.
    const Matrix r = random_matrix(rng, q, q);
    const Matrix b = r - r.transpose();  // skew: purely imaginary spectrum
    const Matrix c = random_matrix(rng, n, q);
    const Matrix x = linalg::solve_sylvester(a, b, c);
    const double bound = 1e-8 * (a.norm() + b.norm() + c.norm());
    EXPECT_LE((x * b - a * x - c).norm(), bound);
  }
}

TEST(SolveCareTest, ScalarIntegrator) {
  const Matrix one = Matrix::Identity(1, 1);
  const auto sol = linalg::solve_care(Matrix::Zero(1, 1), one, one, one);
  EXPECT_NEAR(sol.cost(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(sol.gain(0, 0), -1.0, 1e-10);
  EXPECT_LT(sol.abscissa, 0.0);
}

TEST(SolveCareTest, StableWithZeroWeight) {
  const Matrix one = Matrix::Identity(1, 1);
  const auto sol = linalg::solve_care(-one, one, Matrix::Zero(1, 1), one);
  EXPECT_NEAR(sol.cost(0, 0), 0.0, 1e-10);
  EXPECT_NEAR(sol.gain(0, 0), 0.0, 1e-10);
}

TEST(SolveCareTest, DoubleIntegratorMatchesClosedForm) {
  // P = [[sqrt3, 1], [1, sqrt3]] solves A'P + PA - PBB'P + I = 0 by hand.
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  Matrix b(2, 1);
  b << 0, 1;
  const auto sol = linalg::solve_care(a, b, Matrix::Identity(2, 2), Matrix::Identity(1, 1));
  const double s3 = std::sqrt(3.0);
  Matrix p(2, 2);
  p << s3, 1, 1, s3;
  EXPECT_TRUE(sol.cost.isApprox(p, 1e-10));
  EXPECT_NEAR(sol.gain(0, 0), -1.0, 1e-10);
  EXPECT_NEAR(sol.gain(0, 1), -s3, 1e-10);
  EXPECT_TRUE(linalg::is_hurwitz(a + b * sol.gain).hurwitz);
}

TEST(SolveCareTest, RandomStabilizablePairsGiveHurwitzLoops) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 6, m = 1 + trial % 3;
    const Matrix a = random_matrix(rng, n, n, 2.0);
    const Matrix b = random_matrix(rng, n, m);
    const auto sol = linalg::solve_care(a, b, Matrix::Identity(n, n), Matrix::Identity(m, m));
    EXPECT_TRUE(linalg::is_hurwitz(a + b * sol.gain).hurwitz);
    const Matrix p = sol.cost;
    const Matrix residual = a.transpose() * p + p * a - p * b * b.transpose() * p +
                            Matrix::Identity(n, n);
    EXPECT_LE(residual.norm(), 1e-8 * (1.0 + p.norm() * (1.0 + a.norm())));
  }
}

TEST(SolveCareTest, ImaginaryAxisHamiltonianThrows) {
  // A = [0], B = [0]: the Hamiltonian is zero, so eigenvalues sit on the axis.
  EXPECT_THROW(linalg::solve_care(Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                                  Matrix::Identity(1, 1), Matrix::Identity(1, 1)),
               SynthesisError);
}

void expect_poly(const Polynomial& got, const Polynomial& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << "k=" << k;
}

TEST(MinimalPolynomialTest, Examples) {
  expect_poly(linalg::minimal_polynomial(Matrix::Zero(3, 3)), {0.0, 1.0}, 0.0);
  expect_poly(linalg::minimal_polynomial(Matrix::Identity(2, 2)), {-1.0, 1.0}, 1e-12);

  const double w = std::numbers::pi / 10;
  Matrix s = Matrix::Zero(3, 3);
  s.topLeftCorner(2, 2) = testing::rotation_generator(w);
  expect_poly(linalg::minimal_polynomial(s), {0.0, w * w, 0.0, 1.0}, 1e-12);
}

TEST(MinimalPolynomialTest, RepeatedEigenvalueWithJordanBlock) {
  // diag(J2(1), 1): minimal polynomial (s - 1)^2 = s^2 - 2s + 1.
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1.0;
  expect_poly(linalg::minimal_polynomial(m), {1.0, -2.0, 1.0}, 1e-9);
}

TEST(MinimalPolynomialTest, DividesCharacteristicPolynomialAndAnnihilates) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const int blocks = 1 + trial % 3;
    std::vector<Matrix> parts;
    // Repeated blocks make the minimal polynomial strictly smaller.
    const Matrix base = random_matrix(rng, 2, 2);
    for (int k = 0; k < blocks; ++k) parts.push_back(base);
    const Matrix m = linalg::block_diagonal(parts);
    const Polynomial mp = linalg::minimal_polynomial(m);
    EXPECT_EQ(mp.size(), 3u);
    const Polynomial cp = linalg::characteristic_polynomial(m);
    for (double r : linalg::polynomial_remainder(cp, mp)) EXPECT_LT(std::abs(r), 1e-8);
    const double scale = std::pow(std::max(1.0, m.norm()), static_cast<double>(mp.size() - 1));
    EXPECT_LT(linalg::evaluate_polynomial(mp, m).norm(), 1e-8 * scale);
  }
}

TEST(ExpmTest, RotationIsExact) {
  const double w = 0.3, t = 2.0;
  const Matrix e = linalg::expm(testing::rotation_generator(w) * t);
  EXPECT_NEAR(e(0, 0), std::cos(w * t), 1e-14);
  EXPECT_NEAR(e(0, 1), std::sin(w * t), 1e-14);
  EXPECT_NEAR(e(1, 0), -std::sin(w * t), 1e-14);
}

TEST(ComplexRankTest, EmbeddingMatchesComplexRank) {
  // [1 i; i -1] has complex rank 1 (second row = i * first).
  Matrix re(2, 2), im(2, 2);
  re << 1, 0, 0, -1;
  im << 0, 1, 1, 0;
  EXPECT_EQ(linalg::complex_rank_via_embedding(re, im), 1);
  EXPECT_EQ(linalg::complex_rank_via_embedding(Matrix::Identity(2, 2), Matrix::Zero(2, 2)), 2);
}

}  // namespace
}  // namespace netgame
