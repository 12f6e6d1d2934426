#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace netgame {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexList = Eigen::VectorXcd;

namespace linalg {

/// Default relative tolerance of the minimal-polynomial search.
inline constexpr double kMinimalPolynomialTol = 1e-8;

/// All eigenvalues of a square matrix, with multiplicity.
ComplexList eigenvalues(const Matrix& m);

struct HurwitzResult {
  bool hurwitz = false;
  /// Largest real part over the spectrum.
  double abscissa = 0.0;
};

/// True iff every eigenvalue satisfies Re(lambda) < -margin.
HurwitzResult is_hurwitz(const Matrix& m, double margin = 0.0);

/// Numerical rank. Without an explicit tolerance the threshold is
/// max(rows, cols) * eps * sigma_max.
int rank(const Matrix& m, std::optional<double> tol = std::nullopt);

/// Solves A x = b for square nonsingular A. Throws SingularityError carrying
/// the reciprocal condition estimate when A is numerically singular.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Solves X B - A X = C by Kronecker vectorization.
/// Throws NonUniqueSolutionError when spec(A) and spec(B) intersect.
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);

struct CareSolution {
  /// Stabilizing feedback, u = K x.
  Matrix gain;
  /// Stabilizing solution of A'P + PA - PBR^{-1}B'P + Q = 0.
  Matrix cost;
  /// Spectral abscissa of A + B K.
  double abscissa = 0.0;
};

/// Continuous-time algebraic Riccati equation via the stable invariant
/// subspace of the Hamiltonian (matrix sign function). The returned gain is
/// certified: A + B K is Hurwitz, otherwise SynthesisError is thrown.
CareSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                        const Matrix& r);

/// Monic polynomial with coefficients stored lowest degree first; the last
/// entry is always 1.
using Polynomial = std::vector<double>;

/// Smallest-degree monic polynomial annihilating M, found by least squares
/// over Krylov powers of increasing degree.
Polynomial minimal_polynomial(const Matrix& m,
                              double tol = kMinimalPolynomialTol);

/// Characteristic polynomial det(lambda I - M) (Faddeev-LeVerrier).
Polynomial characteristic_polynomial(const Matrix& m);

/// p(M) = sum_k c_k M^k.
Matrix evaluate_polynomial(const Polynomial& p, const Matrix& m);

/// Remainder of num / den.
std::vector<double> polynomial_remainder(const std::vector<double>& num,
                                         const Polynomial& den);

/// Krylov matrix [B, AB, ..., A^{n-1}B].
Matrix controllability_matrix(const Matrix& a, const Matrix& b);

/// Matrix exponential.
Matrix expm(const Matrix& m);

/// Rank of a complex matrix H = re + i im via its real embedding
/// [[re, -im], [im, re]]; the embedding has exactly twice the rank of H.
int complex_rank_via_embedding(const Matrix& re, const Matrix& im);

/// Block diagonal assembly.
Matrix block_diagonal(const std::vector<Matrix>& blocks);

}  // namespace linalg
}  // namespace netgame
