#include "netgame/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "netgame/errors.h"

namespace netgame::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << who << ": expected a square matrix, got " << m.rows() << "x"
       << m.cols();
    throw DimensionError(os.str());
  }
}

// log|det| of a square matrix from its LU factors.
double log_abs_det(const Eigen::PartialPivLU<Matrix>& lu) {
  const Matrix& f = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) acc += std::log(std::abs(f(i, i)));
  return acc;
}

}  // namespace

ComplexList eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues");
  if (m.rows() == 0) return ComplexList(0);
  if (!m.allFinite()) throw DomainError("eigenvalues: non-finite entries");
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: QR iteration did not converge");
  }
  return es.eigenvalues();
}

HurwitzResult is_hurwitz(const Matrix& m, double margin) {
  require_square(m, "is_hurwitz");
  const ComplexList ev = eigenvalues(m);
  HurwitzResult out;
  out.abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    out.abscissa = std::max(out.abscissa, ev(i).real());
  }
  out.hurwitz = out.abscissa < -margin;
  return out;
}

int rank(const Matrix& m, std::optional<double> tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double threshold =
      tol ? *tol
          : static_cast<double>(std::max(m.rows(), m.cols())) * kEps * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++r;
  }
  return r;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  require_square(a, "solve_linear");
  if (b.rows() != a.rows()) {
    throw DimensionError("solve_linear: right-hand side has wrong row count");
  }
  if (a.rows() == 0) return Matrix(0, b.cols());
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > static_cast<double>(a.rows()) * kEps)) {
    std::ostringstream os;
    os << "solve_linear: matrix is numerically singular (rcond = " << rcond
       << ")";
    throw SingularityError(os.str(), rcond);
  }
  return lu.solve(b);
}

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  require_square(a, "solve_sylvester(A)");
  require_square(b, "solve_sylvester(B)");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  if (c.rows() != n || c.cols() != m) {
    throw DimensionError("solve_sylvester: C must be rows(A) x rows(B)");
  }
  if (n == 0 || m == 0) return Matrix::Zero(n, m);

  const ComplexList ea = eigenvalues(a);
  const ComplexList eb = eigenvalues(b);
  const double scale = 1.0 + a.norm() + b.norm();
  double separation = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ea.size(); ++i) {
    for (Eigen::Index j = 0; j < eb.size(); ++j) {
      separation = std::min(separation, std::abs(ea(i) - eb(j)));
    }
  }
  if (separation <= 1e-8 * scale) {
    std::ostringstream os;
    os << "solve_sylvester: spectra of A and B intersect (separation "
       << separation << ")";
    throw NonUniqueSolutionError(os.str());
  }

  // Column-major vec: vec(XB) = (B' kron I) vec X, vec(AX) = (I kron A) vec X.
  const Eigen::Index nm = n * m;
  Matrix k = Matrix::Zero(nm, nm);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double bij = b(i, j);
      if (bij != 0.0) {
        k.block(j * n, i * n, n, n).diagonal().array() += bij;
      }
    }
    k.block(j * n, j * n, n, n) -= a;
  }
  Eigen::PartialPivLU<Matrix> lu(k);
  if (!(lu.rcond() > static_cast<double>(nm) * kEps)) {
    throw NonUniqueSolutionError(
        "solve_sylvester: Kronecker operator is numerically singular");
  }
  const Eigen::Map<const Vector> rhs(c.data(), nm);
  Vector x = lu.solve(rhs);
  // One step of iterative refinement.
  const Vector residual = rhs - k * x;
  x += lu.solve(residual);
  return Eigen::Map<const Matrix>(x.data(), n, m);
}

CareSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                        const Matrix& r) {
  require_square(a, "solve_care(A)");
  require_square(q, "solve_care(Q)");
  require_square(r, "solve_care(R)");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (b.rows() != n || q.rows() != n || r.rows() != m) {
    throw DimensionError("solve_care: inconsistent dimensions");
  }
  Eigen::LLT<Matrix> r_llt(0.5 * (r + r.transpose()));
  if (r_llt.info() != Eigen::Success) {
    throw SynthesisError("solve_care: input weight R is not positive definite");
  }

  Matrix h(2 * n, 2 * n);
  h << a, -b * r_llt.solve(b.transpose()), -q, -a.transpose();

  const ComplexList hev = eigenvalues(h);
  const double h_scale = std::max(1.0, h.norm());
  for (Eigen::Index i = 0; i < hev.size(); ++i) {
    if (std::abs(hev(i).real()) <= 1e-9 * h_scale) {
      std::ostringstream os;
      os << "solve_care: Hamiltonian has an eigenvalue on the imaginary axis ("
         << hev(i).real() << (hev(i).imag() < 0 ? " - " : " + ")
         << std::abs(hev(i).imag())
         << "i); the pair is not stabilizable or the weight not detectable";
      throw SynthesisError(os.str());
    }
  }

  // Matrix sign iteration with determinant scaling.
  Matrix z = h;
  const double dim = static_cast<double>(2 * n);
  constexpr int kMaxIterations = 100;
  bool converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::PartialPivLU<Matrix> lu(z);
    const double c = std::exp(log_abs_det(lu) / dim);
    const Matrix z_next = 0.5 * (z / c + c * lu.inverse());
    const double delta = (z_next - z).lpNorm<1>();
    z = z_next;
    if (delta <= 1e-13 * z.lpNorm<1>()) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw SynthesisError("solve_care: matrix sign iteration did not converge");
  }

  // Stable subspace of H is ker(sign(H) + I), spanned by [I; P].
  const Matrix w11 = z.topLeftCorner(n, n);
  const Matrix w12 = z.topRightCorner(n, n);
  const Matrix w21 = z.bottomLeftCorner(n, n);
  const Matrix w22 = z.bottomRightCorner(n, n);
  Matrix lhs(2 * n, n);
  lhs << w12, w22 + Matrix::Identity(n, n);
  Matrix rhs(2 * n, n);
  rhs << w11 + Matrix::Identity(n, n), w21;
  Matrix p = lhs.colPivHouseholderQr().solve(-rhs);
  p = 0.5 * (p + p.transpose());

  CareSolution out;
  out.cost = p;
  out.gain = -r_llt.solve(b.transpose() * p);
  const HurwitzResult cert = is_hurwitz(a + b * out.gain);
  out.abscissa = cert.abscissa;
  if (!cert.hurwitz) {
    std::ostringstream os;
    os << "solve_care: returned gain does not stabilize (abscissa "
       << cert.abscissa << ")";
    throw SynthesisError(os.str());
  }
  return out;
}

Polynomial minimal_polynomial(const Matrix& m, double tol) {
  require_square(m, "minimal_polynomial");
  const Eigen::Index n = m.rows();
  if (n == 0) return {1.0};
  const double norm = m.norm();
  const double s = norm > 0.0 ? norm : 1.0;
  const Matrix ms = m / s;
  const Eigen::Index nn = n * n;

  std::vector<Matrix> powers{Matrix::Identity(n, n)};
  for (Eigen::Index d = 1; d <= n; ++d) {
    powers.push_back(powers.back() * ms);
    Matrix krylov(nn, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      krylov.col(k) = Eigen::Map<const Vector>(powers[k].data(), nn);
    }
    const Vector target = -Eigen::Map<const Vector>(powers[d].data(), nn);
    const Vector coeffs = krylov.colPivHouseholderQr().solve(target);
    const double residual = (krylov * coeffs - target).norm();
    // With ||ms|| = 1 the bound tol * ||M||^d becomes tol; M = 0 keeps an exact
    // zero threshold.
    const double bound = norm > 0.0 ? tol : 0.0;
    if (residual <= bound || d == n) {
      Polynomial out(d + 1);
      for (Eigen::Index k = 0; k < d; ++k) {
        out[k] = coeffs(k) * std::pow(s, static_cast<double>(d - k));
      }
      out[d] = 1.0;
      return out;
    }
  }
  return {};  // unreachable: d == n always returns
}

Polynomial characteristic_polynomial(const Matrix& m) {
  require_square(m, "characteristic_polynomial");
  const Eigen::Index n = m.rows();
  Polynomial c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix mk = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk + c[n - k + 1] * Matrix::Identity(n, n);
    c[n - k] = -(m * mk).trace() / static_cast<double>(k);
  }
  return c;
}

Matrix evaluate_polynomial(const Polynomial& p, const Matrix& m) {
  require_square(m, "evaluate_polynomial");
  const Eigen::Index n = m.rows();
  Matrix acc = Matrix::Zero(n, n);
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    acc = acc * m + (*it) * Matrix::Identity(n, n);
  }
  return acc;
}

std::vector<double> polynomial_remainder(const std::vector<double>& num,
                                         const Polynomial& den) {
  if (den.empty() || den.back() != 1.0) {
    throw DomainError("polynomial_remainder: divisor must be monic");
  }
  std::vector<double> rem = num;
  const std::size_t dd = den.size() - 1;
  while (rem.size() > dd && !rem.empty()) {
    const double lead = rem.back();
    const std::size_t shift = rem.size() - 1 - dd;
    for (std::size_t k = 0; k <= dd; ++k) rem[shift + k] -= lead * den[k];
    rem.pop_back();
  }
  return rem;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
  require_square(a, "controllability_matrix");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (b.rows() != n) throw DimensionError("controllability_matrix: B rows");
  Matrix out(n, n * m);
  if (n == 0) return out;
  out.leftCols(m) = b;
  for (Eigen::Index k = 1; k < n; ++k) {
    out.middleCols(k * m, m) = a * out.middleCols((k - 1) * m, m);
  }
  return out;
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  if (m.rows() == 0) return m;
  return m.exp();
}

int complex_rank_via_embedding(const Matrix& re, const Matrix& im) {
  if (re.rows() != im.rows() || re.cols() != im.cols()) {
    throw DimensionError("complex_rank_via_embedding: part shapes differ");
  }
  if (im.isZero(0.0)) return rank(re);
  Matrix e(2 * re.rows(), 2 * re.cols());
  e << re, -im, im, re;
  return rank(e) / 2;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const Matrix& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const Matrix& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace netgame::linalg
