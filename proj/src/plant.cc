#include "netgame/plant.h"

#include <sstream>

#include "netgame/errors.h"

namespace netgame {

namespace {

constexpr double kSpectrumTol = 1e-9;

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                  const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "AgentPlant: " << what << " is " << m.rows() << "x" << m.cols()
       << ", expected " << rows << "x" << cols;
    throw DimensionError(os.str());
  }
}

}  // namespace

AgentPlant::AgentPlant(Matrix a_in, Matrix b_in, Matrix c_in, Matrix p_in)
    : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)),
      p(std::move(p_in)) {
  da = Matrix::Zero(a.rows(), a.cols());
  db = Matrix::Zero(b.rows(), b.cols());
  dc = Matrix::Zero(c.rows(), c.cols());
  dp = Matrix::Zero(p.rows(), p.cols());
  validate();
}

void AgentPlant::set_perturbation(Matrix da_in, Matrix db_in, Matrix dc_in,
                                  Matrix dp_in) {
  da = std::move(da_in);
  db = std::move(db_in);
  dc = std::move(dc_in);
  dp = std::move(dp_in);
  validate();
}

bool AgentPlant::has_perturbation() const {
  return !(da.isZero(0.0) && db.isZero(0.0) && dc.isZero(0.0) && dp.isZero(0.0));
}

void AgentPlant::validate() const {
  const Eigen::Index n = a.rows();
  if (n == 0) throw DimensionError("AgentPlant: empty state");
  expect_shape(a, n, n, "A");
  expect_shape(b, n, b.cols(), "B");
  expect_shape(c, c.rows(), n, "C");
  expect_shape(p, n, p.cols(), "P");
  expect_shape(da, n, n, "dA");
  expect_shape(db, n, b.cols(), "dB");
  expect_shape(dc, c.rows(), n, "dC");
  expect_shape(dp, n, p.cols(), "dP");
  if (b.cols() == 0 || c.rows() == 0) {
    throw DimensionError("AgentPlant: needs at least one input and one output");
  }
}

ExtendedExosystem extend_exosystem(const Exosystem& e) {
  const Eigen::Index q = e.s.rows();
  if (e.s.cols() != q || e.w0.size() != q) {
    throw DimensionError("extend_exosystem: S must be square and match w0");
  }
  ExtendedExosystem out;
  out.s = Matrix::Zero(q + 1, q + 1);
  out.s.topLeftCorner(q, q) = e.s;
  out.v0 = Vector(q + 1);
  out.v0.head(q) = e.w0;
  out.v0(q) = 1.0;
  return out;
}

Matrix extended_disturbance_input(const Matrix& p) {
  Matrix out = Matrix::Zero(p.rows(), p.cols() + 1);
  out.leftCols(p.cols()) = p;
  return out;
}

ComplexValues distinct_eigenvalues(const Matrix& m, double tol) {
  const ComplexList ev = linalg::eigenvalues(m);
  ComplexValues out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    bool dup = false;
    for (const auto& z : out) {
      if (std::abs(z - ev(i)) <= tol * (1.0 + std::abs(z))) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(ev(i));
  }
  return out;
}

SpectrumReport check_assumption_2(const Exosystem& e) {
  SpectrumReport out;
  out.holds = true;
  if (e.s.size() == 0) return out;
  for (const auto& z : distinct_eigenvalues(e.s)) {
    if (z.real() < -kSpectrumTol) {
      out.holds = false;
      out.offending.push_back(z);
    }
  }
  return out;
}

SpectrumReport pbh_stabilizable(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  SpectrumReport out;
  out.holds = true;
  for (const auto& z : distinct_eigenvalues(a)) {
    if (z.real() < -kSpectrumTol) continue;
    Matrix re(n, n + b.cols());
    Matrix im = Matrix::Zero(n, n + b.cols());
    re << a - z.real() * Matrix::Identity(n, n), b;
    im.leftCols(n) = -z.imag() * Matrix::Identity(n, n);
    if (linalg::complex_rank_via_embedding(re, im) < n) {
      out.holds = false;
      out.offending.push_back(z);
    }
  }
  return out;
}

PbhReport check_assumption_3(const AgentPlant& p) {
  PbhReport out;
  const SpectrumReport stab = pbh_stabilizable(p.a, p.b);
  const SpectrumReport det =
      pbh_stabilizable(p.a.transpose(), p.c.transpose());
  out.stabilizable = stab.holds;
  out.uncontrollable = stab.offending;
  out.detectable = det.holds;
  out.unobservable = det.offending;
  return out;
}

bool transmission_rank_full(const Matrix& a, const Matrix& b, const Matrix& c,
                            std::complex<double> lambda) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  const Eigen::Index p = c.rows();
  Matrix re = Matrix::Zero(n + p, n + m);
  Matrix im = Matrix::Zero(n + p, n + m);
  re.topLeftCorner(n, n) = a - lambda.real() * Matrix::Identity(n, n);
  re.topRightCorner(n, m) = b;
  re.bottomLeftCorner(p, n) = c;
  im.topLeftCorner(n, n) = -lambda.imag() * Matrix::Identity(n, n);
  return linalg::complex_rank_via_embedding(re, im) == n + p;
}

namespace {

ComplexValues exosystem_test_points(const Exosystem& e) {
  ComplexValues pts =
      e.s.size() == 0 ? ComplexValues{} : distinct_eigenvalues(e.s);
  bool has_zero = false;
  for (const auto& z : pts) has_zero = has_zero || std::abs(z) <= kSpectrumTol;
  if (!has_zero) pts.push_back(0.0);
  return pts;
}

}  // namespace

SpectrumReport check_assumption_4(const AgentPlant& p, const Exosystem& e) {
  SpectrumReport out;
  out.holds = true;
  for (const auto& z : exosystem_test_points(e)) {
    if (!transmission_rank_full(p.a, p.b, p.c, z)) {
      out.holds = false;
      out.offending.push_back(z);
    }
  }
  return out;
}

bool check_scaled_rank(const AgentPlant& p, const Exosystem& e, const Matrix& d) {
  if (d.rows() != p.outputs() || d.cols() != p.outputs()) {
    throw DimensionError("check_scaled_rank: D must be p x p");
  }
  if (linalg::rank(d) < d.rows()) {
    throw DomainError("check_scaled_rank: D is singular");
  }
  const Matrix dc = d * p.c;
  for (const auto& z : exosystem_test_points(e)) {
    if (!transmission_rank_full(p.a, p.b, dc, z)) return false;
  }
  return true;
}

}  // namespace netgame
