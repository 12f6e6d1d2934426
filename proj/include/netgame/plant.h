#pragma once

#include <complex>
#include <vector>

#include "netgame/linalg.h"

namespace netgame {

enum class Realization { kNominal, kPerturbed };

/// x' = A(mu) x + B(mu) u + P(mu) w,  y = C(mu) x, with X(mu) = X + dX.
struct AgentPlant {
  Matrix a, b, c, p;
  Matrix da, db, dc, dp;

  AgentPlant() = default;
  /// Perturbations default to zero. Throws DimensionError on shape mismatch.
  AgentPlant(Matrix a, Matrix b, Matrix c, Matrix p);

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }
  Eigen::Index outputs() const { return c.rows(); }
  Eigen::Index disturbances() const { return p.cols(); }

  Matrix a_of(Realization r) const { return r == Realization::kNominal ? a : Matrix(a + da); }
  Matrix b_of(Realization r) const { return r == Realization::kNominal ? b : Matrix(b + db); }
  Matrix c_of(Realization r) const { return r == Realization::kNominal ? c : Matrix(c + dc); }
  Matrix p_of(Realization r) const { return r == Realization::kNominal ? p : Matrix(p + dp); }

  /// Installs perturbation matrices after checking their shapes.
  void set_perturbation(Matrix da, Matrix db, Matrix dc, Matrix dp);
  bool has_perturbation() const;

  /// Checks every nominal/perturbation shape.
  void validate() const;
};

/// w' = S w.
struct Exosystem {
  Matrix s;
  Vector w0;
};

/// v' = blockdiag(S, 0) v with v(0) = (w0, 1).
struct ExtendedExosystem {
  Matrix s;
  Vector v0;
};

ExtendedExosystem extend_exosystem(const Exosystem& e);

/// [P 0]: disturbance input of the extended exosystem.
Matrix extended_disturbance_input(const Matrix& p);

using ComplexValues = std::vector<std::complex<double>>;

struct SpectrumReport {
  bool holds = false;
  ComplexValues offending;
};

/// No eigenvalue of S with real part below -1e-9.
SpectrumReport check_assumption_2(const Exosystem& e);

struct PbhReport {
  bool stabilizable = false;
  bool detectable = false;
  ComplexValues uncontrollable;
  ComplexValues unobservable;
};

/// PBH rank tests on the closed right half-plane eigenvalues of A.
PbhReport check_assumption_3(const AgentPlant& p);

/// PBH stabilizability of (A, B); failing eigenvalues are returned.
SpectrumReport pbh_stabilizable(const Matrix& a, const Matrix& b);

/// True iff rank [[A - lambda I, B], [C, 0]] = n + p.
bool transmission_rank_full(const Matrix& a, const Matrix& b, const Matrix& c,
                            std::complex<double> lambda);

/// Rank condition at every lambda in spec(S) and at 0.
SpectrumReport check_assumption_4(const AgentPlant& p, const Exosystem& e);

/// Same test with C replaced by D C. Throws DomainError for singular D.
bool check_scaled_rank(const AgentPlant& p, const Exosystem& e, const Matrix& d);

/// Eigenvalues with near-duplicates (within tol) merged.
ComplexValues distinct_eigenvalues(const Matrix& m, double tol = 1e-9);

}  // namespace netgame
