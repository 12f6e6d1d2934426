#pragma once

#include "netgame/linalg.h"

namespace netgame {

/// Controllable companion realization of a monic polynomial.
struct CompanionPair {
  Matrix beta;   // s x s, bottom-row coefficients
  Matrix sigma;  // s x 1, (0, ..., 0, 1)'
};

/// p-copy internal model (G1, G2) = (blockdiag(beta, ..., beta),
/// blockdiag(sigma, ..., sigma)).
struct InternalModel {
  Matrix g1;
  Matrix g2;
  Eigen::Index order = 0;   // s, degree of the minimal polynomial
  Eigen::Index copies = 0;  // p

  Eigen::Index dim() const { return order * copies; }
};

/// Throws DomainError when the polynomial is not monic or has degree 0.
CompanionPair companion_pair(const linalg::Polynomial& monic);

InternalModel build_p_copy(const Matrix& s_ext, Eigen::Index p);

/// Checks the block structure of (G1, G2), that each diagonal block's
/// characteristic polynomial equals the minimal polynomial of s_ext
/// (coefficient-wise within 1e-8) and that each (beta, sigma) is controllable.
bool verify_internal_model(const InternalModel& im, const Matrix& s_ext);

}  // namespace netgame
