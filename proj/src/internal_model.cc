#include "netgame/internal_model.h"

#include <cmath>

#include "netgame/errors.h"

namespace netgame {

CompanionPair companion_pair(const linalg::Polynomial& monic) {
  if (monic.size() < 2) {
    throw DomainError("companion_pair: polynomial degree must be at least 1");
  }
  if (monic.back() != 1.0) {
    throw DomainError("companion_pair: polynomial is not monic");
  }
  const Eigen::Index s = static_cast<Eigen::Index>(monic.size()) - 1;
  CompanionPair out{Matrix::Zero(s, s), Matrix::Zero(s, 1)};
  for (Eigen::Index k = 0; k + 1 < s; ++k) out.beta(k, k + 1) = 1.0;
  for (Eigen::Index k = 0; k < s; ++k) out.beta(s - 1, k) = -monic[k];
  out.sigma(s - 1, 0) = 1.0;
  return out;
}

InternalModel build_p_copy(const Matrix& s_ext, Eigen::Index p) {
  if (p < 1) throw DomainError("build_p_copy: p must be positive");
  const CompanionPair pair = companion_pair(linalg::minimal_polynomial(s_ext));
  const Eigen::Index s = pair.beta.rows();
  InternalModel im;
  im.order = s;
  im.copies = p;
  im.g1 = Matrix::Zero(p * s, p * s);
  im.g2 = Matrix::Zero(p * s, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    im.g1.block(k * s, k * s, s, s) = pair.beta;
    im.g2.block(k * s, k, s, 1) = pair.sigma;
  }
  return im;
}

bool verify_internal_model(const InternalModel& im, const Matrix& s_ext) {
  const Eigen::Index s = im.order;
  const Eigen::Index p = im.copies;
  if (s < 1 || p < 1) return false;
  if (im.g1.rows() != p * s || im.g1.cols() != p * s) return false;
  if (im.g2.rows() != p * s || im.g2.cols() != p) return false;

  const linalg::Polynomial minpoly = linalg::minimal_polynomial(s_ext);
  if (static_cast<Eigen::Index>(minpoly.size()) != s + 1) return false;

  for (Eigen::Index k = 0; k < p; ++k) {
    // Off-diagonal blocks must vanish.
    Matrix g1_rows = im.g1.middleRows(k * s, s);
    g1_rows.middleCols(k * s, s).setZero();
    Matrix g2_rows = im.g2.middleRows(k * s, s);
    g2_rows.col(k).setZero();
    if (!g1_rows.isZero(0.0) || !g2_rows.isZero(0.0)) return false;

    const Matrix beta = im.g1.block(k * s, k * s, s, s);
    const Matrix sigma = im.g2.block(k * s, k, s, 1);
    const linalg::Polynomial cp = linalg::characteristic_polynomial(beta);
    for (Eigen::Index c = 0; c <= s; ++c) {
      if (std::abs(cp[c] - minpoly[c]) > 1e-8) return false;
    }
    if (linalg::rank(linalg::controllability_matrix(beta, sigma)) != s) {
      return false;
    }
  }
  return true;
}

}  // namespace netgame
