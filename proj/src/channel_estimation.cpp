#include "mimosim/channel_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mimosim/errors.hpp"

namespace mimosim {

namespace {

void check_gain(double gain) {
  if (!(gain > 0.0)) {
    throw InvalidParameter("G: large-scale gain must be positive");
  }
}

void check_pilot_shapes(const CMatrix& y_p, const CMatrix& x_p) {
  if (y_p.cols() != x_p.cols()) {
    throw ShapeError("pilot length mismatch: Y_P has " +
                     std::to_string(y_p.cols()) + " columns, X_P has " +
                     std::to_string(x_p.cols()));
  }
}

} // namespace

PilotMode parse_pilot_mode(std::string_view name) {
  if (name == "unitary-random") return PilotMode::UnitaryRandom;
  if (name == "permutation") return PilotMode::Permutation;
  throw InvalidParameter("pilot_mode: unknown mode '" + std::string(name) +
                         "' (expected unitary-random or permutation)");
}

std::string_view to_string(PilotMode mode) {
  return mode == PilotMode::UnitaryRandom ? "unitary-random" : "permutation";
}

CMatrix random_unitary(int n, RandomStream& rng) {
  const CMatrix z = sample_raw_channel(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the column phases so that diag(R) is real positive; this makes the
  // factorization unique and Q Haar distributed.
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

CMatrix pilot_matrix_from_unitary(const CMatrix& q, int n_pilot) {
  if (q.rows() != q.cols()) {
    throw InvalidParameter("pilot unitary must be square");
  }
  const auto n_t = static_cast<int>(q.rows());
  if (n_pilot < n_t) {
    throw InvalidParameter("n_pilot: " + std::to_string(n_pilot) +
                           " is shorter than N_t = " + std::to_string(n_t));
  }
  CMatrix x_p = CMatrix::Zero(n_t, n_pilot);
  x_p.leftCols(n_t) = q; // Q * [I | 0]
  return x_p;
}

CMatrix build_pilot_matrix(int n_t, int n_pilot, RandomStream& rng,
                           PilotMode mode) {
  if (n_t < 1) throw InvalidParameter("N_t: must be >= 1");
  if (n_pilot < n_t) {
    throw InvalidParameter("n_pilot: " + std::to_string(n_pilot) +
                           " is shorter than N_t = " + std::to_string(n_t));
  }
  if (mode == PilotMode::Permutation) {
    std::vector<int> perm(n_t);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    CMatrix q = CMatrix::Zero(n_t, n_t);
    for (int j = 0; j < n_t; ++j) q(perm[j], j) = 1.0;
    return pilot_matrix_from_unitary(q, n_pilot);
  }
  return pilot_matrix_from_unitary(random_unitary(n_t, rng), n_pilot);
}

CMatrix transmit_pilots(const ChannelRealization& channel, const CMatrix& x_p,
                        RandomStream& rng) {
  return apply_channel(channel, x_p, rng);
}

bool is_semi_unitary(const CMatrix& x_p, double tol) {
  const auto n = x_p.rows();
  return (x_p * x_p.adjoint() - CMatrix::Identity(n, n)).norm() < tol;
}

CMatrix estimate_ls_general(const CMatrix& y_p, const CMatrix& x_p, double gain) {
  check_gain(gain);
  check_pilot_shapes(y_p, x_p);
  const CMatrix gram = x_p * x_p.adjoint();
  Eigen::FullPivLU<CMatrix> lu(gram);
  if (!lu.isInvertible()) {
    throw SingularMatrix("estimate_ls: X_P X_P^H is singular");
  }
  // H_hat = Y X^H (X X^H)^{-1}  <=>  (X X^H)^H H_hat^H = (Y X^H)^H, gram Hermitian.
  const CMatrix rhs = (y_p * x_p.adjoint()).adjoint();
  return lu.solve(rhs).adjoint() / std::sqrt(gain);
}

CMatrix estimate_ls(const CMatrix& y_p, const CMatrix& x_p, double gain) {
  check_gain(gain);
  check_pilot_shapes(y_p, x_p);
  if (is_semi_unitary(x_p)) {
    return (y_p * x_p.adjoint()) / std::sqrt(gain);
  }
  return estimate_ls_general(y_p, x_p, gain);
}

CMatrix estimate_lmmse_general(const CMatrix& y_p, const CMatrix& x_p,
                               double gain, double sigma2) {
  check_gain(gain);
  check_pilot_shapes(y_p, x_p);
  if (sigma2 < 0.0) throw InvalidParameter("noise_power: must be non-negative");
  const auto n_t = x_p.rows();
  const CMatrix regularized =
      gain * (x_p * x_p.adjoint()) + sigma2 * CMatrix::Identity(n_t, n_t);
  Eigen::FullPivLU<CMatrix> lu(regularized);
  if (!lu.isInvertible()) {
    throw SingularMatrix("estimate_lmmse: regularized pilot Gram matrix is singular");
  }
  const CMatrix rhs = (y_p * x_p.adjoint()).adjoint();
  return std::sqrt(gain) * lu.solve(rhs).adjoint();
}

CMatrix estimate_lmmse(const CMatrix& y_p, const CMatrix& x_p, double gain,
                       double sigma2) {
  check_gain(gain);
  check_pilot_shapes(y_p, x_p);
  if (sigma2 < 0.0) throw InvalidParameter("noise_power: must be non-negative");
  if (is_semi_unitary(x_p)) {
    return (std::sqrt(gain) / (gain + sigma2)) * (y_p * x_p.adjoint());
  }
  return estimate_lmmse_general(y_p, x_p, gain, sigma2);
}

} // namespace mimosim
