#ifndef MIMOSIM_CHANNEL_ESTIMATION_HPP
#define MIMOSIM_CHANNEL_ESTIMATION_HPP

#include <string_view>

#include "mimosim/channel.hpp"
#include "mimosim/random.hpp"
#include "mimosim/types.hpp"

namespace mimosim {

enum class PilotMode {
  UnitaryRandom, // Q from a phase-fixed QR of a complex Gaussian
  Permutation,   // Q a random permutation of the identity
};

PilotMode parse_pilot_mode(std::string_view name);
std::string_view to_string(PilotMode mode);

struct PilotBlock {
  CMatrix x_p; // N_t x n_pilot, known
  CMatrix y_p; // N_r x n_pilot, received

  int n_pilot() const noexcept { return static_cast<int>(x_p.cols()); }
};

/// Haar-distributed N x N unitary matrix.
CMatrix random_unitary(int n, RandomStream& rng);

/// X_P = Q A with A = [I | 0]. Throws InvalidParameter when n_pilot < N_t
/// or Q is not square.
CMatrix pilot_matrix_from_unitary(const CMatrix& q, int n_pilot);

/// Semi-unitary pilots: X_P X_P^H = I_{N_t}.
CMatrix build_pilot_matrix(int n_t, int n_pilot, RandomStream& rng,
                           PilotMode mode = PilotMode::UnitaryRandom);

/// Y_P = sqrt(G) H X_P + N, one independent noise column per pilot.
CMatrix transmit_pilots(const ChannelRealization& channel, const CMatrix& x_p,
                        RandomStream& rng);

/// True when ||X X^H - I||_F is below tol.
bool is_semi_unitary(const CMatrix& x_p, double tol = 1e-10);

/// (1/sqrt(G)) Y X^H (X X^H)^{-1}, always via a linear solve.
/// Throws SingularMatrix if X X^H is not invertible.
CMatrix estimate_ls_general(const CMatrix& y_p, const CMatrix& x_p, double gain);

/// LS estimate; takes the (1/sqrt(G)) Y X^H shortcut for semi-unitary pilots.
CMatrix estimate_ls(const CMatrix& y_p, const CMatrix& x_p, double gain);

/// sqrt(G) Y X^H (G X X^H + sigma2 I)^{-1}, always via a linear solve.
CMatrix estimate_lmmse_general(const CMatrix& y_p, const CMatrix& x_p,
                               double gain, double sigma2);

/// L-MMSE estimate; with semi-unitary pilots reduces to
/// (sqrt(G) / (G + sigma2)) Y X^H.
CMatrix estimate_lmmse(const CMatrix& y_p, const CMatrix& x_p, double gain,
                       double sigma2);

} // namespace mimosim

#endif // MIMOSIM_CHANNEL_ESTIMATION_HPP
