#ifndef MIMOSIM_TYPES_HPP
#define MIMOSIM_TYPES_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mimosim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// One bit per element, values 0 or 1.
using BitVector = std::vector<std::uint8_t>;

/// Constellation index m in [0, M).
using SymbolIndex = std::uint32_t;
using IndexVector = std::vector<SymbolIndex>;

} // namespace mimosim

#endif // MIMOSIM_TYPES_HPP
