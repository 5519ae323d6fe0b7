#pragma once

#include <Eigen/Dense>

namespace latdecor {

// Dimensions stay small (m + n <= 8 for lattice work), so matrices live on
// the stack with a fixed upper bound instead of allocating.
inline constexpr int kMaxLatticeDim = 8;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxLatticeDim, kMaxLatticeDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxLatticeDim, 1>;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                                kMaxLatticeDim, kMaxLatticeDim>;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxLatticeDim, 1>;

inline double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace latdecor
