#pragma once

#include <Eigen/Dense>
#include <complex>

namespace otfs {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using IVec = Eigen::VectorXi;

/// Dense Kronecker product a (x) b.
CMat kron(const CMat& a, const CMat& b);

}  // namespace otfs
