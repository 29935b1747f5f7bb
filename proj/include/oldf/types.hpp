#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <string>

namespace oldf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;
using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

// Malformed files, dangling ids, shape mismatches. CLI maps this to exit 2.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Divergence, NaNs, infeasibility. CLI maps this to exit 1.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace oldf
