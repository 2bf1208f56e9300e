#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace elastoq {

using cplx = std::complex<double>;
using Index = Eigen::Index;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Number of field components on the state register after zero padding.
inline constexpr int kStateComponents = 16;
/// Qubits of the state register.
inline constexpr int kStateQubits = 4;
/// Physical components: 3 velocities followed by 6 Voigt stresses.
inline constexpr int kPhysicalComponents = 9;

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix16 = Eigen::Matrix<double, 16, 16>;
using Matrix16c = Eigen::Matrix<cplx, 16, 16>;
using Vector16 = Eigen::Matrix<double, 16, 1>;

/// Spatial axis. Numbered 1..3 in reports, 0..2 in storage.
enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

constexpr int axis_index(Axis a) { return static_cast<int>(a); }
constexpr int axis_number(Axis a) { return static_cast<int>(a) + 1; }
Axis axis_from_number(int number);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid physical or numerical parameter; the message names the field.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Vector length or lattice shape does not match the operator.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A dense path was requested above its size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace elastoq
