#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ladder {

// Point stored in its ambient representation. Layout by manifold:
//   S^2     3 coords, unit vector in R^3
//   SPD(3)  9 coords, row-major symmetric positive-definite 3x3 matrix
//   SE(3)  16 coords, row-major homogeneous 4x4 matrix
struct ManifoldPoint {
  Eigen::VectorXd coords;
};

// Tangent vector in the same ambient layout as its base point. For SE(3) the
// vector is gamma * xi_hat for a Lie algebra element xi_hat (left-translated).
struct TangentVector {
  ManifoldPoint base;
  Eigen::VectorXd vec;
};

// Residuals below this are not reliably measurable in double precision for
// order-one chart coordinates.
inline constexpr double kShootingFloor = 1e-14;

struct ToleranceConfig {
  double tol_point = 1e-9;
  double tol_tangent = 1e-9;
  // Target residual for the shooting inverse of a single integrator step.
  // The infinitesimal backend overrides this per run with
  // max(h^5, kShootingFloor) where h is the step size.
  double tol_log = 1e-12;
  int max_gd_iters = 50;

  void validate() const;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BasePointMismatch : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NonTangentInput : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class AntipodalPoints : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NotPositiveDefinite : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NonSymmetricInput : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NonPositiveBeta : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class BetaNotOne : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class MissingDerivativeOracle : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NonFiniteState : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegenerateFit : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class InvalidSpec : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// The gradient-descent shooting failed to reach the requested residual.
class ShootingDiverged : public GeometryError {
 public:
  ShootingDiverged(const std::string& what, double best_residual, int iterations)
      : GeometryError(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const { return best_residual_; }
  int iterations() const { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

// A ladder rung grew past the runaway guard; carries the failing rung index.
class LadderDiverged : public GeometryError {
 public:
  LadderDiverged(const std::string& what, int rung) : GeometryError(what), rung_(rung) {}
  int rung() const { return rung_; }

 private:
  int rung_;
};

}  // namespace ladder
