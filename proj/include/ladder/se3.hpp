#pragma once

#include <array>
#include <cmath>

#include "ladder/geometry.hpp"

namespace ladder {

// Lie algebra element of se(3) as coefficients on the orthonormal basis
// e1..e6 (rotation generators scaled by 1/sqrt(2), the first translation
// generator scaled by 1/sqrt(beta)).
struct AlgebraVector {
  Eigen::Matrix<double, 6, 1> xi = Eigen::Matrix<double, 6, 1>::Zero();
  double beta = 1.0;
};

// Structure constants C_ij^k = <[e_i,e_j], e_k> on the orthonormal basis.
struct StructureTable {
  double beta = 1.0;
  double tau = 2.0;  // sqrt(beta) + 1/sqrt(beta)
  std::array<std::array<std::array<double, 6>, 6>, 6> c{};

  double operator()(int i, int j, int k) const { return c[i][j][k]; }
};

// Christoffel symbols Gamma_ij^k = <nabla_{e_i} e_j, e_k> at the identity,
// obtained from the half-sum formula on the structure constants.
struct ChristoffelTable {
  double beta = 1.0;
  double tau = 2.0;
  std::array<std::array<std::array<double, 6>, 6>, 6> gamma{};

  double operator()(int i, int j, int k) const { return gamma[i][j][k]; }
};

// Basis matrix of e_i (0-based index) for the given anisotropy beta.
Eigen::Matrix4d se3_basis_matrix(int i, double beta);
Eigen::Matrix4d algebra_to_matrix(const AlgebraVector& a);
AlgebraVector matrix_to_algebra(const Eigen::Matrix4d& m, double beta);

StructureTable structure_constants(double beta);
ChristoffelTable christoffels(double beta);

// Co-adjoint action defined by <[a,b],c> = <ad*_a c, b>.
AlgebraVector ad_star(const AlgebraVector& a, const AlgebraVector& c);

// R(e_i, e_j) e_k at the identity, expanded on the basis (0-based indices).
AlgebraVector curvature_at_identity(double beta, int i, int j, int k);
// (nabla_{e_i} R)(e_j, e_k) e_l at the identity (0-based indices).
AlgebraVector nabla_curvature_at_identity(double beta, int i, int j, int k, int l);
// Largest |coefficient| of nabla R over all 1296 basis tuples.
double max_abs_nabla_curvature(double beta);

// Product-geometry closed forms, valid only for beta = 1.
ManifoldPoint se3_exp_beta1(const ManifoldPoint& x, const TangentVector& v);
TangentVector se3_log_beta1(const ManifoldPoint& x, const ManifoldPoint& y);

Eigen::Matrix3d so3_exp(const Eigen::Matrix3d& skew);
Eigen::Matrix3d so3_log(const Eigen::Matrix3d& rotation);
Eigen::Matrix3d project_so3(const Eigen::Matrix3d& near_rotation);

// SE(3) with the left-invariant metric diag(1,1,1,beta,1,1) at the identity.
// Geodesics integrate the Euler-Poincare equations; for beta = 1 the space is
// the metric product SO(3) x R^3 and exp/log/transport are closed form.
class Se3 final : public Manifold {
 public:
  explicit Se3(double beta);

  double beta() const { return beta_; }
  double tau() const { return structure_.tau; }
  const StructureTable& structure() const { return structure_; }
  const ChristoffelTable& christoffel() const { return christoffel_; }

  std::string name() const override { return "se3"; }
  int ambient_size() const override { return 16; }
  int chart_size() const override { return 12; }
  int velocity_size() const override { return 6; }
  double safe_radius() const override { return 1.0; }

  void validate_point(const ManifoldPoint& p, double tol) const override;
  Eigen::VectorXd project_tangent(const ManifoldPoint& x,
                                  const Eigen::VectorXd& ambient) const override;

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  ManifoldPoint exp(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector log(const ManifoldPoint& x, const ManifoldPoint& y) const override;

  bool has_closed_form_geodesics() const override { return beta_is_one(); }
  bool has_closed_form_transport() const override { return beta_is_one(); }
  TangentVector transport(const ManifoldPoint& x, const TangentVector& w,
                          const TangentVector& v, double t) const override;

  CurvatureOracle curvature_oracle(const ManifoldPoint& x) const override;

  Eigen::VectorXd point_to_chart(const ManifoldPoint& p) const override;
  ManifoldPoint chart_to_point(const Eigen::VectorXd& chart) const override;
  Eigen::VectorXd tangent_to_velocity(const TangentVector& v) const override;
  TangentVector velocity_to_tangent(const ManifoldPoint& x,
                                    const Eigen::VectorXd& velocity) const override;
  GeodesicState geodesic_rhs(const GeodesicState& state) const override;
  Eigen::VectorXd stabilize_chart(const Eigen::VectorXd& chart) const override;
  TangentVector chart_delta_to_tangent(const ManifoldPoint& at,
                                       const Eigen::VectorXd& delta) const override;
  TangentVector geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                  double t) const override;

  AlgebraVector tangent_to_algebra(const TangentVector& v) const;
  TangentVector algebra_to_tangent(const ManifoldPoint& x, const AlgebraVector& a) const;

  static ManifoldPoint identity();
  TangentVector basis_tangent(const ManifoldPoint& x, int i) const;

 private:
  bool beta_is_one() const { return std::abs(beta_ - 1.0) < 1e-12; }
  AlgebraVector ad_star_table(const AlgebraVector& a) const;

  double beta_;
  StructureTable structure_;
  ChristoffelTable christoffel_;
  // R(e_i,e_j)e_k expanded on the basis, cached at construction.
  std::array<std::array<std::array<Eigen::Matrix<double, 6, 1>, 6>, 6>, 6> riemann_table_;
};

}  // namespace ladder
