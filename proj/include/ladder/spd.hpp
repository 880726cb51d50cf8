#pragma once

#include "ladder/geometry.hpp"

namespace ladder {

// SPD(3) with the affine-invariant metric g_S(V,W) = tr(S^-1 V S^-1 W).
// Cartan-Hadamard: exp/log are global, curvature is non-positive, nabla R = 0.
class Spd final : public Manifold {
 public:
  std::string name() const override { return "spd"; }
  int ambient_size() const override { return 9; }
  int chart_size() const override { return 9; }
  int velocity_size() const override { return 9; }
  double safe_radius() const override;

  void validate_point(const ManifoldPoint& p, double tol) const override;
  Eigen::VectorXd project_tangent(const ManifoldPoint& x,
                                  const Eigen::VectorXd& ambient) const override;

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  ManifoldPoint exp(const ManifoldPoint& x, const TangentVector& w) const override;
  TangentVector log(const ManifoldPoint& x, const ManifoldPoint& y) const override;

  bool has_closed_form_geodesics() const override { return true; }
  bool has_closed_form_transport() const override { return true; }
  TangentVector transport(const ManifoldPoint& x, const TangentVector& w,
                          const TangentVector& v, double t) const override;

  CurvatureOracle curvature_oracle(const ManifoldPoint& x) const override;

  Eigen::VectorXd point_to_chart(const ManifoldPoint& p) const override;
  ManifoldPoint chart_to_point(const Eigen::VectorXd& chart) const override;
  Eigen::VectorXd tangent_to_velocity(const TangentVector& v) const override;
  TangentVector velocity_to_tangent(const ManifoldPoint& x,
                                    const Eigen::VectorXd& velocity) const override;
  GeodesicState geodesic_rhs(const GeodesicState& state) const override;
  TangentVector chart_delta_to_tangent(const ManifoldPoint& at,
                                       const Eigen::VectorXd& delta) const override;
  TangentVector geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                  double t) const override;

  static ManifoldPoint point(const Eigen::Matrix3d& m);
  static TangentVector tangent(const ManifoldPoint& base, const Eigen::Matrix3d& m);
  static Eigen::Matrix3d matrix(const Eigen::VectorXd& coords);
};

}  // namespace ladder
