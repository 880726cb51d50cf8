#pragma once

#include <functional>
#include <string>

#include "ladder/types.hpp"

namespace ladder {

// Coupled (position, velocity) state of the geodesic ODE in a chart. Position
// and velocity may have different lengths (SE(3): 12 chart coords, 6 algebra
// velocity coords).
struct GeodesicState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
};

// Pointwise curvature evaluations at a fixed base point.
//   riemann:       (u, v, w)    -> R(u,v)w
//   nabla_riemann: (u, v, w, z) -> (nabla_u R)(v,w)z, empty when no
//                                  derivative oracle is available.
struct CurvatureOracle {
  std::function<TangentVector(const TangentVector&, const TangentVector&,
                              const TangentVector&)>
      riemann;
  std::function<TangentVector(const TangentVector&, const TangentVector&,
                              const TangentVector&, const TangentVector&)>
      nabla_riemann;

  bool has_nabla() const { return static_cast<bool>(nabla_riemann); }
};

// Interface shared by the three supported geometries. All operations are pure
// and instances are immutable after construction, so they can be shared
// freely across threads.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual int ambient_size() const = 0;
  virtual int chart_size() const = 0;
  virtual int velocity_size() const = 0;
  // Radius such that exp/log and the ladder parallelograms stay inside a
  // convex neighborhood for tangent data up to this metric norm.
  virtual double safe_radius() const = 0;

  virtual void validate_point(const ManifoldPoint& p, double tol) const = 0;
  virtual Eigen::VectorXd project_tangent(const ManifoldPoint& x,
                                          const Eigen::VectorXd& ambient) const = 0;

  virtual double inner(const ManifoldPoint& x, const TangentVector& u,
                       const TangentVector& v) const = 0;
  virtual ManifoldPoint exp(const ManifoldPoint& x, const TangentVector& v) const = 0;
  virtual TangentVector log(const ManifoldPoint& x, const ManifoldPoint& y) const = 0;

  virtual bool has_closed_form_geodesics() const = 0;
  virtual bool has_closed_form_transport() const = 0;
  // Parallel transport of v along t' -> exp_x(t' w) up to time t.
  virtual TangentVector transport(const ManifoldPoint& x, const TangentVector& w,
                                  const TangentVector& v, double t) const;

  virtual CurvatureOracle curvature_oracle(const ManifoldPoint& x) const = 0;

  // Chart/ODE surface used by the infinitesimal backend.
  virtual Eigen::VectorXd point_to_chart(const ManifoldPoint& p) const = 0;
  virtual ManifoldPoint chart_to_point(const Eigen::VectorXd& chart) const = 0;
  virtual Eigen::VectorXd tangent_to_velocity(const TangentVector& v) const = 0;
  virtual TangentVector velocity_to_tangent(const ManifoldPoint& x,
                                            const Eigen::VectorXd& velocity) const = 0;
  virtual GeodesicState geodesic_rhs(const GeodesicState& state) const = 0;
  // Drift control applied after each integrator step (SE(3) re-projects the
  // rotation block onto SO(3); the default is a no-op).
  virtual Eigen::VectorXd stabilize_chart(const Eigen::VectorXd& chart) const;
  // Reinterpret a chart-space difference as a tangent vector at `at`.
  virtual TangentVector chart_delta_to_tangent(const ManifoldPoint& at,
                                               const Eigen::VectorXd& delta) const = 0;

  // Velocity of the main geodesic s -> exp_x(s w) at parameter t. The default
  // derives it from the log map; closed-form manifolds override.
  virtual TangentVector geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                          double t) const;

  double norm(const TangentVector& v) const;
  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const;
};

// Metric inner product with base-point checking.
double inner(const Manifold& m, const ManifoldPoint& x, const TangentVector& u,
             const TangentVector& v);

// Predicted leading deviation of one Schild rung: (1/2) R(w,v)v.
TangentVector schild_error_prediction(const CurvatureOracle& curv, const TangentVector& v,
                                      const TangentVector& w);

// Predicted leading deviation of one pole rung:
// (1/12) [ (nabla_w R)(w,v)(5v - w) + (nabla_v R)(w,v)(2v - w) ].
TangentVector pole_error_prediction(const CurvatureOracle& curv, const TangentVector& v,
                                    const TangentVector& w);

bool same_base(const TangentVector& u, const TangentVector& v, double tol = 1e-9);
void require_same_base(const TangentVector& u, const TangentVector& v);
void require_base(const ManifoldPoint& x, const TangentVector& u);

TangentVector make_tangent(const ManifoldPoint& base, const Eigen::VectorXd& vec);

TangentVector operator+(const TangentVector& a, const TangentVector& b);
TangentVector operator-(const TangentVector& a, const TangentVector& b);
TangentVector operator-(const TangentVector& a);
TangentVector operator*(double c, const TangentVector& a);

}  // namespace ladder
