#pragma once

#include <functional>
#include <utility>

#include "ladder/geometry.hpp"

namespace ladder {

// Counts single RK4 steps taken within one transport run.
struct RkCallCounter {
  long calls = 0;
};

using OdeRhs = std::function<GeodesicState(const GeodesicState&)>;

// One classical RK4 update of (position, velocity); local error O(h^5).
GeodesicState rk4_step(const GeodesicState& state, double h, const OdeRhs& rhs);

// One RK4 step of the manifold's geodesic ODE with drift control applied to
// the chart position. Increments the counter once.
GeodesicState geodesic_step(const Manifold& m, const GeodesicState& state, double h,
                            RkCallCounter* counter);

// Integrate the geodesic with initial data (x, v) up to time t in `steps`
// equal RK4 steps. Returns the endpoint and the endpoint velocity.
std::pair<ManifoldPoint, TangentVector> integrate_geodesic(const Manifold& m,
                                                           const ManifoldPoint& x,
                                                           const TangentVector& v, double t,
                                                           int steps,
                                                           RkCallCounter* counter);

struct ShootingStats {
  int iterations = 0;
  double residual = 0.0;
};

// Shooting inverse of one RK4 step: returns the velocity v (as a tangent
// vector at x) with ||rk1(x, v, h) - y|| <= tol in chart coordinates. Damped
// Gauss-Newton on the unregularized residual with a finite-difference
// Jacobian, falling back to a gradient step when the normal equations fail.
TangentVector rk_inverse(const Manifold& m, const ManifoldPoint& x, const ManifoldPoint& y,
                         double h, double tol, RkCallCounter* counter,
                         int max_iters = 50, ShootingStats* stats = nullptr);

// Shooting tolerance for step size h: min(tol_log, h^5), floored at what
// double precision can resolve for order-one chart coordinates.
double shooting_tolerance(double h, double tol_log = 1e-12);

}  // namespace ladder
