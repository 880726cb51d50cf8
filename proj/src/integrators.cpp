#include "ladder/integrators.hpp"

#include <cmath>

namespace ladder {

namespace {

GeodesicState axpy(const GeodesicState& s, double c, const GeodesicState& d) {
  return GeodesicState{s.position + c * d.position, s.velocity + c * d.velocity};
}

void check_finite(const GeodesicState& s) {
  if (!s.position.allFinite() || !s.velocity.allFinite()) {
    throw NonFiniteState("integrator produced a non-finite state");
  }
}

}  // namespace

GeodesicState rk4_step(const GeodesicState& state, double h, const OdeRhs& rhs) {
  GeodesicState k1 = rhs(state);
  GeodesicState k2 = rhs(axpy(state, 0.5 * h, k1));
  GeodesicState k3 = rhs(axpy(state, 0.5 * h, k2));
  GeodesicState k4 = rhs(axpy(state, h, k3));
  GeodesicState out;
  out.position =
      state.position + (h / 6.0) * (k1.position + 2.0 * k2.position + 2.0 * k3.position +
                                    k4.position);
  out.velocity =
      state.velocity + (h / 6.0) * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity +
                                    k4.velocity);
  check_finite(out);
  return out;
}

GeodesicState geodesic_step(const Manifold& m, const GeodesicState& state, double h,
                            RkCallCounter* counter) {
  GeodesicState out =
      rk4_step(state, h, [&m](const GeodesicState& s) { return m.geodesic_rhs(s); });
  out.position = m.stabilize_chart(out.position);
  if (counter != nullptr) counter->calls += 1;
  return out;
}

std::pair<ManifoldPoint, TangentVector> integrate_geodesic(const Manifold& m,
                                                           const ManifoldPoint& x,
                                                           const TangentVector& v, double t,
                                                           int steps,
                                                           RkCallCounter* counter) {
  if (steps < 1) throw InvalidSpec("integrate_geodesic: steps must be >= 1");
  GeodesicState s{m.point_to_chart(x), m.tangent_to_velocity(v)};
  double h = t / steps;
  for (int i = 0; i < steps; ++i) s = geodesic_step(m, s, h, counter);
  ManifoldPoint end = m.chart_to_point(s.position);
  return {end, m.velocity_to_tangent(end, s.velocity)};
}

// The shooting target is the tighter of tol_log and h^5; polishing past h^5
// is nearly free with Gauss-Newton and keeps small-n runs off the
// shooting-noise floor. The clamp only matters once h^5 drops under what
// double precision can resolve.
double shooting_tolerance(double h, double tol_log) {
  return std::max(std::min(tol_log, std::pow(h, 5)), kShootingFloor);
}

TangentVector rk_inverse(const Manifold& m, const ManifoldPoint& x, const ManifoldPoint& y,
                         double h, double tol, RkCallCounter* counter, int max_iters,
                         ShootingStats* stats) {
  const Eigen::VectorXd cx = m.point_to_chart(x);
  const Eigen::VectorXd target = m.point_to_chart(y);
  const int nv = m.velocity_size();

  auto residual = [&](const Eigen::VectorXd& vel) -> Eigen::VectorXd {
    GeodesicState out = geodesic_step(m, GeodesicState{cx, vel}, h, counter);
    return out.position - target;
  };

  // First-order guess: the chart difference read as a tangent vector.
  Eigen::VectorXd vel =
      m.tangent_to_velocity(m.chart_delta_to_tangent(x, target - cx)) / h;
  Eigen::VectorXd r = residual(vel);
  double rn = r.norm();
  double best = rn;
  Eigen::VectorXd best_vel = vel;

  Eigen::MatrixXd jac;
  bool have_jac = false;
  bool fresh_jac = false;
  const double fd_step = 1e-6;
  int iter = 0;

  for (; iter < max_iters; ++iter) {
    if (rn <= tol) break;
    if (!have_jac) {
      jac.resize(target.size(), nv);
      for (int c = 0; c < nv; ++c) {
        Eigen::VectorXd vp = vel;
        Eigen::VectorXd vm = vel;
        vp(c) += fd_step;
        vm(c) -= fd_step;
        jac.col(c) = (residual(vp) - residual(vm)) / (2.0 * fd_step);
      }
      have_jac = true;
      fresh_jac = true;
    }
    Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::VectorXd step = (jac.transpose() * jac).ldlt().solve(-grad);
    if (!step.allFinite() || step.norm() == 0.0) step = -grad;

    double damping = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 8; ++ls) {
      Eigen::VectorXd cand = vel + damping * step;
      Eigen::VectorXd rc = residual(cand);
      double rcn = rc.norm();
      if (rcn < rn) {
        vel = cand;
        r = rc;
        rn = rcn;
        improved = (damping == 1.0);
        if (rn < best) {
          best = rn;
          best_vel = vel;
        }
        break;
      }
      damping *= 0.5;
      if (ls == 7) {
        if (fresh_jac) {
          // A fresh Jacobian with no descent direction left: give up.
          if (stats != nullptr) {
            stats->iterations = iter + 1;
            stats->residual = best;
          }
          throw ShootingDiverged("rk_inverse: no descent direction", best, iter + 1);
        }
        have_jac = false;
      }
    }
    // The frozen Jacobian is kept while full Gauss-Newton steps keep working.
    if (!improved) have_jac = false;
    fresh_jac = false;
  }

  if (stats != nullptr) {
    stats->iterations = iter;
    stats->residual = rn;
  }
  if (rn > tol) {
    throw ShootingDiverged("rk_inverse: tolerance not reached", best, iter);
  }
  return m.velocity_to_tangent(x, vel);
}

}  // namespace ladder
