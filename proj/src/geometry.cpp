#include "ladder/geometry.hpp"

#include <cmath>

namespace ladder {

void ToleranceConfig::validate() const {
  if (!(tol_point > 0) || !(tol_tangent > 0) || !(tol_log > 0)) {
    throw InvalidSpec("tolerances must be strictly positive");
  }
  if (max_gd_iters <= 0) {
    throw InvalidSpec("max_gd_iters must be a positive integer");
  }
}

TangentVector Manifold::transport(const ManifoldPoint&, const TangentVector&,
                                  const TangentVector&, double) const {
  throw GeometryError(name() + ": no closed-form parallel transport");
}

Eigen::VectorXd Manifold::stabilize_chart(const Eigen::VectorXd& chart) const {
  return chart;
}

TangentVector Manifold::geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                          double t) const {
  if (t == 0.0) return w;
  ManifoldPoint p = exp(x, make_tangent(x, t * w.vec));
  // The reversed geodesic from gamma(t) reaches x at parameter t, so
  // log_p(x) = -t * gamma'(t).
  TangentVector back = log(p, x);
  return make_tangent(p, back.vec / (-t));
}

double Manifold::norm(const TangentVector& v) const {
  return std::sqrt(std::max(0.0, inner(v.base, v, v)));
}

double Manifold::distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
  return norm(log(x, y));
}

double inner(const Manifold& m, const ManifoldPoint& x, const TangentVector& u,
             const TangentVector& v) {
  require_base(x, u);
  require_base(x, v);
  return m.inner(x, u, v);
}

TangentVector schild_error_prediction(const CurvatureOracle& curv, const TangentVector& v,
                                      const TangentVector& w) {
  require_same_base(v, w);
  TangentVector r = curv.riemann(w, v, v);
  return 0.5 * r;
}

TangentVector pole_error_prediction(const CurvatureOracle& curv, const TangentVector& v,
                                    const TangentVector& w) {
  require_same_base(v, w);
  if (!curv.has_nabla()) {
    throw MissingDerivativeOracle("pole_error_prediction: no nabla_riemann oracle");
  }
  TangentVector a = curv.nabla_riemann(w, w, v, 5.0 * v - w);
  TangentVector b = curv.nabla_riemann(v, w, v, 2.0 * v - w);
  return (1.0 / 12.0) * (a + b);
}

bool same_base(const TangentVector& u, const TangentVector& v, double tol) {
  if (u.base.coords.size() != v.base.coords.size()) return false;
  double scale = 1.0 + u.base.coords.norm();
  return (u.base.coords - v.base.coords).norm() <= tol * scale;
}

void require_same_base(const TangentVector& u, const TangentVector& v) {
  if (!same_base(u, v)) {
    throw BasePointMismatch("tangent vectors have different base points");
  }
}

void require_base(const ManifoldPoint& x, const TangentVector& u) {
  if (x.coords.size() != u.base.coords.size() ||
      (x.coords - u.base.coords).norm() > 1e-9 * (1.0 + x.coords.norm())) {
    throw BasePointMismatch("tangent vector is not based at the given point");
  }
}

TangentVector make_tangent(const ManifoldPoint& base, const Eigen::VectorXd& vec) {
  return TangentVector{base, vec};
}

TangentVector operator+(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b);
  return TangentVector{a.base, a.vec + b.vec};
}

TangentVector operator-(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b);
  return TangentVector{a.base, a.vec - b.vec};
}

TangentVector operator-(const TangentVector& a) { return TangentVector{a.base, -a.vec}; }

TangentVector operator*(double c, const TangentVector& a) {
  return TangentVector{a.base, c * a.vec};
}

}  // namespace ladder
