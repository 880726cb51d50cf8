#include "ladder/sphere.hpp"

#include <cmath>

namespace ladder {

namespace {

constexpr double kAntipodalCut = 1e-10;
constexpr double kZeroVelocity = 1e-12;

Eigen::Vector3d as_vec3(const Eigen::VectorXd& v) { return Eigen::Vector3d(v(0), v(1), v(2)); }

Eigen::VectorXd from_vec3(const Eigen::Vector3d& v) {
  Eigen::VectorXd out(3);
  out << v(0), v(1), v(2);
  return out;
}

void check_tangent(const Eigen::Vector3d& x, const Eigen::Vector3d& w, const char* what) {
  if (std::abs(x.dot(w)) > 1e-8 * (1.0 + w.norm())) {
    throw NonTangentInput(std::string("sphere: ") + what + " is not tangent at the base point");
  }
}

}  // namespace

double Sphere::safe_radius() const { return M_PI - 0.1; }

void Sphere::validate_point(const ManifoldPoint& p, double tol) const {
  if (p.coords.size() != 3) throw GeometryError("sphere: point must have 3 coords");
  if (std::abs(p.coords.norm() - 1.0) > tol) {
    throw GeometryError("sphere: point is not a unit vector");
  }
}

Eigen::VectorXd Sphere::project_tangent(const ManifoldPoint& x,
                                        const Eigen::VectorXd& ambient) const {
  Eigen::Vector3d p = as_vec3(x.coords);
  Eigen::Vector3d v = as_vec3(ambient);
  return from_vec3(v - p.dot(v) * p);
}

double Sphere::inner(const ManifoldPoint& x, const TangentVector& u,
                     const TangentVector& v) const {
  require_base(x, u);
  require_base(x, v);
  return u.vec.dot(v.vec);
}

ManifoldPoint Sphere::exp(const ManifoldPoint& x, const TangentVector& w) const {
  require_base(x, w);
  Eigen::Vector3d p = as_vec3(x.coords);
  Eigen::Vector3d wv = as_vec3(w.vec);
  check_tangent(p, wv, "exp input");
  wv -= p.dot(wv) * p;
  double theta = wv.norm();
  if (theta < kZeroVelocity) return x;
  Eigen::Vector3d out = std::cos(theta) * p + std::sin(theta) * wv / theta;
  out.normalize();
  return ManifoldPoint{from_vec3(out)};
}

TangentVector Sphere::log(const ManifoldPoint& x, const ManifoldPoint& y) const {
  Eigen::Vector3d p = as_vec3(x.coords);
  Eigen::Vector3d q = as_vec3(y.coords);
  double c = std::clamp(p.dot(q), -1.0, 1.0);
  if (c <= -1.0 + kAntipodalCut) {
    throw AntipodalPoints("sphere: log is not unique between antipodal points");
  }
  Eigen::Vector3d r = q - c * p;
  double s = r.norm();
  if (s < 1e-16) return make_tangent(x, Eigen::VectorXd::Zero(3));
  // atan2 keeps full accuracy for small angles where arccos degrades.
  double theta = std::atan2(s, c);
  return make_tangent(x, from_vec3(theta * r / s));
}

TangentVector Sphere::transport(const ManifoldPoint& x, const TangentVector& w,
                                const TangentVector& v, double t) const {
  require_base(x, w);
  require_base(x, v);
  Eigen::Vector3d p = as_vec3(x.coords);
  Eigen::Vector3d wv = t * as_vec3(w.vec);
  Eigen::Vector3d vv = as_vec3(v.vec);
  check_tangent(p, wv, "transport direction");
  check_tangent(p, vv, "transport input");
  double theta = wv.norm();
  ManifoldPoint end = exp(x, make_tangent(x, t * w.vec));
  if (theta < kZeroVelocity) return make_tangent(end, v.vec);
  Eigen::Vector3d wh = wv / theta;
  double a = vv.dot(wh);
  // The component along w rotates in the (x, w) plane; the orthogonal
  // component is preserved.
  Eigen::Vector3d out = a * (-std::sin(theta) * p + std::cos(theta) * wh) + (vv - a * wh);
  return make_tangent(end, from_vec3(out));
}

CurvatureOracle Sphere::curvature_oracle(const ManifoldPoint&) const {
  CurvatureOracle oracle;
  // Constant curvature 1: R(u,v)w = <v,w> u - <u,w> v.
  oracle.riemann = [](const TangentVector& u, const TangentVector& v,
                      const TangentVector& w) {
    require_same_base(u, v);
    require_same_base(u, w);
    Eigen::VectorXd out = v.vec.dot(w.vec) * u.vec - u.vec.dot(w.vec) * v.vec;
    return make_tangent(u.base, out);
  };
  oracle.nabla_riemann = [](const TangentVector& u, const TangentVector& v,
                            const TangentVector& w, const TangentVector& z) {
    require_same_base(u, v);
    require_same_base(u, w);
    require_same_base(u, z);
    return make_tangent(u.base, Eigen::VectorXd::Zero(3));
  };
  return oracle;
}

Eigen::VectorXd Sphere::point_to_chart(const ManifoldPoint& p) const { return p.coords; }

ManifoldPoint Sphere::chart_to_point(const Eigen::VectorXd& chart) const {
  return ManifoldPoint{chart};
}

Eigen::VectorXd Sphere::tangent_to_velocity(const TangentVector& v) const { return v.vec; }

TangentVector Sphere::velocity_to_tangent(const ManifoldPoint& x,
                                          const Eigen::VectorXd& velocity) const {
  return make_tangent(x, project_tangent(x, velocity));
}

GeodesicState Sphere::geodesic_rhs(const GeodesicState& state) const {
  Eigen::Vector3d p = as_vec3(state.position);
  Eigen::Vector3d v = as_vec3(state.velocity);
  GeodesicState d;
  d.position = from_vec3(v);
  d.velocity = from_vec3(-(v.dot(v) / p.dot(p)) * p);
  return d;
}

TangentVector Sphere::chart_delta_to_tangent(const ManifoldPoint& at,
                                             const Eigen::VectorXd& delta) const {
  return make_tangent(at, project_tangent(at, delta));
}

TangentVector Sphere::geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                        double t) const {
  require_base(x, w);
  Eigen::Vector3d p = as_vec3(x.coords);
  Eigen::Vector3d wv = as_vec3(w.vec);
  double speed = wv.norm();
  ManifoldPoint end = exp(x, make_tangent(x, t * w.vec));
  if (speed < kZeroVelocity) return make_tangent(end, w.vec);
  Eigen::Vector3d wh = wv / speed;
  double theta = t * speed;
  Eigen::Vector3d out = speed * (-std::sin(theta) * p + std::cos(theta) * wh);
  return make_tangent(end, from_vec3(out));
}

ManifoldPoint Sphere::point(double x, double y, double z) {
  Eigen::VectorXd c(3);
  c << x, y, z;
  if (std::abs(c.norm() - 1.0) > 1e-12) c.normalize();
  return ManifoldPoint{c};
}

TangentVector Sphere::tangent(const ManifoldPoint& base, double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return make_tangent(base, v);
}

}  // namespace ladder
