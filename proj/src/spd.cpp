#include "ladder/spd.hpp"

#include <cmath>
#include <limits>

namespace ladder {

namespace {

constexpr double kEigClamp = 1e-14;

Eigen::Matrix3d to_mat(const Eigen::VectorXd& coords) {
  return Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(coords.data());
}

Eigen::VectorXd to_coords(const Eigen::Matrix3d& m) {
  Eigen::VectorXd out(9);
  Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(out.data()) = m;
  return out;
}

// Round-off drift is absorbed by symmetrizing; genuinely asymmetric inputs
// are rejected.
Eigen::Matrix3d require_symmetric(const Eigen::Matrix3d& m, const char* what) {
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw NonSymmetricInput(std::string("spd: ") + what + " is not symmetric");
  }
  return 0.5 * (m + m.transpose());
}

struct EigDecomp {
  Eigen::Matrix3d vectors;
  Eigen::Vector3d values;
};

EigDecomp sym_eig(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(0.5 * (m + m.transpose()));
  return EigDecomp{solver.eigenvectors(), solver.eigenvalues()};
}

Eigen::Matrix3d sym_apply(const Eigen::Matrix3d& m, double (*f)(double), bool require_pd,
                          const char* what) {
  EigDecomp e = sym_eig(m);
  Eigen::Vector3d mapped;
  for (int i = 0; i < 3; ++i) {
    double lam = e.values(i);
    if (require_pd) {
      if (lam <= 0.0) throw NotPositiveDefinite(std::string("spd: ") + what);
      lam = std::max(lam, kEigClamp);
    }
    mapped(i) = f(lam);
  }
  Eigen::Matrix3d out = e.vectors * mapped.asDiagonal() * e.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::Matrix3d mat_exp_sym(const Eigen::Matrix3d& m) {
  return sym_apply(m, [](double x) { return std::exp(x); }, false, "");
}

Eigen::Matrix3d mat_log_spd(const Eigen::Matrix3d& m, const char* what) {
  return sym_apply(m, [](double x) { return std::log(x); }, true, what);
}

Eigen::Matrix3d mat_sqrt_spd(const Eigen::Matrix3d& m, const char* what) {
  return sym_apply(m, [](double x) { return std::sqrt(x); }, true, what);
}

Eigen::Matrix3d mat_inv_sqrt_spd(const Eigen::Matrix3d& m, const char* what) {
  return sym_apply(m, [](double x) { return 1.0 / std::sqrt(x); }, true, what);
}

}  // namespace

double Spd::safe_radius() const { return std::numeric_limits<double>::infinity(); }

void Spd::validate_point(const ManifoldPoint& p, double tol) const {
  if (p.coords.size() != 9) throw GeometryError("spd: point must have 9 coords");
  Eigen::Matrix3d m = to_mat(p.coords);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw NonSymmetricInput("spd: point is not symmetric");
  }
  EigDecomp e = sym_eig(m);
  if (e.values.minCoeff() <= 0.0) {
    throw NotPositiveDefinite("spd: point has non-positive eigenvalues");
  }
}

Eigen::VectorXd Spd::project_tangent(const ManifoldPoint&, const Eigen::VectorXd& ambient) const {
  Eigen::Matrix3d m = to_mat(ambient);
  return to_coords(0.5 * (m + m.transpose()));
}

double Spd::inner(const ManifoldPoint& x, const TangentVector& u,
                  const TangentVector& v) const {
  require_base(x, u);
  require_base(x, v);
  Eigen::Matrix3d s = to_mat(x.coords);
  Eigen::LLT<Eigen::Matrix3d> llt(s);
  Eigen::Matrix3d a = llt.solve(to_mat(u.vec));
  Eigen::Matrix3d b = llt.solve(to_mat(v.vec));
  return (a * b).trace();
}

ManifoldPoint Spd::exp(const ManifoldPoint& x, const TangentVector& w) const {
  require_base(x, w);
  Eigen::Matrix3d s = to_mat(x.coords);
  Eigen::Matrix3d wm = require_symmetric(to_mat(w.vec), "exp input");
  Eigen::Matrix3d rt = mat_sqrt_spd(s, "exp base");
  Eigen::Matrix3d irt = mat_inv_sqrt_spd(s, "exp base");
  Eigen::Matrix3d out = rt * mat_exp_sym(irt * wm * irt) * rt;
  return ManifoldPoint{to_coords(0.5 * (out + out.transpose()))};
}

TangentVector Spd::log(const ManifoldPoint& x, const ManifoldPoint& y) const {
  Eigen::Matrix3d s1 = to_mat(x.coords);
  Eigen::Matrix3d s2 = require_symmetric(to_mat(y.coords), "log target");
  Eigen::Matrix3d rt = mat_sqrt_spd(s1, "log base");
  Eigen::Matrix3d irt = mat_inv_sqrt_spd(s1, "log base");
  Eigen::Matrix3d inner_log = mat_log_spd(irt * s2 * irt, "log target not positive definite");
  Eigen::Matrix3d out = rt * inner_log * rt;
  return make_tangent(x, to_coords(0.5 * (out + out.transpose())));
}

TangentVector Spd::transport(const ManifoldPoint& x, const TangentVector& w,
                             const TangentVector& v, double t) const {
  require_base(x, w);
  require_base(x, v);
  Eigen::Matrix3d s = to_mat(x.coords);
  Eigen::Matrix3d wm = require_symmetric(to_mat(w.vec), "transport direction");
  Eigen::Matrix3d vm = require_symmetric(to_mat(v.vec), "transport input");
  Eigen::Matrix3d rt = mat_sqrt_spd(s, "transport base");
  Eigen::Matrix3d irt = mat_inv_sqrt_spd(s, "transport base");
  Eigen::Matrix3d p = rt * mat_exp_sym(0.5 * t * (irt * wm * irt)) * irt;
  Eigen::Matrix3d out = p * vm * p.transpose();
  ManifoldPoint end = exp(x, make_tangent(x, t * w.vec));
  return make_tangent(end, to_coords(0.5 * (out + out.transpose())));
}

CurvatureOracle Spd::curvature_oracle(const ManifoldPoint& x) const {
  Eigen::Matrix3d s = to_mat(x.coords);
  Eigen::Matrix3d rt = mat_sqrt_spd(s, "curvature base");
  Eigen::Matrix3d irt = mat_inv_sqrt_spd(s, "curvature base");
  CurvatureOracle oracle;
  // Affine invariance reduces everything to the identity, where
  // R(U,V)W = -1/4 [[U,V],W].
  oracle.riemann = [rt, irt](const TangentVector& u, const TangentVector& v,
                             const TangentVector& w) {
    require_same_base(u, v);
    require_same_base(u, w);
    Eigen::Matrix3d a = irt * to_mat(u.vec) * irt;
    Eigen::Matrix3d b = irt * to_mat(v.vec) * irt;
    Eigen::Matrix3d c = irt * to_mat(w.vec) * irt;
    Eigen::Matrix3d ab = a * b - b * a;
    Eigen::Matrix3d r = -0.25 * (ab * c - c * ab);
    Eigen::Matrix3d out = rt * r * rt;
    return make_tangent(u.base, to_coords(0.5 * (out + out.transpose())));
  };
  oracle.nabla_riemann = [](const TangentVector& u, const TangentVector&,
                            const TangentVector&, const TangentVector&) {
    return make_tangent(u.base, Eigen::VectorXd::Zero(9));
  };
  return oracle;
}

Eigen::VectorXd Spd::point_to_chart(const ManifoldPoint& p) const { return p.coords; }

ManifoldPoint Spd::chart_to_point(const Eigen::VectorXd& chart) const {
  return ManifoldPoint{chart};
}

Eigen::VectorXd Spd::tangent_to_velocity(const TangentVector& v) const { return v.vec; }

TangentVector Spd::velocity_to_tangent(const ManifoldPoint& x,
                                       const Eigen::VectorXd& velocity) const {
  return make_tangent(x, project_tangent(x, velocity));
}

GeodesicState Spd::geodesic_rhs(const GeodesicState& state) const {
  Eigen::Matrix3d s = to_mat(state.position);
  Eigen::Matrix3d v = to_mat(state.velocity);
  GeodesicState d;
  d.position = state.velocity;
  // Geodesic equation of the affine-invariant metric: S'' = S' S^-1 S'.
  Eigen::Matrix3d acc = v * s.llt().solve(v);
  d.velocity = to_coords(0.5 * (acc + acc.transpose()));
  return d;
}

TangentVector Spd::chart_delta_to_tangent(const ManifoldPoint& at,
                                          const Eigen::VectorXd& delta) const {
  return make_tangent(at, project_tangent(at, delta));
}

TangentVector Spd::geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                     double t) const {
  // gamma'(t) is the transport of w along its own geodesic.
  return transport(x, w, w, t);
}

ManifoldPoint Spd::point(const Eigen::Matrix3d& m) { return ManifoldPoint{to_coords(m)}; }

TangentVector Spd::tangent(const ManifoldPoint& base, const Eigen::Matrix3d& m) {
  return make_tangent(base, to_coords(m));
}

Eigen::Matrix3d Spd::matrix(const Eigen::VectorXd& coords) { return to_mat(coords); }

}  // namespace ladder
