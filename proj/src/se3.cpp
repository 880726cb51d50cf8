#include "ladder/se3.hpp"

#include <cmath>

namespace ladder {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Eigen::Matrix4d to_mat4(const Eigen::VectorXd& coords) {
  return Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(coords.data());
}

Eigen::VectorXd to_coords16(const Eigen::Matrix4d& m) {
  Eigen::VectorXd out(16);
  Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(out.data()) = m;
  return out;
}

Eigen::Matrix4d group_inverse(const Eigen::Matrix4d& g) {
  Eigen::Matrix3d r = g.topLeftCorner<3, 3>();
  Eigen::Vector3d t = g.topRightCorner<3, 1>();
  Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
  inv.topLeftCorner<3, 3>() = r.transpose();
  inv.topRightCorner<3, 1>() = -r.transpose() * t;
  return inv;
}

void check_beta(double beta) {
  if (!(beta > 0.0)) throw NonPositiveBeta("se3: beta must be positive");
}

Eigen::Matrix3d skew_from_axis(const Eigen::Vector3d& a) {
  Eigen::Matrix3d s;
  s << 0, -a(2), a(1), a(2), 0, -a(0), -a(1), a(0), 0;
  return s;
}

Eigen::Vector3d axis_from_skew(const Eigen::Matrix3d& s) {
  return Eigen::Vector3d(s(2, 1), s(0, 2), s(1, 0));
}

}  // namespace

Eigen::Matrix4d se3_basis_matrix(int i, double beta) {
  check_beta(beta);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  switch (i) {
    case 0:
      m(2, 1) = 1.0 / kSqrt2;
      m(1, 2) = -1.0 / kSqrt2;
      break;
    case 1:
      m(0, 2) = 1.0 / kSqrt2;
      m(2, 0) = -1.0 / kSqrt2;
      break;
    case 2:
      m(1, 0) = 1.0 / kSqrt2;
      m(0, 1) = -1.0 / kSqrt2;
      break;
    case 3:
      m(0, 3) = 1.0 / std::sqrt(beta);
      break;
    case 4:
      m(1, 3) = 1.0;
      break;
    case 5:
      m(2, 3) = 1.0;
      break;
    default:
      throw GeometryError("se3: basis index out of range");
  }
  return m;
}

Eigen::Matrix4d algebra_to_matrix(const AlgebraVector& a) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 6; ++i) {
    if (a.xi(i) != 0.0) m += a.xi(i) * se3_basis_matrix(i, a.beta);
  }
  return m;
}

AlgebraVector matrix_to_algebra(const Eigen::Matrix4d& m, double beta) {
  check_beta(beta);
  Eigen::Matrix3d b = m.topLeftCorner<3, 3>();
  Eigen::Matrix3d s = 0.5 * (b - b.transpose());
  AlgebraVector a;
  a.beta = beta;
  a.xi(0) = kSqrt2 * s(2, 1);
  a.xi(1) = kSqrt2 * s(0, 2);
  a.xi(2) = kSqrt2 * s(1, 0);
  a.xi(3) = std::sqrt(beta) * m(0, 3);
  a.xi(4) = m(1, 3);
  a.xi(5) = m(2, 3);
  return a;
}

StructureTable structure_constants(double beta) {
  check_beta(beta);
  StructureTable table;
  table.beta = beta;
  table.tau = std::sqrt(beta) + 1.0 / std::sqrt(beta);
  Eigen::Matrix4d basis[6];
  for (int i = 0; i < 6; ++i) basis[i] = se3_basis_matrix(i, beta);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      Eigen::Matrix4d bracket = basis[i] * basis[j] - basis[j] * basis[i];
      AlgebraVector coeffs = matrix_to_algebra(bracket, beta);
      for (int k = 0; k < 6; ++k) {
        double c = coeffs.xi(k);
        table.c[i][j][k] = (std::abs(c) < 1e-15) ? 0.0 : c;
      }
    }
  }
  return table;
}

ChristoffelTable christoffels(double beta) {
  StructureTable c = structure_constants(beta);
  ChristoffelTable table;
  table.beta = beta;
  table.tau = c.tau;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      for (int k = 0; k < 6; ++k) {
        table.gamma[i][j][k] = 0.5 * (c(i, j, k) - c(j, k, i) + c(k, i, j));
      }
    }
  }
  return table;
}

AlgebraVector ad_star(const AlgebraVector& a, const AlgebraVector& c) {
  if (std::abs(a.beta - c.beta) > 1e-12) {
    throw GeometryError("se3: ad_star requires matching beta");
  }
  StructureTable table = structure_constants(a.beta);
  AlgebraVector out;
  out.beta = a.beta;
  for (int j = 0; j < 6; ++j) {
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
      if (a.xi(i) == 0.0) continue;
      for (int k = 0; k < 6; ++k) {
        sum += a.xi(i) * c.xi(k) * table(i, j, k);
      }
    }
    out.xi(j) = sum;
  }
  return out;
}

namespace {

Eigen::Matrix<double, 6, 1> riemann_basis(const ChristoffelTable& g,
                                          const StructureTable& c, int i, int j, int k) {
  // R(e_i,e_j)e_k = nabla_i nabla_j e_k - nabla_j nabla_i e_k - nabla_[e_i,e_j] e_k
  Eigen::Matrix<double, 6, 1> out = Eigen::Matrix<double, 6, 1>::Zero();
  for (int m = 0; m < 6; ++m) {
    double val = 0.0;
    for (int l = 0; l < 6; ++l) {
      val += g(j, k, l) * g(i, l, m) - g(i, k, l) * g(j, l, m);
      val -= c(i, j, l) * g(l, k, m);
    }
    out(m) = val;
  }
  return out;
}

}  // namespace

AlgebraVector curvature_at_identity(double beta, int i, int j, int k) {
  ChristoffelTable g = christoffels(beta);
  StructureTable c = structure_constants(beta);
  AlgebraVector out;
  out.beta = beta;
  out.xi = riemann_basis(g, c, i, j, k);
  return out;
}

AlgebraVector nabla_curvature_at_identity(double beta, int i, int j, int k, int l) {
  ChristoffelTable g = christoffels(beta);
  StructureTable c = structure_constants(beta);
  // (nabla_i R)(e_j,e_k)e_l = nabla_i(R(e_j,e_k)e_l) - R(nabla_i e_j,e_k)e_l
  //                           - R(e_j,nabla_i e_k)e_l - R(e_j,e_k)nabla_i e_l
  Eigen::Matrix<double, 6, 1> r = riemann_basis(g, c, j, k, l);
  Eigen::Matrix<double, 6, 1> out = Eigen::Matrix<double, 6, 1>::Zero();
  for (int p = 0; p < 6; ++p) {
    if (r(p) != 0.0) {
      for (int m = 0; m < 6; ++m) out(m) += r(p) * g(i, p, m);
    }
    if (g(i, j, p) != 0.0) out -= g(i, j, p) * riemann_basis(g, c, p, k, l);
    if (g(i, k, p) != 0.0) out -= g(i, k, p) * riemann_basis(g, c, j, p, l);
    if (g(i, l, p) != 0.0) out -= g(i, l, p) * riemann_basis(g, c, j, k, p);
  }
  AlgebraVector result;
  result.beta = beta;
  result.xi = out;
  return result;
}

double max_abs_nabla_curvature(double beta) {
  double worst = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k)
        for (int l = 0; l < 6; ++l) {
          AlgebraVector v = nabla_curvature_at_identity(beta, i, j, k, l);
          worst = std::max(worst, v.xi.cwiseAbs().maxCoeff());
        }
  return worst;
}

Eigen::Matrix3d so3_exp(const Eigen::Matrix3d& skew) {
  Eigen::Vector3d axis = axis_from_skew(0.5 * (skew - skew.transpose()));
  double theta = axis.norm();
  Eigen::Matrix3d s = skew_from_axis(axis);
  double a, b;
  if (theta < 1e-6) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 - theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * s + b * s * s;
}

Eigen::Matrix3d so3_log(const Eigen::Matrix3d& rotation) {
  double tr = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  Eigen::Matrix3d anti = 0.5 * (rotation - rotation.transpose());
  double s = axis_from_skew(anti).norm();  // sin(theta)
  double theta = std::atan2(s, tr);
  if (theta > M_PI - 1e-6) {
    throw GeometryError("se3: rotation too close to angle pi for the log map");
  }
  if (theta < 1e-8) return anti;
  return (theta / std::sin(theta)) * anti;
}

Eigen::Matrix3d project_so3(const Eigen::Matrix3d& near_rotation) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(near_rotation,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

ManifoldPoint se3_exp_beta1(const ManifoldPoint& x, const TangentVector& v) {
  require_base(x, v);
  Eigen::Matrix4d g = to_mat4(x.coords);
  Eigen::Matrix4d xi = group_inverse(g) * to_mat4(v.vec);
  Eigen::Matrix3d s = 0.5 * (xi.topLeftCorner<3, 3>() - xi.topLeftCorner<3, 3>().transpose());
  Eigen::Vector3d d = xi.topRightCorner<3, 1>();
  Eigen::Matrix3d r = g.topLeftCorner<3, 3>();
  Eigen::Matrix4d out = Eigen::Matrix4d::Identity();
  out.topLeftCorner<3, 3>() = r * so3_exp(s);
  out.topRightCorner<3, 1>() = g.topRightCorner<3, 1>() + r * d;
  return ManifoldPoint{to_coords16(out)};
}

TangentVector se3_log_beta1(const ManifoldPoint& x, const ManifoldPoint& y) {
  Eigen::Matrix4d gx = to_mat4(x.coords);
  Eigen::Matrix4d gy = to_mat4(y.coords);
  Eigen::Matrix3d rx = gx.topLeftCorner<3, 3>();
  Eigen::Matrix3d s = so3_log(rx.transpose() * gy.topLeftCorner<3, 3>());
  Eigen::Vector3d d = rx.transpose() * (gy.topRightCorner<3, 1>() - gx.topRightCorner<3, 1>());
  Eigen::Matrix4d xi = Eigen::Matrix4d::Zero();
  xi.topLeftCorner<3, 3>() = s;
  xi.topRightCorner<3, 1>() = d;
  return make_tangent(x, to_coords16(gx * xi));
}

Se3::Se3(double beta) : beta_(beta) {
  check_beta(beta);
  structure_ = structure_constants(beta);
  christoffel_ = christoffels(beta);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k)
        riemann_table_[i][j][k] = riemann_basis(christoffel_, structure_, i, j, k);
}

void Se3::validate_point(const ManifoldPoint& p, double tol) const {
  if (p.coords.size() != 16) throw GeometryError("se3: point must have 16 coords");
  Eigen::Matrix4d g = to_mat4(p.coords);
  Eigen::Matrix3d r = g.topLeftCorner<3, 3>();
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) {
    throw GeometryError("se3: rotation block is not orthogonal");
  }
  if (r.determinant() < 0.0) throw GeometryError("se3: rotation block has determinant -1");
  Eigen::RowVector4d last = g.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tol) {
    throw GeometryError("se3: last row must be (0,0,0,1)");
  }
}

Eigen::VectorXd Se3::project_tangent(const ManifoldPoint& x,
                                     const Eigen::VectorXd& ambient) const {
  Eigen::Matrix4d g = to_mat4(x.coords);
  Eigen::Matrix4d xi = group_inverse(g) * to_mat4(ambient);
  Eigen::Matrix4d proj = Eigen::Matrix4d::Zero();
  proj.topLeftCorner<3, 3>() =
      0.5 * (xi.topLeftCorner<3, 3>() - xi.topLeftCorner<3, 3>().transpose());
  proj.topRightCorner<3, 1>() = xi.topRightCorner<3, 1>();
  return to_coords16(g * proj);
}

double Se3::inner(const ManifoldPoint& x, const TangentVector& u,
                  const TangentVector& v) const {
  require_base(x, u);
  require_base(x, v);
  return tangent_to_algebra(u).xi.dot(tangent_to_algebra(v).xi);
}

ManifoldPoint Se3::exp(const ManifoldPoint& x, const TangentVector& v) const {
  if (!beta_is_one()) {
    throw BetaNotOne("se3: closed-form exp requires beta = 1");
  }
  return se3_exp_beta1(x, v);
}

TangentVector Se3::log(const ManifoldPoint& x, const ManifoldPoint& y) const {
  if (!beta_is_one()) {
    throw BetaNotOne("se3: closed-form log requires beta = 1");
  }
  return se3_log_beta1(x, y);
}

TangentVector Se3::transport(const ManifoldPoint& x, const TangentVector& w,
                             const TangentVector& v, double t) const {
  if (!beta_is_one()) {
    throw GeometryError("se3: closed-form transport requires beta = 1");
  }
  require_base(x, w);
  require_base(x, v);
  Eigen::Matrix4d g = to_mat4(x.coords);
  Eigen::Matrix4d xw = group_inverse(g) * to_mat4(w.vec);
  Eigen::Matrix4d xv = group_inverse(g) * to_mat4(v.vec);
  Eigen::Matrix3d sw = 0.5 * t * (xw.topLeftCorner<3, 3>() - xw.topLeftCorner<3, 3>().transpose());
  Eigen::Matrix3d sv = 0.5 * (xv.topLeftCorner<3, 3>() - xv.topLeftCorner<3, 3>().transpose());
  Eigen::Vector3d dv = xv.topRightCorner<3, 1>();
  // Product metric: the SO(3) factor transports by half-angle conjugation,
  // the Euclidean factor keeps the ambient velocity fixed.
  Eigen::Matrix3d half = so3_exp(-0.5 * sw);
  Eigen::Matrix3d full = so3_exp(-sw);
  Eigen::Matrix4d out_alg = Eigen::Matrix4d::Zero();
  out_alg.topLeftCorner<3, 3>() = half * sv * half.transpose();
  out_alg.topRightCorner<3, 1>() = full * dv;
  ManifoldPoint end = exp(x, make_tangent(x, t * w.vec));
  return make_tangent(end, to_coords16(to_mat4(end.coords) * out_alg));
}

CurvatureOracle Se3::curvature_oracle(const ManifoldPoint&) const {
  const auto& table = riemann_table_;
  double beta = beta_;
  auto apply_r = [&table](const AlgebraVector& a, const AlgebraVector& b,
                          const AlgebraVector& c) {
    Eigen::Matrix<double, 6, 1> out = Eigen::Matrix<double, 6, 1>::Zero();
    for (int i = 0; i < 6; ++i) {
      if (a.xi(i) == 0.0) continue;
      for (int j = 0; j < 6; ++j) {
        if (b.xi(j) == 0.0) continue;
        for (int k = 0; k < 6; ++k) {
          if (c.xi(k) == 0.0) continue;
          out += a.xi(i) * b.xi(j) * c.xi(k) * table[i][j][k];
        }
      }
    }
    return out;
  };
  CurvatureOracle oracle;
  oracle.riemann = [this, apply_r, beta](const TangentVector& u, const TangentVector& v,
                                         const TangentVector& w) {
    require_same_base(u, v);
    require_same_base(u, w);
    AlgebraVector r;
    r.beta = beta;
    r.xi = apply_r(tangent_to_algebra(u), tangent_to_algebra(v), tangent_to_algebra(w));
    return algebra_to_tangent(u.base, r);
  };
  oracle.nabla_riemann = [this, beta](const TangentVector& u, const TangentVector& v,
                                      const TangentVector& w, const TangentVector& z) {
    require_same_base(u, v);
    require_same_base(u, w);
    require_same_base(u, z);
    AlgebraVector au = tangent_to_algebra(u);
    AlgebraVector av = tangent_to_algebra(v);
    AlgebraVector aw = tangent_to_algebra(w);
    AlgebraVector az = tangent_to_algebra(z);
    Eigen::Matrix<double, 6, 1> out = Eigen::Matrix<double, 6, 1>::Zero();
    for (int i = 0; i < 6; ++i) {
      if (au.xi(i) == 0.0) continue;
      for (int j = 0; j < 6; ++j) {
        if (av.xi(j) == 0.0) continue;
        for (int k = 0; k < 6; ++k) {
          if (aw.xi(k) == 0.0) continue;
          for (int l = 0; l < 6; ++l) {
            if (az.xi(l) == 0.0) continue;
            double c = au.xi(i) * av.xi(j) * aw.xi(k) * az.xi(l);
            out += c * nabla_curvature_at_identity(beta, i, j, k, l).xi;
          }
        }
      }
    }
    AlgebraVector r;
    r.beta = beta;
    r.xi = out;
    return algebra_to_tangent(u.base, r);
  };
  return oracle;
}

Eigen::VectorXd Se3::point_to_chart(const ManifoldPoint& p) const {
  Eigen::Matrix4d g = to_mat4(p.coords);
  Eigen::VectorXd chart(12);
  int idx = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) chart(idx++) = g(r, c);
  for (int r = 0; r < 3; ++r) chart(idx++) = g(r, 3);
  return chart;
}

ManifoldPoint Se3::chart_to_point(const Eigen::VectorXd& chart) const {
  Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
  int idx = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g(r, c) = chart(idx++);
  for (int r = 0; r < 3; ++r) g(r, 3) = chart(idx++);
  return ManifoldPoint{to_coords16(g)};
}

Eigen::VectorXd Se3::tangent_to_velocity(const TangentVector& v) const {
  return tangent_to_algebra(v).xi;
}

TangentVector Se3::velocity_to_tangent(const ManifoldPoint& x,
                                       const Eigen::VectorXd& velocity) const {
  AlgebraVector a;
  a.beta = beta_;
  a.xi = velocity;
  return algebra_to_tangent(x, a);
}

GeodesicState Se3::geodesic_rhs(const GeodesicState& state) const {
  ManifoldPoint p = chart_to_point(state.position);
  Eigen::Matrix4d g = to_mat4(p.coords);
  AlgebraVector a;
  a.beta = beta_;
  a.xi = state.velocity;
  Eigen::Matrix4d xi = algebra_to_matrix(a);
  Eigen::Matrix4d dgamma = g * xi;
  GeodesicState d;
  d.position.resize(12);
  int idx = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) d.position(idx++) = dgamma(r, c);
  for (int r = 0; r < 3; ++r) d.position(idx++) = dgamma(r, 3);
  d.velocity = ad_star_table(a).xi;
  return d;
}

Eigen::VectorXd Se3::stabilize_chart(const Eigen::VectorXd& chart) const {
  Eigen::Matrix3d r;
  int idx = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = chart(idx++);
  r = project_so3(r);
  Eigen::VectorXd out = chart;
  idx = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(idx++) = r(i, j);
  return out;
}

TangentVector Se3::chart_delta_to_tangent(const ManifoldPoint& at,
                                          const Eigen::VectorXd& delta) const {
  Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
  int idx = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v(r, c) = delta(idx++);
  for (int r = 0; r < 3; ++r) v(r, 3) = delta(idx++);
  return make_tangent(at, project_tangent(at, to_coords16(v)));
}

TangentVector Se3::geodesic_velocity(const ManifoldPoint& x, const TangentVector& w,
                                     double t) const {
  if (!beta_is_one()) {
    throw GeometryError("se3: closed-form geodesic velocity requires beta = 1");
  }
  require_base(x, w);
  Eigen::Matrix4d g = to_mat4(x.coords);
  Eigen::Matrix4d xw = group_inverse(g) * to_mat4(w.vec);
  Eigen::Matrix3d s = 0.5 * (xw.topLeftCorner<3, 3>() - xw.topLeftCorner<3, 3>().transpose());
  Eigen::Vector3d d = xw.topRightCorner<3, 1>();
  // Left-trivialized velocity: constant rotation part, translation part
  // rotated backwards along the geodesic.
  Eigen::Matrix4d xi = Eigen::Matrix4d::Zero();
  xi.topLeftCorner<3, 3>() = s;
  xi.topRightCorner<3, 1>() = so3_exp(-t * s) * d;
  ManifoldPoint end = exp(x, make_tangent(x, t * w.vec));
  return make_tangent(end, to_coords16(to_mat4(end.coords) * xi));
}

AlgebraVector Se3::tangent_to_algebra(const TangentVector& v) const {
  Eigen::Matrix4d g = to_mat4(v.base.coords);
  Eigen::Matrix4d xi = group_inverse(g) * to_mat4(v.vec);
  Eigen::Matrix3d b = xi.topLeftCorner<3, 3>();
  double defect = std::max((b + b.transpose()).cwiseAbs().maxCoeff(),
                           xi.row(3).cwiseAbs().maxCoeff());
  if (defect > 1e-6 * (1.0 + xi.cwiseAbs().maxCoeff())) {
    throw NonTangentInput("se3: vector is not of the form gamma * xi_hat");
  }
  return matrix_to_algebra(xi, beta_);
}

TangentVector Se3::algebra_to_tangent(const ManifoldPoint& x, const AlgebraVector& a) const {
  Eigen::Matrix4d g = to_mat4(x.coords);
  return make_tangent(x, to_coords16(g * algebra_to_matrix(a)));
}

AlgebraVector Se3::ad_star_table(const AlgebraVector& a) const {
  AlgebraVector out;
  out.beta = beta_;
  for (int j = 0; j < 6; ++j) {
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
      if (a.xi(i) == 0.0) continue;
      for (int k = 0; k < 6; ++k) {
        sum += a.xi(i) * a.xi(k) * structure_(i, j, k);
      }
    }
    out.xi(j) = sum;
  }
  return out;
}

ManifoldPoint Se3::identity() {
  return ManifoldPoint{to_coords16(Eigen::Matrix4d::Identity())};
}

TangentVector Se3::basis_tangent(const ManifoldPoint& x, int i) const {
  AlgebraVector a;
  a.beta = beta_;
  a.xi(i) = 1.0;
  return algebra_to_tangent(x, a);
}

}  // namespace ladder
