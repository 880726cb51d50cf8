#include "ladder/ladders.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <vector>

namespace ladder {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Schild: return "schild";
    case Scheme::Pole: return "pole";
    case Scheme::AveragedSchild: return "averaged";
    case Scheme::Fanning: return "fanning";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "schild") return Scheme::Schild;
  if (name == "pole") return Scheme::Pole;
  if (name == "averaged" || name == "averaged_schild") return Scheme::AveragedSchild;
  if (name == "fanning") return Scheme::Fanning;
  throw InvalidSpec("unknown scheme: " + name);
}

std::string backend_name(Backend b) {
  return b == Backend::ClosedForm ? "closed" : "infinitesimal";
}

Backend parse_backend(const std::string& name) {
  if (name == "closed" || name == "closed_form") return Backend::ClosedForm;
  if (name == "infinitesimal") return Backend::Infinitesimal;
  throw InvalidSpec("unknown backend: " + name);
}

double default_alpha(Scheme s) {
  switch (s) {
    case Scheme::Schild: return 2.0;
    case Scheme::Pole: return 1.0;
    case Scheme::AveragedSchild: return 2.0;
    case Scheme::Fanning: return 2.0;  // epsilon = h = 1/n
  }
  return 2.0;
}

LadderConfig LadderConfig::make(Scheme s, int n, Backend b) {
  LadderConfig cfg;
  cfg.scheme = s;
  cfg.rungs = n;
  cfg.alpha = default_alpha(s);
  cfg.backend = b;
  return cfg;
}

void LadderConfig::validate() const {
  if (rungs < 1) throw InvalidSpec("ladder: rung count must be >= 1");
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw InvalidSpec("ladder: alpha must be in [1, 2]");
  tolerances.validate();
}

namespace detail {

void check_rung_growth(double estimate, double budget, int rung) {
  if (!std::isfinite(estimate) || estimate > budget) {
    throw LadderDiverged("ladder diverged at rung " + std::to_string(rung), rung);
  }
}

}  // namespace detail

TangentVector schild_step(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                          const TangentVector& v) {
  require_base(x, w);
  require_base(x, v);
  ManifoldPoint xw = m.exp(x, w);
  ManifoldPoint xv = m.exp(x, v);
  TangentVector b = m.log(xv, xw);
  ManifoldPoint mid = m.exp(xv, 0.5 * b);
  TangentVector a = m.log(x, mid);
  ManifoldPoint z = m.exp(x, 2.0 * a);
  return m.log(xw, z);
}

TangentVector pole_step(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                        const TangentVector& v) {
  require_base(x, w);
  require_base(x, v);
  ManifoldPoint mid = m.exp(x, 0.5 * w);
  ManifoldPoint xw = m.exp(x, w);
  ManifoldPoint xv = m.exp(x, v);
  TangentVector a = m.log(mid, xv);
  ManifoldPoint z = m.exp(mid, -a);
  return -1.0 * m.log(xw, z);
}

TangentVector averaged_schild_step(const Manifold& m, const ManifoldPoint& x,
                                   const TangentVector& w, const TangentVector& v) {
  TangentVector up = schild_step(m, x, w, v);
  TangentVector um = schild_step(m, x, w, -v);
  return 0.5 * (up - um);
}

TangentVector fanning_step(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                           const TangentVector& v, double h, double eps) {
  require_base(x, w);
  require_base(x, v);
  if (!(h > 0.0) || !(eps > 0.0)) throw InvalidSpec("fanning_step: h and eps must be positive");
  ManifoldPoint plus = m.exp(x, h * (w + eps * v));
  ManifoldPoint minus = m.exp(x, h * (w - eps * v));
  ManifoldPoint end = m.exp(x, h * w);
  Eigen::VectorXd delta = m.point_to_chart(plus) - m.point_to_chart(minus);
  return (1.0 / (2.0 * h * eps)) * m.chart_delta_to_tangent(end, delta);
}

namespace {

using ExpMap = std::function<ManifoldPoint(const ManifoldPoint&, const TangentVector&)>;
using LogMap = std::function<TangentVector(const ManifoldPoint&, const ManifoldPoint&)>;

struct RungMaps {
  ExpMap exp;
  LogMap log;
};

RungMaps closed_form_maps(const Manifold& m) {
  RungMaps maps;
  maps.exp = [&m](const ManifoldPoint& x, const TangentVector& t) { return m.exp(x, t); };
  maps.log = [&m](const ManifoldPoint& x, const ManifoldPoint& y) { return m.log(x, y); };
  return maps;
}

// One integrator step as exp, the shooting inverse as log.
RungMaps infinitesimal_maps(const Manifold& m, double h, const ToleranceConfig& tols,
                            RkCallCounter* counter) {
  double tol = shooting_tolerance(h, tols.tol_log);
  int max_iters = tols.max_gd_iters;
  RungMaps maps;
  maps.exp = [&m, h, counter](const ManifoldPoint& x, const TangentVector& t) {
    GeodesicState s{m.point_to_chart(x), m.tangent_to_velocity(t) / h};
    return m.chart_to_point(geodesic_step(m, s, h, counter).position);
  };
  maps.log = [&m, h, tol, max_iters, counter](const ManifoldPoint& x, const ManifoldPoint& y) {
    TangentVector vel = rk_inverse(m, x, y, h, tol, counter, max_iters);
    return make_tangent(x, h * vel.vec);
  };
  return maps;
}

// Distance proxy used by the runaway guard: metric norm of the chart offset
// read as a tangent vector (first-order accurate, costs no integrator calls).
double offset_estimate(const Manifold& m, const ManifoldPoint& anchor,
                       const ManifoldPoint& other) {
  Eigen::VectorXd delta = m.point_to_chart(other) - m.point_to_chart(anchor);
  return m.norm(m.chart_delta_to_tangent(anchor, delta));
}

struct MainGeodesic {
  std::vector<ManifoldPoint> points;        // x_0..x_n (schild/averaged/fanning)
  std::vector<TangentVector> velocities;    // only filled for fanning
  std::vector<ManifoldPoint> midpoints;     // m_0..m_{n-1} (pole)
  ManifoldPoint endpoint;                   // x_n
};

MainGeodesic main_geodesic_closed(const Manifold& m, const ManifoldPoint& x,
                                  const TangentVector& w, int n, bool pole,
                                  bool with_velocities) {
  MainGeodesic g;
  if (pole) {
    g.midpoints.reserve(n);
    for (int i = 0; i < n; ++i) {
      g.midpoints.push_back(m.exp(x, ((2.0 * i + 1.0) / (2.0 * n)) * w));
    }
  } else {
    g.points.reserve(n + 1);
    for (int i = 0; i <= n; ++i) g.points.push_back(m.exp(x, (double(i) / n) * w));
    if (with_velocities) {
      g.velocities.reserve(n + 1);
      for (int i = 0; i <= n; ++i) g.velocities.push_back(m.geodesic_velocity(x, w, double(i) / n));
    }
  }
  g.endpoint = m.exp(x, 1.0 * w);
  return g;
}

MainGeodesic main_geodesic_infinitesimal(const Manifold& m, const ManifoldPoint& x,
                                         const TangentVector& w, int n, bool pole,
                                         bool with_velocities, RkCallCounter* counter) {
  MainGeodesic g;
  double h = 1.0 / n;
  if (pole) {
    // Half step to the first midpoint, n-1 full steps between midpoints, and
    // a closing half step to the endpoint: n+1 integrator calls in total.
    GeodesicState s{m.point_to_chart(x), 0.5 * m.tangent_to_velocity(w)};
    s = geodesic_step(m, s, h, counter);
    s.velocity *= 2.0;
    g.midpoints.reserve(n);
    g.midpoints.push_back(m.chart_to_point(s.position));
    for (int i = 0; i + 1 < n; ++i) {
      s = geodesic_step(m, s, h, counter);
      g.midpoints.push_back(m.chart_to_point(s.position));
    }
    s.velocity *= 0.5;
    s = geodesic_step(m, s, h, counter);
    g.endpoint = m.chart_to_point(s.position);
  } else {
    GeodesicState s{m.point_to_chart(x), m.tangent_to_velocity(w)};
    g.points.reserve(n + 1);
    g.points.push_back(x);
    if (with_velocities) {
      g.velocities.reserve(n + 1);
      g.velocities.push_back(w);
    }
    for (int i = 0; i < n; ++i) {
      s = geodesic_step(m, s, h, counter);
      ManifoldPoint p = m.chart_to_point(s.position);
      g.points.push_back(p);
      if (with_velocities) g.velocities.push_back(m.velocity_to_tangent(p, s.velocity));
    }
    g.endpoint = g.points.back();
  }
  return g;
}

// One parallelogram against precomputed main-geodesic nodes; used by the
// averaged scheme where corners cannot be recycled between rungs.
TangentVector schild_rung(const RungMaps& maps, const ManifoldPoint& xi,
                          const ManifoldPoint& xnext, const TangentVector& v_scaled) {
  ManifoldPoint y = maps.exp(xi, v_scaled);
  TangentVector b = maps.log(y, xnext);
  ManifoldPoint mid = maps.exp(y, 0.5 * b);
  TangentVector a = maps.log(xi, mid);
  ManifoldPoint z = maps.exp(xi, 2.0 * a);
  return maps.log(xnext, z);
}

}  // namespace

TransportResult transport(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                          const TangentVector& v, const LadderConfig& config) {
  config.validate();
  require_base(x, w);
  require_base(x, v);
  const int n = config.rungs;
  const double h = 1.0 / n;
  const double scale = std::pow(double(n), config.alpha);
  const double vnorm = m.norm(v);
  const double wnorm = m.norm(w);
  if (wnorm > m.safe_radius() * (1.0 + 1e-12) || vnorm > m.safe_radius() * (1.0 + 1e-12)) {
    throw InvalidSpec("transport: tangent data exceeds the safe radius of " + m.name());
  }
  if (config.backend == Backend::ClosedForm && !m.has_closed_form_geodesics()) {
    throw InvalidSpec("transport: " + m.name() + " has no closed-form geodesics; use the infinitesimal backend");
  }

  auto t0 = std::chrono::steady_clock::now();
  RkCallCounter counter;
  const bool closed = config.backend == Backend::ClosedForm;
  const bool pole = config.scheme == Scheme::Pole;
  const bool fanning = config.scheme == Scheme::Fanning;

  MainGeodesic main =
      closed ? main_geodesic_closed(m, x, w, n, pole, fanning)
             : main_geodesic_infinitesimal(m, x, w, n, pole, fanning, &counter);
  RungMaps maps = closed ? closed_form_maps(m)
                         : infinitesimal_maps(m, h, config.tolerances, &counter);

  TransportResult result;
  result.endpoint = main.endpoint;

  switch (config.scheme) {
    case Scheme::Schild: {
      // The far corner of each parallelogram seeds the next rung, so only the
      // final log recovers the transported vector.
      ManifoldPoint y = maps.exp(x, (1.0 / scale) * v);
      for (int i = 0; i < n; ++i) {
        TangentVector b = maps.log(y, main.points[i + 1]);
        ManifoldPoint mid = maps.exp(y, 0.5 * b);
        TangentVector a = maps.log(main.points[i], mid);
        y = maps.exp(main.points[i], 2.0 * a);
        detail::check_rung_growth(scale * offset_estimate(m, main.points[i + 1], y),
                                  4.0 * vnorm + 1e-9, i);
      }
      TangentVector u = maps.log(main.endpoint, y);
      result.transported = scale * u;
      break;
    }
    case Scheme::Pole: {
      ManifoldPoint z = maps.exp(x, (1.0 / scale) * v);
      for (int i = 0; i < n; ++i) {
        TangentVector a = maps.log(main.midpoints[i], z);
        z = maps.exp(main.midpoints[i], -a);
        detail::check_rung_growth(offset_estimate(m, main.midpoints[i], z),
                                  4.0 * vnorm / scale + wnorm * h + 1e-12, i);
      }
      TangentVector u = maps.log(main.endpoint, z);
      double sign = (n % 2 == 0) ? 1.0 : -1.0;
      result.transported = sign * scale * u;
      break;
    }
    case Scheme::AveragedSchild: {
      TangentVector vcur = v;
      for (int i = 0; i < n; ++i) {
        TangentVector up =
            schild_rung(maps, main.points[i], main.points[i + 1], (1.0 / scale) * vcur);
        TangentVector um =
            schild_rung(maps, main.points[i], main.points[i + 1], (-1.0 / scale) * vcur);
        vcur = (0.5 * scale) * (up - um);
        detail::check_rung_growth(m.norm(vcur), 4.0 * vnorm + 1e-9, i);
      }
      result.transported = vcur;
      break;
    }
    case Scheme::Fanning: {
      // Central-difference Jacobi field from two perturbed geodesics;
      // epsilon = h = 1/n.
      TangentVector vcur = v;
      for (int i = 0; i < n; ++i) {
        const ManifoldPoint& xi = main.points[i];
        const ManifoldPoint& xnext = main.points[i + 1];
        const TangentVector& wi = main.velocities[i];
        ManifoldPoint plus, minus;
        if (closed) {
          plus = m.exp(xi, h * (wi + h * vcur));
          minus = m.exp(xi, h * (wi - h * vcur));
        } else {
          GeodesicState sp{m.point_to_chart(xi),
                           m.tangent_to_velocity(wi) + h * m.tangent_to_velocity(vcur)};
          GeodesicState sm{m.point_to_chart(xi),
                           m.tangent_to_velocity(wi) - h * m.tangent_to_velocity(vcur)};
          plus = m.chart_to_point(geodesic_step(m, sp, h, &counter).position);
          minus = m.chart_to_point(geodesic_step(m, sm, h, &counter).position);
        }
        Eigen::VectorXd delta = m.point_to_chart(plus) - m.point_to_chart(minus);
        vcur = (1.0 / (2.0 * h * h)) * m.chart_delta_to_tangent(xnext, delta);
        detail::check_rung_growth(m.norm(vcur), 4.0 * vnorm + 1e-9, i);
      }
      result.transported = vcur;
      break;
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  result.rk_calls = counter.calls;
  result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

TangentVector transport_reference(const Manifold& m, const ManifoldPoint& x,
                                  const TangentVector& w, const TangentVector& v,
                                  int n_ref) {
  if (m.has_closed_form_transport()) return m.transport(x, w, v, 1.0);
  LadderConfig cfg = LadderConfig::make(Scheme::Pole, n_ref > 0 ? n_ref : 1280,
                                        Backend::Infinitesimal);
  return transport(m, x, w, v, cfg).transported;
}

}  // namespace ladder
