#pragma once

#include <string>

#include "ladder/geometry.hpp"
#include "ladder/integrators.hpp"

namespace ladder {

enum class Scheme { Schild, Pole, AveragedSchild, Fanning };
enum class Backend { ClosedForm, Infinitesimal };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);
std::string backend_name(Backend b);
Backend parse_backend(const std::string& name);
double default_alpha(Scheme s);

struct LadderConfig {
  Scheme scheme = Scheme::Schild;
  int rungs = 1;               // number of parallelograms n
  double alpha = 2.0;          // scaling exponent in [1, 2]
  Backend backend = Backend::ClosedForm;
  ToleranceConfig tolerances{};

  static LadderConfig make(Scheme s, int n, Backend b = Backend::ClosedForm);
  void validate() const;
};

struct TransportResult {
  TangentVector transported;  // based at `endpoint`
  ManifoldPoint endpoint;
  long rk_calls = 0;
  double wall_time_s = 0.0;
};

// One geodesic parallelogram: transports v from x to exp_x(w) through the
// midpoint of the diagonal between exp_x(v) and exp_x(w).
TangentVector schild_step(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                          const TangentVector& v);

// One pole rung: reflects exp_x(v) through the midpoint exp_x(w/2) and reads
// the result from exp_x(w). Exact on locally symmetric spaces.
TangentVector pole_step(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                        const TangentVector& v);

// Average of Schild steps applied to v and -v; cancels the curvature term of
// a single rung.
TangentVector averaged_schild_step(const Manifold& m, const ManifoldPoint& x,
                                   const TangentVector& w, const TangentVector& v);

// Finite-difference Jacobi field from two perturbed geodesics: approximates
// the transport of v over parameter step h along the geodesic with velocity w.
TangentVector fanning_step(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                           const TangentVector& v, double h, double eps);

// Iterate the selected elementary construction n times with the scaled
// sequence v_{i+1} = n^alpha * step(x_i, w_i/n, v_i/n^alpha).
TransportResult transport(const Manifold& m, const ManifoldPoint& x, const TangentVector& w,
                          const TangentVector& v, const LadderConfig& config);

// Closed-form transport where available; otherwise the infinitesimal pole
// ladder with n_ref rungs (callers pass 4x their largest experimental n).
TangentVector transport_reference(const Manifold& m, const ManifoldPoint& x,
                                  const TangentVector& w, const TangentVector& v,
                                  int n_ref = 1280);

namespace detail {
// Runaway guard shared by the ladder iterations: aborts once the running
// vector estimate exceeds 4x the input norm (plus the main-geodesic offset
// allowance for corner-based estimates).
void check_rung_growth(double estimate, double budget, int rung);
}  // namespace detail

}  // namespace ladder
