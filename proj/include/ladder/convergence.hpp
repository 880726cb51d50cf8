#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ladder/ladders.hpp"

namespace ladder {

struct ExperimentSpec {
  std::string manifold = "sphere";  // sphere | spd | se3
  double beta = 1.0;                // se3 anisotropy
  Scheme scheme = Scheme::Schild;
  double alpha = 2.0;
  Backend backend = Backend::ClosedForm;
  std::vector<int> n_grid = {5, 10, 20, 40, 80, 160, 320};
  // Initial tangent data. Empty means the manifold's default orthonormal
  // pair; otherwise manifold-specific coefficients (ambient 3-vector for the
  // sphere, 9 symmetric-matrix coords for spd, 6 algebra coords for se3).
  Eigen::VectorXd v_coeffs;
  Eigen::VectorXd w_coeffs;
  unsigned long long seed = 0;  // nonzero: random orthonormal pair instead

  void validate() const;
};

struct ConvergenceRow {
  int n = 0;
  double abs_error = 0.0;
  double long_error = 0.0;
  long rk_calls = 0;
  double wall_time_s = 0.0;
  std::string failure;  // empty on success
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct ConvergenceReport {
  ExperimentSpec spec;
  std::vector<ConvergenceRow> rows;
  LogLogFit abs_fit;    // log(abs_error) against log(n)
  LinearFit long_fit;   // long_error against n^(-alpha)
};

// Projection of the transport error onto the endpoint main velocity.
double longitudinal_error(const Manifold& m, const TangentVector& v_n,
                          const TangentVector& ref, const TangentVector& w_n);

// Ordinary least squares on (log x, log y).
LogLogFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);
// Plain ordinary least squares.
LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);

std::unique_ptr<Manifold> make_manifold(const ExperimentSpec& spec);

struct ExperimentData {
  ManifoldPoint x;
  TangentVector v;
  TangentVector w;
};

ExperimentData initial_data(const Manifold& m, const ExperimentSpec& spec);

// Move a tangent vector to a nearby base point by preserving its velocity
// coordinates (left translation on SE(3), re-projection elsewhere).
TangentVector rebase(const Manifold& m, const TangentVector& t, const ManifoldPoint& base);

ConvergenceReport run_experiment(const ExperimentSpec& spec);

std::string report_to_csv(const ConvergenceReport& report);
std::string report_to_json(const ConvergenceReport& report);
ConvergenceReport parse_report_csv(const std::string& text);
ConvergenceReport parse_report_json(const std::string& text);
void emit_report(const ConvergenceReport& report, const std::string& path,
                 const std::string& format);

}  // namespace ladder
