#include "ladder/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ladder/se3.hpp"
#include "ladder/spd.hpp"
#include "ladder/sphere.hpp"

namespace ladder {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Fits drop the two smallest n values (pre-asymptotic transients) as long as
// at least three points remain.
std::vector<const ConvergenceRow*> fit_rows(const ConvergenceReport& report) {
  std::vector<const ConvergenceRow*> rows;
  for (const auto& r : report.rows) {
    if (r.failure.empty()) rows.push_back(&r);
  }
  std::sort(rows.begin(), rows.end(),
            [](const ConvergenceRow* a, const ConvergenceRow* b) { return a->n < b->n; });
  int drop = std::min<int>(2, std::max<int>(0, int(rows.size()) - 3));
  rows.erase(rows.begin(), rows.begin() + drop);
  return rows;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (manifold != "sphere" && manifold != "spd" && manifold != "se3") {
    throw InvalidSpec("unknown manifold: " + manifold);
  }
  if (manifold == "se3" && !(beta > 0.0)) throw NonPositiveBeta("se3 requires beta > 0");
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw InvalidSpec("alpha must be in [1, 2]");
  if (n_grid.empty()) throw InvalidSpec("n_grid must not be empty");
  int prev = 1;
  for (int n : n_grid) {
    if (n < 2) throw InvalidSpec("n_grid entries must be >= 2");
    if (n <= prev) throw InvalidSpec("n_grid must be strictly increasing");
    prev = n;
  }
}

double longitudinal_error(const Manifold& m, const TangentVector& v_n,
                          const TangentVector& ref, const TangentVector& w_n) {
  require_same_base(v_n, ref);
  require_same_base(v_n, w_n);
  return m.inner(v_n.base, v_n - ref, w_n);
}

LogLogFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) {
    throw DegenerateFit("fit_slope needs at least 3 points");
  }
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw DegenerateFit("fit_slope needs strictly positive data");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  LinearFit lin = fit_linear(lx, ly);
  return LogLogFit{lin.slope, lin.intercept, lin.r_squared};
}

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DegenerateFit("fit_linear needs at least 2 points");
  }
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DegenerateFit("fit_linear: all abscissae are equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  fit.r_squared = (syy == 0.0) ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return fit;
}

std::unique_ptr<Manifold> make_manifold(const ExperimentSpec& spec) {
  if (spec.manifold == "sphere") return std::make_unique<Sphere>();
  if (spec.manifold == "spd") return std::make_unique<Spd>();
  if (spec.manifold == "se3") return std::make_unique<Se3>(spec.beta);
  throw InvalidSpec("unknown manifold: " + spec.manifold);
}

namespace {

ExperimentData default_data(const Manifold& m, const ExperimentSpec& spec) {
  ExperimentData d;
  if (spec.manifold == "sphere") {
    d.x = Sphere::point(1, 0, 0);
    d.w = Sphere::tangent(d.x, 0, 1, 0);
    d.v = Sphere::tangent(d.x, 0, 0, 1);
    return d;
  }
  if (spec.manifold == "spd") {
    d.x = Spd::point(Eigen::Matrix3d::Identity());
    Eigen::Matrix3d wm = Eigen::Matrix3d::Zero();
    wm(0, 0) = 1.0 / std::sqrt(2.0);
    wm(1, 1) = -1.0 / std::sqrt(2.0);
    Eigen::Matrix3d vm = Eigen::Matrix3d::Zero();
    vm(0, 1) = vm(1, 0) = 1.0 / std::sqrt(2.0);
    d.w = Spd::tangent(d.x, wm);
    d.v = Spd::tangent(d.x, vm);
    return d;
  }
  const auto& se3 = dynamic_cast<const Se3&>(m);
  d.x = Se3::identity();
  // Basis pair with a non-vanishing covariant curvature derivative along the
  // main direction whenever beta != 1; unchanged across beta values.
  d.w = se3.basis_tangent(d.x, 2);  // e3
  d.v = se3.basis_tangent(d.x, 3);  // e4
  return d;
}

ExperimentData random_data(const Manifold& m, const ExperimentSpec& spec) {
  ExperimentData d = default_data(m, spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_velocity = [&]() {
    Eigen::VectorXd vel(m.velocity_size());
    for (int i = 0; i < vel.size(); ++i) vel(i) = gauss(rng);
    return vel;
  };
  TangentVector w = m.velocity_to_tangent(d.x, random_velocity());
  w = (1.0 / m.norm(w)) * w;
  TangentVector v = m.velocity_to_tangent(d.x, random_velocity());
  v = v - m.inner(d.x, v, w) * w;
  v = (1.0 / m.norm(v)) * v;
  d.w = w;
  d.v = v;
  return d;
}

}  // namespace

ExperimentData initial_data(const Manifold& m, const ExperimentSpec& spec) {
  if (spec.v_coeffs.size() == 0 && spec.w_coeffs.size() == 0) {
    return spec.seed != 0 ? random_data(m, spec) : default_data(m, spec);
  }
  if (spec.v_coeffs.size() == 0 || spec.w_coeffs.size() == 0) {
    throw InvalidSpec("either provide both v and w coefficients, or neither");
  }
  ExperimentData d = default_data(m, spec);
  if (spec.manifold == "se3") {
    if (spec.v_coeffs.size() != 6 || spec.w_coeffs.size() != 6) {
      throw InvalidSpec("se3 tangent data takes 6 algebra coefficients");
    }
    d.v = m.velocity_to_tangent(d.x, spec.v_coeffs);
    d.w = m.velocity_to_tangent(d.x, spec.w_coeffs);
    return d;
  }
  if (spec.v_coeffs.size() != m.ambient_size() || spec.w_coeffs.size() != m.ambient_size()) {
    throw InvalidSpec(spec.manifold + " tangent data takes " +
                      std::to_string(m.ambient_size()) + " ambient coefficients");
  }
  d.v = make_tangent(d.x, m.project_tangent(d.x, spec.v_coeffs));
  d.w = make_tangent(d.x, m.project_tangent(d.x, spec.w_coeffs));
  return d;
}

TangentVector rebase(const Manifold& m, const TangentVector& t, const ManifoldPoint& base) {
  return m.velocity_to_tangent(base, m.tangent_to_velocity(t));
}

namespace {

int n_grid_max(const ExperimentSpec& spec) {
  return *std::max_element(spec.n_grid.begin(), spec.n_grid.end());
}

}  // namespace

ConvergenceReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::unique_ptr<Manifold> m = make_manifold(spec);
  ExperimentData data = initial_data(*m, spec);
  if (m->norm(data.v) > m->safe_radius() || m->norm(data.w) > m->safe_radius()) {
    throw InvalidSpec("experiment tangent data exceeds the safe radius");
  }
  const int n_max = n_grid_max(spec);

  // Reference transport, endpoint and endpoint velocity of the main geodesic.
  ManifoldPoint endpoint;
  TangentVector ref = transport_reference(*m, data.x, data.w, data.v, 4 * n_max);
  TangentVector w_end = data.w;
  if (m->has_closed_form_transport()) {
    endpoint = m->exp(data.x, data.w);
    w_end = m->geodesic_velocity(data.x, data.w, 1.0);
  } else {
    RkCallCounter counter;
    auto end = integrate_geodesic(*m, data.x, data.w, 1.0,
                                  std::max(512, 4 * n_max), &counter);
    endpoint = end.first;
    w_end = end.second;
  }
  ref = rebase(*m, ref, endpoint);
  w_end = rebase(*m, w_end, endpoint);

  ConvergenceReport report;
  report.spec = spec;
  for (int n : spec.n_grid) {
    ConvergenceRow row;
    row.n = n;
    try {
      LadderConfig cfg = LadderConfig::make(spec.scheme, n, spec.backend);
      cfg.alpha = spec.alpha;
      TransportResult res = transport(*m, data.x, data.w, data.v, cfg);
      TangentVector vn = rebase(*m, res.transported, endpoint);
      row.abs_error = m->norm(vn - ref);
      row.long_error = longitudinal_error(*m, vn, ref, w_end);
      row.rk_calls = res.rk_calls;
      row.wall_time_s = res.wall_time_s;
    } catch (const GeometryError& err) {
      row.failure = err.what();
    }
    report.rows.push_back(row);
  }

  auto rows = fit_rows(report);
  std::vector<double> ns, abs_errs, inv_na, longs;
  for (const auto* r : rows) {
    if (r->abs_error > 0.0) {
      ns.push_back(double(r->n));
      abs_errs.push_back(r->abs_error);
    }
    inv_na.push_back(std::pow(double(r->n), -spec.alpha));
    longs.push_back(r->long_error);
  }
  try {
    report.abs_fit = fit_slope(ns, abs_errs);
  } catch (const DegenerateFit&) {
    report.abs_fit = LogLogFit{};
  }
  try {
    report.long_fit = fit_linear(inv_na, longs);
  } catch (const DegenerateFit&) {
    report.long_fit = LinearFit{};
  }
  return report;
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "scheme,manifold,beta,alpha,backend,n,abs_error,long_error,rk_calls,wall_time_s\n";
  for (const auto& r : report.rows) {
    out << scheme_name(report.spec.scheme) << ',' << report.spec.manifold << ','
        << fmt_double(report.spec.beta) << ',' << fmt_double(report.spec.alpha) << ','
        << backend_name(report.spec.backend) << ',' << r.n << ','
        << fmt_double(r.abs_error) << ',' << fmt_double(r.long_error) << ','
        << r.rk_calls << ',' << fmt_double(r.wall_time_s) << '\n';
  }
  return out.str();
}

std::string report_to_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["spec"] = {
      {"manifold", report.spec.manifold},
      {"beta", report.spec.beta},
      {"scheme", scheme_name(report.spec.scheme)},
      {"alpha", report.spec.alpha},
      {"backend", backend_name(report.spec.backend)},
      {"n_grid", report.spec.n_grid},
      {"seed", report.spec.seed},
  };
  if (report.spec.v_coeffs.size() > 0) {
    j["spec"]["v_coeffs"] = std::vector<double>(
        report.spec.v_coeffs.data(), report.spec.v_coeffs.data() + report.spec.v_coeffs.size());
    j["spec"]["w_coeffs"] = std::vector<double>(
        report.spec.w_coeffs.data(), report.spec.w_coeffs.data() + report.spec.w_coeffs.size());
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row = {
        {"scheme", scheme_name(report.spec.scheme)},
        {"manifold", report.spec.manifold},
        {"beta", report.spec.beta},
        {"alpha", report.spec.alpha},
        {"backend", backend_name(report.spec.backend)},
        {"n", r.n},
        {"abs_error", r.abs_error},
        {"long_error", r.long_error},
        {"rk_calls", r.rk_calls},
        {"wall_time_s", r.wall_time_s},
    };
    if (!r.failure.empty()) row["failure"] = r.failure;
    j["rows"].push_back(row);
  }
  j["fit"] = {
      {"slope", report.abs_fit.slope},
      {"intercept", report.abs_fit.intercept},
      {"r_squared", report.abs_fit.r_squared},
      {"long_coef", report.long_fit.slope},
  };
  return j.dump(2) + "\n";
}

ConvergenceReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidSpec("empty CSV report");
  ConvergenceReport report;
  bool spec_set = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 10) throw InvalidSpec("malformed CSV row: " + line);
    if (!spec_set) {
      report.spec.scheme = parse_scheme(fields[0]);
      report.spec.manifold = fields[1];
      report.spec.beta = std::stod(fields[2]);
      report.spec.alpha = std::stod(fields[3]);
      report.spec.backend = parse_backend(fields[4]);
      report.spec.n_grid.clear();
      spec_set = true;
    }
    ConvergenceRow row;
    row.n = std::stoi(fields[5]);
    row.abs_error = std::stod(fields[6]);
    row.long_error = std::stod(fields[7]);
    row.rk_calls = std::stol(fields[8]);
    row.wall_time_s = std::stod(fields[9]);
    report.spec.n_grid.push_back(row.n);
    report.rows.push_back(row);
  }
  return report;
}

ConvergenceReport parse_report_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ConvergenceReport report;
  const auto& spec = j.at("spec");
  report.spec.manifold = spec.at("manifold").get<std::string>();
  report.spec.beta = spec.at("beta").get<double>();
  report.spec.scheme = parse_scheme(spec.at("scheme").get<std::string>());
  report.spec.alpha = spec.at("alpha").get<double>();
  report.spec.backend = parse_backend(spec.at("backend").get<std::string>());
  report.spec.n_grid = spec.at("n_grid").get<std::vector<int>>();
  report.spec.seed = spec.at("seed").get<unsigned long long>();
  if (spec.contains("v_coeffs")) {
    auto v = spec.at("v_coeffs").get<std::vector<double>>();
    auto w = spec.at("w_coeffs").get<std::vector<double>>();
    report.spec.v_coeffs = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
    report.spec.w_coeffs = Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
  }
  for (const auto& row : j.at("rows")) {
    ConvergenceRow r;
    r.n = row.at("n").get<int>();
    r.abs_error = row.at("abs_error").get<double>();
    r.long_error = row.at("long_error").get<double>();
    r.rk_calls = row.at("rk_calls").get<long>();
    r.wall_time_s = row.at("wall_time_s").get<double>();
    if (row.contains("failure")) r.failure = row.at("failure").get<std::string>();
    report.rows.push_back(r);
  }
  const auto& fit = j.at("fit");
  report.abs_fit.slope = fit.at("slope").get<double>();
  report.abs_fit.intercept = fit.at("intercept").get<double>();
  report.abs_fit.r_squared = fit.at("r_squared").get<double>();
  report.long_fit.slope = fit.at("long_coef").get<double>();
  return report;
}

void emit_report(const ConvergenceReport& report, const std::string& path,
                 const std::string& format) {
  std::string body;
  if (format == "csv") {
    body = report_to_csv(report);
  } else if (format == "json") {
    body = report_to_json(report);
  } else {
    throw InvalidSpec("unknown report format: " + format);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw GeometryError("cannot open for writing: " + path);
  out << body;
  if (!out.good()) throw GeometryError("write failed: " + path);
}

}  // namespace ladder
