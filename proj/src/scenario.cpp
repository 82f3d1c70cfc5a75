#include "l2hodge/scenario.hpp"

#include "l2hodge/ends.hpp"
#include "l2hodge/error.hpp"
#include "l2hodge/hodge.hpp"
#include "l2hodge/warped.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <regex>
#include <set>

namespace l2hodge {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

enum class ParamType { Int, Real, IntList, RealList, Text };

struct ParamSpec {
  std::string name;
  ParamType type;
  json fallback;
  double lo = -kInf;
  double hi = kInf;
  std::vector<std::string> choices = {};
};

struct KindSpec {
  std::string kind;
  std::vector<ParamSpec> params;
  std::function<bool(const json&)> needs_seed;
  std::function<ScenarioResult(const ScenarioConfig&)> run;
};

const std::vector<KindSpec>& kind_table();

const KindSpec& find_kind(const std::string& kind) {
  for (const auto& k : kind_table()) {
    if (k.kind == kind) return k;
  }
  config_error("unknown kind '" + kind + "'");
}

void check_range(const ParamSpec& spec, double v) {
  if (!std::isfinite(v) || v < spec.lo || v > spec.hi) {
    config_error("parameter '" + spec.name + "' = " + json(v).dump() + " outside [" + json(spec.lo).dump() + ", " +
                 json(spec.hi).dump() + "]");
  }
}

json validate_param(const ParamSpec& spec, const json& value) {
  const auto scalar = [&](const json& v) {
    if (spec.type == ParamType::Int || spec.type == ParamType::IntList) {
      if (!v.is_number_integer()) config_error("parameter '" + spec.name + "' expects integers");
      check_range(spec, static_cast<double>(v.get<long long>()));
      return json(v.get<long long>());
    }
    if (!v.is_number()) config_error("parameter '" + spec.name + "' expects numbers");
    check_range(spec, v.get<double>());
    return json(v.get<double>());
  };
  switch (spec.type) {
    case ParamType::Int:
    case ParamType::Real:
      return scalar(value);
    case ParamType::IntList:
    case ParamType::RealList: {
      if (!value.is_array()) config_error("parameter '" + spec.name + "' expects a list");
      json out = json::array();
      for (const auto& v : value) out.push_back(scalar(v));
      return out;
    }
    case ParamType::Text:
      if (!value.is_string()) config_error("parameter '" + spec.name + "' expects a string");
      if (std::find(spec.choices.begin(), spec.choices.end(), value.get<std::string>()) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        config_error("parameter '" + spec.name + "' must be one of " + allowed);
      }
      return value;
  }
  return value;
}

// Typed access to validated parameters.
struct Params {
  const json& p;
  int i(const char* key) const { return p.at(key).get<int>(); }
  double d(const char* key) const { return p.at(key).get<double>(); }
  std::string s(const char* key) const { return p.at(key).get<std::string>(); }
  std::vector<double> v(const char* key) const { return p.at(key).get<std::vector<double>>(); }
  std::vector<int> vi(const char* key) const { return p.at(key).get<std::vector<int>>(); }
};

Report start(const ScenarioConfig& c) {
  Report r;
  r.scenario = c.name;
  r.kind = c.kind;
  r.params = c.params;
  if (c.seed) r.params["seed"] = *c.seed;
  return r;
}

void at_most(Report& r, const std::string& name, double actual, double bound) {
  r.add(name, {{"<=", bound}}, actual, bound, actual <= bound);
}

void at_least(Report& r, const std::string& name, double actual, double bound) {
  r.add(name, {{">=", bound}}, actual, bound, actual >= bound);
}

void equal_count(Report& r, const std::string& name, long long actual, long long expected) {
  r.add(name, expected, actual, 0, actual == expected);
}

void relative_within(Report& r, const std::string& name, double actual, double exact, double tol) {
  const double err = std::abs(actual - exact) / std::abs(exact);
  r.add(name, exact, actual, tol, err <= tol);
}

std::uint64_t seed_of(const ScenarioConfig& c) { return c.seed.value_or(0); }

VectorXd gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng);
  return v;
}

long long d1d0_nonzeros(const SimplicialComplex& c) {
  const IntSparse prod = c.coboundary(1) * c.coboundary(0);
  long long nz = 0;
  for (int k = 0; k < prod.outerSize(); ++k) {
    for (IntSparse::InnerIterator it(prod, k); it; ++it) nz += it.value() != 0 ? 1 : 0;
  }
  return nz;
}

std::string degree_name(const char* stem, int k) { return std::string(stem) + "_" + std::to_string(k); }

void harmonic_checks(Report& r, DataSeries& spectrum, const SimplicialComplex& c, const OperatorBundle& b,
                     BoundaryCondition bc, const BettiReport& betti_oracle, double gap_min, const std::string& prefix) {
  TolPolicy policy;
  policy.gap_threshold = gap_min;
  policy.throw_on_ambiguous = false;
  for (int k = 0; k <= 2; ++k) {
    const auto h = harmonic_basis(c, b, k, bc, policy);
    const auto ku = static_cast<std::size_t>(k);
    equal_count(r, prefix + degree_name("dim", k), static_cast<long long>(h.dimension()), betti_oracle.b[ku]);
    at_least(r, prefix + degree_name("gap", k), h.gap_certificate, gap_min);
    for (Eigen::Index j = 0; j < h.eigenvalues.size(); ++j) {
      spectrum.rows.push_back({static_cast<double>(bc == BoundaryCondition::Relative), static_cast<double>(k),
                               static_cast<double>(j), h.eigenvalues[j]});
    }
  }
}

ScenarioResult run_hodge_closed(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const int genus = p.i("genus");
  const auto s = gen_closed_surface(genus, p.i("refinement"));
  const auto metric = metric_from_embedding(s.complex, s.positions);
  const auto bundle = mass_matrices(s.complex, metric);
  at_least(r, "triangles", static_cast<double>(s.complex.triangle_count()), p.d("min_triangles"));
  equal_count(r, "d1d0_nonzeros", d1d0_nonzeros(s.complex), 0);
  const auto oracle = betti(s.complex, false);
  equal_count(r, "betti_0", oracle.b[0], 1);
  equal_count(r, "betti_1", oracle.b[1], 2LL * genus);
  equal_count(r, "betti_2", oracle.b[2], 1);
  DataSeries spectrum{"spectrum", {"relative", "degree", "index", "eigenvalue"}, {}};
  harmonic_checks(r, spectrum, s.complex, bundle, BoundaryCondition::None, oracle, p.d("gap_min"), "");
  out.series.push_back(std::move(spectrum));

  const int samples = p.i("decompositions");
  if (samples > 0) {
    double residual = 0.0;
    double orthogonality = 0.0;
    double defect = 0.0;
    const int k = p.i("decomposition_degree");
    for (int i = 0; i < samples; ++i) {
      const VectorXd w = gaussian(s.complex.count(k), seed_of(c) + static_cast<std::uint64_t>(i));
      const auto d = hodge_decompose(s.complex, bundle, w, k, BoundaryCondition::None);
      residual = std::max(residual, d.residual);
      orthogonality = std::max(orthogonality, d.orthogonality);
      defect = std::max(defect, d.coclosed_defect);
    }
    at_most(r, "decomposition_residual", residual, p.d("decomposition_tol"));
    at_most(r, "decomposition_orthogonality", orthogonality, p.d("decomposition_tol"));
    at_most(r, "decomposition_coclosed_defect", defect, p.d("decomposition_tol"));
  }
  return out;
}

ScenarioResult run_hodge_boundary(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const std::string shape = p.s("shape");
  SimplicialComplex complex;
  Vertices positions;
  if (shape == "annulus") {
    auto m = gen_annulus(p.i("radial"), p.i("angular"), 1.0, 2.0);
    complex = std::move(m.complex);
    positions = std::move(m.positions);
  } else if (shape == "disk") {
    auto m = gen_disk(p.i("radial"), p.i("angular"), 1.0);
    complex = std::move(m.complex);
    positions = std::move(m.positions);
  } else {
    auto m = gen_pants(p.i("refinement"));
    complex = std::move(m.complex);
    positions = std::move(m.positions);
  }
  const auto bundle = mass_matrices(complex, metric_from_embedding(complex, positions));
  equal_count(r, "d1d0_nonzeros", d1d0_nonzeros(complex), 0);
  DataSeries spectrum{"spectrum", {"relative", "degree", "index", "eigenvalue"}, {}};
  harmonic_checks(r, spectrum, complex, bundle, BoundaryCondition::Absolute, betti(complex, false), p.d("gap_min"),
                  "absolute_");
  harmonic_checks(r, spectrum, complex, bundle, BoundaryCondition::Relative, betti(complex, true), p.d("gap_min"),
                  "relative_");
  out.series.push_back(std::move(spectrum));
  return out;
}

ScenarioResult run_conformal(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const auto s = gen_closed_surface(1, p.i("refinement"));
  const auto metric = metric_from_embedding(s.complex, s.positions);
  const auto bundle = mass_matrices(s.complex, metric);
  const auto h0 = harmonic_basis(s.complex, bundle, 1, BoundaryCondition::None);
  std::mt19937_64 rng(seed_of(c));
  std::uniform_real_distribution<double> uniform(-p.d("amplitude"), p.d("amplitude"));
  double m1_diff = 0.0;
  double distance = 0.0;
  DataSeries series{"rescalings", {"trial", "m1_relative_difference", "projector_distance"}, {}};
  for (int t = 0; t < p.i("rescalings"); ++t) {
    std::vector<double> u(s.complex.triangle_count());
    for (double& x : u) x = uniform(rng);
    const auto b = mass_matrices(s.complex, conformal_rescale(metric, u));
    const double diff = ((b.m1 - bundle.m1).cwiseAbs().array() / bundle.m1.cwiseAbs().array()).maxCoeff();
    const auto h = harmonic_basis(s.complex, b, 1, BoundaryCondition::None);
    const double dist = subspace_distance(h0.vectors, h.vectors, bundle.m1);
    m1_diff = std::max(m1_diff, diff);
    distance = std::max(distance, dist);
    series.rows.push_back({static_cast<double>(t), diff, dist});
  }
  at_most(r, "m1_relative_difference", m1_diff, p.d("m1_tol"));
  at_most(r, "projector_distance", distance, p.d("projector_tol"));
  out.series.push_back(std::move(series));
  return out;
}

ScenarioResult run_cutoff(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const double r_in = std::ldexp(1.0, -p.i("inner_octaves"));
  const double ds = std::log(2.0) / p.d("rings_per_octave");
  const int n_radial = static_cast<int>(std::lround(std::log(1.0 / r_in) / ds));
  const auto mesh = gen_annulus(n_radial, p.i("angular"), r_in, 1.0, {RadialSpacing::Geometric, true});
  const auto metric = metric_from_embedding(mesh.complex, mesh.positions);
  DataSeries series{"energy", {"n", "energy", "target"}, {}};
  double previous = kInf;
  bool decreasing = true;
  double rings = 0.0;
  for (double n : p.v("n_values")) {
    const auto e = cutoff_energy(mesh.complex, mesh.positions, metric, Eigen::Vector2d::Zero(), n);
    relative_within(r, "energy_n" + json(n).dump(), e.energy, 2 * kPi / std::log(n), p.d("tol"));
    decreasing = decreasing && e.energy < previous;
    previous = e.energy;
    rings = e.rings_per_decade;
    series.rows.push_back({n, e.energy, e.target});
  }
  at_least(r, "rings_per_decade", rings, p.d("min_rings_per_decade"));
  r.add("strictly_decreasing", true, decreasing, nullptr, decreasing);
  out.series.push_back(std::move(series));
  return out;
}

std::vector<double> doubling_to(double first, double last) {
  std::vector<double> out;
  for (double x = first; x <= last * (1 + 1e-12); x *= 2) out.push_back(x);
  return out;
}

ScenarioResult run_ends(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const double tol = p.d("tol");
  auto check_radii = p.v("check_radii");
  std::sort(check_radii.begin(), check_radii.end());

  const double outer = p.d("flat_outer");
  if (check_radii.back() > outer) config_error("check_radii exceed flat_outer");
  const int layers = static_cast<int>(std::lround(std::log(outer) / (std::log(2.0) / p.d("flat_rings_per_octave"))));
  const auto mesh = gen_annulus(layers, p.i("flat_angular"), 1.0, outer, {RadialSpacing::Geometric, true});
  const auto bundle = mass_matrices(mesh.complex, metric_from_embedding(mesh.complex, mesh.positions));
  const auto graph = energy_graph(mesh.complex, bundle, mesh.radius);
  std::vector<std::size_t> end(mesh.complex.vertex_count());
  std::vector<std::size_t> inner;
  for (std::size_t v = 0; v < end.size(); ++v) {
    end[v] = v;
    if (mesh.radius[v] < 1.0 + 1e-9) inner.push_back(v);
  }
  const auto flat = capacity(graph, end, inner, check_radii);
  for (std::size_t i = 0; i < check_radii.size(); ++i) {
    relative_within(r, "flat_capacity_R" + json(check_radii[i]).dump(), flat.capacities[i],
                    2 * kPi / std::log(check_radii[i]), tol);
  }
  const auto flat_curve = capacity(graph, end, inner, doubling_to(2.0, outer));
  const auto flat_class = classify_parabolic(flat_curve);
  r.add("flat_class", to_string(EndClass::Parabolic), to_string(flat_class.cls), nullptr,
        flat_class.cls == EndClass::Parabolic);
  DataSeries flat_series{"flat_capacity", {"R", "capacity", "exact"}, {}};
  for (std::size_t i = 0; i < flat_curve.radii.size(); ++i) {
    flat_series.rows.push_back({flat_curve.radii[i], flat_curve.capacities[i], 2 * kPi / std::log(flat_curve.radii[i])});
  }

  const double router = p.d("radial_outer");
  const auto nodes = uniform_nodes(1.0, router, static_cast<std::size_t>(p.i("radial_cells")));
  const auto rg = radial_graph(nodes, [](double x) { return 4 * kPi * x * x; });
  std::vector<std::size_t> rend(nodes.size());
  for (std::size_t v = 0; v < rend.size(); ++v) rend[v] = v;
  const std::vector<std::size_t> rinner{0};
  const auto radial_curve = capacity(rg, rend, rinner, doubling_to(2.0, router));
  DataSeries radial_series{"radial_capacity", {"R", "capacity", "exact"}, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < radial_curve.radii.size(); ++i) {
    const double R = radial_curve.radii[i];
    const double exact = 4 * kPi / (1 - 1 / R);
    worst = std::max(worst, std::abs(radial_curve.capacities[i] - exact) / exact);
    radial_series.rows.push_back({R, radial_curve.capacities[i], exact});
  }
  at_most(r, "radial_capacity_relative_error", worst, tol);
  const auto radial_class = classify_parabolic(radial_curve);
  r.add("radial_class", to_string(EndClass::NonParabolic), to_string(radial_class.cls), nullptr,
        radial_class.cls == EndClass::NonParabolic);
  out.series.push_back(std::move(flat_series));
  out.series.push_back(std::move(radial_series));
  return out;
}

struct Line {
  EnergyGraph graph;
  std::vector<int> side;
  std::vector<double> nodes;
};

Line symmetric_line(double half_length, std::size_t cells, const std::function<double(double)>& w) {
  Line l;
  l.nodes = uniform_nodes(-half_length, half_length, cells);
  l.graph = radial_graph(l.nodes, w);
  for (std::size_t i = 0; i < l.nodes.size(); ++i) {
    l.graph.radius[i] = std::abs(l.nodes[i]);
    l.side.push_back(l.nodes[i] > 1.0 ? 1 : (l.nodes[i] < -1.0 ? -1 : 0));
  }
  return l;
}

DataSeries exhaustion_series(const std::string& name, const HarmonicFunctionReport& rep) {
  DataSeries s{name, {"R", "energy", "core_oscillation"}, {}};
  for (std::size_t i = 0; i < rep.radii.size(); ++i) s.rows.push_back({rep.radii[i], rep.energies[i], rep.core_oscillation[i]});
  return s;
}

ScenarioResult run_li_tam(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  LiTamOptions opt;
  opt.throw_nonconvergent = false;

  const double half3 = p.d("threed_half_length");
  const Line l3 = symmetric_line(half3, static_cast<std::size_t>(p.i("threed_cells")), [](double t) {
    const double a = std::max(1.0, std::abs(t));
    return 4 * kPi * a * a;
  });
  LiTamOptions opt3 = opt;
  opt3.core_radius = p.d("threed_core_radius");
  const auto rep3 = li_tam_harmonic(l3.graph, l3.side, p.v("threed_radii"), opt3);
  at_least(r, "threed_oscillation", rep3.oscillation, p.d("oscillation_min"));
  at_most(r, "threed_laplacian_residual", rep3.laplacian_residual, p.d("residual_max"));
  r.add("threed_max_principle", true, rep3.max_principle, nullptr, rep3.max_principle);

  const Line lc = symmetric_line(p.d("cosh_half_length"), static_cast<std::size_t>(p.i("cosh_cells")),
                                 [](double t) { return std::cosh(t) * std::cosh(t); });
  const auto repc = li_tam_harmonic(lc.graph, lc.side, p.v("cosh_radii"), opt);
  double err = 0.0;
  for (std::size_t i = 0; i < lc.nodes.size(); ++i) {
    err = std::max(err, std::abs(repc.values[static_cast<Eigen::Index>(i)] - std::tanh(lc.nodes[i])));
  }
  at_most(r, "cosh_tanh_sup_error", err, p.d("tanh_tol"));
  r.add("cosh_energies_monotone", true, repc.energies_monotone, nullptr, repc.energies_monotone);

  const Line ls = symmetric_line(p.d("sigma_half_length"), static_cast<std::size_t>(p.i("sigma_cells")),
                                 [](double t) { return std::exp(t); });
  const auto reps = li_tam_harmonic(ls.graph, ls.side, p.v("sigma_radii"), opt);
  at_most(r, "sigma_oscillation", reps.oscillation, p.d("sigma_oscillation_max"));

  out.series.push_back(exhaustion_series("threed", rep3));
  out.series.push_back(exhaustion_series("cosh", repc));
  out.series.push_back(exhaustion_series("sigma", reps));
  return out;
}

ScenarioResult run_lambda0(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  auto lengths = p.v("lengths");
  std::sort(lengths.begin(), lengths.end());
  DataSeries series{"lambda0", {"L", "lambda0"}, {}};
  double previous = kInf;
  bool monotone = true;
  double lowest = kInf;
  double last = 0.0;
  for (double L : lengths) {
    const double lambda = mode_lambda0(mode_problem(2, 0, L, p.d("dr"), p.v("modes")));
    monotone = monotone && lambda <= previous;
    previous = lambda;
    lowest = std::min(lowest, lambda);
    last = lambda;
    series.rows.push_back({L, lambda});
  }
  const auto band = p.v("band");
  if (band.size() != 2 || band[0] > band[1]) config_error("band must be [lo, hi]");
  r.add("band_at_largest_L", band, last, nullptr, last >= band[0] && last <= band[1]);
  at_least(r, "floor", lowest, p.d("floor"));
  r.add("non_increasing", true, monotone, nullptr, monotone);
  out.series.push_back(std::move(series));
  return out;
}

void inequality_checks(Report& r, const InequalityReport& rep, double constant, double margin_floor) {
  r.add("constant", constant, rep.constant, 1e-12, std::abs(rep.constant - constant) <= 1e-12);
  equal_count(r, "samples", static_cast<long long>(rep.samples), r.params.at("samples").get<long long>());
  equal_count(r, "violations", static_cast<long long>(rep.violations), 0);
  at_least(r, "worst_margin", rep.worst_margin, margin_floor);
}

ScenarioResult run_warped_gap(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  const int n = p.i("n");
  const int k = p.i("k");
  const auto problem = mode_problem(n, k, p.d("length"), p.d("dr"), p.v("modes"));
  const auto rep = mode_gap_check(problem, static_cast<std::size_t>(p.i("samples")), seed_of(c));
  const double half = 0.5 * (n - 1) - k;
  inequality_checks(out.report, rep, 0.5 * half * half, p.d("margin_floor"));
  return out;
}

ScenarioResult run_warped_hardy(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  const int n = p.i("n");
  const int k = p.i("k");
  if (k < 1 || k > n) config_error("warped_hardy needs 1 <= k <= n");
  const auto rep = hardy_check(n, k, p.d("length"), p.d("dr"), static_cast<std::size_t>(p.i("samples")), seed_of(c));
  const double c0 = 0.5 * (n - 1) - (k - 1);
  inequality_checks(out.report, rep, c0 * c0, p.d("margin_floor"));
  return out;
}

ScenarioResult run_dx_check(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  const int n = p.i("n");
  const int k = p.i("k");
  const auto problem = mode_problem(n, k, p.d("length"), p.d("dr"), p.v("modes"));
  const auto rep = donnelly_xavier_check(problem, static_cast<std::size_t>(p.i("samples")), seed_of(c));
  inequality_checks(out.report, rep, 0.5 * (n - 1) - k, p.d("margin_floor"));
  return out;
}

ScenarioResult run_warped_primitive(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const int n = p.i("n");
  const int k = p.i("k");
  if (k < 1) config_error("warped_primitive needs k >= 1");
  const auto problem = mode_problem(n, k, p.d("length"), p.d("dr"), p.v("modes"));
  const auto lower = mode_problem(n, k - 1, p.d("length"), p.d("dr"), p.v("modes"));
  DataSeries series{"samples", {"sample", "residual", "norm_ratio", "bound"}, {}};
  double residual = 0.0;
  double excess = -kInf;
  double bound = 0.0;
  for (int i = 0; i < p.i("samples"); ++i) {
    const ModeForm alpha = apply_d(lower, k - 1, sample_form(lower, k - 1, seed_of(c) + static_cast<std::uint64_t>(i)));
    const auto rep = flow_primitive(problem, alpha, p.d("margin"));
    residual = std::max(residual, rep.residual);
    excess = std::max(excess, rep.norm_ratio - rep.bound);
    bound = rep.bound;
    series.rows.push_back({static_cast<double>(i), rep.residual, rep.norm_ratio, rep.bound});
  }
  const double expected_bound = 2.0 / (0.5 * (n - 1) - (k - 1));
  r.add("bound", expected_bound, bound, 1e-12, std::abs(bound - expected_bound) <= 1e-12);
  at_most(r, "residual", residual, p.d("residual_tol"));
  at_most(r, "norm_ratio_excess", excess, p.d("bound_slack"));
  out.series.push_back(std::move(series));
  return out;
}

ScenarioResult run_warped_vanish(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  Report& r = out.report;
  const WarpedBc bc = parse_warped_bc(p.s("bc"));
  DataSeries series{"smallest", {"L", "smallest", "bound"}, {}};
  for (double L : p.v("lengths")) {
    const auto rep = vanishing_check(mode_problem(p.i("n"), p.i("k"), L, p.d("dr"), p.v("modes"), bc));
    at_least(r, "smallest_L" + json(L).dump(), rep.smallest, p.d("floor"));
    series.rows.push_back({L, rep.smallest, rep.bound});
  }
  out.series.push_back(std::move(series));

  auto counts = p.vi("middle_mode_counts");
  if (!counts.empty()) {
    std::sort(counts.begin(), counts.end());
    std::vector<double> modes;
    for (int m = 1; m <= counts.back(); ++m) modes.push_back(static_cast<double>(m) * m);
    const auto problem = mode_problem(2, 1, p.d("middle_length"), p.d("dr"), modes, WarpedBc::AbsoluteAt0);
    const auto spectrum = mode_spectrum(problem, 2);
    const double threshold = p.d("near_kernel_threshold");
    std::vector<long long> prefix{0};
    for (const auto& v : spectrum) prefix.push_back(prefix.back() + (v.array() < threshold).count());
    DataSeries growth{"near_kernel", {"modes", "count"}, {}};
    bool increasing = true;
    long long previous = -1;
    for (int m : counts) {
      const long long count = prefix[static_cast<std::size_t>(m)];
      increasing = increasing && count > previous;
      previous = count;
      growth.rows.push_back({static_cast<double>(m), static_cast<double>(count)});
    }
    r.add("near_kernel_growth", true, increasing, nullptr, increasing);
    out.series.push_back(std::move(growth));
  }
  return out;
}

std::vector<std::size_t> torus_half(const SurfaceMesh& s) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < s.complex.triangle_count(); ++t) {
    double cz = 0.0;
    double sz = 0.0;
    for (int v : s.complex.triangles()[t]) {
      cz += s.positions(v, 2);
      sz += s.positions(v, 3);
    }
    double angle = std::atan2(sz, cz);
    if (angle < 0) angle += 2 * kPi;
    if (angle < kPi) out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> northern(const SurfaceMesh& s) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < s.complex.triangle_count(); ++t) {
    double z = 0.0;
    for (int v : s.complex.triangles()[t]) z += s.positions(v, 2);
    if (z > 0) out.push_back(t);
  }
  return out;
}

void lott_checks(Report& r, const std::string& prefix, const LottReport& rep, bool equality) {
  for (const auto& d : rep.degrees) {
    const std::string k = std::to_string(d.k);
    r.add(prefix + "abs_" + k, {{"dim_m", d.dim_m}, {"le", d.dim_abs_omega + static_cast<std::size_t>(d.b_rel_core)}},
          d.abs_holds, nullptr, d.abs_holds);
    r.add(prefix + "rel_" + k, {{"dim_m", d.dim_m}, {"le", d.dim_rel_omega + static_cast<std::size_t>(d.b_core)}},
          d.rel_holds, nullptr, d.rel_holds);
    r.add(prefix + "restriction_" + k, true, d.restriction_holds, nullptr, d.restriction_holds);
    if (equality) {
      const bool eq = d.abs_equal && d.rel_equal;
      r.add(prefix + "equality_" + k, true, eq, nullptr, eq);
    }
  }
}

ScenarioResult run_lott(const ScenarioConfig& c) {
  const Params p{c.params};
  ScenarioResult out{start(c), {}};
  const auto torus = gen_closed_surface(1, p.i("torus_refinement"));
  const auto tm = metric_from_embedding(torus.complex, torus.positions);
  lott_checks(out.report, "torus_", lott_dimension_check(torus.complex, tm, torus_half(torus)), true);
  const auto sphere = gen_closed_surface(0, p.i("sphere_refinement"));
  const auto sm = metric_from_embedding(sphere.complex, sphere.positions);
  lott_checks(out.report, "sphere_", lott_dimension_check(sphere.complex, sm, northern(sphere)), false);
  return out;
}

ParamSpec real(std::string name, double fallback, double lo, double hi) {
  return {std::move(name), ParamType::Real, fallback, lo, hi};
}
ParamSpec integer(std::string name, long long fallback, double lo, double hi) {
  return {std::move(name), ParamType::Int, fallback, lo, hi};
}
ParamSpec reals(std::string name, std::vector<double> fallback, double lo, double hi) {
  return {std::move(name), ParamType::RealList, fallback, lo, hi};
}
ParamSpec integers(std::string name, std::vector<int> fallback, double lo, double hi) {
  return {std::move(name), ParamType::IntList, fallback, lo, hi};
}
ParamSpec text(std::string name, std::string fallback, std::vector<std::string> choices) {
  return {std::move(name), ParamType::Text, fallback, -kInf, kInf, std::move(choices)};
}

bool always(const json&) { return true; }
bool never(const json&) { return false; }

std::vector<ParamSpec> inequality_params(int n, int k, std::vector<double> modes, int samples) {
  return {integer("n", n, 2, 9),           integer("k", k, 0, 9),
          real("length", 10.0, 1.0, 200.0), real("dr", 0.01, 1e-4, 0.1),
          reals("modes", std::move(modes), 0.0, 1e4), integer("samples", samples, 1, 100000),
          real("margin_floor", -1e-8, -1.0, 0.0)};
}

const std::vector<KindSpec>& kind_table() {
  static const std::vector<KindSpec> table{
      {"hodge_closed",
       {integer("genus", 2, 0, 8), integer("refinement", 3, 1, 8), real("gap_min", 100.0, 1.0, 1e12),
        real("min_triangles", 200.0, 0.0, 1e9), integer("decompositions", 0, 0, 1000),
        integer("decomposition_degree", 1, 0, 2), real("decomposition_tol", 1e-8, 0.0, 1.0)},
       [](const json& p) { return p.at("decompositions").get<int>() > 0; },
       run_hodge_closed},
      {"hodge_boundary",
       {text("shape", "annulus", {"annulus", "disk", "pants"}), integer("radial", 4, 1, 200),
        integer("angular", 16, 3, 2000), integer("refinement", 3, 1, 6), real("gap_min", 100.0, 1.0, 1e12)},
       never,
       run_hodge_boundary},
      {"conformal",
       {integer("refinement", 2, 1, 8), integer("rescalings", 10, 1, 1000), real("amplitude", 1.0, 0.0, 5.0),
        real("m1_tol", 1e-12, 0.0, 1.0), real("projector_tol", 1e-10, 0.0, 1.0)},
       always,
       run_conformal},
      {"cutoff",
       {reals("n_values", {4.0, 16.0, 256.0}, 2.0, 65536.0), integer("inner_octaves", 16, 2, 40),
        real("rings_per_octave", 8.0, 1.0, 64.0), integer("angular", 64, 8, 1024), real("tol", 0.03, 0.0, 1.0),
        real("min_rings_per_decade", 8.0, 0.0, 1000.0)},
       never,
       run_cutoff},
      {"ends",
       {reals("check_radii", {8.0, 32.0, 128.0}, 1.0 + 1e-9, 1e6), real("flat_outer", 128.0, 2.0, 1e6),
        real("flat_rings_per_octave", 8.0, 1.0, 64.0), integer("flat_angular", 64, 8, 1024),
        real("radial_outer", 128.0, 2.0, 1e6), integer("radial_cells", 12700, 10, 10000000),
        real("tol", 0.02, 0.0, 1.0)},
       never,
       run_ends},
      {"li_tam",
       {real("threed_half_length", 800.0, 2.0, 1e6), integer("threed_cells", 160000, 10, 10000000),
        real("threed_core_radius", 10.0, 1.0, 1e6), reals("threed_radii", {100.0, 200.0, 400.0, 800.0}, 1.0, 1e6),
        real("oscillation_min", 1.5, 0.0, 2.0), real("residual_max", 1e-8, 0.0, 1.0),
        real("cosh_half_length", 16.0, 2.0, 100.0), integer("cosh_cells", 6400, 10, 10000000),
        reals("cosh_radii", {4.0, 8.0, 16.0}, 1.0, 100.0), real("tanh_tol", 0.01, 0.0, 1.0),
        real("sigma_half_length", 12.0, 2.0, 100.0), integer("sigma_cells", 2400, 10, 10000000),
        reals("sigma_radii", {4.0, 6.0, 8.0, 10.0, 12.0}, 1.0, 100.0), real("sigma_oscillation_max", 1e-2, 0.0, 2.0)},
       never,
       run_li_tam},
      {"lambda0",
       {reals("lengths", {25.0, 50.0}, 1.0, 500.0), real("dr", 0.01, 1e-4, 0.1), reals("modes", {0.0, 1.0, 4.0}, 0.0, 1e4),
        reals("band", {0.25, 0.2625}, 0.0, 1e3), real("floor", 0.249, 0.0, 1e3)},
       never,
       run_lambda0},
      {"warped_gap", inequality_params(5, 1, {0.0, 1.0, 2.0, 5.0}, 100), always, run_warped_gap},
      {"warped_hardy",
       {integer("n", 3, 2, 9), integer("k", 1, 1, 9), real("length", 10.0, 1.0, 200.0), real("dr", 0.01, 1e-4, 0.1),
        integer("samples", 100, 1, 100000), real("margin_floor", -1e-8, -1.0, 0.0)},
       always,
       run_warped_hardy},
      {"warped_primitive",
       {integer("n", 5, 2, 9), integer("k", 1, 1, 9), real("length", 10.0, 1.0, 200.0), real("dr", 0.01, 1e-4, 0.1),
        reals("modes", {0.0, 1.0, 4.0}, 0.0, 1e4), integer("samples", 20, 1, 10000), real("margin", 1.0, 0.0, 100.0),
        real("residual_tol", 1e-6, 0.0, 1.0), real("bound_slack", 1e-6, 0.0, 1.0)},
       always,
       run_warped_primitive},
      {"warped_vanish",
       {integer("n", 5, 2, 9), integer("k", 1, 0, 9), text("bc", "absolute_at_0", {"absolute_at_0", "relative_at_0"}),
        reals("lengths", {10.0, 20.0, 40.0}, 1.0, 200.0), real("dr", 0.01, 1e-4, 0.1),
        reals("modes", {0.0, 1.0, 4.0}, 0.0, 1e4), real("floor", 0.45, 0.0, 1e3),
        integers("middle_mode_counts", {1, 2, 4, 8}, 1, 64), real("middle_length", 20.0, 1.0, 200.0),
        real("near_kernel_threshold", 1e-6, 0.0, 1.0)},
       never,
       run_warped_vanish},
      {"lott", {integer("torus_refinement", 2, 1, 6), integer("sphere_refinement", 3, 1, 6)}, never, run_lott},
      {"dx_check", inequality_params(5, 1, {0.0, 1.0, 3.0}, 100), always, run_dx_check},
  };
  return table;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<std::string> scenario_kinds() {
  std::vector<std::string> out;
  for (const auto& k : kind_table()) out.push_back(k.kind);
  return out;
}

json scenario_defaults(const std::string& kind) {
  json out = json::object();
  for (const auto& spec : find_kind(kind).params) out[spec.name] = spec.fallback;
  return out;
}

bool scenario_needs_seed(const ScenarioConfig& config) { return find_kind(config.kind).needs_seed(config.params); }

void set_formats(ScenarioConfig& config, const std::vector<std::string>& formats) {
  config.json = false;
  config.csv = false;
  for (const auto& f : formats) {
    if (f == "json") {
      config.json = true;
    } else if (f == "csv") {
      config.csv = true;
    } else {
      config_error("unknown format '" + f + "'");
    }
  }
  if (!config.json && !config.csv) config_error("at least one output format is required");
}

ScenarioConfig parse_scenario(const json& document) {
  if (!document.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> top{"name", "kind", "seed", "params", "output"};
  for (const auto& [key, value] : document.items()) {
    if (!top.count(key)) config_error("unknown key '" + key + "'");
  }
  ScenarioConfig c;
  if (!document.contains("name") || !document["name"].is_string()) config_error("'name' must be a string");
  c.name = document["name"].get<std::string>();
  static const std::regex name_pattern("[A-Za-z0-9_.-]+");
  if (!std::regex_match(c.name, name_pattern)) config_error("'name' may only contain letters, digits, '_', '.', '-'");
  if (!document.contains("kind") || !document["kind"].is_string()) config_error("'kind' must be a string");
  c.kind = document["kind"].get<std::string>();
  const KindSpec& spec = find_kind(c.kind);

  if (document.contains("seed")) {
    const auto& s = document["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      config_error("'seed' must be a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }

  const json given = document.value("params", json::object());
  if (!given.is_object()) config_error("'params' must be an object");
  for (const auto& [key, value] : given.items()) {
    const bool known = std::any_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.name == key; });
    if (!known) config_error("unknown parameter '" + key + "' for kind " + c.kind);
  }
  for (const auto& p : spec.params) {
    c.params[p.name] = validate_param(p, given.contains(p.name) ? given[p.name] : p.fallback);
    if ((p.type == ParamType::RealList || p.type == ParamType::IntList) && p.name != "middle_mode_counts" &&
        c.params[p.name].empty()) {
      config_error("parameter '" + p.name + "' must not be empty");
    }
  }

  if (document.contains("output")) {
    const auto& o = document["output"];
    if (!o.is_object()) config_error("'output' must be an object");
    for (const auto& [key, value] : o.items()) {
      if (key == "dir") {
        if (!value.is_string()) config_error("'output.dir' must be a string");
        c.out_dir = value.get<std::string>();
      } else if (key == "formats") {
        if (!value.is_array()) config_error("'output.formats' must be a list");
        std::vector<std::string> formats;
        for (const auto& f : value) {
          if (!f.is_string()) config_error("'output.formats' must hold strings");
          formats.push_back(f.get<std::string>());
        }
        set_formats(c, formats);
      } else {
        config_error("unknown key 'output." + key + "'");
      }
    }
  }
  if (spec.needs_seed(c.params) && !c.seed) config_error("kind " + c.kind + " is randomized and needs a 'seed'");
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
  return parse_scenario(document);
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const KindSpec& spec = find_kind(config.kind);
  if (spec.needs_seed(config.params) && !config.seed) config_error("kind " + config.kind + " needs a seed");
  try {
    return spec.run(config);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::DegreeOutOfRange:
      case ErrorCode::GridTooCoarse:
        config_error(e.what());
      case ErrorCode::ConfigError:
        throw;
      default:
        break;
    }
    ScenarioResult failed{start(config), {}};
    failed.report.add("completed", true, e.what(), nullptr, false);
    return failed;
  }
}

int run_scenario_file(const std::filesystem::path& path, const RunOverrides& overrides, std::ostream& log) {
  ScenarioConfig config;
  ScenarioResult result;
  const auto started = std::chrono::steady_clock::now();
  try {
    json document;
    {
      std::ifstream in(path);
      if (!in) config_error("cannot read config " + path.string());
      try {
        document = json::parse(in);
      } catch (const json::parse_error& e) {
        config_error(path.string() + ": " + e.what());
      }
    }
    if (overrides.seed && document.is_object()) document["seed"] = *overrides.seed;
    config = parse_scenario(document);
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.formats) set_formats(config, *overrides.formats);
    result = run_scenario(config);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    log << e.what() << '\n';
    return 2;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  try {
    emit_report(result.report, result.series, config.out_dir, {config.json, config.csv, utc_now(), elapsed});
  } catch (const Error& e) {
    log << e.what() << '\n';
    return 3;
  }
  for (const auto& check : result.report.checks) {
    log << (check.pass ? "pass " : "FAIL ") << check.name << " actual=" << check.actual.dump() << '\n';
  }
  log << config.name << ": " << (result.report.passed() ? "pass" : "FAIL") << '\n';
  return result.report.passed() ? 0 : 1;
}

}  // namespace l2hodge
