#include "l2hodge/ends.hpp"
#include "l2hodge/error.hpp"
#include "l2hodge/hodge.hpp"
#include "l2hodge/mesh_io.hpp"
#include "l2hodge/scenario.hpp"
#include "l2hodge/warped.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

using namespace l2hodge;
using nlohmann::json;

namespace {

struct GenArgs {
  std::string shape = "closed";
  int genus = 1;
  int refinement = 2;
  int radial = 8;
  int angular = 32;
  double inner = 1.0;
  double outer = 2.0;
  bool geometric = false;
  std::string path;
};

struct MeshArgs {
  std::string path;
  std::string bc = "none";
  int degree = 1;
  double gap_min = 100.0;
};

struct EndsArgs {
  std::string path;
  double core_radius = 1.0;
  std::vector<double> radii;
};

struct WarpedArgs {
  int n = 2;
  int k = 0;
  double length = 20.0;
  double dr = 0.01;
  std::vector<double> modes{0.0, 1.0, 4.0};
  std::string bc = "compact_support";
  double warp = 1.0;
  std::size_t count = 3;
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int gen(const GenArgs& a) {
  const auto parent = std::filesystem::path(a.path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  if (a.shape == "closed") {
    const auto s = gen_closed_surface(a.genus, a.refinement);
    write_mesh(a.path, s.complex, s.positions);
  } else if (a.shape == "annulus") {
    const auto m = gen_annulus(a.radial, a.angular, a.inner, a.outer,
                               {a.geometric ? RadialSpacing::Geometric : RadialSpacing::Linear, a.geometric});
    write_mesh(a.path, m.complex, m.positions);
  } else if (a.shape == "disk") {
    const auto m = gen_disk(a.radial, a.angular, a.outer);
    write_mesh(a.path, m.complex, m.positions);
  } else {
    const auto s = gen_pants(a.refinement);
    write_mesh(a.path, s.complex, s.positions);
  }
  const auto mesh = read_mesh(a.path);
  print({{"path", a.path},
         {"vertices", mesh.complex.vertex_count()},
         {"edges", mesh.complex.edge_count()},
         {"triangles", mesh.complex.triangle_count()},
         {"boundary_edges", mesh.complex.boundary_edge_count()},
         {"euler_characteristic", mesh.complex.euler_characteristic()}});
  return 0;
}

int betti_cmd(const MeshArgs& a, bool relative, std::uint64_t seed) {
  const auto mesh = read_mesh(a.path);
  const auto b = betti(mesh.complex, relative, seed);
  print({{"relative", relative}, {"betti", b.b}, {"prime", b.prime_used}});
  return 0;
}

int hodge_cmd(const MeshArgs& a) {
  const auto mesh = read_mesh(a.path);
  const auto bundle = mass_matrices(mesh.complex, metric_from_embedding(mesh.complex, mesh.positions));
  TolPolicy policy;
  policy.gap_threshold = a.gap_min;
  policy.throw_on_ambiguous = false;
  const auto bc = parse_boundary_condition(a.bc);
  const auto h = harmonic_basis(mesh.complex, bundle, a.degree, bc, policy);
  std::vector<double> eigenvalues(h.eigenvalues.data(), h.eigenvalues.data() + h.eigenvalues.size());
  print({{"degree", a.degree},
         {"bc", to_string(bc)},
         {"dimension", h.dimension()},
         {"betti_expected", h.betti_expected},
         {"betti_match", h.betti_match},
         {"gap_certificate", h.gap_certificate},
         {"ambiguous", h.ambiguous},
         {"eigenvalues", eigenvalues},
         {"warnings", h.warnings}});
  return h.betti_match && !h.ambiguous ? 0 : 1;
}

int ends_cmd(const EndsArgs& a) {
  const auto mesh = read_mesh(a.path);
  const auto& c = mesh.complex;
  std::vector<double> radius(c.vertex_count());
  for (std::size_t v = 0; v < radius.size(); ++v) radius[v] = mesh.positions.row(static_cast<Eigen::Index>(v)).norm();
  std::vector<std::size_t> core;
  for (std::size_t t = 0; t < c.triangle_count(); ++t) {
    bool inside = false;
    for (int v : c.triangles()[t]) inside = inside || radius[static_cast<std::size_t>(v)] <= a.core_radius;
    if (inside) core.push_back(t);
  }
  auto ends = detect_ends(c, core);
  json out = json::array();
  if (!a.radii.empty()) {
    const auto bundle = mass_matrices(c, metric_from_embedding(c, mesh.positions));
    const auto graph = energy_graph(c, bundle, radius);
    for (auto& e : ends) {
      e.curve = capacity(graph, e.vertices, e.interface_vertices, a.radii);
      const auto k = classify_parabolic(e.curve);
      e.classification = k.cls;
      e.trend_exponent = k.trend_exponent;
    }
  }
  for (const auto& e : ends) {
    out.push_back({{"id", e.id},
                   {"vertices", e.vertices.size()},
                   {"triangles", e.triangles.size()},
                   {"interface_edges", e.interface_edges.size()},
                   {"radii", e.curve.radii},
                   {"capacities", e.curve.capacities},
                   {"class", to_string(e.classification)}});
  }
  print({{"core_triangles", core.size()}, {"ends", out}});
  return 0;
}

int warped_cmd(const WarpedArgs& a) {
  const auto p = mode_problem(a.n, a.k, a.length, a.dr, a.modes, parse_warped_bc(a.bc), a.warp);
  const auto spectrum = mode_spectrum(p, a.count);
  json modes = json::array();
  for (std::size_t m = 0; m < spectrum.size(); ++m) {
    modes.push_back({{"mu", p.modes[m]},
                     {"eigenvalues", std::vector<double>(spectrum[m].data(), spectrum[m].data() + spectrum[m].size())}});
  }
  print({{"n", p.n}, {"k", p.k}, {"length", p.length}, {"dr", p.dr}, {"bc", to_string(p.bc)}, {"modes", modes}});
  return 0;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string::npos ? text.size() : comma;
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete L2 Hodge theory experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  app.add_option("--seed", seed, "Seed override for randomized runs");
  app.add_option("--out", out, "Output directory for scenario reports");
  app.add_option("--format", format, "Comma list of report formats (json,csv)");

  GenArgs g;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a mesh and write it as nOFF plus a boundary sidecar");
  gen_cmd->add_option("shape", g.shape, "closed, annulus, disk or pants")
      ->check(CLI::IsMember({"closed", "annulus", "disk", "pants"}));
  gen_cmd->add_option("path", g.path, "Output mesh path")->required();
  gen_cmd->add_option("--genus", g.genus)->check(CLI::Range(0, 16));
  gen_cmd->add_option("--refinement", g.refinement)->check(CLI::Range(1, 10));
  gen_cmd->add_option("--radial", g.radial)->check(CLI::Range(1, 10000));
  gen_cmd->add_option("--angular", g.angular)->check(CLI::Range(3, 100000));
  gen_cmd->add_option("--inner", g.inner);
  gen_cmd->add_option("--outer", g.outer);
  gen_cmd->add_flag("--geometric", g.geometric, "Geometric radial spacing with staggered rings");

  MeshArgs m;
  bool relative = false;
  auto* betti_sub = app.add_subcommand("betti", "Betti numbers over GF(p)");
  betti_sub->add_option("mesh", m.path)->required();
  betti_sub->add_flag("--relative", relative);

  auto* hodge_sub = app.add_subcommand("hodge", "Harmonic space of one degree");
  hodge_sub->add_option("mesh", m.path)->required();
  hodge_sub->add_option("--degree", m.degree)->check(CLI::Range(0, 2));
  hodge_sub->add_option("--bc", m.bc)->check(CLI::IsMember({"none", "absolute", "relative"}));
  hodge_sub->add_option("--gap-min", m.gap_min);

  EndsArgs e;
  auto* ends_sub = app.add_subcommand("ends", "Ends outside a core ball and their capacities");
  ends_sub->add_option("mesh", e.path)->required();
  ends_sub->add_option("--core-radius", e.core_radius);
  ends_sub->add_option("--radii", e.radii, "Truncation radii for capacities")->delimiter(',');

  WarpedArgs w;
  auto* warped_sub = app.add_subcommand("warped", "Low spectrum of the mode-reduced warped product Laplacian");
  warped_sub->add_option("--n", w.n);
  warped_sub->add_option("--k", w.k);
  warped_sub->add_option("--length", w.length);
  warped_sub->add_option("--dr", w.dr);
  warped_sub->add_option("--modes", w.modes)->delimiter(',');
  warped_sub->add_option("--bc", w.bc)->check(CLI::IsMember({"compact_support", "absolute_at_0", "relative_at_0"}));
  warped_sub->add_option("--warp", w.warp);
  warped_sub->add_option("--count", w.count);

  std::string config;
  auto* scenario_sub = app.add_subcommand("scenario", "Scenario runner");
  auto* run_sub = scenario_sub->add_subcommand("run", "Run one scenario config");
  scenario_sub->require_subcommand(1);
  run_sub->add_option("config", config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return gen(g);
    if (*betti_sub) return betti_cmd(m, relative, seed.value_or(0x5eed));
    if (*hodge_sub) return hodge_cmd(m);
    if (*ends_sub) return ends_cmd(e);
    if (*warped_sub) return warped_cmd(w);
    RunOverrides overrides;
    overrides.seed = seed;
    if (out) overrides.out_dir = *out;
    if (format) overrides.formats = split(*format);
    return run_scenario_file(config, overrides, std::cout);
  } catch (const Error& err) {
    std::cerr << err.what() << '\n';
    return err.code() == ErrorCode::ConfigError ? 2 : 1;
  }
}
