#include "l2hodge/complex.hpp"
#include "l2hodge/error.hpp"
#include "l2hodge/metric.hpp"
#include "l2hodge/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace l2hodge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path cookbook;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct Run {
  ScenarioConfig config;
  ScenarioResult result;
  double seconds = 0.0;
};

Run run(const std::string& name) {
  Run r;
  r.config = load_scenario(cookbook / (name + ".json"));
  const auto start = std::chrono::steady_clock::now();
  r.result = run_scenario(r.config);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Every check of the scenario must pass and the listed parameters must hold
// the values the criterion is stated for.
void all_checks(Outcome& o, const Run& r, const json& fixed = json::object()) {
  for (const auto& c : r.result.report.checks) {
    o.require(c.pass, r.config.name + "." + c.name + " actual " + c.actual.dump());
  }
  for (const auto& [key, value] : fixed.items()) {
    const json actual = key == "seed" ? json(r.config.seed.has_value()) : r.config.params.at(key);
    o.require(actual == value, r.config.name + " param " + key + " = " + actual.dump() + ", want " + value.dump());
  }
}

const Check* find_check(const Run& r, const std::string& name) {
  for (const auto& c : r.result.report.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long long d1d0_nonzeros(const SimplicialComplex& c) {
  const IntSparse prod = c.coboundary(1) * c.coboundary(0);
  long long nz = 0;
  for (int k = 0; k < prod.outerSize(); ++k) {
    for (IntSparse::InnerIterator it(prod, k); it; ++it) nz += it.value() != 0 ? 1 : 0;
  }
  return nz;
}

Outcome hodge_theorem() {
  Outcome o;
  double seconds = 0.0;
  for (const char* name : {"hodge_sphere", "hodge_torus", "hodge_genus2"}) {
    const Run r = run(name);
    seconds += r.seconds;
    all_checks(o, r, {{"min_triangles", 200.0}, {"gap_min", 100.0}});
    const Check* dim = find_check(r, "dim_1");
    o.require(dim != nullptr, std::string(name) + " has no dim_1");
    if (dim) o.detail += std::string(o.detail.empty() ? "" : ", ") + name + " dim_1=" + dim->actual.dump();
  }
  o.require(seconds < 30.0, "runtime " + std::to_string(seconds) + " s");
  o.detail += ", " + std::to_string(seconds).substr(0, 5) + " s";
  return o;
}

Outcome exactness() {
  Outcome o;
  long long nonzeros = 0;
  std::size_t meshes = 0;
  for (int genus = 0; genus <= 3; ++genus) {
    for (int refinement = 1; refinement <= 3; ++refinement) {
      nonzeros += d1d0_nonzeros(gen_closed_surface(genus, refinement).complex);
      ++meshes;
    }
  }
  for (int layers : {2, 4, 56}) {
    nonzeros += d1d0_nonzeros(gen_annulus(layers, 16, 1.0, 2.0).complex);
    nonzeros += d1d0_nonzeros(gen_annulus(layers, 64, 1.0, 128.0, {RadialSpacing::Geometric, true}).complex);
    nonzeros += d1d0_nonzeros(gen_disk(layers, 12, 1.0).complex);
    meshes += 3;
  }
  for (int refinement : {2, 3, 5}) {
    nonzeros += d1d0_nonzeros(gen_pants(refinement).complex);
    ++meshes;
  }
  for (int n_radial : {20, 100}) {
    nonzeros += d1d0_nonzeros(warped_annulus_metric(n_radial, 64, 2.0, 0.5).complex);
    ++meshes;
  }
  o.require(nonzeros == 0, "d1 d0 has " + std::to_string(nonzeros) + " nonzeros");
  const Run torus = run("hodge_torus");
  all_checks(o, torus, {{"decompositions", 20}, {"decomposition_tol", 1e-8}, {"seed", true}});
  const Check* res = find_check(torus, "decomposition_residual");
  const Check* orth = find_check(torus, "decomposition_orthogonality");
  const Check* defect = find_check(torus, "decomposition_coclosed_defect");
  o.require(res && orth && defect, "decomposition checks missing");
  if (res && orth && defect) {
    o.detail = std::to_string(meshes) + " meshes exact; residual " + res->actual.dump() + ", orthogonality " +
               orth->actual.dump() + ", coclosed defect " + defect->actual.dump() + (o.detail.empty() ? "" : "; " + o.detail);
  }
  return o;
}

Outcome single(const std::string& name, const json& fixed, const std::vector<std::string>& shown) {
  Outcome o;
  const Run r = run(name);
  all_checks(o, r, fixed);
  std::string values;
  for (const auto& s : shown) {
    if (const Check* c = find_check(r, s)) values += (values.empty() ? "" : ", ") + s + "=" + c->actual.dump();
  }
  if (values.empty()) values = std::to_string(r.result.report.checks.size()) + " checks";
  o.detail = values + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome suite(const std::vector<std::pair<std::string, json>>& members) {
  Outcome o;
  std::string shown;
  for (const auto& [name, fixed] : members) {
    const Run r = run(name);
    all_checks(o, r, fixed);
    if (const Check* c = find_check(r, "worst_margin")) shown += (shown.empty() ? "" : ", ") + name + " margin " + c->actual.dump();
    if (const Check* c = find_check(r, "residual")) shown += (shown.empty() ? "" : ", ") + name + " residual " + c->actual.dump();
  }
  o.detail = shown + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "l2hodge_acceptance";
  fs::remove_all(root);
  std::size_t compared = 0;
  for (const char* name : {"hardy_3_1", "conformal_torus", "gap_3_0", "primitive_5_1", "hodge_torus"}) {
    for (const char* pass : {"a", "b"}) {
      RunOverrides overrides;
      overrides.out_dir = root / pass;
      std::ostringstream log;
      const int status = run_scenario_file(cookbook / (std::string(name) + ".json"), overrides, log);
      o.require(status == 0, std::string(name) + " exit " + std::to_string(status));
    }
    const std::string a = read_text(root / "a" / (std::string(name) + ".json"));
    const std::string b = read_text(root / "b" / (std::string(name) + ".json"));
    o.require(!a.empty() && a == b, std::string(name) + " reports differ");
    ++compared;
  }
  o.detail = std::to_string(compared) + " seeded scenarios reproduced byte for byte" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  cookbook = argc > 1 ? fs::path(argv[1]) : fs::path("cookbook");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Hodge theorem on sphere, torus, genus 2", hodge_theorem},
      {"exactness and decomposition", exactness},
      {"conformal invariance in degree 1",
       [] {
         return single("conformal_torus", {{"rescalings", 10}, {"m1_tol", 1e-12}, {"projector_tol", 1e-10}, {"seed", true}},
                       {"m1_relative_difference", "projector_distance"});
       }},
      {"cutoff energies",
       [] {
         return single("cutoff", {{"n_values", {4.0, 16.0, 256.0}}, {"tol", 0.03}, {"min_rings_per_decade", 8.0}},
                       {"energy_n4.0", "energy_n16.0", "energy_n256.0"});
       }},
      {"lambda0 of the warped surface",
       [] {
         return single("lambda0_sigma",
                       {{"lengths", {25.0, 50.0}}, {"dr", 0.01}, {"band", {0.25, 0.2625}}, {"floor", 0.249}},
                       {"band_at_largest_L"});
       }},
      {"Hardy suite",
       [] {
         const json fixed{{"samples", 100}, {"margin_floor", -1e-8}, {"seed", true}};
         return suite({{"hardy_3_1", fixed}, {"hardy_5_1", fixed}, {"hardy_5_2", fixed}});
       }},
      {"gap and Donnelly-Xavier suites",
       [] {
         const json fixed{{"samples", 100}, {"margin_floor", -1e-8}, {"seed", true}};
         return suite({{"gap_5_1", fixed}, {"gap_3_0", fixed}, {"dx_5_1", fixed}, {"dx_3_1", fixed}});
       }},
      {"flow primitive",
       [] {
         const json fixed{{"samples", 20}, {"residual_tol", 1e-6}, {"bound_slack", 1e-6}, {"seed", true}};
         return suite({{"primitive_5_1", fixed}, {"primitive_3_1", fixed}});
       }},
      {"capacity of flat and 3-D ends",
       [] {
         return single("ends_capacity", {{"check_radii", {8.0, 32.0, 128.0}}, {"tol", 0.02}},
                       {"flat_class", "radial_class", "radial_capacity_relative_error"});
       }},
      {"Li-Tam harmonic limits",
       [] {
         return single("li_tam",
                       {{"oscillation_min", 1.5}, {"residual_max", 1e-8}, {"tanh_tol", 0.01}, {"sigma_oscillation_max", 1e-2}},
                       {"threed_oscillation", "threed_laplacian_residual", "cosh_tanh_sup_error", "sigma_oscillation"});
       }},
      {"Lott inequalities on torus and sphere splits", [] { return single("lott_splits", json::object(), {}); }},
      {"vanishing versus middle degree",
       [] {
         return single("vanish_5_1",
                       {{"n", 5}, {"k", 1}, {"bc", "absolute_at_0"}, {"lengths", {10.0, 20.0, 40.0}}, {"floor", 0.45}},
                       {"smallest_L10.0", "smallest_L20.0", "smallest_L40.0", "near_kernel_growth"});
       }},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
