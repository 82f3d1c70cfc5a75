#include <doctest.h>

#include "l2hodge/error.hpp"
#include "l2hodge/hodge.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace l2hodge;

namespace {

struct Setup {
  SurfaceMesh surface;
  MetricField metric;
  OperatorBundle bundle;
};

Setup closed(int genus, int refinement) {
  Setup s;
  s.surface = gen_closed_surface(genus, refinement);
  s.metric = metric_from_embedding(s.surface.complex, s.surface.positions);
  s.bundle = mass_matrices(s.surface.complex, s.metric);
  return s;
}

VectorXd random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng);
  return v;
}

// Torus triangles whose second angular parameter lies in [0, pi).
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
    if (angle < 0) angle += 2 * std::numbers::pi;
    if (angle < std::numbers::pi) out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("harmonic dimensions on closed surfaces equal betti numbers") {
  const std::array<std::array<std::size_t, 3>, 3> expected{{{1, 0, 1}, {1, 2, 1}, {1, 4, 1}}};
  for (int genus = 0; genus <= 2; ++genus) {
    const auto s = closed(genus, genus == 0 ? 4 : (genus == 1 ? 2 : 1));
    CHECK(s.surface.complex.triangle_count() >= 200);
    for (int k = 0; k <= 2; ++k) {
      CAPTURE(genus);
      CAPTURE(k);
      const auto h = harmonic_basis(s.surface.complex, s.bundle, k, BoundaryCondition::None);
      CHECK(h.dimension() == expected[static_cast<std::size_t>(genus)][static_cast<std::size_t>(k)]);
      CHECK(h.betti_match);
      CHECK(h.gap_certificate >= 100.0);
      const VectorXd& m = s.bundle.mass(k);
      const MatrixXd gram = h.vectors.transpose() * m.asDiagonal() * h.vectors;
      if (gram.size() > 0) CHECK((gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
      const Laplacian lap = assemble_laplacian(s.bundle, k, BoundaryCondition::None);
      for (Eigen::Index j = 0; j < h.vectors.cols(); ++j) {
        CHECK(laplacian_residual(lap, lap.restrict_cochain(h.vectors.col(j))) < 1e-6);
      }
    }
  }
}

TEST_CASE("boundary conditions on an annulus") {
  const auto a = gen_annulus(4, 16, 1.0, 2.0);
  const auto m = metric_from_embedding(a.complex, a.positions);
  const auto b = mass_matrices(a.complex, m);
  const auto abs1 = harmonic_basis(a.complex, b, 1, BoundaryCondition::Absolute);
  CHECK(abs1.dimension() == 1);
  const auto rel0 = harmonic_basis(a.complex, b, 0, BoundaryCondition::Relative);
  CHECK(rel0.dimension() == 0);
  const auto rel1 = harmonic_basis(a.complex, b, 1, BoundaryCondition::Relative);
  CHECK(rel1.dimension() == 1);
  const auto rel2 = harmonic_basis(a.complex, b, 2, BoundaryCondition::Relative);
  CHECK(rel2.dimension() == 1);
  const auto abs0 = harmonic_basis(a.complex, b, 0, BoundaryCondition::Absolute);
  CHECK(abs0.dimension() == 1);
  const auto abs2 = harmonic_basis(a.complex, b, 2, BoundaryCondition::Absolute);
  CHECK(abs2.dimension() == 0);
  for (const auto* h : {&abs1, &rel0, &rel1, &rel2, &abs0, &abs2}) CHECK(h->betti_match);

  // Relative 1-cochains vanish on boundary edges.
  for (std::size_t e = 0; e < a.complex.edge_count(); ++e) {
    if (a.complex.is_boundary_edge(e)) CHECK(rel1.vectors(static_cast<Eigen::Index>(e), 0) == 0.0);
  }
}

TEST_CASE("boundary condition on a closed complex warns") {
  const auto s = closed(1, 1);
  const auto lap = assemble_laplacian(s.bundle, 1, BoundaryCondition::Absolute);
  REQUIRE(lap.warnings.size() == 1);
  CHECK(lap.warnings[0].find("BcOnClosedComplex") == 0);
  CHECK_THROWS_AS(assemble_laplacian(s.bundle, 3, BoundaryCondition::None), Error);
}

TEST_CASE("ambiguous kernel is reported") {
  const auto s = closed(1, 1);
  TolPolicy p;
  p.gap_threshold = 1e300;
  CHECK_THROWS_AS(harmonic_basis(s.surface.complex, s.bundle, 1, BoundaryCondition::None, p), Error);
  p.throw_on_ambiguous = false;
  const auto h = harmonic_basis(s.surface.complex, s.bundle, 1, BoundaryCondition::None, p);
  CHECK(h.ambiguous);
}

TEST_CASE("hodge decomposition") {
  const auto s = closed(1, 2);
  const auto& c = s.surface.complex;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const VectorXd w = random_vector(c.edge_count(), seed);
    const auto d = hodge_decompose(c, s.bundle, w, 1, BoundaryCondition::None);
    CHECK(d.residual < 1e-8);
    CHECK(d.orthogonality < 1e-8);
    CHECK(d.coclosed_defect < 1e-8);
    CHECK((d.harmonic + d.exact + d.coexact - w).norm() < 1e-8 * w.norm());
    // Idempotence of the harmonic projector.
    const auto again = hodge_decompose(c, s.bundle, d.harmonic, 1, BoundaryCondition::None);
    CHECK((again.harmonic - d.harmonic).norm() < 1e-8 * (1.0 + d.harmonic.norm()));
    CHECK(again.exact.norm() < 1e-8 * (1.0 + d.harmonic.norm()));
    CHECK(again.coexact.norm() < 1e-8 * (1.0 + d.harmonic.norm()));
  }
  const auto sphere = closed(0, 3);
  const VectorXd f = random_vector(sphere.surface.complex.vertex_count(), 9);
  const VectorXd df = sphere.bundle.d0.cast<double>() * f;
  const auto d = hodge_decompose(sphere.surface.complex, sphere.bundle, df, 1, BoundaryCondition::None);
  CHECK(d.harmonic.norm() < 1e-8 * df.norm());
  CHECK(d.coexact.norm() < 1e-8 * df.norm());
  CHECK((d.exact - df).norm() < 1e-8 * df.norm());
}

TEST_CASE("decomposition under relative conditions") {
  const auto a = gen_annulus(5, 20, 1.0, 2.0);
  const auto m = metric_from_embedding(a.complex, a.positions);
  const auto b = mass_matrices(a.complex, m);
  VectorXd w = random_vector(a.complex.edge_count(), 77);
  for (std::size_t e = 0; e < a.complex.edge_count(); ++e) {
    if (a.complex.is_boundary_edge(e)) w[static_cast<Eigen::Index>(e)] = 0.0;
  }
  const auto d = hodge_decompose(a.complex, b, w, 1, BoundaryCondition::Relative);
  CHECK(d.orthogonality < 1e-8);
  CHECK(d.residual < 1e-8);
  CHECK(d.harmonic.norm() > 0.0);
}

TEST_CASE("conformal invariance of middle degree harmonic forms") {
  const auto s = closed(1, 2);
  const auto& c = s.surface.complex;
  const auto h0 = harmonic_basis(c, s.bundle, 1, BoundaryCondition::None);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> uu(c.triangle_count());
    for (double& x : uu) x = u(rng);
    const auto g = conformal_rescale(s.metric, uu);
    const auto b = mass_matrices(c, g);
    const auto h1 = harmonic_basis(c, b, 1, BoundaryCondition::None);
    CHECK(subspace_distance(h0.vectors, h1.vectors, s.bundle.m1) < 1e-10);
    // Degree 0 is not conformally invariant.
    CHECK((b.m0 - s.bundle.m0).norm() > 1e-3 * s.bundle.m0.norm());
  }
}

TEST_CASE("lott inequalities") {
  const auto torus = closed(1, 2);
  const auto half = torus_half(torus.surface);
  const auto r = lott_dimension_check(torus.surface.complex, torus.metric, half);
  CHECK(r.holds());
  const auto& d1 = r.degrees[1];
  CHECK(d1.dim_m == 2);
  CHECK(d1.dim_abs_omega == 1);
  CHECK(d1.b_rel_core == 1);
  CHECK(d1.b_rel_core_next == 1);
  CHECK(d1.dim_rel_omega == 1);
  CHECK(d1.b_core == 1);
  CHECK(d1.abs_equal);
  CHECK(d1.rel_equal);
  CHECK(r.degrees[0].dim_abs_omega >= 1);

  const auto sphere = closed(0, 3);
  std::vector<std::size_t> north;
  for (std::size_t t = 0; t < sphere.surface.complex.triangle_count(); ++t) {
    double z = 0;
    for (int v : sphere.surface.complex.triangles()[t]) z += sphere.surface.positions(v, 2);
    if (z > 0) north.push_back(t);
  }
  const auto rs = lott_dimension_check(sphere.surface.complex, sphere.metric, north);
  CHECK(rs.holds());
  CHECK(rs.degrees[1].dim_m == 0);
  CHECK(rs.degrees[1].dim_abs_omega == 0);
  CHECK(rs.degrees[1].b_rel_core_next == 1);
  for (const auto& d : rs.degrees) CHECK(d.abs_equal);
  for (const auto& d : r.degrees) {
    CAPTURE(d.k);
    CHECK(d.abs_equal);
    CHECK(d.rel_equal);
  }

  try {
    lott_dimension_check(sphere.surface.complex, sphere.metric, std::vector<std::size_t>{});
    FAIL("expected BadSplit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadSplit);
  }
}

TEST_CASE("cutoff energies") {
  const double r_in = std::ldexp(1.0, -16);
  const int n_theta = 64;
  const double ds = std::log(2.0) / 8.0;
  const int n_radial = static_cast<int>(std::lround(std::log(1.0 / r_in) / ds));
  const auto mesh = gen_annulus(n_radial, n_theta, r_in, 1.0, {RadialSpacing::Geometric, true});
  const auto metric = metric_from_embedding(mesh.complex, mesh.positions);
  double prev = 1e300;
  for (double n : {4.0, 16.0, 256.0}) {
    CAPTURE(n);
    const auto r = cutoff_energy(mesh.complex, mesh.positions, metric, Eigen::Vector2d::Zero(), n);
    CHECK(r.target == doctest::Approx(2 * std::numbers::pi / std::log(n)));
    CHECK(std::abs(r.energy - r.target) / r.target < 0.03);
    CHECK(r.rings_per_decade >= 8.0);
    CHECK(r.energy < prev);
    prev = r.energy;
  }
  const auto coarse = gen_annulus(6, 16, r_in, 1.0, {RadialSpacing::Geometric, true});
  const auto cm = metric_from_embedding(coarse.complex, coarse.positions);
  try {
    cutoff_energy(coarse.complex, coarse.positions, cm, Eigen::Vector2d::Zero(), 16.0);
    FAIL("expected UnderResolved");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnderResolved);
  }
}

TEST_CASE("cycle integrals") {
  const auto a = gen_annulus(4, 12, 1.0, 2.0);
  const auto m = metric_from_embedding(a.complex, a.positions);
  const auto b = mass_matrices(a.complex, m);
  const auto loops = detect_boundary_cycles(a.complex);
  REQUIRE(loops.size() == 2);
  const VectorXd f = random_vector(a.complex.vertex_count(), 3);
  const VectorXd df = b.d0.cast<double>() * f;
  for (const auto& loop : loops) CHECK(std::abs(cycle_integral(a.complex, df, loop)) < 1e-12 * df.norm());

  const auto h = harmonic_basis(a.complex, b, 1, BoundaryCondition::Absolute);
  VectorXd gen = h.vectors.col(0);
  // Boundary loops are induced from the orientation and run in opposite
  // senses around the hole.
  const double inner = cycle_integral(a.complex, gen, loops[0]);
  const double outer = cycle_integral(a.complex, gen, loops[1]);
  CHECK(std::abs(std::abs(inner) - std::abs(outer)) < 1e-10 * std::abs(inner));
  gen /= inner;
  CHECK(cycle_integral(a.complex, gen, loops[0]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(cycle_integral(a.complex, gen, loops[1])) == doctest::Approx(1.0).epsilon(1e-10));

  // Random closed cochain: harmonic plus exact.
  const VectorXd closed_form = gen * 0.7 + df;
  CHECK(std::abs(std::abs(cycle_integral(a.complex, closed_form, loops[0])) -
                 std::abs(cycle_integral(a.complex, closed_form, loops[1]))) < 1e-10);

  EdgeCycle open = loops[0];
  open.edges.pop_back();
  open.signs.pop_back();
  CHECK_THROWS_AS(cycle_integral(a.complex, df, open), Error);
}

TEST_CASE("genus lower bound") {
  const auto t = closed(1, 2);
  const auto r1 = genus_lower_bound_experiment(t.surface, t.metric, 1);
  REQUIRE(r1.pairings.size() == 1);
  CHECK(r1.pairings[0] == doctest::Approx(1.0));
  CHECK(r1.closedness[0] == 0.0);
  CHECK(r1.rank == 1);
  const auto g2 = closed(2, 1);
  const auto r2 = genus_lower_bound_experiment(g2.surface, g2.metric, 2);
  CHECK(r2.rank == 2);
  for (double p : r2.pairings) CHECK(p == doctest::Approx(1.0));
  const auto sp = closed(0, 2);
  const auto r0 = genus_lower_bound_experiment(sp.surface, sp.metric, 0);
  CHECK(r0.pairings.empty());
  CHECK(r0.rank == 0);
}
