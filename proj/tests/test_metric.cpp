#include <doctest.h>

#include "l2hodge/error.hpp"
#include "l2hodge/metric.hpp"
#include "l2hodge/sparse.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace l2hodge;
using Tri = SimplicialComplex::TriangleTuple;

TEST_CASE("unit right triangle") {
  const std::array<Tri, 1> t{{{0, 1, 2}}};
  const auto c = build_complex(3, t);
  Vertices p(3, 2);
  p << 0, 0, 1, 0, 0, 1;
  const auto m = metric_from_embedding(c, p);
  std::vector<double> lengths = m.edge_length;
  std::sort(lengths.begin(), lengths.end());
  CHECK(lengths[0] == doctest::Approx(1.0));
  CHECK(lengths[1] == doctest::Approx(1.0));
  CHECK(lengths[2] == doctest::Approx(std::sqrt(2.0)));
  const auto b = mass_matrices(c, m);
  CHECK(b.m2[0] == doctest::Approx(2.0));
  CHECK(b.m0.sum() == doctest::Approx(0.5));
}

TEST_CASE("degenerate triangle") {
  const std::array<Tri, 1> t{{{0, 1, 2}}};
  const auto c = build_complex(3, t);
  Vertices p(3, 2);
  p << 0, 0, 1, 0, 2, 0;
  try {
    metric_from_embedding(c, p);
    FAIL("expected DegenerateTriangle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateTriangle);
  }
}

TEST_CASE("octahedron edges") {
  const auto s = gen_closed_surface(0, 1);
  CHECK(s.complex.edge_count() == 12);
  const auto m = metric_from_embedding(s.complex, s.positions);
  for (double l : m.edge_length) CHECK(l == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("flat annulus rings") {
  const auto a = gen_annulus(4, 10, 1.0, 2.0);
  const auto m = metric_from_embedding(a.complex, a.positions);
  double radial = -1.0;
  for (std::size_t e = 0; e < a.complex.edge_count(); ++e) {
    const auto& ed = a.complex.edges()[e];
    if (ed[1] - ed[0] != 10) continue;
    if (radial < 0) radial = m.edge_length[e];
    CHECK(m.edge_length[e] == doctest::Approx(radial).epsilon(1e-12));
  }
}

TEST_CASE("warped annulus") {
  const auto flat = warped_annulus_metric(6, 8, 2.0, 0.0);
  for (std::size_t e = 0; e < flat.complex.edge_count(); ++e) {
    const auto& ed = flat.complex.edges()[e];
    if (ed[0] / 8 == ed[1] / 8) CHECK(flat.metric.edge_length[e] == doctest::Approx(2 * std::numbers::pi / 8));
  }
  const auto w = warped_annulus_metric(3, 128, 3.0, 1.0);
  // ring 0 at r=0 and ring 1 at r=1
  const double l0 = w.metric.edge_length[*w.complex.edge_index(0, 1)];
  const double l1 = w.metric.edge_length[*w.complex.edge_index(128, 129)];
  CHECK(l1 / l0 == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  const double radial = w.metric.edge_length[*w.complex.edge_index(0, 128)];
  CHECK(radial == doctest::Approx(1.0));

  const double exact = 2 * std::numbers::pi * (std::exp(3.0) - 1.0);
  double prev_err = 1e9;
  for (int ref : {1, 2, 4}) {
    const auto f = warped_annulus_metric(30 * ref, 256 * ref, 3.0, 1.0);
    const double err = std::abs(f.metric.total_area(f.complex) - exact) / exact;
    CHECK(err < 0.02);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("aspect blowup") {
  try {
    warped_annulus_metric(3, 3, 30.0, 1.0);
    FAIL("expected AspectBlowup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AspectBlowup);
  }
}

TEST_CASE("conformal rescale") {
  const auto s = gen_closed_surface(1, 2);
  const auto g = metric_from_embedding(s.complex, s.positions);
  const std::size_t nt = s.complex.triangle_count();
  const auto same = conformal_rescale(g, std::vector<double>(nt, 0.0));
  CHECK(same.edge_length == g.edge_length);
  CHECK(same.conformal_factor == g.conformal_factor);

  const double c = 0.7;
  const auto scaled = conformal_rescale(g, std::vector<double>(nt, c));
  CHECK(scaled.total_area(s.complex) == doctest::Approx(g.total_area(s.complex) * std::exp(2 * c)).epsilon(1e-13));
  for (std::size_t e = 0; e < s.complex.edge_count(); ++e) {
    CHECK(scaled.effective_edge_length(s.complex, e) == doctest::Approx(g.edge_length[e] * std::exp(c)).epsilon(1e-14));
  }

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> uu(nt), neg(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    uu[t] = u(rng);
    neg[t] = -uu[t];
  }
  const auto back = conformal_rescale(conformal_rescale(g, uu), neg);
  for (std::size_t t = 0; t < nt; ++t) {
    CHECK(back.triangle_area(s.complex, t) == doctest::Approx(g.triangle_area(s.complex, t)).epsilon(1e-12));
  }
}

TEST_CASE("mass operators") {
  const auto s = gen_closed_surface(2, 2);
  const auto g = metric_from_embedding(s.complex, s.positions);
  const auto b = mass_matrices(s.complex, g);
  CHECK(b.m0.minCoeff() > 0);
  CHECK(b.m1.minCoeff() > 0);
  CHECK(b.m2.minCoeff() > 0);
  CHECK(b.m0.sum() == doctest::Approx(g.total_area(s.complex)).epsilon(1e-13));
  CHECK(b.m2.cwiseInverse().sum() == doctest::Approx(g.total_area(s.complex)).epsilon(1e-13));
  CHECK(b.closed());

  // Equilateral triangle: dual/primal = sqrt(3)/6 per side.
  const std::array<Tri, 1> t{{{0, 1, 2}}};
  const auto c = build_complex(3, t);
  Vertices p(3, 2);
  p << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2;
  const auto eb = mass_matrices(c, metric_from_embedding(c, p));
  for (int e = 0; e < 3; ++e) CHECK(eb.m1[e] == doctest::Approx(std::sqrt(3.0) / 6));
}

TEST_CASE("adjointness of d and delta") {
  const auto s = gen_closed_surface(1, 2);
  const auto g = metric_from_embedding(s.complex, s.positions);
  const auto b = mass_matrices(s.complex, g);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n;
  for (int k = 0; k < 2; ++k) {
    const Eigen::SparseMatrix<double> d = (k == 0 ? b.d0 : b.d1).cast<double>();
    VectorXd a(d.cols()), c(d.rows());
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = n(rng);
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = n(rng);
    const VectorXd& mk = b.mass(k);
    const VectorXd& mk1 = b.mass(k + 1);
    const VectorXd da = d * a;
    const VectorXd delta = mk.cwiseInverse().cwiseProduct(VectorXd(d.transpose() * mk1.cwiseProduct(c)));
    const double lhs = da.dot(mk1.cwiseProduct(c));
    const double rhs = a.dot(mk.cwiseProduct(delta));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
  }
}

TEST_CASE("middle degree mass is conformally invariant") {
  const auto s = gen_closed_surface(1, 2);
  const auto g = metric_from_embedding(s.complex, s.positions);
  const auto b = mass_matrices(s.complex, g);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> uu(s.complex.triangle_count());
  for (double& x : uu) x = u(rng);
  const auto r = mass_matrices(s.complex, conformal_rescale(g, uu));
  const double rel = ((r.m1 - b.m1).cwiseQuotient(b.m1)).cwiseAbs().maxCoeff();
  CHECK(rel < 1e-12);
}
