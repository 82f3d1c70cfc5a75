#include <doctest.h>

#include "l2hodge/error.hpp"
#include "l2hodge/warped.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace l2hodge;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Dense weighted Laplacian of one mode, built independently from the sparse
// pipeline: S = D^T M D + M D' M^-1 D'^T M restricted to the free dofs.
double dense_smallest(const ModeProblem& p, double s) {
  const auto restrict_to = [&](int degree) {
    const auto keep = free_dofs(p, degree);
    MatrixXd sel = MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()),
                                  static_cast<Eigen::Index>(form_layout(p, degree).size));
    for (std::size_t i = 0; i < keep.size(); ++i) sel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(keep[i])) = 1.0;
    return sel;
  };
  const MatrixXd pk = restrict_to(p.k);
  const MatrixXd pu = restrict_to(p.k + 1);
  const MatrixXd pd = restrict_to(p.k - 1);
  const MatrixXd up = pu * MatrixXd(mode_coboundary(p, p.k, s)) * pk.transpose();
  const VectorXd mk = pk * mode_mass(p, p.k);
  const VectorXd mu = pu * mode_mass(p, p.k + 1);
  MatrixXd stiff = up.transpose() * mu.asDiagonal() * up;
  if (p.k > 0) {
    const MatrixXd down = pk * MatrixXd(mode_coboundary(p, p.k - 1, s)) * pd.transpose();
    const VectorXd md = pd * mode_mass(p, p.k - 1);
    stiff += mk.asDiagonal() * down * md.cwiseInverse().asDiagonal() * down.transpose() * mk.asDiagonal();
  }
  const VectorXd inv = mk.cwiseSqrt().cwiseInverse();
  const MatrixXd sym = inv.asDiagonal() * stiff * inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (sym + sym.transpose()));
  return eig.eigenvalues()[0];
}

}  // namespace

TEST_CASE("mode_problem validation and stored constants") {
  const ModeProblem p = mode_problem(5, 1, 10.0, 0.03, {0.0, 1.0});
  CHECK(p.epsilon_k == 4);
  CHECK(p.cells == 333);
  CHECK(p.dr == doctest::Approx(10.0 / 333));
  CHECK(code_of([] { mode_problem(3, 1, 10.0, 0.2, {0.0}); }) == ErrorCode::GridTooCoarse);
  CHECK(code_of([] { mode_problem(1, 0, 10.0, 0.05, {0.0}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { mode_problem(3, 4, 10.0, 0.05, {0.0}); }) == ErrorCode::DegreeOutOfRange);
  CHECK(code_of([] { mode_problem(3, 1, 10.0, 0.05, {-1.0}); }) == ErrorCode::InvalidArgument);
  CHECK(parse_warped_bc(to_string(WarpedBc::RelativeAt0)) == WarpedBc::RelativeAt0);
}

TEST_CASE("layouts cover every form component") {
  for (int n = 2; n <= 5; ++n) {
    const ModeProblem p = mode_problem(n, 0, 1.0, 0.1, {1.0});
    for (int k = 0; k <= n; ++k) {
      const FormLayout l = form_layout(p, k);
      CHECK(!l.blocks.empty());
      for (const auto& b : l.blocks) CHECK(b.piece + b.position == k);
    }
    CHECK(form_layout(p, -1).size == 0);
    CHECK(form_layout(p, n + 1).size == 0);
  }
}

TEST_CASE("n=2 function mode masses scale with the volume density") {
  const ModeProblem p = mode_problem(2, 0, 2.0, 0.1, {0.0, 1.0, 4.0});
  const VectorXd m0 = mode_mass(p, 0);
  for (std::size_t i = 1; i < p.cells; ++i) CHECK(m0[static_cast<Eigen::Index>(i)] == doctest::Approx(std::exp(p.node(i)) * p.dr));
  const FormLayout one = form_layout(p, 1);
  const VectorXd m1 = mode_mass(p, 1);
  const FormBlock* h = one.find(0, 1, true);
  REQUIRE(h);
  for (std::size_t i = 1; i < p.cells; ++i) {
    CHECK(m1[static_cast<Eigen::Index>(h->offset + i)] == doctest::Approx(std::exp(-p.node(i)) * p.dr));
  }
}

TEST_CASE("d o d = 0 and delta is the weighted adjoint") {
  for (int n : {2, 3, 5}) {
    const ModeProblem p = mode_problem(n, 0, 3.0, 0.05, {0.0, 2.0, 9.0});
    for (int k = 0; k + 1 < n; ++k) {
      const ModeForm a = sample_form(p, k, 7 + static_cast<std::uint64_t>(k));
      const ModeForm dd = apply_d(p, k + 1, apply_d(p, k, a));
      CHECK(std::sqrt(form_norm2(p, k + 2, dd)) <= 1e-9 * std::sqrt(form_norm2(p, k, a)) / (p.dr * p.dr));
      const ModeForm b = sample_form(p, k + 1, 11 + static_cast<std::uint64_t>(k));
      const ModeForm da = apply_d(p, k, a);
      const ModeForm db = apply_delta(p, k + 1, b);
      const VectorXd m_up = mode_mass(p, k + 1);
      const VectorXd m = mode_mass(p, k);
      double lhs = 0.0;
      double rhs = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        lhs += da[i].dot(m_up.cwiseProduct(b[i]));
        rhs += a[i].dot(m.cwiseProduct(db[i]));
      }
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("mode_lambda0 on the exponentially warped surface") {
  const ModeProblem p50 = mode_problem(2, 0, 50.0, 0.01, {0.0, 1.0, 4.0});
  const double l50 = mode_lambda0(p50);
  CHECK(l50 >= 0.25);
  CHECK(l50 <= 0.2625);
  CHECK(l50 == doctest::Approx(0.25 + (kPi / 50) * (kPi / 50)).epsilon(1e-3));
  const ModeProblem p25 = mode_problem(2, 0, 25.0, 0.01, {0.0, 1.0, 4.0});
  CHECK(l50 <= mode_lambda0(p25));
  const ModeProblem flat = mode_problem(2, 0, kPi, 0.01, {0.0}, WarpedBc::CompactSupport, 0.0);
  CHECK(mode_lambda0(flat) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(code_of([] { mode_lambda0(mode_problem(2, 1, 5.0, 0.05, {0.0})); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("gap inequality on compactly supported samples") {
  const auto r51 = mode_gap_check(mode_problem(5, 1, 10.0, 0.01, {0.0, 1.0, 2.0, 5.0}), 100, 1);
  CHECK(r51.constant == doctest::Approx(0.5));
  CHECK(r51.samples == 100);
  CHECK(r51.violations == 0);
  CHECK(r51.worst_margin >= -1e-8);
  const auto r30 = mode_gap_check(mode_problem(3, 0, 10.0, 0.01, {0.0, 1.0, 2.0}), 100, 2);
  CHECK(r30.constant == doctest::Approx(0.5));
  CHECK(r30.violations == 0);
  CHECK(code_of([] { mode_gap_check(mode_problem(3, 1, 5.0, 0.05, {0.0}), 1, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Hardy inequality for the tail operator") {
  const auto a = hardy_check(3, 1, 10.0, 0.01, 100, 3);
  CHECK(a.constant == doctest::Approx(1.0));
  CHECK(a.violations == 0);
  const auto b = hardy_check(5, 2, 10.0, 0.01, 100, 4);
  CHECK(b.constant == doctest::Approx(1.0));
  CHECK(b.violations == 0);
  CHECK(b.worst_margin >= -1e-8);
}

TEST_CASE("Donnelly-Xavier inequality") {
  const ModeProblem p = mode_problem(5, 1, 10.0, 0.01, {0.0, 1.0, 3.0});
  const auto r = donnelly_xavier_check(p, 100, 5);
  CHECK(r.constant == doctest::Approx(1.0));
  CHECK(r.violations == 0);
  const ModeProblem middle = mode_problem(3, 1, 10.0, 0.01, {0.0, 1.0});
  const auto m = donnelly_xavier_check(middle, 50, 6);
  CHECK(m.constant == doctest::Approx(0.0));
  CHECK(m.violations == 0);
  // Zero form: both sides vanish.
  CHECK(donnelly_xavier_lhs(p, zero_form(p, 1)) == 0.0);
}

TEST_CASE("flow primitive of an exact form") {
  const ModeProblem p = mode_problem(5, 1, 10.0, 0.01, {0.0, 1.0, 4.0});
  const ModeProblem p0 = mode_problem(5, 0, 10.0, 0.01, {0.0, 1.0, 4.0});
  const ModeForm alpha = apply_d(p0, 0, sample_form(p0, 0, 21));
  const PrimitiveReport rep = flow_primitive(p, alpha);
  CHECK(rep.bound == doctest::Approx(1.0));
  CHECK(rep.residual < 1e-6);
  CHECK(rep.norm_ratio <= rep.bound + 1e-6);
  const PrimitiveReport zero = flow_primitive(p, zero_form(p, 1));
  CHECK(zero.residual == 0.0);
  CHECK(form_norm2(p0, 0, zero.beta) == 0.0);
}

TEST_CASE("flow primitive agrees with a least-squares primitive") {
  const ModeProblem p = mode_problem(3, 1, 10.0, 0.02, {0.0, 1.0, 2.0});
  const ModeProblem p0 = mode_problem(3, 0, 10.0, 0.02, {0.0, 1.0, 2.0});
  const ModeForm alpha = apply_d(p0, 0, sample_form(p0, 0, 33));
  const PrimitiveReport rep = flow_primitive(p, alpha);
  CHECK(rep.residual < 1e-6);
  CHECK(rep.norm_ratio <= 2.0 + 1e-6);
  const ModeForm ls = least_squares_primitive(p, alpha);
  ModeForm diff = apply_d(p0, 0, ls);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= apply_d(p0, 0, rep.beta)[i];
  CHECK(std::sqrt(form_norm2(p, 1, diff) / form_norm2(p, 1, alpha)) < 1e-6);
}

TEST_CASE("flow primitive of two-forms in dimension five") {
  const ModeProblem p = mode_problem(5, 2, 10.0, 0.01, {0.0, 1.0});
  const ModeProblem p1 = mode_problem(5, 1, 10.0, 0.01, {0.0, 1.0});
  const ModeForm alpha = apply_d(p1, 1, sample_form(p1, 1, 41));
  const PrimitiveReport rep = flow_primitive(p, alpha);
  CHECK(rep.bound == doctest::Approx(2.0));
  CHECK(rep.residual < 1e-6);
  CHECK(rep.within_bound());
}

TEST_CASE("flow primitive errors") {
  const ModeProblem p = mode_problem(5, 1, 10.0, 0.05, {1.0});
  CHECK(code_of([&] { flow_primitive(p, sample_form(p, 1, 2)); }) == ErrorCode::NotClosed);
  const ModeProblem p0 = mode_problem(5, 0, 10.0, 0.05, {1.0});
  ModeForm f = zero_form(p0, 0);
  for (std::size_t i = 0; i <= p0.cells; ++i) f[0][static_cast<Eigen::Index>(i)] = p0.node(i) * p0.node(i);
  CHECK(code_of([&] { flow_primitive(p, apply_d(p0, 0, f)); }) == ErrorCode::TailTooFat);
  const ModeProblem high = mode_problem(3, 2, 10.0, 0.05, {1.0});
  CHECK(code_of([&] { flow_primitive(high, zero_form(high, 2)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pullback decays along the flow") {
  const ModeProblem p = mode_problem(5, 2, 10.0, 0.01, {0.0, 1.0});
  const ModeForm a = sample_form(p, 2, 51);
  for (std::size_t shift : {10U, 100U, 300U}) {
    const double pulled = form_norm2(p, 2, pullback(p, 2, a, shift));
    CHECK(pulled <= tail_norm2(p, 2, a, shift) * (1 + 1e-12));
  }
  CHECK(tail_norm2(p, 2, a, 0) == doctest::Approx(form_norm2(p, 2, a)));
}

TEST_CASE("vanishing of absolute and relative harmonic fields") {
  const std::vector<double> modes{0.0, 1.0, 4.0};
  for (double L : {10.0, 20.0, 40.0}) {
    const auto a = vanishing_check(mode_problem(5, 1, L, 0.01, modes, WarpedBc::AbsoluteAt0));
    CHECK(a.bound == doctest::Approx(0.5));
    CHECK(a.smallest >= 0.45);
    const auto r = vanishing_check(mode_problem(5, 4, L, 0.01, modes, WarpedBc::RelativeAt0));
    CHECK(r.smallest >= 0.45);
  }
  const ModeProblem small_abs = mode_problem(5, 1, 10.0, 0.05, modes, WarpedBc::AbsoluteAt0);
  const auto sparse = vanishing_check(small_abs);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    CHECK(sparse.smallest_per_mode[i] == doctest::Approx(dense_smallest(small_abs, std::sqrt(modes[i]))).epsilon(1e-8));
  }
  const ModeProblem small_rel = mode_problem(5, 4, 10.0, 0.05, modes, WarpedBc::RelativeAt0);
  const auto rel = vanishing_check(small_rel);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    CHECK(rel.smallest_per_mode[i] == doctest::Approx(dense_smallest(small_rel, std::sqrt(modes[i]))).epsilon(1e-8));
  }
  CHECK(code_of([] { vanishing_check(mode_problem(5, 2, 10.0, 0.05, {0.0}, WarpedBc::AbsoluteAt0)); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("middle degree on the surface: every mode brings a near-kernel vector") {
  std::vector<double> modes;
  for (int m = 1; m <= 8; ++m) modes.push_back(static_cast<double>(m * m));
  const ModeProblem p = mode_problem(2, 1, 20.0, 0.01, modes, WarpedBc::AbsoluteAt0);
  const auto spectrum = mode_spectrum(p, 1);
  for (const auto& v : spectrum) CHECK(v[0] < 1e-6);
  const ModeProblem small = mode_problem(2, 1, 10.0, 0.05, {1.0, 4.0}, WarpedBc::AbsoluteAt0);
  const auto s = mode_spectrum(small, 1);
  CHECK(s[0][0] == doctest::Approx(dense_smallest(small, 1.0)).epsilon(1e-6));
  // Contrast: below the middle degree nothing approaches zero.
  const ModeProblem five = mode_problem(5, 1, 20.0, 0.01, modes, WarpedBc::AbsoluteAt0);
  for (const auto& v : mode_spectrum(five, 1)) CHECK(v[0] > 0.45);
}

TEST_CASE("analytic oracles") {
  for (const char* name : {"sigma_harmonic", "cosh_tanh", "flat_log", "r3_capacity"}) {
    std::vector<double> coarse;
    std::vector<double> fine;
    for (int i = 0; i <= 100; ++i) coarse.push_back(1.0 + 2.0 * i / 100);
    for (int i = 0; i <= 200; ++i) fine.push_back(1.0 + 2.0 * i / 200);
    const double rc = analytic_oracle(name, coarse).residual;
    const double rf = analytic_oracle(name, fine).residual;
    CHECK(rc <= 10.0 * 0.02 * 0.02);
    CHECK(rf <= 10.0 * 0.01 * 0.01);
    if (rc > 1e-9) CHECK(rc / rf == doctest::Approx(4.0).epsilon(0.05));
  }
  std::vector<double> pos;
  for (int i = 0; i <= 100; ++i) pos.push_back(1.0 + i * 0.01);
  CHECK(analytic_oracle("flat_log", pos).residual < 1e-4);
  CHECK(analytic_oracle("r3_capacity", pos).residual < 1e-3);
  const auto s = analytic_oracle("sigma_harmonic", pos, 2.0, 1.0);
  CHECK(s.values[0] == doctest::Approx(2.0 * std::exp(-1.0) + 1.0));
  CHECK(code_of([&] { analytic_oracle("bessel", pos); }) == ErrorCode::UnknownOracle);
  std::vector<double> bad{-1.0, 0.0, 1.0};
  CHECK(code_of([&] { analytic_oracle("flat_log", bad); }) == ErrorCode::InvalidArgument);
}
