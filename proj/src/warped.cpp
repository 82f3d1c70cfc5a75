#include "l2hodge/warped.hpp"

#include "l2hodge/error.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <cmath>
#include <random>

namespace l2hodge {

const char* to_string(WarpedBc bc) {
  switch (bc) {
    case WarpedBc::CompactSupport: return "compact_support";
    case WarpedBc::AbsoluteAt0: return "absolute_at_0";
    case WarpedBc::RelativeAt0: return "relative_at_0";
  }
  return "compact_support";
}

WarpedBc parse_warped_bc(std::string_view text) {
  if (text == "compact_support") return WarpedBc::CompactSupport;
  if (text == "absolute_at_0") return WarpedBc::AbsoluteAt0;
  if (text == "relative_at_0") return WarpedBc::RelativeAt0;
  throw Error(ErrorCode::InvalidArgument, "unknown warped boundary condition '" + std::string(text) + "'");
}

double ModeProblem::weight(int q, double r) const { return std::exp(warp * (n - 1 - 2 * q) * r); }

ModeProblem mode_problem(int n, int k, double length, double dr, std::vector<double> modes, WarpedBc bc,
                         double warp) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "ambient dimension must be at least 2");
  if (k < 0 || k > n) throw Error(ErrorCode::DegreeOutOfRange, "form degree must lie in [0, n]");
  if (!(length > 0.0) || !std::isfinite(length)) throw Error(ErrorCode::InvalidArgument, "length must be positive");
  if (!(dr > 0.0)) throw Error(ErrorCode::InvalidArgument, "radial step must be positive");
  if (dr > 0.1) throw Error(ErrorCode::GridTooCoarse, "radial step " + std::to_string(dr) + " exceeds 0.1");
  if (!std::isfinite(warp) || warp < 0.0) throw Error(ErrorCode::InvalidArgument, "warp must be finite and >= 0");
  if (modes.empty()) throw Error(ErrorCode::InvalidArgument, "at least one mode required");
  for (double mu : modes) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::InvalidArgument, "modes must be >= 0");
  }
  ModeProblem p;
  p.n = n;
  p.k = k;
  p.length = length;
  p.cells = static_cast<std::size_t>(std::max(1.0, std::round(length / dr)));
  p.dr = length / static_cast<double>(p.cells);
  p.modes = std::move(modes);
  p.bc = bc;
  p.warp = warp;
  p.epsilon_k = n - 1 - 2 * (k - 1);
  return p;
}

const FormBlock* FormLayout::find(int piece, int position, bool on_nodes) const {
  for (const auto& b : blocks) {
    if (b.piece == piece && b.position == position && b.on_nodes == on_nodes) return &b;
  }
  return nullptr;
}

FormLayout form_layout(const ModeProblem& problem, int degree) {
  FormLayout out;
  out.degree = degree;
  if (degree < 0 || degree > problem.n) return out;
  const std::size_t nodes = problem.cells + 1;
  const auto add = [&](int j, int pos, bool node, int q) {
    const std::size_t size = node ? nodes : problem.cells;
    out.blocks.push_back({j, pos, node, q, out.size, size});
    out.size += size;
  };
  for (int j = std::max(0, degree - 2); j <= std::min(degree, problem.n - 2); ++j) {
    switch (degree - j) {
      case 0: add(j, 0, true, j); break;
      case 1:
        add(j, 1, false, j);
        add(j, 1, true, j + 1);
        break;
      default: add(j, 2, false, j + 1); break;
    }
  }
  return out;
}

SparseMatrix mode_coboundary(const ModeProblem& problem, int degree, double s) {
  const FormLayout from = form_layout(problem, degree);
  const FormLayout to = form_layout(problem, degree + 1);
  SparseMatrix d(static_cast<Eigen::Index>(to.size), static_cast<Eigen::Index>(from.size));
  std::vector<Eigen::Triplet<double>> t;
  const double inv = 1.0 / problem.dr;
  const auto difference = [&](const FormBlock& node, const FormBlock& cell, double sign) {
    for (std::size_t c = 0; c < problem.cells; ++c) {
      const auto row = static_cast<int>(cell.offset + c);
      t.emplace_back(row, static_cast<int>(node.offset + c), -sign * inv);
      t.emplace_back(row, static_cast<int>(node.offset + c + 1), sign * inv);
    }
  };
  const auto scaled_identity = [&](const FormBlock& src, const FormBlock& dst, double value) {
    if (value == 0.0) return;
    for (std::size_t i = 0; i < src.size; ++i) {
      t.emplace_back(static_cast<int>(dst.offset + i), static_cast<int>(src.offset + i), value);
    }
  };
  for (const auto& b : from.blocks) {
    if (b.position == 0) {
      const FormBlock* g = to.find(b.piece, 1, false);
      const FormBlock* h = to.find(b.piece, 1, true);
      if (g) difference(b, *g, 1.0);
      if (h) scaled_identity(b, *h, s);
    } else if (b.position == 1) {
      const FormBlock* p = to.find(b.piece, 2, false);
      if (!p) continue;
      if (b.on_nodes) {
        difference(b, *p, 1.0);
      } else {
        scaled_identity(b, *p, -s);
      }
    }
  }
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

VectorXd mode_mass(const ModeProblem& problem, int degree) {
  const FormLayout layout = form_layout(problem, degree);
  VectorXd m(static_cast<Eigen::Index>(layout.size));
  for (const auto& b : layout.blocks) {
    for (std::size_t i = 0; i < b.size; ++i) {
      double value = 0.0;
      if (b.on_nodes) {
        value = problem.weight(b.q, problem.node(i)) * problem.dr;
        if (i == 0 || i == problem.cells) value *= 0.5;
      } else {
        value = problem.weight(b.q, problem.mid(i)) * problem.dr;
      }
      m[static_cast<Eigen::Index>(b.offset + i)] = value;
    }
  }
  return m;
}

std::vector<std::size_t> free_dofs(const ModeProblem& problem, int degree) {
  const bool left = problem.bc == WarpedBc::CompactSupport || problem.bc == WarpedBc::RelativeAt0;
  const bool right = problem.bc == WarpedBc::CompactSupport || problem.bc == WarpedBc::AbsoluteAt0;
  const FormLayout layout = form_layout(problem, degree);
  std::vector<std::size_t> out;
  for (const auto& b : layout.blocks) {
    for (std::size_t i = 0; i < b.size; ++i) {
      if (b.on_nodes && ((left && i == 0) || (right && i == problem.cells))) continue;
      out.push_back(b.offset + i);
    }
  }
  return out;
}

namespace {

void check_form(const ModeProblem& problem, int degree, const ModeForm& form) {
  if (form.size() != problem.modes.size()) throw Error(ErrorCode::InvalidArgument, "one vector per mode required");
  const auto size = static_cast<Eigen::Index>(form_layout(problem, degree).size);
  for (const auto& v : form) {
    if (v.size() != size) throw Error(ErrorCode::InvalidArgument, "mode form has the wrong length");
  }
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

SparseMatrix selection(const std::vector<std::size_t>& keep, std::size_t full) {
  SparseMatrix p(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(full));
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < keep.size(); ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(keep[i]), 1.0);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

// M_{k+1}^{1/2} d_k M_k^{-1/2} between the free dofs of both degrees.
SparseMatrix scaled_coboundary(const ModeProblem& problem, int degree, double s) {
  const auto rows = free_dofs(problem, degree + 1);
  const auto cols = free_dofs(problem, degree);
  const SparseMatrix pr = selection(rows, form_layout(problem, degree + 1).size);
  const SparseMatrix pc = selection(cols, form_layout(problem, degree).size);
  const VectorXd mr = (pr * mode_mass(problem, degree + 1)).cwiseSqrt();
  const VectorXd mc = (pc * mode_mass(problem, degree)).cwiseSqrt().cwiseInverse();
  SparseMatrix d = pr * mode_coboundary(problem, degree, s) * pc.transpose();
  return mr.asDiagonal() * d * mc.asDiagonal();
}

double pair_cell_node(const ModeProblem& problem, const VectorXd& cells_vec, const FormBlock& cell,
                      const VectorXd& nodes_vec, const FormBlock& node, int q) {
  double total = 0.0;
  for (std::size_t c = 0; c < problem.cells; ++c) {
    const double u = cells_vec[static_cast<Eigen::Index>(cell.offset + c)];
    const double v = 0.5 * (nodes_vec[static_cast<Eigen::Index>(node.offset + c)] +
                            nodes_vec[static_cast<Eigen::Index>(node.offset + c + 1)]);
    total += u * v * problem.weight(q, problem.mid(c)) * problem.dr;
  }
  return total;
}

void record(InequalityReport& report, double greater, double lesser) {
  const double scale = std::max({std::abs(greater), std::abs(lesser), 1e-300});
  const double margin = (greater - lesser) / scale;
  if (report.samples == 0 || margin < report.worst_margin) report.worst_margin = margin;
  if (margin < -1e-8) ++report.violations;
  ++report.samples;
}

}  // namespace

ModeForm zero_form(const ModeProblem& problem, int degree) {
  return ModeForm(problem.modes.size(), VectorXd::Zero(static_cast<Eigen::Index>(form_layout(problem, degree).size)));
}

double form_norm2(const ModeProblem& problem, int degree, const ModeForm& form) {
  check_form(problem, degree, form);
  const VectorXd m = mode_mass(problem, degree);
  double total = 0.0;
  for (const auto& v : form) total += v.dot(m.cwiseProduct(v));
  return total;
}

ModeForm apply_d(const ModeProblem& problem, int degree, const ModeForm& form) {
  check_form(problem, degree, form);
  ModeForm out;
  for (std::size_t i = 0; i < form.size(); ++i) {
    out.push_back(mode_coboundary(problem, degree, std::sqrt(problem.modes[i])) * form[i]);
  }
  return out;
}

ModeForm apply_delta(const ModeProblem& problem, int degree, const ModeForm& form) {
  check_form(problem, degree, form);
  const VectorXd m = mode_mass(problem, degree);
  const VectorXd m_lower = mode_mass(problem, degree - 1);
  ModeForm out;
  for (std::size_t i = 0; i < form.size(); ++i) {
    const SparseMatrix d = mode_coboundary(problem, degree - 1, std::sqrt(problem.modes[i]));
    const VectorXd y = d.transpose() * m.cwiseProduct(form[i]);
    out.push_back(y.cwiseQuotient(m_lower));
  }
  return out;
}

std::vector<VectorXd> mode_spectrum(const ModeProblem& problem, std::size_t count, const EigenOptions& options) {
  std::vector<VectorXd> out;
  for (double mu : problem.modes) {
    const double s = std::sqrt(mu);
    SparseMatrix up = scaled_coboundary(problem, problem.k, s);
    SparseMatrix down = scaled_coboundary(problem, problem.k - 1, s);
    SparseMatrix a = SparseMatrix(up.transpose()) * up;
    if (down.size() > 0) a += down * SparseMatrix(down.transpose());
    a = 0.5 * (a + SparseMatrix(a.transpose()));
    const std::size_t dim = static_cast<std::size_t>(a.rows());
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "no free degrees of freedom");
    const EigenPairs pairs = smallest_eigenpairs(SparseSym(a), VectorXd::Ones(a.rows()), std::min(count, dim), options);
    out.push_back(pairs.values);
  }
  return out;
}

double mode_lambda0(const ModeProblem& problem, const EigenOptions& options) {
  if (problem.k != 0) throw Error(ErrorCode::InvalidArgument, "mode_lambda0 is defined for functions (k = 0)");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : mode_spectrum(problem, 1, options)) best = std::min(best, v[0]);
  return best;
}

VectorXd sample_profile(std::span<const double> nodes, double lo, double hi, std::uint64_t seed) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "sample support must be non-empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const double width = hi - lo;
  std::array<double, 3> centre{};
  std::array<double, 3> spread{};
  std::array<double, 3> amplitude{};
  for (std::size_t b = 0; b < 3; ++b) {
    centre[b] = lo + width * (0.1 + 0.8 * unit(rng));
    spread[b] = width * (0.05 + 0.15 * unit(rng));
    amplitude[b] = normal(rng);
  }
  const double ramp = 0.1 * width;
  VectorXd out(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    double v = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      const double z = (x - centre[b]) / spread[b];
      v += amplitude[b] * std::exp(-z * z);
    }
    out[static_cast<Eigen::Index>(i)] = v * smooth_step((x - lo) / ramp) * smooth_step((hi - x) / ramp);
  }
  return out;
}

ModeForm sample_form(const ModeProblem& problem, int degree, std::uint64_t seed) {
  const FormLayout layout = form_layout(problem, degree);
  std::vector<double> node_r(problem.cells + 1);
  std::vector<double> mid_r(problem.cells);
  for (std::size_t i = 0; i <= problem.cells; ++i) node_r[i] = problem.node(i);
  for (std::size_t c = 0; c < problem.cells; ++c) mid_r[c] = problem.mid(c);
  const double lo = 0.1 * problem.length;
  const double hi = 0.8 * problem.length;
  std::mt19937_64 rng(seed);
  ModeForm out;
  for (std::size_t m = 0; m < problem.modes.size(); ++m) {
    VectorXd v(static_cast<Eigen::Index>(layout.size));
    for (const auto& b : layout.blocks) {
      const VectorXd piece = sample_profile(b.on_nodes ? std::span<const double>(node_r) : std::span<const double>(mid_r), lo, hi, rng());
      v.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size)) = piece;
    }
    out.push_back(std::move(v));
  }
  return out;
}

InequalityReport mode_gap_check(const ModeProblem& problem, std::size_t samples, std::uint64_t seed) {
  const double c = problem.half_width() - problem.warp * problem.k;
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "gap check requires k < (n-1)/2");
  InequalityReport report;
  report.check = "gap";
  report.constant = 0.5 * c * c;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    const ModeForm alpha = sample_form(problem, problem.k, rng());
    const double lhs = form_norm2(problem, problem.k + 1, apply_d(problem, problem.k, alpha)) +
                       form_norm2(problem, problem.k - 1, apply_delta(problem, problem.k, alpha));
    record(report, lhs, report.constant * form_norm2(problem, problem.k, alpha));
  }
  return report;
}

InequalityReport hardy_check(int n, int k, double length, double dr, std::size_t samples, std::uint64_t seed) {
  const ModeProblem grid = mode_problem(n, std::clamp(k, 0, n), length, dr, {0.0});
  const double c = 0.5 * (n - 1) - (k - 1);
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "Hardy check requires k - 1 < (n-1)/2");
  InequalityReport report;
  report.check = "hardy";
  report.constant = c * c;
  const std::size_t nodes = grid.cells + 1;
  std::vector<double> r(nodes);
  for (std::size_t i = 0; i < nodes; ++i) r[i] = grid.node(i);
  const auto weighted = [&](const VectorXd& f) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
      const auto a = static_cast<Eigen::Index>(i);
      total += 0.5 * grid.dr * (f[a] * f[a] * std::exp((n - 1) * r[i]) + f[a + 1] * f[a + 1] * std::exp((n - 1) * r[i + 1]));
    }
    return total;
  };
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const VectorXd v = sample_profile(r, 0.1 * length, 0.8 * length, rng());
    VectorXd mv = VectorXd::Zero(static_cast<Eigen::Index>(nodes));
    double integral = 0.0;
    for (std::size_t i = nodes - 1; i-- > 0;) {
      const auto a = static_cast<Eigen::Index>(i);
      integral += 0.5 * grid.dr * (v[a] * std::exp((k - 1) * r[i]) + v[a + 1] * std::exp((k - 1) * r[i + 1]));
      mv[a] = std::exp(-(k - 1) * r[i]) * integral;
    }
    record(report, weighted(v), report.constant * weighted(mv));
  }
  return report;
}

double donnelly_xavier_lhs(const ModeProblem& problem, const ModeForm& alpha) {
  const int k = problem.k;
  check_form(problem, k, alpha);
  const FormLayout here = form_layout(problem, k);
  const FormLayout below = form_layout(problem, k - 1);
  const FormLayout above = form_layout(problem, k + 1);
  const ModeForm delta = apply_delta(problem, k, alpha);
  const ModeForm d = apply_d(problem, k, alpha);
  double total = 0.0;
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    for (const auto& b : here.blocks) {
      if (!b.on_nodes) {
        // (i_X a, delta a): the dr-component against the node part one step down.
        const FormBlock* node = below.find(b.piece, b.position - 1, true);
        if (node) total -= pair_cell_node(problem, alpha[m], b, delta[m], *node, b.q);
      } else {
        // (i_X d a, a)
        const FormBlock* cell = above.find(b.piece, b.position + 1, false);
        if (cell) total -= pair_cell_node(problem, d[m], *cell, alpha[m], b, b.q);
      }
    }
  }
  return total;
}

InequalityReport donnelly_xavier_check(const ModeProblem& problem, std::size_t samples, std::uint64_t seed) {
  InequalityReport report;
  report.check = "donnelly_xavier";
  report.constant = problem.half_width() - problem.warp * problem.k;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    const ModeForm alpha = sample_form(problem, problem.k, rng());
    record(report, donnelly_xavier_lhs(problem, alpha), report.constant * form_norm2(problem, problem.k, alpha));
  }
  return report;
}

PrimitiveReport flow_primitive(const ModeProblem& problem, const ModeForm& alpha, double margin) {
  const int k = problem.k;
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "a primitive needs k >= 1");
  if (2 * k > problem.n - 1) throw Error(ErrorCode::InvalidArgument, "flow primitive requires k <= (n-1)/2");
  check_form(problem, k, alpha);
  PrimitiveReport out;
  out.bound = 2.0 / (problem.half_width() - problem.warp * (k - 1));
  out.beta = zero_form(problem, k - 1);
  const double norm2 = form_norm2(problem, k, alpha);
  if (norm2 == 0.0) return out;
  const double closed = std::sqrt(form_norm2(problem, k + 1, apply_d(problem, k, alpha)));
  if (closed > 1e-10 * std::sqrt(norm2)) {
    throw Error(ErrorCode::NotClosed, "|d alpha| / |alpha| = " + std::to_string(closed / std::sqrt(norm2)));
  }
  const FormLayout here = form_layout(problem, k);
  const FormLayout below = form_layout(problem, k - 1);
  const VectorXd mass = mode_mass(problem, k);
  const double cut = problem.length - margin;
  double tail = 0.0;
  for (const auto& v : alpha) {
    for (const auto& b : here.blocks) {
      for (std::size_t i = 0; i < b.size; ++i) {
        const double r = b.on_nodes ? problem.node(i) : problem.mid(i);
        const auto idx = static_cast<Eigen::Index>(b.offset + i);
        if (r > cut) tail += mass[idx] * v[idx] * v[idx];
      }
    }
  }
  if (tail > 1e-8 * norm2) {
    throw Error(ErrorCode::TailTooFat, "relative mass " + std::to_string(tail / norm2) + " beyond L - margin");
  }
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    for (const auto& b : here.blocks) {
      if (b.on_nodes) continue;
      const FormBlock* target = below.find(b.piece, b.position - 1, true);
      if (!target) continue;
      double running = 0.0;
      for (std::size_t i = problem.cells; i-- > 0;) {
        running += alpha[m][static_cast<Eigen::Index>(b.offset + i)] * problem.dr;
        out.beta[m][static_cast<Eigen::Index>(target->offset + i)] = -running;
      }
    }
  }
  ModeForm diff = apply_d(problem, k - 1, out.beta);
  for (std::size_t m = 0; m < diff.size(); ++m) diff[m] -= alpha[m];
  out.residual = std::sqrt(form_norm2(problem, k, diff) / norm2);
  out.norm_ratio = std::sqrt(form_norm2(problem, k - 1, out.beta) / norm2);
  return out;
}

ModeForm least_squares_primitive(const ModeProblem& problem, const ModeForm& alpha, double tol) {
  const int k = problem.k;
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "a primitive needs k >= 1");
  check_form(problem, k, alpha);
  const VectorXd m_here = mode_mass(problem, k).cwiseSqrt();
  const VectorXd m_below = mode_mass(problem, k - 1).cwiseSqrt();
  ModeForm out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const SparseMatrix d = m_here.asDiagonal() * mode_coboundary(problem, k - 1, std::sqrt(problem.modes[i])) *
                           m_below.cwiseInverse().asDiagonal();
    Eigen::LeastSquaresConjugateGradient<SparseMatrix> solver;
    solver.setTolerance(tol);
    solver.setMaxIterations(static_cast<Eigen::Index>(50 * d.cols()));
    solver.compute(d);
    const VectorXd y = solver.solve(m_here.cwiseProduct(alpha[i]));
    if (solver.info() != Eigen::Success) {
      throw SolverStall(static_cast<std::size_t>(solver.iterations()), solver.error(), "least-squares primitive did not converge");
    }
    out.push_back(y.cwiseQuotient(m_below));
  }
  return out;
}

ModeForm pullback(const ModeProblem& problem, int degree, const ModeForm& alpha, std::size_t shift_cells) {
  check_form(problem, degree, alpha);
  const FormLayout layout = form_layout(problem, degree);
  ModeForm out = zero_form(problem, degree);
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    for (const auto& b : layout.blocks) {
      for (std::size_t i = 0; i + shift_cells < b.size; ++i) {
        out[m][static_cast<Eigen::Index>(b.offset + i)] = alpha[m][static_cast<Eigen::Index>(b.offset + i + shift_cells)];
      }
    }
  }
  return out;
}

double tail_norm2(const ModeProblem& problem, int degree, const ModeForm& alpha, std::size_t from_cell) {
  check_form(problem, degree, alpha);
  const FormLayout layout = form_layout(problem, degree);
  const VectorXd mass = mode_mass(problem, degree);
  double total = 0.0;
  for (const auto& v : alpha) {
    for (const auto& b : layout.blocks) {
      for (std::size_t i = from_cell; i < b.size; ++i) {
        const auto idx = static_cast<Eigen::Index>(b.offset + i);
        total += mass[idx] * v[idx] * v[idx];
      }
    }
  }
  return total;
}

VanishingReport vanishing_check(const ModeProblem& problem, const EigenOptions& options) {
  VanishingReport out;
  double c = 0.0;
  if (problem.bc == WarpedBc::AbsoluteAt0 && 2 * problem.k < problem.n - 1) {
    c = problem.half_width() - problem.warp * problem.k;
  } else if (problem.bc == WarpedBc::RelativeAt0 && 2 * problem.k > problem.n + 1) {
    c = problem.half_width() - problem.warp * (problem.n - problem.k);
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "vanishing needs k < (n-1)/2 with absolute_at_0 or k > (n+1)/2 with relative_at_0");
  }
  out.bound = 0.5 * c * c;
  out.smallest = std::numeric_limits<double>::infinity();
  for (const auto& v : mode_spectrum(problem, 1, options)) {
    out.smallest_per_mode.push_back(v[0]);
    out.smallest = std::min(out.smallest, v[0]);
  }
  return out;
}

OracleTable analytic_oracle(std::string_view name, std::span<const double> nodes, double a, double b) {
  std::function<double(double)> w;
  std::function<double(double)> u;
  bool positive = false;
  if (name == "sigma_harmonic") {
    w = [](double t) { return std::exp(t); };
    u = [a, b](double t) { return a * std::exp(-t) + b; };
  } else if (name == "cosh_tanh") {
    w = [](double t) { return std::cosh(t) * std::cosh(t); };
    u = [](double t) { return std::tanh(t); };
  } else if (name == "flat_log") {
    w = [](double r) { return r; };
    u = [](double r) { return std::log(r); };
    positive = true;
  } else if (name == "r3_capacity") {
    w = [](double r) { return r * r; };
    u = [](double r) { return 1.0 / r; };
    positive = true;
  } else {
    throw Error(ErrorCode::UnknownOracle, "unknown oracle '" + std::string(name) + "'");
  }
  if (nodes.size() < 3) throw Error(ErrorCode::InvalidArgument, "oracle tables need at least three nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw Error(ErrorCode::InvalidArgument, "oracle nodes must increase");
    if (positive && !(nodes[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle needs positive radii");
  }
  OracleTable out;
  out.name = std::string(name);
  out.nodes.assign(nodes.begin(), nodes.end());
  for (double x : nodes) out.values.push_back(u(x));
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const double hl = nodes[i] - nodes[i - 1];
    const double hr = nodes[i + 1] - nodes[i];
    const double fr = w(0.5 * (nodes[i] + nodes[i + 1])) * (out.values[i + 1] - out.values[i]) / hr;
    const double fl = w(0.5 * (nodes[i - 1] + nodes[i])) * (out.values[i] - out.values[i - 1]) / hl;
    out.residual = std::max(out.residual, std::abs(fr - fl) / (0.5 * (hl + hr) * w(nodes[i])));
  }
  return out;
}

}  // namespace l2hodge
