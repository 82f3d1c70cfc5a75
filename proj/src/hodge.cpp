#include "l2hodge/hodge.hpp"

#include "l2hodge/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace l2hodge {

const char* to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::None: return "none";
    case BoundaryCondition::Absolute: return "absolute";
    case BoundaryCondition::Relative: return "relative";
  }
  return "none";
}

BoundaryCondition parse_boundary_condition(std::string_view text) {
  if (text == "none") return BoundaryCondition::None;
  if (text == "absolute") return BoundaryCondition::Absolute;
  if (text == "relative") return BoundaryCondition::Relative;
  throw Error(ErrorCode::InvalidArgument, "unknown boundary condition '" + std::string(text) + "'");
}

namespace {

void check_degree(int k) {
  if (k < 0 || k > 2) throw Error(ErrorCode::DegreeOutOfRange, "degree must be 0, 1 or 2");
}

SparseMatrix to_real(const IntSparse& m) {
  SparseMatrix out = m.cast<double>();
  out.makeCompressed();
  return out;
}

SparseMatrix select_columns(const SparseMatrix& m, const std::vector<std::size_t>& rows,
                            const std::vector<std::size_t>& cols) {
  std::vector<long> col_map(static_cast<std::size_t>(m.cols()), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<long>(j);
  std::vector<long> row_map(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<long>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (int outer = 0; outer < m.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(m, outer); it; ++it) {
      const long r = row_map[static_cast<std::size_t>(it.row())];
      const long c = col_map[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(static_cast<int>(r), static_cast<int>(c), it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

VectorXd gather(const VectorXd& full, const std::vector<std::size_t>& idx) {
  VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[static_cast<Eigen::Index>(idx[i])];
  return out;
}

MatrixXd gather_rows(const MatrixXd& full, const std::vector<std::size_t>& idx) {
  MatrixXd out(static_cast<Eigen::Index>(idx.size()), full.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = full.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

double operator_scale(const SparseMatrix& s, const VectorXd& mass) {
  const VectorXd inv = mass.cwiseSqrt().cwiseInverse();
  double bound = 0.0;
  VectorXd row = VectorXd::Zero(s.rows());
  for (int outer = 0; outer < s.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(s, outer); it; ++it) {
      row[it.row()] += std::abs(it.value()) * inv[it.row()] * inv[it.col()];
    }
  }
  if (row.size() > 0) bound = row.maxCoeff();
  return bound;
}

double m_dot(const VectorXd& a, const VectorXd& b, const VectorXd& m) { return a.dot(m.cwiseProduct(b)); }

}  // namespace

std::vector<std::size_t> cochain_indices(const OperatorBundle& bundle, int k, BoundaryCondition bc) {
  check_degree(k);
  const std::size_t n = bundle.count(k);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (bc == BoundaryCondition::Relative) {
      if (k == 0 && bundle.boundary_vertex[i]) continue;
      if (k == 1 && bundle.boundary_edge[i]) continue;
    }
    out.push_back(i);
  }
  return out;
}

SparseMatrix restricted_coboundary(const OperatorBundle& bundle, int k, BoundaryCondition bc) {
  if (k < 0 || k > 1) throw Error(ErrorCode::DegreeOutOfRange, "coboundary degree must be 0 or 1");
  const SparseMatrix d = to_real(k == 0 ? bundle.d0 : bundle.d1);
  return select_columns(d, cochain_indices(bundle, k + 1, bc), cochain_indices(bundle, k, bc));
}

VectorXd Laplacian::restrict_cochain(const VectorXd& full) const {
  if (static_cast<std::size_t>(full.size()) != full_dimension) {
    throw Error(ErrorCode::InvalidArgument, "cochain has the wrong length");
  }
  return gather(full, support);
}

VectorXd Laplacian::expand_cochain(const VectorXd& restricted) const {
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(full_dimension));
  for (std::size_t i = 0; i < support.size(); ++i) out[static_cast<Eigen::Index>(support[i])] = restricted[static_cast<Eigen::Index>(i)];
  return out;
}

MatrixXd Laplacian::expand_columns(const MatrixXd& restricted) const {
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(full_dimension), restricted.cols());
  for (std::size_t i = 0; i < support.size(); ++i) out.row(static_cast<Eigen::Index>(support[i])) = restricted.row(static_cast<Eigen::Index>(i));
  return out;
}

Laplacian assemble_laplacian(const OperatorBundle& bundle, int k, BoundaryCondition bc) {
  check_degree(k);
  Laplacian lap;
  lap.degree = k;
  lap.bc = bc;
  lap.full_dimension = bundle.count(k);
  lap.support = cochain_indices(bundle, k, bc);
  lap.mass = gather(bundle.mass(k), lap.support);
  if (bc != BoundaryCondition::None && bundle.closed()) {
    lap.warnings.emplace_back("BcOnClosedComplex: boundary condition requested on a closed complex");
  }
  const auto n = static_cast<Eigen::Index>(lap.support.size());
  SparseMatrix s(n, n);
  if (k < 2) {
    const SparseMatrix d = restricted_coboundary(bundle, k, bc);
    const VectorXd mk1 = gather(bundle.mass(k + 1), cochain_indices(bundle, k + 1, bc));
    s += SparseMatrix(d.transpose() * mk1.asDiagonal() * d);
  }
  if (k > 0) {
    const SparseMatrix d = restricted_coboundary(bundle, k - 1, bc);
    const VectorXd mkm1 = gather(bundle.mass(k - 1), cochain_indices(bundle, k - 1, bc));
    const SparseMatrix md = lap.mass.asDiagonal() * d;
    s += SparseMatrix(md * mkm1.cwiseInverse().asDiagonal() * md.transpose());
  }
  const SparseMatrix sym = 0.5 * (s + SparseMatrix(s.transpose()));
  lap.stiffness = SparseSym(sym.pruned());
  return lap;
}

double laplacian_residual(const Laplacian& laplacian, const VectorXd& restricted) {
  const VectorXd sv = laplacian.stiffness.matrix() * restricted;
  return std::sqrt(sv.dot(laplacian.mass.cwiseInverse().cwiseProduct(sv)));
}

HarmonicBasis harmonic_basis(const SimplicialComplex& complex, const OperatorBundle& bundle, int k,
                             BoundaryCondition bc, const TolPolicy& policy) {
  check_degree(k);
  const Laplacian lap = assemble_laplacian(bundle, k, bc);
  HarmonicBasis out;
  out.degree = k;
  out.bc = bc;
  out.warnings = lap.warnings;
  out.betti_expected = betti(complex, bc == BoundaryCondition::Relative).b[static_cast<std::size_t>(k)];

  const std::size_t n = lap.support.size();
  if (n == 0) {
    out.vectors = MatrixXd::Zero(static_cast<Eigen::Index>(lap.full_dimension), 0);
    out.betti_match = out.betti_expected == 0;
    return out;
  }
  const std::size_t count = std::min(n, static_cast<std::size_t>(out.betti_expected) + policy.probe_extra);
  const EigenPairs pairs = smallest_eigenpairs(lap.stiffness, lap.mass, count, policy.eigen);
  out.eigenvalues = pairs.values;

  const double floor = policy.floor_rel * std::max(operator_scale(lap.stiffness.matrix(), lap.mass), 1e-300);
  std::size_t best_m = 0;
  double best = -1.0;
  for (std::size_t m = 0; m < count; ++m) {
    const double below = m == 0 ? 0.0 : std::max(pairs.values[static_cast<Eigen::Index>(m - 1)], 0.0);
    const double cert = std::max(pairs.values[static_cast<Eigen::Index>(m)], 0.0) / std::max(below, floor);
    if (cert > best) {
      best = cert;
      best_m = m;
    }
  }
  if (count == n) {
    const double top = std::max(pairs.values[static_cast<Eigen::Index>(n - 1)], 0.0);
    if (top <= floor) {
      best_m = n;
      best = std::numeric_limits<double>::infinity();
    }
  }
  out.gap_certificate = best;
  out.ambiguous = best < policy.gap_threshold;
  if (out.ambiguous && policy.throw_on_ambiguous) {
    throw Error(ErrorCode::AmbiguousKernel,
                "gap certificate " + std::to_string(best) + " below " + std::to_string(policy.gap_threshold));
  }
  MatrixXd kernel = pairs.vectors.leftCols(static_cast<Eigen::Index>(best_m));
  if (best_m > 0) kernel = gram_orthonormalize(kernel, lap.mass);
  out.vectors = lap.expand_columns(kernel);
  out.betti_match = static_cast<long>(best_m) == out.betti_expected;
  if (!out.betti_match) {
    out.warnings.emplace_back("harmonic dimension " + std::to_string(best_m) + " differs from Betti number " +
                              std::to_string(out.betti_expected));
  }
  return out;
}

VectorXd project_onto(const MatrixXd& basis, const VectorXd& mass, const VectorXd& v) {
  if (basis.cols() == 0) return VectorXd::Zero(v.size());
  return basis * (basis.transpose() * mass.cwiseProduct(v));
}

double subspace_distance(const MatrixXd& a, const MatrixXd& b, const VectorXd& mass) {
  if (a.cols() != b.cols()) return 1.0;
  if (a.cols() == 0) return 0.0;
  const auto one_way = [&](const MatrixXd& x, const MatrixXd& y) {
    const MatrixXd r = x - y * (y.transpose() * mass.asDiagonal() * x);
    const MatrixXd g = r.transpose() * mass.asDiagonal() * r;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (g + g.transpose()));
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  };
  return std::max(one_way(a, b), one_way(b, a));
}

DecompositionResult hodge_decompose(const SimplicialComplex& complex, const OperatorBundle& bundle,
                                    const VectorXd& cochain, int k, BoundaryCondition bc,
                                    const TolPolicy& policy) {
  check_degree(k);
  if (static_cast<std::size_t>(cochain.size()) != bundle.count(k)) {
    throw Error(ErrorCode::InvalidArgument, "cochain degree does not match the bundle");
  }
  const auto idx = cochain_indices(bundle, k, bc);
  const VectorXd mass = gather(bundle.mass(k), idx);
  const VectorXd w = gather(cochain, idx);
  const HarmonicBasis basis = harmonic_basis(complex, bundle, k, bc, policy);
  const MatrixXd h_basis = gather_rows(basis.vectors, idx);

  DecompositionResult out;
  const VectorXd h = project_onto(h_basis, mass, w);
  VectorXd e = VectorXd::Zero(w.size());
  double defect_scale = 0.0;
  SparseMatrix d;
  if (k > 0) {
    d = restricted_coboundary(bundle, k - 1, bc);
    const VectorXd rhs = d.transpose() * mass.cwiseProduct(w);
    defect_scale = rhs.norm();
    if (defect_scale > 0.0) {
      const SparseSym normal(SparseMatrix(d.transpose() * mass.asDiagonal() * d));
      CgOptions opts;
      opts.tol = 1e-12;
      opts.max_iter = 20 * static_cast<std::size_t>(normal.dimension()) + 1000;
      const CgResult sol = cg_solve(normal, rhs, opts);
      out.cg_iterations = sol.iterations;
      e = d * sol.x;
    }
  }
  const VectorXd c = w - h - e;
  const double norm2 = m_dot(w, w, mass);
  const auto expand = [&](const VectorXd& x) {
    VectorXd full = VectorXd::Zero(cochain.size());
    for (std::size_t i = 0; i < idx.size(); ++i) full[static_cast<Eigen::Index>(idx[i])] = x[static_cast<Eigen::Index>(i)];
    return full;
  };
  out.harmonic = expand(h);
  out.exact = expand(e);
  out.coexact = expand(c);
  if (norm2 > 0.0) {
    out.residual = std::sqrt(m_dot(w - h - e - c, w - h - e - c, mass) / norm2);
    out.orthogonality = std::max({std::abs(m_dot(h, e, mass)), std::abs(m_dot(h, c, mass)), std::abs(m_dot(e, c, mass))}) / norm2;
  }
  if (k > 0 && defect_scale > 0.0) {
    out.coclosed_defect = (d.transpose() * mass.cwiseProduct(c)).norm() / defect_scale;
  }
  return out;
}

bool LottReport::holds() const {
  return std::all_of(degrees.begin(), degrees.end(),
                     [](const LottDegree& d) { return d.abs_holds && d.rel_holds && d.restriction_holds; });
}

namespace {

MetricField restrict_metric(const MetricField& metric, const Subcomplex& sub) {
  MetricField out;
  out.source = metric.source;
  out.edge_length.reserve(sub.parent_edge.size());
  for (std::size_t e : sub.parent_edge) out.edge_length.push_back(metric.edge_length[e]);
  out.conformal_factor.reserve(sub.parent_triangle.size());
  for (std::size_t t : sub.parent_triangle) out.conformal_factor.push_back(metric.conformal_factor[t]);
  return out;
}

}  // namespace

LottReport lott_dimension_check(const SimplicialComplex& complex, const MetricField& metric,
                                std::span<const std::size_t> core_triangles, const TolPolicy& policy) {
  std::unordered_set<std::size_t> core(core_triangles.begin(), core_triangles.end());
  for (std::size_t t : core) {
    if (t >= complex.triangle_count()) throw Error(ErrorCode::BadSplit, "core triangle out of range");
  }
  std::vector<std::size_t> core_list(core.begin(), core.end());
  std::sort(core_list.begin(), core_list.end());
  std::vector<std::size_t> rest;
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) {
    if (!core.count(t)) rest.push_back(t);
  }
  if (core_list.empty()) throw Error(ErrorCode::BadSplit, "core has no interior");
  if (rest.empty()) throw Error(ErrorCode::BadSplit, "complement of the core is empty");

  const Subcomplex k_sub = restrict_to_triangles(complex, core_list);
  const Subcomplex omega = restrict_to_triangles(complex, rest);
  const OperatorBundle m_bundle = mass_matrices(complex, metric);
  const MetricField omega_metric = restrict_metric(metric, omega);
  const OperatorBundle o_bundle = mass_matrices(omega.complex, omega_metric);
  const BettiReport k_abs = betti(k_sub.complex, false);
  const BettiReport k_rel = betti(k_sub.complex, true);
  const BoundaryCondition m_bc = complex.is_closed() ? BoundaryCondition::None : BoundaryCondition::Absolute;

  LottReport report;
  report.core_triangles = core_list.size();
  report.complement_triangles = rest.size();
  for (int k = 0; k <= 2; ++k) {
    LottDegree& d = report.degrees[static_cast<std::size_t>(k)];
    d.k = k;
    d.dim_m = harmonic_basis(complex, m_bundle, k, m_bc, policy).dimension();
    d.dim_abs_omega = harmonic_basis(omega.complex, o_bundle, k, BoundaryCondition::Absolute, policy).dimension();
    d.dim_rel_omega = harmonic_basis(omega.complex, o_bundle, k, BoundaryCondition::Relative, policy).dimension();
    d.b_core = k_abs.b[static_cast<std::size_t>(k)];
    d.b_rel_core = k_rel.b[static_cast<std::size_t>(k)];
    d.b_rel_core_next = k < 2 ? k_rel.b[static_cast<std::size_t>(k + 1)] : 0;
    const long abs_rhs = static_cast<long>(d.dim_abs_omega) + d.b_rel_core;
    const long rel_rhs = static_cast<long>(d.dim_rel_omega) + d.b_core;
    d.abs_holds = static_cast<long>(d.dim_m) <= abs_rhs;
    d.rel_holds = static_cast<long>(d.dim_m) <= rel_rhs;
    d.restriction_holds = static_cast<long>(d.dim_abs_omega) <= static_cast<long>(d.dim_m) + d.b_rel_core_next;
    d.abs_equal = static_cast<long>(d.dim_m) == abs_rhs;
    d.rel_equal = static_cast<long>(d.dim_m) == rel_rhs;
  }
  return report;
}

double cutoff_profile(double r, double n) {
  const double inner = 1.0 / (n * n);
  if (r <= inner) return 0.0;
  if (r >= 1.0 / n) return 1.0;
  return std::log(r * n * n) / std::log(n);
}

CutoffResult cutoff_energy(const SimplicialComplex& complex, const Vertices& positions,
                           const MetricField& metric, const Eigen::Vector2d& center, double n) {
  if (!(n > 1.0)) throw Error(ErrorCode::InvalidArgument, "cutoff requires n > 1");
  if (static_cast<std::size_t>(positions.rows()) != complex.vertex_count() || positions.cols() < 2) {
    throw Error(ErrorCode::InvalidArgument, "planar positions required");
  }
  std::vector<double> radius(complex.vertex_count());
  for (std::size_t v = 0; v < radius.size(); ++v) {
    const auto i = static_cast<Eigen::Index>(v);
    radius[v] = std::hypot(positions(i, 0) - center[0], positions(i, 1) - center[1]);
  }
  const double inner = 1.0 / (n * n);
  const double outer = 1.0 / n;
  const double r_min = *std::min_element(radius.begin(), radius.end());
  const double r_max = *std::max_element(radius.begin(), radius.end());
  if (r_min > inner * (1.0 + 1e-12) || r_max < outer) {
    throw Error(ErrorCode::UnderResolved, "mesh does not cover the cutoff transition band");
  }
  std::vector<double> rings;
  for (double r : radius) {
    if (r >= inner * (1.0 - 1e-9) && r <= outer * (1.0 + 1e-9)) rings.push_back(r);
  }
  std::sort(rings.begin(), rings.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (i == 0 || rings[i] > rings[i - 1] * (1.0 + 1e-9)) ++distinct;
  }
  CutoffResult out;
  out.target = 2.0 * std::numbers::pi / std::log(n);
  out.rings_per_decade = distinct > 1 ? static_cast<double>(distinct - 1) / std::log10(n) : 0.0;
  if (out.rings_per_decade < 8.0) {
    throw Error(ErrorCode::UnderResolved, "fewer than 8 rings per decade in the transition band");
  }
  const OperatorBundle bundle = mass_matrices(complex, metric);
  double energy = 0.0;
  for (std::size_t e = 0; e < complex.edge_count(); ++e) {
    const auto& ed = complex.edges()[e];
    const double diff = cutoff_profile(radius[static_cast<std::size_t>(ed[1])], n) -
                        cutoff_profile(radius[static_cast<std::size_t>(ed[0])], n);
    energy += bundle.m1[static_cast<Eigen::Index>(e)] * diff * diff;
  }
  out.energy = energy;
  return out;
}

double cycle_integral(const SimplicialComplex& complex, const VectorXd& cochain, const EdgeCycle& cycle) {
  if (static_cast<std::size_t>(cochain.size()) != complex.edge_count()) {
    throw Error(ErrorCode::InvalidArgument, "1-cochain has the wrong length");
  }
  validate_cycle(complex, cycle);
  double sum = 0.0;
  for (std::size_t i = 0; i < cycle.edges.size(); ++i) {
    sum += cycle.signs[i] * cochain[static_cast<Eigen::Index>(cycle.edges[i])];
  }
  return sum;
}

GenusReport genus_lower_bound_experiment(const SurfaceMesh& surface, const MetricField& metric,
                                         std::size_t handle_count, const TolPolicy& policy) {
  if (handle_count > surface.handles.size()) {
    throw Error(ErrorCode::InvalidArgument, "surface has fewer marked handles than requested");
  }
  GenusReport out;
  if (handle_count == 0) return out;
  const OperatorBundle bundle = mass_matrices(surface.complex, metric);
  const BoundaryCondition bc = surface.complex.is_closed() ? BoundaryCondition::None : BoundaryCondition::Absolute;
  const HarmonicBasis basis = harmonic_basis(surface.complex, bundle, 1, bc, policy);
  out.harmonic_dimension = basis.dimension();
  const SparseMatrix d1 = to_real(bundle.d1);
  MatrixXd projections(static_cast<Eigen::Index>(surface.complex.edge_count()), static_cast<Eigen::Index>(handle_count));
  for (std::size_t i = 0; i < handle_count; ++i) {
    const Handle& handle = surface.handles[i];
    const VectorXd form = Eigen::Map<const VectorXd>(handle.form.data(), static_cast<Eigen::Index>(handle.form.size()));
    out.pairings.push_back(cycle_integral(surface.complex, form, handle.dual_loop));
    const VectorXd df = d1 * form;
    out.closedness.push_back(df.size() ? df.cwiseAbs().maxCoeff() : 0.0);
    projections.col(static_cast<Eigen::Index>(i)) = project_onto(basis.vectors, bundle.m1, form);
  }
  out.gram = projections.transpose() * bundle.m1.asDiagonal() * projections;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(out.gram);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] > 1e-8 * top) ++out.rank;
  }
  return out;
}

}  // namespace l2hodge
