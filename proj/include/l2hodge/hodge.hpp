#pragma once

#include "l2hodge/complex.hpp"
#include "l2hodge/metric.hpp"
#include "l2hodge/sparse.hpp"

#include <array>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace l2hodge {

enum class BoundaryCondition { None, Absolute, Relative };

const char* to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view text);

/// Degree-k Hodge Laplacian as a generalized eigenproblem (stiffness, mass)
/// on the cochains allowed by the boundary condition.
struct Laplacian {
  int degree = 0;
  BoundaryCondition bc = BoundaryCondition::None;
  SparseSym stiffness;
  VectorXd mass;
  std::vector<std::size_t> support;  // retained k-simplices, by parent index
  std::size_t full_dimension = 0;
  std::vector<std::string> warnings;

  VectorXd restrict_cochain(const VectorXd& full) const;
  VectorXd expand_cochain(const VectorXd& restricted) const;
  MatrixXd expand_columns(const MatrixXd& restricted) const;
};

/// d_k between the cochain spaces selected by bc, as a real matrix.
SparseMatrix restricted_coboundary(const OperatorBundle& bundle, int k, BoundaryCondition bc);
std::vector<std::size_t> cochain_indices(const OperatorBundle& bundle, int k, BoundaryCondition bc);

/// Requesting absolute or relative conditions on a closed complex is allowed
/// and adds a BcOnClosedComplex warning.
Laplacian assemble_laplacian(const OperatorBundle& bundle, int k, BoundaryCondition bc);

/// M-norm of M^-1 S v for a cochain in the restricted space.
double laplacian_residual(const Laplacian& laplacian, const VectorXd& restricted);

struct TolPolicy {
  double gap_threshold = 100.0;
  std::size_t probe_extra = 4;
  double floor_rel = 1e-12;
  bool throw_on_ambiguous = true;
  EigenOptions eigen;
};

struct HarmonicBasis {
  int degree = 0;
  BoundaryCondition bc = BoundaryCondition::None;
  MatrixXd vectors;        // full-length cochains, M_k-orthonormal
  VectorXd eigenvalues;    // every computed eigenvalue, ascending
  double gap_certificate = std::numeric_limits<double>::infinity();
  bool ambiguous = false;
  long betti_expected = 0;
  bool betti_match = true;
  std::vector<std::string> warnings;

  std::size_t dimension() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// Kernel dimension chosen where e_m / max(e_{m-1}, floor) is largest, with
/// floor = floor_rel times the operator scale. Throws AmbiguousKernel below
/// gap_threshold unless the policy asks for a flag instead.
HarmonicBasis harmonic_basis(const SimplicialComplex& complex, const OperatorBundle& bundle, int k,
                             BoundaryCondition bc, const TolPolicy& policy = {});

/// Orthogonal projection onto the span of an M-orthonormal basis.
VectorXd project_onto(const MatrixXd& basis, const VectorXd& mass, const VectorXd& v);

/// Operator distance between the M-orthogonal projectors onto two subspaces
/// given by M-orthonormal bases.
double subspace_distance(const MatrixXd& a, const MatrixXd& b, const VectorXd& mass);

struct DecompositionResult {
  VectorXd harmonic;
  VectorXd exact;
  VectorXd coexact;
  double residual = 0.0;         // |w - h - e - c| / |w|
  double orthogonality = 0.0;    // largest pairwise |<x, y>| / |w|^2
  double coclosed_defect = 0.0;  // |d^T M c| / |d^T M w|
  std::size_t cg_iterations = 0;
};

/// Hodge decomposition of a full-length k-cochain. Under the relative
/// condition values on boundary simplices are dropped first.
DecompositionResult hodge_decompose(const SimplicialComplex& complex, const OperatorBundle& bundle,
                                    const VectorXd& cochain, int k, BoundaryCondition bc,
                                    const TolPolicy& policy = {});

struct LottDegree {
  int k = 0;
  std::size_t dim_m = 0;
  std::size_t dim_abs_omega = 0;
  std::size_t dim_rel_omega = 0;
  long b_core = 0;           // b^k(K)
  long b_rel_core = 0;       // b^k(K, dK)
  long b_rel_core_next = 0;  // b^{k+1}(K, dK)
  bool abs_holds = false;          // dim H^k(M) <= dim H^k_abs(O) + b^k(K, dK)
  bool rel_holds = false;          // dim H^k(M) <= dim H^k_rel(O) + b^k(K)
  bool restriction_holds = false;  // dim H^k_abs(O) <= dim H^k(M) + b^{k+1}(K, dK)
  bool abs_equal = false;
  bool rel_equal = false;
};

struct LottReport {
  std::array<LottDegree, 3> degrees;
  std::size_t core_triangles = 0;
  std::size_t complement_triangles = 0;
  bool holds() const;
};

/// Compares harmonic dimensions of M with those of the complement of a core
/// K given by its triangles. Throws BadSplit if K or its complement is empty.
LottReport lott_dimension_check(const SimplicialComplex& complex, const MetricField& metric,
                                std::span<const std::size_t> core_triangles, const TolPolicy& policy = {});

struct CutoffResult {
  double energy = 0.0;
  double target = 0.0;  // 2 pi / log n
  double rings_per_decade = 0.0;
};

/// Cutoff equal to 0 for r <= 1/n^2, log(r n^2) / log n in between and 1
/// for r >= 1/n, sampled at the vertices; returns its M1-energy.
double cutoff_profile(double r, double n);
CutoffResult cutoff_energy(const SimplicialComplex& complex, const Vertices& positions,
                           const MetricField& metric, const Eigen::Vector2d& center, double n);

double cycle_integral(const SimplicialComplex& complex, const VectorXd& cochain, const EdgeCycle& cycle);

struct GenusReport {
  std::vector<double> pairings;  // integral of each handle form over its loop
  std::vector<double> closedness;  // |d1 form|_inf per handle
  MatrixXd gram;                   // Gram matrix of the harmonic projections
  std::size_t rank = 0;
  std::size_t harmonic_dimension = 0;
  bool independent() const { return rank == pairings.size(); }
};

GenusReport genus_lower_bound_experiment(const SurfaceMesh& surface, const MetricField& metric,
                                         std::size_t handle_count, const TolPolicy& policy = {});

}  // namespace l2hodge
