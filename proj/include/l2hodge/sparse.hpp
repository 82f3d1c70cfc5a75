#pragma once

#include "l2hodge/complex.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace l2hodge {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Symmetric sparse matrix with finite entries. Construction validates
/// symmetry to 1e-14 relative to the largest entry.
class SparseSym {
 public:
  SparseSym() = default;
  explicit SparseSym(SparseMatrix matrix);
  static SparseSym from_triplets(std::size_t dimension,
                                 const std::vector<Eigen::Triplet<double>>& triplets);

  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }
  VectorXd diagonal() const { return matrix_.diagonal(); }

 private:
  SparseMatrix matrix_;
};

/// In-place projection applied to CG iterates, typically removing a known
/// kernel.
using Projector = std::function<void(VectorXd&)>;

struct CgOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  Projector projector;  // empty: no deflation
  bool jacobi = true;
  /// Optional per-iteration observer receiving the current iterate.
  std::function<void(const VectorXd&)> observer;
};

struct CgResult {
  VectorXd x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients for a positive semidefinite system. Throws
/// SolverStall if the relative residual does not reach tol.
CgResult cg_solve(const SparseSym& a, const VectorXd& b, const CgOptions& options = {});

/// Direct solve of a symmetric positive definite system by sparse LDLT with
/// one step of iterative refinement. Throws SolverStall if the factorization
/// fails.
VectorXd solve_spd(const SparseSym& a, const VectorXd& b);

/// Projector onto the M-orthogonal complement of span(basis), for an
/// M-orthonormal basis.
Projector mass_orthogonal_projector(MatrixXd basis, VectorXd mass);

struct EigenOptions {
  double tol = 1e-12;  // relative to the Gershgorin bound of M^-1/2 S M^-1/2
  std::size_t max_iter = 1000;
  std::uint64_t seed = 20240607;
  std::size_t extra_block = 8;
};

struct EigenPairs {
  VectorXd values;   // ascending
  MatrixXd vectors;  // M-orthonormal columns
  std::vector<double> residuals;  // ||S x - l M x|| / ||M x||
  bool cluster_warning = false;   // some spacing below 1e-10
  std::size_t iterations = 0;
};

/// Smallest generalized eigenpairs of S x = l M x for positive semidefinite S
/// and positive diagonal M, by shift-inverted block subspace iteration with
/// Rayleigh-Ritz extraction.
EigenPairs smallest_eigenpairs(const SparseSym& s, const VectorXd& mass_diagonal,
                               std::size_t count, const EigenOptions& options = {});

/// Row-echelon rank over GF(prime).
std::size_t rank_gfp(const IntSparse& matrix, std::uint64_t prime);

/// M-orthonormal basis of the span of the columns, same order. Throws
/// RankDeficient with the detected numerical rank.
MatrixXd gram_orthonormalize(const MatrixXd& vectors, const VectorXd& mass_diagonal,
                             double rel_tol = 1e-10);

/// Deterministic 64-bit primality test.
bool is_prime(std::uint64_t n);

}  // namespace l2hodge
