#include "l2hodge/sparse.hpp"

#include "l2hodge/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>

namespace l2hodge {

SparseSym::SparseSym(SparseMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::InvalidArgument, "SparseSym requires a square matrix");
  }
  matrix_.makeCompressed();
  double largest = 0.0;
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw Error(ErrorCode::InvalidArgument, "SparseSym has a non-finite entry");
      }
      largest = std::max(largest, std::abs(it.value()));
    }
  }
  const SparseMatrix transposed = matrix_.transpose();
  SparseMatrix diff = matrix_ - transposed;
  double asymmetry = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) asymmetry = std::max(asymmetry, std::abs(it.value()));
  }
  if (asymmetry > 1e-14 * largest) {
    throw Error(ErrorCode::InvalidArgument, "SparseSym is not symmetric");
  }
}

SparseSym SparseSym::from_triplets(std::size_t dimension,
                                   const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseSym(std::move(m));
}

CgResult cg_solve(const SparseSym& a, const VectorXd& b, const CgOptions& options) {
  const SparseMatrix& A = a.matrix();
  const Eigen::Index n = A.rows();
  if (b.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "cg_solve: right-hand side has the wrong size");
  }
  VectorXd rhs = b;
  if (options.projector) options.projector(rhs);

  CgResult result;
  result.x = VectorXd::Zero(n);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return result;

  VectorXd inv_diag = VectorXd::Ones(n);
  if (options.jacobi) {
    const VectorXd diag = A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      inv_diag[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
    }
  }

  VectorXd r = rhs;
  VectorXd z = inv_diag.cwiseProduct(r);
  VectorXd p = z;
  double rz = r.dot(z);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const VectorXd ap = A * p;
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) {
      throw SolverStall(it, r.norm() / rhs_norm, "cg_solve: lost positive curvature");
    }
    const double step = rz / curvature;
    result.x += step * p;
    r -= step * ap;
    if (options.projector) options.projector(r);
    if (options.observer) options.observer(result.x);
    result.iterations = it;
    result.relative_residual = r.norm() / rhs_norm;
    if (result.relative_residual <= options.tol) {
      if (options.projector) options.projector(result.x);
      return result;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw SolverStall(options.max_iter, result.relative_residual, "cg_solve did not converge");
}

Projector mass_orthogonal_projector(MatrixXd basis, VectorXd mass) {
  return [basis = std::move(basis), mass = std::move(mass)](VectorXd& v) {
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      v -= basis.col(j).dot(mass.cwiseProduct(v)) * basis.col(j);
    }
  };
}

namespace {

double gershgorin_bound(const SparseMatrix& m) {
  VectorXd rows = VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return rows.size() > 0 ? rows.maxCoeff() : 0.0;
}

MatrixXd orthonormal_columns(const MatrixXd& y) {
  Eigen::HouseholderQR<MatrixXd> qr(y);
  return qr.householderQ() * MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

VectorXd solve_spd(const SparseSym& a, const VectorXd& b) {
  if (static_cast<std::size_t>(b.size()) != a.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "solve_spd: size mismatch");
  }
  if (b.size() == 0) return b;
  Eigen::SimplicialLDLT<SparseMatrix> factor(a.matrix());
  if (factor.info() != Eigen::Success) throw SolverStall(0, 0.0, "solve_spd: factorization failed");
  VectorXd x = factor.solve(b);
  const VectorXd r = b - a.matrix() * x;
  x += factor.solve(r);
  if (!x.allFinite()) throw SolverStall(1, 0.0, "solve_spd: non-finite solution");
  return x;
}

EigenPairs smallest_eigenpairs(const SparseSym& s, const VectorXd& mass_diagonal,
                               std::size_t count, const EigenOptions& options) {
  const auto n = static_cast<Eigen::Index>(s.dimension());
  if (mass_diagonal.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "smallest_eigenpairs: mass has the wrong size");
  }
  if (count > static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::InvalidArgument, "smallest_eigenpairs: count exceeds dimension");
  }
  if ((mass_diagonal.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "smallest_eigenpairs: mass must be positive");
  }
  EigenPairs out;
  if (count == 0) return out;

  const VectorXd scale = mass_diagonal.cwiseSqrt().cwiseInverse();
  const SparseMatrix b = scale.asDiagonal() * s.matrix() * scale.asDiagonal();
  const double norm_bound = std::max(gershgorin_bound(b), std::numeric_limits<double>::min());

  const auto k = static_cast<Eigen::Index>(count);
  const Eigen::Index block =
      std::min<Eigen::Index>(n, k + std::max<Eigen::Index>(k, static_cast<Eigen::Index>(options.extra_block)));

  VectorXd values;
  MatrixXd vectors;
  if (block >= n) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> dense{MatrixXd(b)};
    values = dense.eigenvalues().head(k);
    vectors = dense.eigenvectors().leftCols(k);
    out.iterations = 1;
  } else {
    SparseMatrix shifted = b;
    const double shift = norm_bound > 1e-300 ? 1e-8 * norm_bound : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
    if (factor.info() != Eigen::Success) {
      throw SolverStall(0, 0.0, "smallest_eigenpairs: factorization failed");
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    MatrixXd x(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
    }
    x = orthonormal_columns(x);
    double worst = 0.0;
    bool converged = false;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
      const MatrixXd q = orthonormal_columns(factor.solve(x));
      const MatrixXd bq = b * q;
      MatrixXd h = q.transpose() * bq;
      h = 0.5 * (h + h.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<MatrixXd> ritz(h);
      x = q * ritz.eigenvectors();
      const MatrixXd bx = bq * ritz.eigenvectors();
      worst = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        const double res = (bx.col(j) - ritz.eigenvalues()[j] * x.col(j)).norm();
        worst = std::max(worst, res);
      }
      out.iterations = it;
      if (worst <= options.tol * norm_bound) {
        values = ritz.eigenvalues().head(k);
        vectors = x.leftCols(k);
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw SolverStall(options.max_iter, worst / norm_bound,
                        "smallest_eigenpairs: subspace iteration did not converge");
    }
  }

  out.values = values;
  out.vectors = scale.asDiagonal() * vectors;
  out.residuals.resize(count);
  for (Eigen::Index j = 0; j < k; ++j) {
    const VectorXd mx = mass_diagonal.cwiseProduct(out.vectors.col(j));
    const VectorXd r = s.matrix() * out.vectors.col(j) - out.values[j] * mx;
    out.residuals[static_cast<std::size_t>(j)] = r.norm() / mx.norm();
  }
  for (Eigen::Index j = 1; j < k; ++j) {
    if (out.values[j] - out.values[j - 1] < 1e-10) out.cluster_warning = true;
  }
  return out;
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

using SparseRow = std::vector<std::pair<int, u64>>;  // sorted by column, non-zero values

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++r;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::size_t rank_gfp(const IntSparse& matrix, std::uint64_t prime) {
  if (prime < 2 || prime >= (1ULL << 62)) {
    throw Error(ErrorCode::InvalidArgument, "rank_gfp: prime out of range");
  }
  std::map<int, SparseRow> pivots;  // leading column -> row with leading coefficient 1
  std::size_t rank = 0;
  for (int row = 0; row < matrix.outerSize(); ++row) {
    SparseRow current;
    for (IntSparse::InnerIterator it(matrix, row); it; ++it) {
      const long long v = it.value() % static_cast<long long>(prime);
      const u64 value = v < 0 ? static_cast<u64>(v + static_cast<long long>(prime)) : static_cast<u64>(v);
      if (value != 0) current.emplace_back(static_cast<int>(it.col()), value);
    }
    std::sort(current.begin(), current.end());
    while (!current.empty()) {
      const auto found = pivots.find(current.front().first);
      if (found == pivots.end()) {
        const u64 inv = pow_mod(current.front().second, prime - 2, prime);
        for (auto& entry : current) entry.second = mul_mod(entry.second, inv, prime);
        pivots.emplace(current.front().first, std::move(current));
        ++rank;
        break;
      }
      // current -= factor * pivot, merging two sorted rows.
      const u64 factor = current.front().second;
      const SparseRow& pivot = found->second;
      SparseRow merged;
      merged.reserve(current.size() + pivot.size());
      std::size_t i = 0;
      std::size_t j = 0;
      while (i < current.size() || j < pivot.size()) {
        if (j == pivot.size() || (i < current.size() && current[i].first < pivot[j].first)) {
          merged.push_back(current[i++]);
        } else if (i == current.size() || pivot[j].first < current[i].first) {
          merged.emplace_back(pivot[j].first, (prime - mul_mod(factor, pivot[j].second, prime)) % prime);
          ++j;
        } else {
          const u64 sub = mul_mod(factor, pivot[j].second, prime);
          const u64 value = (current[i].second + prime - sub) % prime;
          if (value != 0) merged.emplace_back(current[i].first, value);
          ++i;
          ++j;
        }
      }
      current = std::move(merged);
    }
  }
  return rank;
}

MatrixXd gram_orthonormalize(const MatrixXd& vectors, const VectorXd& mass_diagonal, double rel_tol) {
  if (vectors.rows() != mass_diagonal.size()) {
    throw Error(ErrorCode::InvalidArgument, "gram_orthonormalize: size mismatch");
  }
  const auto dot = [&](const VectorXd& a, const VectorXd& b) { return a.dot(mass_diagonal.cwiseProduct(b)); };
  MatrixXd q(vectors.rows(), vectors.cols());
  Eigen::Index accepted = 0;
  bool deficient = false;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    VectorXd v = vectors.col(j);
    const double original = std::sqrt(dot(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < accepted; ++i) v -= dot(q.col(i), v) * q.col(i);
    }
    const double remaining = std::sqrt(dot(v, v));
    if (!(remaining > rel_tol * original) || original == 0.0) {
      deficient = true;
      continue;
    }
    q.col(accepted++) = v / remaining;
  }
  if (deficient) {
    throw RankDeficient(static_cast<std::size_t>(accepted), "gram_orthonormalize: dependent input");
  }
  return q;
}

}  // namespace l2hodge
