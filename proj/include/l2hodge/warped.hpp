#pragma once

#include "l2hodge/sparse.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace l2hodge {

/// Conditions at the two ends of ]0, L[. A clamped end has all node
/// (tangential) components set to zero.
enum class WarpedBc { CompactSupport, AbsoluteAt0, RelativeAt0 };

const char* to_string(WarpedBc bc);
WarpedBc parse_warped_bc(std::string_view text);

/// Mode reduction of ]0, L[ x N with metric dr^2 + e^{2 a r} h, N a circle
/// (n = 2) or a flat torus. Each angular eigenvalue mu contributes an
/// independent radial complex with coupling s = sqrt(mu).
///
/// Within a mode, forms split into pieces j = 0..n-2. Piece j is the ladder
///   f            (N-degree j, nodes)
///   g dr, h      (g: N-degree j on cells, h: N-degree j+1 on nodes)
///   p dr         (N-degree j+1, cells)
/// with d f = (f', s f) and d (g, h) = h' - s g. A degree-k form uses piece j
/// at position k - j.
struct ModeProblem {
  int n = 2;
  int k = 0;
  double length = 0.0;
  double dr = 0.0;  // adjusted so that length / dr is an integer
  std::size_t cells = 0;
  std::vector<double> modes;  // angular eigenvalues mu >= 0
  WarpedBc bc = WarpedBc::CompactSupport;
  double warp = 1.0;  // a in e^{2 a r}; 0 gives a flat cylinder
  int epsilon_k = 0;  // n - 1 - 2 (k - 1)

  double node(std::size_t i) const { return dr * static_cast<double>(i); }
  double mid(std::size_t c) const { return dr * (static_cast<double>(c) + 0.5); }
  /// Volume density times the fibre norm factor of an N-degree q component.
  double weight(int q, double r) const;
  /// warp * (n - 1) / 2
  double half_width() const { return 0.5 * warp * (n - 1); }
};

/// Throws GridTooCoarse if dr > 0.1, InvalidArgument for n < 2, k outside
/// [0, n], L <= 0 or a negative mode.
ModeProblem mode_problem(int n, int k, double length, double dr, std::vector<double> modes,
                         WarpedBc bc = WarpedBc::CompactSupport, double warp = 1.0);

struct FormBlock {
  int piece = 0;
  int position = 0;
  bool on_nodes = true;
  int q = 0;  // N-degree
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct FormLayout {
  int degree = 0;
  std::vector<FormBlock> blocks;
  std::size_t size = 0;

  /// nullptr if absent.
  const FormBlock* find(int piece, int position, bool on_nodes) const;
};

/// Empty layout for degrees outside [0, n].
FormLayout form_layout(const ModeProblem& problem, int degree);

/// One full-length coefficient vector per mode.
using ModeForm = std::vector<VectorXd>;

SparseMatrix mode_coboundary(const ModeProblem& problem, int degree, double s);
VectorXd mode_mass(const ModeProblem& problem, int degree);
/// Indices kept by the boundary condition.
std::vector<std::size_t> free_dofs(const ModeProblem& problem, int degree);

ModeForm zero_form(const ModeProblem& problem, int degree);
double form_norm2(const ModeProblem& problem, int degree, const ModeForm& form);
ModeForm apply_d(const ModeProblem& problem, int degree, const ModeForm& form);
/// Weighted adjoint of d, M^-1 d^T M, into degree - 1.
ModeForm apply_delta(const ModeProblem& problem, int degree, const ModeForm& form);

/// Smallest `count` eigenvalues of the degree-k Laplacian of each mode under
/// problem.bc.
std::vector<VectorXd> mode_spectrum(const ModeProblem& problem, std::size_t count,
                                    const EigenOptions& options = {});

/// Smallest eigenvalue over all modes; requires k = 0.
double mode_lambda0(const ModeProblem& problem, const EigenOptions& options = {});

/// Smooth random forms: sums of three Gaussian bumps times a smooth cutoff
/// vanishing on [0, 0.1 L] and [0.8 L, L].
ModeForm sample_form(const ModeProblem& problem, int degree, std::uint64_t seed);
VectorXd sample_profile(std::span<const double> nodes, double lo, double hi, std::uint64_t seed);

struct InequalityReport {
  std::string check;
  std::size_t samples = 0;
  double constant = 0.0;
  double worst_margin = 0.0;  // (rhs side - lhs side) / max(|both|), over samples
  std::size_t violations = 0;  // margins below -1e-8
  bool passed() const { return violations == 0; }
};

/// ||d a||^2 + ||delta a||^2 >= 1/2 ((n-1)/2 - k)^2 ||a||^2 on compactly
/// supported samples. Requires k < (n-1)/2.
InequalityReport mode_gap_check(const ModeProblem& problem, std::size_t samples, std::uint64_t seed);

/// ((n-1)/2 - (k-1))^2 ||Mv||^2 <= ||v||^2 in L^2(e^{(n-1)r} dr), where
/// Mv(r) = e^{-(k-1) r} int_r^L v(s) e^{(k-1) s} ds, by the trapezoid rule.
InequalityReport hardy_check(int n, int k, double length, double dr, std::size_t samples, std::uint64_t seed);

/// int (i_X a, delta a) + (i_X d a, a) >= ((n-1)/2 - k) ||a||^2 with
/// X = -d/dr, on compactly supported samples.
InequalityReport donnelly_xavier_check(const ModeProblem& problem, std::size_t samples, std::uint64_t seed);

/// The X-flow pairing on the left of the inequality above, summed over modes.
double donnelly_xavier_lhs(const ModeProblem& problem, const ModeForm& alpha);

struct PrimitiveReport {
  ModeForm beta;
  double residual = 0.0;    // ||d beta - alpha|| / ||alpha||
  double norm_ratio = 0.0;  // ||beta|| / ||alpha||
  double bound = 0.0;       // 2 / ((n-1)/2 - (k-1))
  bool within_bound() const { return norm_ratio <= bound + 1e-6; }
};

/// beta = -int_0^inf (Phi^s)^* (i_T alpha) ds with T = d/dr, for a closed
/// degree-k form. Throws NotClosed, TailTooFat (weighted mass on
/// [L - margin, L] above 1e-8 of the total) or InvalidArgument (k > (n-1)/2).
PrimitiveReport flow_primitive(const ModeProblem& problem, const ModeForm& alpha, double margin = 1.0);

/// Minimum-norm least-squares solution of d beta = alpha, mode by mode.
ModeForm least_squares_primitive(const ModeProblem& problem, const ModeForm& alpha, double tol = 1e-12);

/// (Phi^t)^* alpha for t = shift_cells * dr; values pushed past L vanish.
ModeForm pullback(const ModeProblem& problem, int degree, const ModeForm& alpha, std::size_t shift_cells);
/// Squared norm of alpha restricted to [from_cell * dr, L].
double tail_norm2(const ModeProblem& problem, int degree, const ModeForm& alpha, std::size_t from_cell);

struct VanishingReport {
  std::vector<double> smallest_per_mode;
  double smallest = 0.0;
  double bound = 0.0;  // 1/2 c^2
};

/// Requires k < (n-1)/2 under AbsoluteAt0 or k > (n+1)/2 under RelativeAt0.
VanishingReport vanishing_check(const ModeProblem& problem, const EigenOptions& options = {});

struct OracleTable {
  std::string name;
  std::vector<double> nodes;
  std::vector<double> values;
  double residual = 0.0;  // max over interior nodes of |(w u')'| / w, discretized
};

/// sigma_harmonic: w = e^t, u = a e^{-t} + b; cosh_tanh: w = cosh^2 t,
/// u = tanh t; flat_log: w = r, u = log r; r3_capacity: w = r^2, u = 1/r.
/// Throws UnknownOracle for other names.
OracleTable analytic_oracle(std::string_view name, std::span<const double> nodes, double a = 1.0, double b = 0.0);

}  // namespace l2hodge
