#pragma once

#include "l2hodge/complex.hpp"
#include "l2hodge/metric.hpp"
#include "l2hodge/sparse.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace l2hodge {

/// Weighted graph carrying a discrete Dirichlet energy
/// sum_e c_e (u_head - u_tail)^2, vertex masses, and a radius per vertex used
/// to truncate.
struct EnergyGraph {
  std::size_t vertex_count = 0;
  std::vector<std::array<int, 2>> edges;
  VectorXd conductance;
  VectorXd vertex_mass;
  std::vector<double> radius;

  double energy(const VectorXd& u) const;
};

/// Graph of a metric complex: conductance M1, mass M0.
EnergyGraph energy_graph(const SimplicialComplex& complex, const OperatorBundle& bundle,
                         std::vector<double> radius);

/// Path graph on sorted nodes for the radial energy int w(r) u'(r)^2 dr:
/// conductance w(midpoint) / h, mass w(node) times the dual cell length.
/// The radius of each vertex is its node coordinate.
EnergyGraph radial_graph(std::span<const double> nodes, const std::function<double(double)>& weight);

std::vector<double> uniform_nodes(double lo, double hi, std::size_t cells);

enum class EndClass { Parabolic, NonParabolic, Undetermined };
const char* to_string(EndClass c);

struct CapacityCurve {
  std::vector<double> radii;
  std::vector<double> capacities;
};

struct EndDescriptor {
  std::size_t id = 0;
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> interface_vertices;
  std::vector<std::size_t> interface_edges;
  std::vector<std::size_t> triangles;
  CapacityCurve curve;
  EndClass classification = EndClass::Undetermined;
  double trend_exponent = std::numeric_limits<double>::quiet_NaN();
};

/// Connected components (through shared edges) of the triangles outside the
/// core. Throws EmptyComplement when the core covers everything, BadSplit when
/// the core is empty.
std::vector<EndDescriptor> detect_ends(const SimplicialComplex& complex,
                                       std::span<const std::size_t> core_triangles);

/// C(R) = energy of the discrete harmonic h_R equal to 1 on the interface
/// and 0 on end vertices with radius >= R, for each R. Only edges with both
/// ends in the end are counted.
CapacityCurve capacity(const EnergyGraph& graph, std::span<const std::size_t> end_vertices,
                       std::span<const std::size_t> interface_vertices, std::span<const double> radii);

struct Classification {
  EndClass cls = EndClass::Undetermined;
  double trend_exponent = std::numeric_limits<double>::quiet_NaN();
  double increment_ratio = std::numeric_limits<double>::quiet_NaN();
  double limit_estimate = std::numeric_limits<double>::quiet_NaN();
  double floor = 0.0;
};

/// Decides from the resistance increments d_j = 1/C_{j+1} - 1/C_j over the
/// last `window` points: their mean ratio q <= 0.8 with an extrapolated limit
/// above eps_cap gives non-parabolic, q >= 0.95 (or a last value below
/// eps_cap) parabolic, anything else undetermined. A negative eps_cap means
/// 1e-3 times the first capacity.
Classification classify_parabolic(const CapacityCurve& curve, double eps_cap = -1.0, std::size_t window = 4);

struct LiTamOptions {
  double core_radius = 1.0;
  double tol = 1e-2;              // allowed sup change on the core between the last two radii
  double degenerate_tol = 1e-2;   // oscillation below this flags a degenerate limit
  bool throw_nonconvergent = true;
};

struct HarmonicFunctionReport {
  std::vector<double> radii;
  VectorXd values;                 // at the largest radius
  std::vector<double> energies;    // one per radius
  std::vector<double> core_oscillation;
  std::vector<std::array<double, 2>> end_deviation;  // mass-weighted sum (u -+ 1)^2 on U+, U-
  std::array<double, 2> end_values{};                // mass-weighted mean of u on the outer half of each end
  double laplacian_residual = 0.0;  // max over radii and free vertices, normalized by the vertex conductance
  double oscillation = 0.0;         // on the core at the largest radius
  double core_change = 0.0;         // sup change on the core between the last two radii
  bool max_principle = true;
  bool energies_monotone = true;
  bool converged = true;
  bool degenerate = false;
};

/// Dirichlet exhaustion: for each R, u_R is harmonic on {radius < R}, +1 on
/// U+ and -1 on U- where radius >= R. side[v] is +1, -1 or 0 (core).
HarmonicFunctionReport li_tam_harmonic(const EnergyGraph& graph, std::span<const int> side,
                                       std::span<const double> radii, const LiTamOptions& options = {});

/// Smallest eigenvalue of the 0-Laplacian on the masked vertices with zero
/// Dirichlet data elsewhere.
double lambda0_estimate(const EnergyGraph& graph, std::span<const std::uint8_t> domain_mask,
                        const EigenOptions& options = {});

}  // namespace l2hodge
