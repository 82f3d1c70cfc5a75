#pragma once

#include "l2hodge/complex.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace l2hodge {

enum class MetricSource { Embedding, Warped, Rescaled, Intrinsic };

const char* to_string(MetricSource source);

/// Piecewise-flat metric: a base length per edge and a conformal factor u per
/// triangle. Inside triangle t every edge length is multiplied by exp(u_t),
/// so the effective metric on t is exp(2 u_t) times the base one.
struct MetricField {
  std::vector<double> edge_length;
  std::vector<double> conformal_factor;
  MetricSource source = MetricSource::Intrinsic;

  /// Lengths of a triangle's edges in triangle_edges order, scaled by exp(u_t).
  std::array<double, 3> triangle_lengths(const SimplicialComplex& complex, std::size_t triangle) const;
  double triangle_area(const SimplicialComplex& complex, std::size_t triangle) const;
  /// Shared-edge length: base length times exp of the mean factor of the
  /// adjacent triangles.
  double effective_edge_length(const SimplicialComplex& complex, std::size_t edge) const;
  double total_area(const SimplicialComplex& complex) const;
};

/// Area from three side lengths (numerically stable Heron). Returns a
/// negative value when the strict triangle inequality fails.
double heron_area(double a, double b, double c);

/// Throws DegenerateTriangle if any triangle violates the strict triangle
/// inequality or has area below 1e-14 times its squared mean edge.
void validate_metric(const SimplicialComplex& complex, const MetricField& metric);

MetricField metric_from_embedding(const SimplicialComplex& complex, const Vertices& positions);

struct WarpedAnnulus {
  SimplicialComplex complex;
  MetricField metric;
  std::vector<double> ring_radius;   // r of each ring, 0 .. L
  std::vector<double> vertex_radius; // r of each vertex
  int n_radial = 0;
  int n_angular = 0;
};

/// Intrinsic annulus [0, L] x S^1 for dr^2 + exp(2 a r) dtheta^2: radial edges
/// of length L / n_radial, angular edges (2 pi / n_angular) exp(a r).
WarpedAnnulus warped_annulus_metric(int n_radial, int n_angular, double length, double warp_exponent);

/// Adds u to the conformal factor of every triangle.
MetricField conformal_rescale(const MetricField& metric, const std::vector<double>& u_per_triangle);

/// Discrete exterior-calculus operators of a metric complex. The mass
/// diagonals realize the L^2 inner products: M0 holds barycentric dual areas,
/// M1 the ratio of barycentric dual length to primal length, M2 inverse areas.
struct OperatorBundle {
  IntSparse d0;
  IntSparse d1;
  Eigen::VectorXd m0;
  Eigen::VectorXd m1;
  Eigen::VectorXd m2;
  std::vector<std::uint8_t> boundary_vertex;
  std::vector<std::uint8_t> boundary_edge;
  std::string metric_ref;

  const Eigen::VectorXd& mass(int k) const;
  std::size_t count(int k) const { return static_cast<std::size_t>(mass(k).size()); }
  bool closed() const;
};

OperatorBundle mass_matrices(const SimplicialComplex& complex, const MetricField& metric);

}  // namespace l2hodge
