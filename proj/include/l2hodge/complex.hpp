#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace l2hodge {

using IntSparse = Eigen::SparseMatrix<int, Eigen::RowMajor>;
using Vertices = Eigen::MatrixXd;  // one row per vertex, 2 to 4 columns

/// Oriented simplicial complex of dimension at most two.
///
/// Simplices are stored as sorted vertex tuples. Edges are oriented from the
/// lower to the higher vertex index; each triangle carries an explicit sign
/// relating its sorted tuple to the orientation it was given with. Boundary
/// marks are derived from triangle incidence: an edge is a boundary edge when
/// exactly one triangle contains it.
class SimplicialComplex {
 public:
  using EdgeTuple = std::array<int, 2>;
  using TriangleTuple = std::array<int, 3>;

  SimplicialComplex() = default;

  /// Builds the complex generated by the given oriented triangles plus any
  /// extra edges (which lets one-dimensional complexes be expressed).
  static SimplicialComplex build(std::size_t vertex_count, std::span<const TriangleTuple> triangles,
                                 std::span<const EdgeTuple> extra_edges = {});

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  std::size_t count(int k) const;

  const std::vector<EdgeTuple>& edges() const { return edges_; }
  const std::vector<TriangleTuple>& triangles() const { return triangles_; }
  int orientation(std::size_t triangle) const { return orientation_[triangle]; }

  /// Triangle vertices in their oriented order.
  TriangleTuple oriented_triangle(std::size_t triangle) const;

  std::optional<std::size_t> edge_index(int a, int b) const;
  /// Edge ids of a triangle, ordered (v1v2, v0v2, v0v1) for sorted (v0,v1,v2).
  const std::array<std::size_t, 3>& triangle_edges(std::size_t triangle) const {
    return triangle_edges_[triangle];
  }
  /// Triangles incident to an edge (zero, one or two entries).
  std::span<const std::size_t> edge_triangles(std::size_t edge) const;

  bool is_boundary_edge(std::size_t edge) const { return boundary_edge_[edge] != 0; }
  bool is_boundary_vertex(std::size_t vertex) const { return boundary_vertex_[vertex] != 0; }
  std::size_t boundary_edge_count() const;
  bool is_closed() const { return boundary_edge_count() == 0; }

  long euler_characteristic() const;

  /// Signed coboundary d_k : C^k -> C^{k+1} for k in {0, 1}.
  IntSparse coboundary(int k) const;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<EdgeTuple> edges_;
  std::vector<TriangleTuple> triangles_;
  std::vector<int> orientation_;
  std::vector<std::array<std::size_t, 3>> triangle_edges_;
  std::vector<std::array<std::size_t, 2>> edge_triangles_;
  std::vector<std::uint8_t> edge_triangle_count_;
  std::vector<std::uint8_t> boundary_edge_;
  std::vector<std::uint8_t> boundary_vertex_;
  std::vector<std::vector<std::pair<int, std::size_t>>> vertex_edges_;  // (other vertex, edge)
};

SimplicialComplex build_complex(std::size_t vertex_count,
                                std::span<const SimplicialComplex::TriangleTuple> triangles);

/// d_k with degree checking; throws DegreeOutOfRange outside {0, 1}.
IntSparse coboundary(const SimplicialComplex& complex, int k);

struct BettiReport {
  std::array<long, 3> b{};
  bool relative = false;
  std::uint64_t prime_used = 0;
};

/// Betti numbers over GF(p), cross-checked against a second prime.
/// The relative variant works on the cochain complex with boundary simplices
/// deleted.
BettiReport betti(const SimplicialComplex& complex, bool relative, std::uint64_t seed = 0x5eed);

/// Index maps selecting the simplices that survive the relative (boundary
/// deleted) cochain complex, or all simplices for the absolute one.
struct CochainSupport {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> edges;
  std::vector<std::size_t> triangles;
  const std::vector<std::size_t>& of_degree(int k) const;
};
CochainSupport cochain_support(const SimplicialComplex& complex, bool relative);

/// An oriented closed edge path. sign is +1 when the edge is traversed from
/// its lower to its higher vertex.
struct EdgeCycle {
  std::vector<std::size_t> edges;
  std::vector<int> signs;
};

std::vector<EdgeCycle> detect_boundary_cycles(const SimplicialComplex& complex);

/// Throws OpenCycle unless consecutive edges chain and the path closes.
void validate_cycle(const SimplicialComplex& complex, const EdgeCycle& cycle);

/// Closed edge path through the given vertex sequence (last joins first).
EdgeCycle cycle_through(const SimplicialComplex& complex, std::span<const int> vertices);

/// Compactly supported closed 1-cochain attached to one handle of a generated
/// surface, together with the loop it pairs with.
struct Handle {
  std::vector<double> form;  // edge-indexed 1-cochain
  EdgeCycle dual_loop;
};

struct SurfaceMesh {
  SimplicialComplex complex;
  Vertices positions;
  std::vector<Handle> handles;
};

/// Closed oriented surface of the given genus. Genus 0 is a subdivided
/// octahedron on the unit sphere; genus g >= 1 chains g flat grid tori
/// (Clifford-embedded in R^4) by connected sums across single triangles.
SurfaceMesh gen_closed_surface(int genus, int refinement);

/// Side length of the grid tori used by gen_closed_surface.
int torus_grid_size(int refinement);

enum class RadialSpacing { Linear, Geometric };

struct AnnulusLayout {
  RadialSpacing spacing = RadialSpacing::Linear;
  /// Rotate every other ring by half an angular step so that triangles are
  /// close to equilateral in log-polar coordinates.
  bool stagger = false;
};

struct PlanarMesh {
  SimplicialComplex complex;
  Vertices positions;          // x, y, 0
  std::vector<double> radius;  // distance of each vertex from the origin
};

/// Annulus with n_radial layers between n_radial + 1 rings of n_angular
/// vertices each.
PlanarMesh gen_annulus(int n_radial, int n_angular, double r_inner, double r_outer,
                       AnnulusLayout layout = {});

/// Disk: a centre vertex, a fan, then n_radial - 1 further annular layers.
PlanarMesh gen_disk(int n_radial, int n_angular, double radius);

/// Unit sphere with three disjoint caps removed around equatorial directions
/// 120 degrees apart; cap_angle is the angular radius of each removed cap.
SurfaceMesh gen_pants(int refinement, double cap_angle = 0.5);

/// Subcomplex generated by a subset of triangles, reindexed. The maps give
/// the parent index of every retained vertex and edge.
struct Subcomplex {
  SimplicialComplex complex;
  std::vector<std::size_t> parent_vertex;
  std::vector<std::size_t> parent_edge;
  std::vector<std::size_t> parent_triangle;
};
Subcomplex restrict_to_triangles(const SimplicialComplex& complex,
                                 std::span<const std::size_t> triangle_ids);

}  // namespace l2hodge
