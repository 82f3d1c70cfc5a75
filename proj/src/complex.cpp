#include "l2hodge/complex.hpp"

#include "l2hodge/error.hpp"
#include "l2hodge/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <utility>

namespace l2hodge {

namespace {

using TriangleTuple = SimplicialComplex::TriangleTuple;
using EdgeTuple = SimplicialComplex::EdgeTuple;

int permutation_sign(const TriangleTuple& t) {
  int inversions = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (t[i] > t[j]) ++inversions;
    }
  }
  return inversions % 2 == 0 ? 1 : -1;
}

IntSparse submatrix(const IntSparse& m, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
  std::vector<long> col_map(static_cast<std::size_t>(m.cols()), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<long>(j);
  std::vector<Eigen::Triplet<int>> triplets;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (IntSparse::InnerIterator it(m, static_cast<Eigen::Index>(rows[i])); it; ++it) {
      const long j = col_map[static_cast<std::size_t>(it.col())];
      if (j >= 0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), it.value());
    }
  }
  IntSparse out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::uint64_t random_prime(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> dist(1'000'001ULL, (1ULL << 31) - 1);
  while (true) {
    const std::uint64_t candidate = dist(rng) | 1ULL;
    if (is_prime(candidate)) return candidate;
  }
}

}  // namespace

SimplicialComplex SimplicialComplex::build(std::size_t vertex_count, std::span<const TriangleTuple> triangles,
                                           std::span<const EdgeTuple> extra_edges) {
  SimplicialComplex c;
  c.vertex_count_ = vertex_count;
  const auto in_range = [&](int v) { return v >= 0 && static_cast<std::size_t>(v) < vertex_count; };

  std::vector<EdgeTuple> all_edges;
  c.triangles_.reserve(triangles.size());
  c.orientation_.reserve(triangles.size());
  for (const auto& t : triangles) {
    if (!in_range(t[0]) || !in_range(t[1]) || !in_range(t[2])) {
      throw Error(ErrorCode::DanglingFace, "triangle references a vertex out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::InvalidArgument, "triangle with a repeated vertex");
    }
    TriangleTuple sorted = t;
    std::sort(sorted.begin(), sorted.end());
    c.triangles_.push_back(sorted);
    c.orientation_.push_back(permutation_sign(t));
    all_edges.push_back({sorted[0], sorted[1]});
    all_edges.push_back({sorted[0], sorted[2]});
    all_edges.push_back({sorted[1], sorted[2]});
  }
  for (const auto& e : extra_edges) {
    if (!in_range(e[0]) || !in_range(e[1])) {
      throw Error(ErrorCode::DanglingFace, "edge references a vertex out of range");
    }
    if (e[0] == e[1]) throw Error(ErrorCode::InvalidArgument, "edge with a repeated vertex");
    all_edges.push_back({std::min(e[0], e[1]), std::max(e[0], e[1])});
  }
  {
    std::vector<TriangleTuple> check = c.triangles_;
    std::sort(check.begin(), check.end());
    if (std::adjacent_find(check.begin(), check.end()) != check.end()) {
      throw Error(ErrorCode::InvalidArgument, "duplicate triangle");
    }
  }
  std::sort(all_edges.begin(), all_edges.end());
  all_edges.erase(std::unique(all_edges.begin(), all_edges.end()), all_edges.end());
  c.edges_ = std::move(all_edges);

  c.vertex_edges_.assign(vertex_count, {});
  for (std::size_t e = 0; e < c.edges_.size(); ++e) {
    c.vertex_edges_[static_cast<std::size_t>(c.edges_[e][0])].emplace_back(c.edges_[e][1], e);
    c.vertex_edges_[static_cast<std::size_t>(c.edges_[e][1])].emplace_back(c.edges_[e][0], e);
  }

  c.edge_triangles_.assign(c.edges_.size(), {0, 0});
  c.edge_triangle_count_.assign(c.edges_.size(), 0);
  c.triangle_edges_.resize(c.triangles_.size());
  for (std::size_t t = 0; t < c.triangles_.size(); ++t) {
    const auto& v = c.triangles_[t];
    c.triangle_edges_[t] = {*c.edge_index(v[1], v[2]), *c.edge_index(v[0], v[2]), *c.edge_index(v[0], v[1])};
    for (std::size_t e : c.triangle_edges_[t]) {
      auto& count = c.edge_triangle_count_[e];
      if (count == 2) {
        throw Error(ErrorCode::NonManifoldEdge, "edge (" + std::to_string(c.edges_[e][0]) + "," +
                                                    std::to_string(c.edges_[e][1]) +
                                                    ") has more than two triangles");
      }
      c.edge_triangles_[e][count++] = t;
    }
  }

  c.boundary_edge_.assign(c.edges_.size(), 0);
  c.boundary_vertex_.assign(vertex_count, 0);
  for (std::size_t e = 0; e < c.edges_.size(); ++e) {
    if (c.edge_triangle_count_[e] == 1) {
      c.boundary_edge_[e] = 1;
      c.boundary_vertex_[static_cast<std::size_t>(c.edges_[e][0])] = 1;
      c.boundary_vertex_[static_cast<std::size_t>(c.edges_[e][1])] = 1;
    }
  }
  return c;
}

std::size_t SimplicialComplex::count(int k) const {
  switch (k) {
    case 0: return vertex_count_;
    case 1: return edges_.size();
    case 2: return triangles_.size();
    default: throw Error(ErrorCode::DegreeOutOfRange, "simplex degree must be 0, 1 or 2");
  }
}

SimplicialComplex::TriangleTuple SimplicialComplex::oriented_triangle(std::size_t triangle) const {
  const auto& t = triangles_[triangle];
  return orientation_[triangle] > 0 ? t : TriangleTuple{t[0], t[2], t[1]};
}

std::optional<std::size_t> SimplicialComplex::edge_index(int a, int b) const {
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= vertex_count_ ||
      static_cast<std::size_t>(b) >= vertex_count_) {
    return std::nullopt;
  }
  for (const auto& [other, e] : vertex_edges_[static_cast<std::size_t>(a)]) {
    if (other == b) return e;
  }
  return std::nullopt;
}

std::span<const std::size_t> SimplicialComplex::edge_triangles(std::size_t edge) const {
  return {edge_triangles_[edge].data(), edge_triangle_count_[edge]};
}

std::size_t SimplicialComplex::boundary_edge_count() const {
  return static_cast<std::size_t>(std::count(boundary_edge_.begin(), boundary_edge_.end(), 1));
}

long SimplicialComplex::euler_characteristic() const {
  return static_cast<long>(vertex_count_) - static_cast<long>(edges_.size()) +
         static_cast<long>(triangles_.size());
}

IntSparse SimplicialComplex::coboundary(int k) const {
  std::vector<Eigen::Triplet<int>> triplets;
  if (k == 0) {
    IntSparse d(static_cast<Eigen::Index>(edges_.size()), static_cast<Eigen::Index>(vertex_count_));
    triplets.reserve(2 * edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      triplets.emplace_back(static_cast<int>(e), edges_[e][0], -1);
      triplets.emplace_back(static_cast<int>(e), edges_[e][1], 1);
    }
    d.setFromTriplets(triplets.begin(), triplets.end());
    return d;
  }
  if (k == 1) {
    IntSparse d(static_cast<Eigen::Index>(triangles_.size()), static_cast<Eigen::Index>(edges_.size()));
    triplets.reserve(3 * triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const int s = orientation_[t];
      const auto& te = triangle_edges_[t];
      triplets.emplace_back(static_cast<int>(t), static_cast<int>(te[0]), s);
      triplets.emplace_back(static_cast<int>(t), static_cast<int>(te[1]), -s);
      triplets.emplace_back(static_cast<int>(t), static_cast<int>(te[2]), s);
    }
    d.setFromTriplets(triplets.begin(), triplets.end());
    return d;
  }
  throw Error(ErrorCode::DegreeOutOfRange, "coboundary degree must be 0 or 1");
}

SimplicialComplex build_complex(std::size_t vertex_count, std::span<const SimplicialComplex::TriangleTuple> triangles) {
  return SimplicialComplex::build(vertex_count, triangles);
}

IntSparse coboundary(const SimplicialComplex& complex, int k) { return complex.coboundary(k); }

const std::vector<std::size_t>& CochainSupport::of_degree(int k) const {
  switch (k) {
    case 0: return vertices;
    case 1: return edges;
    case 2: return triangles;
    default: throw Error(ErrorCode::DegreeOutOfRange, "cochain degree must be 0, 1 or 2");
  }
}

CochainSupport cochain_support(const SimplicialComplex& complex, bool relative) {
  CochainSupport s;
  for (std::size_t v = 0; v < complex.vertex_count(); ++v) {
    if (!relative || !complex.is_boundary_vertex(v)) s.vertices.push_back(v);
  }
  for (std::size_t e = 0; e < complex.edge_count(); ++e) {
    if (!relative || !complex.is_boundary_edge(e)) s.edges.push_back(e);
  }
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) s.triangles.push_back(t);
  return s;
}

BettiReport betti(const SimplicialComplex& complex, bool relative, std::uint64_t seed) {
  const CochainSupport support = cochain_support(complex, relative);
  const IntSparse d0 = submatrix(complex.coboundary(0), support.edges, support.vertices);
  const IntSparse d1 = submatrix(complex.coboundary(1), support.triangles, support.edges);

  std::mt19937_64 rng(seed);
  const std::uint64_t p = random_prime(rng);
  std::uint64_t q = random_prime(rng);
  while (q == p) q = random_prime(rng);

  const std::size_t r0 = rank_gfp(d0, p);
  const std::size_t r1 = rank_gfp(d1, p);
  if (rank_gfp(d0, q) != r0 || rank_gfp(d1, q) != r1) {
    throw Error(ErrorCode::PrimeTooSmall, "incidence ranks differ between two primes");
  }
  BettiReport report;
  report.relative = relative;
  report.prime_used = p;
  report.b[0] = static_cast<long>(support.vertices.size()) - static_cast<long>(r0);
  report.b[1] = static_cast<long>(support.edges.size()) - static_cast<long>(r0) - static_cast<long>(r1);
  report.b[2] = static_cast<long>(support.triangles.size()) - static_cast<long>(r1);
  return report;
}

std::vector<EdgeCycle> detect_boundary_cycles(const SimplicialComplex& complex) {
  struct Oriented {
    std::size_t edge;
    int sign;
    int head;
  };
  std::map<int, std::vector<Oriented>> outgoing;
  std::size_t total = 0;
  for (std::size_t e = 0; e < complex.edge_count(); ++e) {
    if (!complex.is_boundary_edge(e)) continue;
    const std::size_t t = complex.edge_triangles(e)[0];
    const auto& te = complex.triangle_edges(t);
    const int local = te[0] == e ? 1 : (te[1] == e ? -1 : 1);
    const int sign = local * complex.orientation(t);
    const auto& ev = complex.edges()[e];
    const int tail = sign > 0 ? ev[0] : ev[1];
    const int head = sign > 0 ? ev[1] : ev[0];
    outgoing[tail].push_back({e, sign, head});
    ++total;
  }
  std::vector<std::uint8_t> used(complex.edge_count(), 0);
  std::vector<EdgeCycle> cycles;
  std::size_t consumed = 0;
  for (auto& [start_vertex, list] : outgoing) {
    for (const Oriented& first : list) {
      if (used[first.edge]) continue;
      EdgeCycle cycle;
      Oriented current = first;
      while (true) {
        used[current.edge] = 1;
        ++consumed;
        cycle.edges.push_back(current.edge);
        cycle.signs.push_back(current.sign);
        if (current.head == start_vertex) break;
        const auto found = outgoing.find(current.head);
        const Oriented* next = nullptr;
        if (found != outgoing.end()) {
          for (const Oriented& candidate : found->second) {
            if (!used[candidate.edge]) {
              next = &candidate;
              break;
            }
          }
        }
        if (next == nullptr) {
          throw Error(ErrorCode::OpenBoundaryChain, "boundary edges do not close up at vertex " +
                                                        std::to_string(current.head));
        }
        current = *next;
      }
      cycles.push_back(std::move(cycle));
    }
  }
  if (consumed != total) throw Error(ErrorCode::OpenBoundaryChain, "unvisited boundary edges");
  return cycles;
}

void validate_cycle(const SimplicialComplex& complex, const EdgeCycle& cycle) {
  if (cycle.edges.empty() || cycle.edges.size() != cycle.signs.size()) {
    throw Error(ErrorCode::OpenCycle, "empty or malformed cycle");
  }
  const auto endpoints = [&](std::size_t i) {
    if (cycle.edges[i] >= complex.edge_count()) throw Error(ErrorCode::OpenCycle, "edge out of range");
    const auto& e = complex.edges()[cycle.edges[i]];
    return cycle.signs[i] > 0 ? std::pair{e[0], e[1]} : std::pair{e[1], e[0]};
  };
  for (std::size_t i = 0; i < cycle.edges.size(); ++i) {
    const auto [tail, head] = endpoints(i);
    const auto [next_tail, next_head] = endpoints((i + 1) % cycle.edges.size());
    (void)tail;
    (void)next_head;
    if (head != next_tail) throw Error(ErrorCode::OpenCycle, "edge path is not closed");
  }
}

EdgeCycle cycle_through(const SimplicialComplex& complex, std::span<const int> vertices) {
  EdgeCycle cycle;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int a = vertices[i];
    const int b = vertices[(i + 1) % vertices.size()];
    const auto e = complex.edge_index(a, b);
    if (!e) throw Error(ErrorCode::OpenCycle, "consecutive vertices are not joined by an edge");
    cycle.edges.push_back(*e);
    cycle.signs.push_back(a < b ? 1 : -1);
  }
  validate_cycle(complex, cycle);
  return cycle;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

struct OctaSphere {
  std::vector<Eigen::Vector3d> points;
  std::vector<TriangleTuple> triangles;
};

OctaSphere subdivided_octahedron(int refinement) {
  OctaSphere s;
  s.points = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        const int a = sx > 0 ? 0 : 1;
        const int b = sy > 0 ? 2 : 3;
        const int c = sz > 0 ? 4 : 5;
        if (sx * sy * sz > 0) {
          s.triangles.push_back({a, b, c});
        } else {
          s.triangles.push_back({a, c, b});
        }
      }
    }
  }
  for (int level = 1; level < refinement; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    const auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto found = midpoint.find(key);
      if (found != midpoint.end()) return found->second;
      s.points.push_back((s.points[static_cast<std::size_t>(a)] + s.points[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(s.points.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<TriangleTuple> next;
    next.reserve(4 * s.triangles.size());
    for (const auto& t : s.triangles) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    s.triangles = std::move(next);
  }
  return s;
}

Vertices to_rows(const std::vector<Eigen::Vector3d>& points) {
  Vertices v(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  return v;
}

// Lower triangle of grid cell (x, y): (v(x,y), v(x+1,y), v(x+1,y+1)).
std::array<std::pair<int, int>, 3> glue_cell(int x, int y) {
  return {{{x, y}, {x + 1, y}, {x + 1, y + 1}}};
}

}  // namespace

int torus_grid_size(int refinement) { return 4 * refinement + 4; }

SurfaceMesh gen_closed_surface(int genus, int refinement) {
  if (genus < 0 || refinement < 1) {
    throw Error(ErrorCode::InvalidArgument, "gen_closed_surface requires genus >= 0 and refinement >= 1");
  }
  SurfaceMesh mesh;
  if (genus == 0) {
    const OctaSphere s = subdivided_octahedron(refinement);
    mesh.complex = SimplicialComplex::build(s.points.size(), s.triangles);
    mesh.positions = to_rows(s.points);
    return mesh;
  }

  const int n = torus_grid_size(refinement);
  const int right = n / 2 + 1;
  const int strip = n / 2 - 1;
  const int loop_row = n / 2 - 1;
  const double radius = 1.0 / (2.0 * std::numbers::pi);
  const auto wrap = [n](int i) { return ((i % n) + n) % n; };

  std::vector<TriangleTuple> triangles;
  std::vector<std::array<double, 4>> points;
  // Per torus: global id of each grid vertex.
  std::vector<std::vector<int>> ids(static_cast<std::size_t>(genus), std::vector<int>(static_cast<std::size_t>(n * n), -1));
  int offset = 0;
  for (int g = 0; g < genus; ++g) {
    auto& local = ids[static_cast<std::size_t>(g)];
    const auto at = [&](int x, int y) -> int& { return local[static_cast<std::size_t>(wrap(x) + n * wrap(y))]; };
    if (g > 0) {
      // Identify this torus's left glue triangle with the previous torus's right one.
      const auto& prev = ids[static_cast<std::size_t>(g - 1)];
      const auto left_cell = glue_cell(1, 1);
      const auto right_cell = glue_cell(right, right);
      for (int i = 0; i < 3; ++i) {
        at(left_cell[i].first, left_cell[i].second) =
            prev[static_cast<std::size_t>(right_cell[i].first + n * right_cell[i].second)];
      }
      offset += right - 1;
    }
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (at(x, y) >= 0) continue;
        at(x, y) = static_cast<int>(points.size());
        const double phi = 2.0 * std::numbers::pi * (x + offset) / n;
        const double psi = 2.0 * std::numbers::pi * (y + offset) / n;
        points.push_back({radius * std::cos(phi), radius * std::sin(phi), radius * std::cos(psi), radius * std::sin(psi)});
      }
    }
    const bool flipped = g % 2 == 1;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const bool left_glue = g > 0 && x == 1 && y == 1;
        const bool right_glue = g + 1 < genus && x == right && y == right;
        const int v00 = at(x, y);
        const int v10 = at(x + 1, y);
        const int v11 = at(x + 1, y + 1);
        const int v01 = at(x, y + 1);
        if (!left_glue && !right_glue) {
          triangles.push_back(flipped ? TriangleTuple{v00, v11, v10} : TriangleTuple{v00, v10, v11});
        }
        triangles.push_back(flipped ? TriangleTuple{v00, v01, v11} : TriangleTuple{v00, v11, v01});
      }
    }
  }

  mesh.complex = SimplicialComplex::build(points.size(), triangles);
  mesh.positions.resize(static_cast<Eigen::Index>(points.size()), 4);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int c = 0; c < 4; ++c) mesh.positions(static_cast<Eigen::Index>(i), c) = points[i][static_cast<std::size_t>(c)];
  }

  for (int g = 0; g < genus; ++g) {
    const auto& local = ids[static_cast<std::size_t>(g)];
    const auto at = [&](int x, int y) { return local[static_cast<std::size_t>(wrap(x) + n * wrap(y))]; };
    Handle handle;
    handle.form.assign(mesh.complex.edge_count(), 0.0);
    for (int y = 0; y < n; ++y) {
      for (int dy : {0, 1}) {
        const int tail = at(strip, y);
        const int head = at(strip + 1, y + dy);
        const auto e = mesh.complex.edge_index(tail, head);
        if (!e) continue;
        handle.form[*e] = tail < head ? 1.0 : -1.0;
      }
    }
    std::vector<int> loop;
    for (int x = 0; x < n; ++x) loop.push_back(at(x, loop_row));
    handle.dual_loop = cycle_through(mesh.complex, loop);
    mesh.handles.push_back(std::move(handle));
  }
  return mesh;
}

namespace {

PlanarMesh planar_mesh(const std::vector<Eigen::Vector2d>& points, std::vector<TriangleTuple> triangles) {
  for (auto& t : triangles) {
    const Eigen::Vector2d a = points[static_cast<std::size_t>(t[1])] - points[static_cast<std::size_t>(t[0])];
    const Eigen::Vector2d b = points[static_cast<std::size_t>(t[2])] - points[static_cast<std::size_t>(t[0])];
    if (a.x() * b.y() - a.y() * b.x() < 0.0) std::swap(t[1], t[2]);
  }
  PlanarMesh mesh;
  mesh.complex = SimplicialComplex::build(points.size(), triangles);
  mesh.positions = Vertices::Zero(static_cast<Eigen::Index>(points.size()), 3);
  mesh.radius.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    mesh.positions(static_cast<Eigen::Index>(i), 0) = points[i].x();
    mesh.positions(static_cast<Eigen::Index>(i), 1) = points[i].y();
    mesh.radius[i] = points[i].norm();
  }
  return mesh;
}

// Triangles between ring `inner` and ring `inner + 1`; ids(j, i) gives vertex ids.
template <class Id>
void ring_layer(int j, int n_angular, bool stagger, const Id& id, std::vector<TriangleTuple>& out) {
  for (int i = 0; i < n_angular; ++i) {
    const int i1 = (i + 1) % n_angular;
    if (!stagger) {
      out.push_back({id(j, i), id(j, i1), id(j + 1, i1)});
      out.push_back({id(j, i), id(j + 1, i1), id(j + 1, i)});
    } else if (j % 2 == 0) {
      // Ring j + 1 sits half a step ahead of ring j.
      out.push_back({id(j, i), id(j, i1), id(j + 1, i)});
      out.push_back({id(j, i1), id(j + 1, i1), id(j + 1, i)});
    } else {
      out.push_back({id(j, i), id(j, i1), id(j + 1, i1)});
      out.push_back({id(j, i), id(j + 1, i1), id(j + 1, i)});
    }
  }
}

}  // namespace

PlanarMesh gen_annulus(int n_radial, int n_angular, double r_inner, double r_outer, AnnulusLayout layout) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer)) {
    throw Error(ErrorCode::BadRadii, "annulus requires 0 < r_inner < r_outer");
  }
  if (n_radial < 2 || n_angular < 3) {
    throw Error(ErrorCode::InvalidArgument, "annulus requires n_radial >= 2 and n_angular >= 3");
  }
  std::vector<Eigen::Vector2d> points;
  const double step = 2.0 * std::numbers::pi / n_angular;
  for (int j = 0; j <= n_radial; ++j) {
    const double t = static_cast<double>(j) / n_radial;
    const double r = layout.spacing == RadialSpacing::Linear ? r_inner + (r_outer - r_inner) * t
                                                             : r_inner * std::pow(r_outer / r_inner, t);
    const double shift = layout.stagger && j % 2 == 1 ? 0.5 * step : 0.0;
    for (int i = 0; i < n_angular; ++i) {
      const double theta = i * step + shift;
      points.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }
  const auto id = [n_angular](int j, int i) { return j * n_angular + i; };
  std::vector<TriangleTuple> triangles;
  for (int j = 0; j < n_radial; ++j) ring_layer(j, n_angular, layout.stagger, id, triangles);
  return planar_mesh(points, std::move(triangles));
}

PlanarMesh gen_disk(int n_radial, int n_angular, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadRadii, "disk requires a positive radius");
  if (n_radial < 1 || n_angular < 3) {
    throw Error(ErrorCode::InvalidArgument, "disk requires n_radial >= 1 and n_angular >= 3");
  }
  std::vector<Eigen::Vector2d> points{{0.0, 0.0}};
  const double step = 2.0 * std::numbers::pi / n_angular;
  for (int j = 1; j <= n_radial; ++j) {
    const double r = radius * j / n_radial;
    for (int i = 0; i < n_angular; ++i) points.emplace_back(r * std::cos(i * step), r * std::sin(i * step));
  }
  // Ring j (1-based) vertex i has id 1 + (j - 1) * n_angular + i.
  const auto id = [n_angular](int j, int i) { return 1 + j * n_angular + i; };
  std::vector<TriangleTuple> triangles;
  for (int i = 0; i < n_angular; ++i) triangles.push_back({0, id(0, i), id(0, (i + 1) % n_angular)});
  for (int j = 0; j + 1 < n_radial; ++j) ring_layer(j, n_angular, false, id, triangles);
  return planar_mesh(points, std::move(triangles));
}

Subcomplex restrict_to_triangles(const SimplicialComplex& complex, std::span<const std::size_t> triangle_ids) {
  Subcomplex sub;
  std::vector<long> new_id(complex.vertex_count(), -1);
  for (std::size_t t : triangle_ids) {
    if (t >= complex.triangle_count()) throw Error(ErrorCode::InvalidArgument, "triangle id out of range");
    for (int v : complex.triangles()[t]) new_id[static_cast<std::size_t>(v)] = 0;
  }
  for (std::size_t v = 0; v < complex.vertex_count(); ++v) {
    if (new_id[v] == 0) {
      new_id[v] = static_cast<long>(sub.parent_vertex.size());
      sub.parent_vertex.push_back(v);
    }
  }
  std::vector<TriangleTuple> triangles;
  triangles.reserve(triangle_ids.size());
  for (std::size_t t : triangle_ids) {
    auto o = complex.oriented_triangle(t);
    for (int& v : o) v = static_cast<int>(new_id[static_cast<std::size_t>(v)]);
    triangles.push_back(o);
    sub.parent_triangle.push_back(t);
  }
  sub.complex = SimplicialComplex::build(sub.parent_vertex.size(), triangles);
  // Triangle order is preserved by build.
  for (const auto& e : sub.complex.edges()) {
    const auto parent = complex.edge_index(static_cast<int>(sub.parent_vertex[static_cast<std::size_t>(e[0])]),
                                           static_cast<int>(sub.parent_vertex[static_cast<std::size_t>(e[1])]));
    sub.parent_edge.push_back(*parent);
  }
  return sub;
}

SurfaceMesh gen_pants(int refinement, double cap_angle) {
  const OctaSphere s = subdivided_octahedron(refinement);
  std::vector<Eigen::Vector3d> centres;
  for (int j = 0; j < 3; ++j) {
    const double a = 2.0 * std::numbers::pi * j / 3.0;
    centres.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  const SimplicialComplex sphere = SimplicialComplex::build(s.points.size(), s.triangles);
  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < sphere.triangle_count(); ++t) {
    const auto& v = sphere.triangles()[t];
    const Eigen::Vector3d c = (s.points[static_cast<std::size_t>(v[0])] + s.points[static_cast<std::size_t>(v[1])] +
                               s.points[static_cast<std::size_t>(v[2])])
                                  .normalized();
    bool removed = false;
    for (const auto& d : centres) removed = removed || std::acos(std::clamp(c.dot(d), -1.0, 1.0)) < cap_angle;
    if (!removed) kept.push_back(t);
  }
  Subcomplex sub = restrict_to_triangles(sphere, kept);
  SurfaceMesh mesh;
  mesh.complex = std::move(sub.complex);
  mesh.positions.resize(static_cast<Eigen::Index>(sub.parent_vertex.size()), 3);
  for (std::size_t i = 0; i < sub.parent_vertex.size(); ++i) {
    mesh.positions.row(static_cast<Eigen::Index>(i)) = s.points[sub.parent_vertex[i]].transpose();
  }
  return mesh;
}

}  // namespace l2hodge
