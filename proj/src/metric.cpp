#include "l2hodge/metric.hpp"

#include "l2hodge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace l2hodge {

const char* to_string(MetricSource source) {
  switch (source) {
    case MetricSource::Embedding: return "embedding";
    case MetricSource::Warped: return "warped";
    case MetricSource::Rescaled: return "rescaled";
    case MetricSource::Intrinsic: return "intrinsic";
  }
  return "unknown";
}

double heron_area(double a, double b, double c) {
  std::array<double, 3> s{a, b, c};
  std::sort(s.begin(), s.end(), std::greater<>());
  const double x = s[0];
  const double y = s[1];
  const double z = s[2];
  const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  if (!(p > 0.0) || z - (x - y) <= 0.0) return -1.0;
  return 0.25 * std::sqrt(p);
}

std::array<double, 3> MetricField::triangle_lengths(const SimplicialComplex& complex, std::size_t triangle) const {
  const auto& te = complex.triangle_edges(triangle);
  const double scale = std::exp(conformal_factor[triangle]);
  return {scale * edge_length[te[0]], scale * edge_length[te[1]], scale * edge_length[te[2]]};
}

double MetricField::triangle_area(const SimplicialComplex& complex, std::size_t triangle) const {
  const auto l = triangle_lengths(complex, triangle);
  return heron_area(l[0], l[1], l[2]);
}

double MetricField::effective_edge_length(const SimplicialComplex& complex, std::size_t edge) const {
  const auto tris = complex.edge_triangles(edge);
  if (tris.empty()) return edge_length[edge];
  double mean = 0.0;
  for (std::size_t t : tris) mean += conformal_factor[t];
  mean /= static_cast<double>(tris.size());
  return edge_length[edge] * std::exp(mean);
}

double MetricField::total_area(const SimplicialComplex& complex) const {
  double total = 0.0;
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) total += triangle_area(complex, t);
  return total;
}

void validate_metric(const SimplicialComplex& complex, const MetricField& metric) {
  if (metric.edge_length.size() != complex.edge_count() ||
      metric.conformal_factor.size() != complex.triangle_count()) {
    throw Error(ErrorCode::ValidationError, "metric does not match the complex");
  }
  for (double l : metric.edge_length) {
    if (!(l > 0.0) || !std::isfinite(l)) throw Error(ErrorCode::ValidationError, "edge lengths must be positive");
  }
  for (double u : metric.conformal_factor) {
    if (!std::isfinite(u)) throw Error(ErrorCode::ValidationError, "conformal factor must be finite");
  }
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) {
    const auto l = metric.triangle_lengths(complex, t);
    const double mean = (l[0] + l[1] + l[2]) / 3.0;
    const double area = heron_area(l[0], l[1], l[2]);
    if (!(area > 1e-14 * mean * mean)) {
      throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " is degenerate");
    }
  }
}

MetricField metric_from_embedding(const SimplicialComplex& complex, const Vertices& positions) {
  if (static_cast<std::size_t>(positions.rows()) != complex.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "one position per vertex required");
  }
  if (!positions.allFinite()) throw Error(ErrorCode::InvalidArgument, "positions must be finite");
  MetricField metric;
  metric.source = MetricSource::Embedding;
  metric.edge_length.reserve(complex.edge_count());
  for (const auto& e : complex.edges()) {
    metric.edge_length.push_back((positions.row(e[1]) - positions.row(e[0])).norm());
  }
  metric.conformal_factor.assign(complex.triangle_count(), 0.0);
  validate_metric(complex, metric);
  return metric;
}

WarpedAnnulus warped_annulus_metric(int n_radial, int n_angular, double length, double warp_exponent) {
  if (!(length > 0.0) || !std::isfinite(warp_exponent)) {
    throw Error(ErrorCode::InvalidArgument, "warped annulus requires L > 0 and a finite exponent");
  }
  if (n_radial < 3 || n_angular < 3) {
    throw Error(ErrorCode::InvalidArgument, "warped annulus requires grid sizes >= 3");
  }
  WarpedAnnulus out;
  out.n_radial = n_radial;
  out.n_angular = n_angular;
  // Topology only; the planar radii are irrelevant.
  PlanarMesh topo = gen_annulus(n_radial, n_angular, 1.0, 2.0);
  out.complex = std::move(topo.complex);
  const double h = length / n_radial;
  const double arc = 2.0 * std::numbers::pi / n_angular;
  for (int j = 0; j <= n_radial; ++j) out.ring_radius.push_back(h * j);
  out.vertex_radius.resize(out.complex.vertex_count());
  for (std::size_t v = 0; v < out.complex.vertex_count(); ++v) {
    out.vertex_radius[v] = out.ring_radius[v / static_cast<std::size_t>(n_angular)];
  }
  const auto width = [&](int ring) { return arc * std::exp(warp_exponent * out.ring_radius[static_cast<std::size_t>(ring)]); };

  out.metric.source = MetricSource::Warped;
  out.metric.conformal_factor.assign(out.complex.triangle_count(), 0.0);
  out.metric.edge_length.reserve(out.complex.edge_count());
  for (const auto& e : out.complex.edges()) {
    const int ra = e[0] / n_angular;
    const int rb = e[1] / n_angular;
    double len = 0.0;
    if (ra == rb) {
      len = width(ra);
    } else if ((e[1] - e[0]) == n_angular) {
      len = h;
    } else {
      const double mid = 0.5 * (width(ra) + width(rb));
      len = std::sqrt(h * h + mid * mid);
    }
    out.metric.edge_length.push_back(len);
  }
  for (std::size_t t = 0; t < out.complex.triangle_count(); ++t) {
    const auto l = out.metric.triangle_lengths(out.complex, t);
    const double longest = std::max({l[0], l[1], l[2]});
    const double area = out.metric.triangle_area(out.complex, t);
    const double aspect = area > 0.0 ? longest * longest / (2.0 * area) : std::numeric_limits<double>::infinity();
    if (aspect > 1e6) {
      throw Error(ErrorCode::AspectBlowup, "triangle aspect ratio exceeds 1e6; refine the angular grid");
    }
  }
  validate_metric(out.complex, out.metric);
  return out;
}

MetricField conformal_rescale(const MetricField& metric, const std::vector<double>& u_per_triangle) {
  if (u_per_triangle.size() != metric.conformal_factor.size()) {
    throw Error(ErrorCode::InvalidArgument, "one conformal factor per triangle required");
  }
  MetricField out = metric;
  for (std::size_t t = 0; t < u_per_triangle.size(); ++t) {
    if (!std::isfinite(u_per_triangle[t])) throw Error(ErrorCode::InvalidArgument, "conformal factor must be finite");
    out.conformal_factor[t] += u_per_triangle[t];
  }
  out.source = MetricSource::Rescaled;
  return out;
}

const Eigen::VectorXd& OperatorBundle::mass(int k) const {
  switch (k) {
    case 0: return m0;
    case 1: return m1;
    case 2: return m2;
    default: throw Error(ErrorCode::DegreeOutOfRange, "mass degree must be 0, 1 or 2");
  }
}

bool OperatorBundle::closed() const {
  return std::none_of(boundary_edge.begin(), boundary_edge.end(), [](std::uint8_t b) { return b != 0; });
}

OperatorBundle mass_matrices(const SimplicialComplex& complex, const MetricField& metric) {
  validate_metric(complex, metric);
  OperatorBundle b;
  b.d0 = complex.coboundary(0);
  b.d1 = complex.coboundary(1);
  b.m0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex.vertex_count()));
  b.m1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex.edge_count()));
  b.m2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex.triangle_count()));
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) {
    const auto l = metric.triangle_lengths(complex, t);
    const double area = heron_area(l[0], l[1], l[2]);
    b.m2[static_cast<Eigen::Index>(t)] = 1.0 / area;
    for (int v : complex.triangles()[t]) b.m0[v] += area / 3.0;
    const auto& te = complex.triangle_edges(t);
    for (int i = 0; i < 3; ++i) {
      const double a = l[static_cast<std::size_t>(i)];
      const double p = l[static_cast<std::size_t>((i + 1) % 3)];
      const double q = l[static_cast<std::size_t>((i + 2) % 3)];
      // Edge midpoint to barycentre is a third of the median.
      const double dual = std::sqrt(std::max(0.0, 2.0 * p * p + 2.0 * q * q - a * a)) / 6.0;
      b.m1[static_cast<Eigen::Index>(te[static_cast<std::size_t>(i)])] += dual / a;
    }
  }
  b.boundary_vertex.resize(complex.vertex_count());
  b.boundary_edge.resize(complex.edge_count());
  for (std::size_t v = 0; v < complex.vertex_count(); ++v) b.boundary_vertex[v] = complex.is_boundary_vertex(v) ? 1 : 0;
  for (std::size_t e = 0; e < complex.edge_count(); ++e) b.boundary_edge[e] = complex.is_boundary_edge(e) ? 1 : 0;
  b.metric_ref = to_string(metric.source);
  for (Eigen::Index i = 0; i < b.m0.size(); ++i) {
    if (!(b.m0[i] > 0.0)) throw Error(ErrorCode::DegenerateTriangle, "isolated vertex has zero dual area");
  }
  for (Eigen::Index i = 0; i < b.m1.size(); ++i) {
    if (!(b.m1[i] > 0.0)) throw Error(ErrorCode::DegenerateTriangle, "edge without a triangle has zero dual length");
  }
  return b;
}

}  // namespace l2hodge
