#include "l2hodge/ends.hpp"

#include "l2hodge/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_set>

namespace l2hodge {

double EnergyGraph::energy(const VectorXd& u) const {
  double total = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double diff = u[edges[e][1]] - u[edges[e][0]];
    total += conductance[static_cast<Eigen::Index>(e)] * diff * diff;
  }
  return total;
}

EnergyGraph energy_graph(const SimplicialComplex& complex, const OperatorBundle& bundle,
                         std::vector<double> radius) {
  if (radius.size() != complex.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "one radius per vertex required");
  }
  EnergyGraph g;
  g.vertex_count = complex.vertex_count();
  g.edges = complex.edges();
  g.conductance = bundle.m1;
  g.vertex_mass = bundle.m0;
  g.radius = std::move(radius);
  return g;
}

EnergyGraph radial_graph(std::span<const double> nodes, const std::function<double(double)>& weight) {
  if (nodes.size() < 2) throw Error(ErrorCode::InvalidArgument, "radial graph needs two nodes");
  EnergyGraph g;
  g.vertex_count = nodes.size();
  g.radius.assign(nodes.begin(), nodes.end());
  g.conductance.resize(static_cast<Eigen::Index>(nodes.size() - 1));
  g.vertex_mass = VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "radial nodes must increase");
    const double w = weight(0.5 * (nodes[i] + nodes[i + 1]));
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "radial weight must be positive");
    g.edges.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
    g.conductance[static_cast<Eigen::Index>(i)] = w / h;
    g.vertex_mass[static_cast<Eigen::Index>(i)] += 0.5 * h * weight(nodes[i]);
    g.vertex_mass[static_cast<Eigen::Index>(i + 1)] += 0.5 * h * weight(nodes[i + 1]);
  }
  return g;
}

std::vector<double> uniform_nodes(double lo, double hi, std::size_t cells) {
  if (!(hi > lo) || cells == 0) throw Error(ErrorCode::InvalidArgument, "uniform_nodes needs lo < hi and cells > 0");
  std::vector<double> out(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
  }
  out.back() = hi;
  return out;
}

const char* to_string(EndClass c) {
  switch (c) {
    case EndClass::Parabolic: return "parabolic";
    case EndClass::NonParabolic: return "non-parabolic";
    case EndClass::Undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

struct DirichletSolution {
  VectorXd u;
  double residual = 0.0;
};

// Harmonic extension of the fixed values over the free vertices, using the
// edges flagged in edge_mask (all when empty).
DirichletSolution dirichlet_solve(const EnergyGraph& g, const std::vector<std::optional<double>>& fixed,
                                  const std::vector<std::uint8_t>& edge_mask) {
  const std::size_t n = g.vertex_count;
  std::vector<long> index(n, -1);
  long free_count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!fixed[v]) index[v] = free_count++;
  }
  std::vector<Eigen::Triplet<double>> t;
  VectorXd rhs = VectorXd::Zero(free_count);
  VectorXd weight_sum = VectorXd::Zero(free_count);
  const auto use = [&](std::size_t e) { return edge_mask.empty() || edge_mask[e]; };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!use(e)) continue;
    const auto a = static_cast<std::size_t>(g.edges[e][0]);
    const auto b = static_cast<std::size_t>(g.edges[e][1]);
    const double c = g.conductance[static_cast<Eigen::Index>(e)];
    const long ia = index[a];
    const long ib = index[b];
    if (ia >= 0) {
      t.emplace_back(ia, ia, c);
      weight_sum[ia] += c;
    }
    if (ib >= 0) {
      t.emplace_back(ib, ib, c);
      weight_sum[ib] += c;
    }
    if (ia >= 0 && ib >= 0) {
      t.emplace_back(ia, ib, -c);
      t.emplace_back(ib, ia, -c);
    } else if (ia >= 0 && ib < 0) {
      rhs[ia] += c * *fixed[b];
    } else if (ib >= 0 && ia < 0) {
      rhs[ib] += c * *fixed[a];
    }
  }
  for (long i = 0; i < free_count; ++i) {
    if (!(weight_sum[i] > 0.0)) throw Error(ErrorCode::TruncationTooTight, "free vertex without edges");
  }
  const SparseSym a = SparseSym::from_triplets(static_cast<std::size_t>(free_count), t);
  const VectorXd x = solve_spd(a, rhs);
  DirichletSolution out;
  out.u = VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t v = 0; v < n; ++v) out.u[static_cast<Eigen::Index>(v)] = fixed[v] ? *fixed[v] : x[index[v]];
  VectorXd flux = VectorXd::Zero(free_count);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!use(e)) continue;
    const auto a = static_cast<std::size_t>(g.edges[e][0]);
    const auto b = static_cast<std::size_t>(g.edges[e][1]);
    const double c = g.conductance[static_cast<Eigen::Index>(e)];
    const double diff = out.u[static_cast<Eigen::Index>(a)] - out.u[static_cast<Eigen::Index>(b)];
    if (index[a] >= 0) flux[index[a]] += c * diff;
    if (index[b] >= 0) flux[index[b]] -= c * diff;
  }
  for (long i = 0; i < free_count; ++i) out.residual = std::max(out.residual, std::abs(flux[i]) / weight_sum[i]);
  return out;
}

}  // namespace

std::vector<EndDescriptor> detect_ends(const SimplicialComplex& complex,
                                       std::span<const std::size_t> core_triangles) {
  std::vector<std::uint8_t> in_core(complex.triangle_count(), 0);
  for (std::size_t t : core_triangles) {
    if (t >= complex.triangle_count()) throw Error(ErrorCode::InvalidArgument, "core triangle out of range");
    in_core[t] = 1;
  }
  if (core_triangles.empty()) throw Error(ErrorCode::BadSplit, "core is empty");
  std::vector<long> component(complex.triangle_count(), -1);
  std::vector<EndDescriptor> ends;
  for (std::size_t seed = 0; seed < complex.triangle_count(); ++seed) {
    if (in_core[seed] || component[seed] >= 0) continue;
    EndDescriptor end;
    end.id = ends.size();
    std::vector<std::size_t> stack{seed};
    component[seed] = static_cast<long>(end.id);
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      end.triangles.push_back(t);
      for (std::size_t e : complex.triangle_edges(t)) {
        for (std::size_t other : complex.edge_triangles(e)) {
          if (other == t) continue;
          if (in_core[other]) {
            end.interface_edges.push_back(e);
          } else if (component[other] < 0) {
            component[other] = static_cast<long>(end.id);
            stack.push_back(other);
          }
        }
      }
    }
    ends.push_back(std::move(end));
  }
  if (ends.empty()) throw Error(ErrorCode::EmptyComplement, "the core covers the whole complex");
  std::unordered_set<std::size_t> core_vertices;
  for (std::size_t t : core_triangles) {
    for (int v : complex.triangles()[t]) core_vertices.insert(static_cast<std::size_t>(v));
  }
  for (auto& end : ends) {
    std::sort(end.triangles.begin(), end.triangles.end());
    std::sort(end.interface_edges.begin(), end.interface_edges.end());
    end.interface_edges.erase(std::unique(end.interface_edges.begin(), end.interface_edges.end()), end.interface_edges.end());
    for (std::size_t t : end.triangles) {
      for (int v : complex.triangles()[t]) end.vertices.push_back(static_cast<std::size_t>(v));
    }
    std::sort(end.vertices.begin(), end.vertices.end());
    end.vertices.erase(std::unique(end.vertices.begin(), end.vertices.end()), end.vertices.end());
    for (std::size_t v : end.vertices) {
      if (core_vertices.count(v)) end.interface_vertices.push_back(v);
    }
  }
  return ends;
}

CapacityCurve capacity(const EnergyGraph& graph, std::span<const std::size_t> end_vertices,
                       std::span<const std::size_t> interface_vertices, std::span<const double> radii) {
  if (interface_vertices.empty()) throw Error(ErrorCode::InvalidArgument, "end has no interface");
  std::vector<std::uint8_t> in_end(graph.vertex_count, 0);
  std::vector<std::uint8_t> is_interface(graph.vertex_count, 0);
  for (std::size_t v : end_vertices) in_end.at(v) = 1;
  double interface_radius = -std::numeric_limits<double>::infinity();
  for (std::size_t v : interface_vertices) {
    is_interface.at(v) = 1;
    in_end[v] = 1;
    interface_radius = std::max(interface_radius, graph.radius[v]);
  }
  std::vector<std::uint8_t> edge_mask(graph.edges.size(), 0);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    edge_mask[e] = in_end[static_cast<std::size_t>(graph.edges[e][0])] && in_end[static_cast<std::size_t>(graph.edges[e][1])];
  }
  CapacityCurve curve;
  double previous = -1.0;
  for (double r : radii) {
    if (previous >= 0.0 && !(r > previous)) throw Error(ErrorCode::InvalidArgument, "radii must increase");
    previous = r;
    if (!(r > interface_radius)) throw Error(ErrorCode::TruncationTooTight, "truncation radius inside the interface");
    std::vector<std::optional<double>> fixed(graph.vertex_count);
    std::size_t outside = 0;
    std::size_t free = 0;
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
      if (!in_end[v]) {
        fixed[v] = 0.0;
      } else if (is_interface[v]) {
        fixed[v] = 1.0;
      } else if (graph.radius[v] >= r * (1.0 - 1e-9)) {
        fixed[v] = 0.0;
        ++outside;
      } else {
        ++free;
      }
    }
    if (outside == 0 || free == 0) {
      throw Error(ErrorCode::TruncationTooTight, "truncation at R=" + std::to_string(r) + " leaves no room");
    }
    const DirichletSolution sol = dirichlet_solve(graph, fixed, edge_mask);
    double energy = 0.0;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      if (!edge_mask[e]) continue;
      const double diff = sol.u[graph.edges[e][1]] - sol.u[graph.edges[e][0]];
      energy += graph.conductance[static_cast<Eigen::Index>(e)] * diff * diff;
    }
    curve.radii.push_back(r);
    curve.capacities.push_back(energy);
  }
  return curve;
}

Classification classify_parabolic(const CapacityCurve& curve, double eps_cap, std::size_t window) {
  Classification out;
  const std::size_t n = curve.capacities.size();
  if (n != curve.radii.size()) throw Error(ErrorCode::InvalidArgument, "curve radii and capacities differ in length");
  if (n == 0) return out;
  out.floor = eps_cap >= 0.0 ? eps_cap : 1e-3 * curve.capacities.front();
  if (n < 4) return out;
  const std::size_t w = std::min(n, std::max<std::size_t>(window, 4));
  const std::size_t start = n - w;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = start; i < n; ++i) {
    const double x = std::log(curve.radii[i]);
    const double y = std::log(std::max(curve.capacities[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(w);
  out.trend_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);

  const double last = curve.capacities.back();
  if (last < out.floor) {
    out.cls = EndClass::Parabolic;
    out.limit_estimate = last;
    return out;
  }
  std::vector<double> rho;
  for (std::size_t i = start; i < n; ++i) rho.push_back(1.0 / curve.capacities[i]);
  const double tiny = 1e-12 * rho.back();
  std::vector<double> inc;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i) inc.push_back(rho[i + 1] - rho[i]);
  for (double d : inc) {
    if (d < -tiny) return out;  // capacity increased: not a valid curve for the fit
  }
  double q_sum = 0.0;
  for (std::size_t i = 0; i + 1 < inc.size(); ++i) {
    const double a = std::max(inc[i], 0.0);
    const double b = std::max(inc[i + 1], 0.0);
    double ratio = 0.0;
    if (a <= tiny) {
      ratio = b <= tiny ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      ratio = b / a;
    }
    q_sum += ratio;
  }
  const double q = q_sum / static_cast<double>(inc.size() - 1);
  out.increment_ratio = q;
  if (q <= 0.8) {
    const double tail = std::max(inc.back(), 0.0) * q / (1.0 - q);
    out.limit_estimate = 1.0 / (rho.back() + tail);
    out.cls = out.limit_estimate > out.floor ? EndClass::NonParabolic : EndClass::Parabolic;
  } else if (q >= 0.95) {
    out.cls = EndClass::Parabolic;
    out.limit_estimate = 0.0;
  }
  return out;
}

HarmonicFunctionReport li_tam_harmonic(const EnergyGraph& graph, std::span<const int> side,
                                       std::span<const double> radii, const LiTamOptions& options) {
  if (side.size() != graph.vertex_count) throw Error(ErrorCode::InvalidArgument, "one side label per vertex required");
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "at least one radius required");
  bool has_plus = false;
  bool has_minus = false;
  for (int s : side) {
    has_plus = has_plus || s > 0;
    has_minus = has_minus || s < 0;
  }
  if (!has_plus || !has_minus) throw Error(ErrorCode::InvalidArgument, "both ends must be labelled");
  std::vector<std::size_t> core;
  for (std::size_t v = 0; v < graph.vertex_count; ++v) {
    if (graph.radius[v] <= options.core_radius) core.push_back(v);
  }
  if (core.empty()) throw Error(ErrorCode::InvalidArgument, "core is empty");

  HarmonicFunctionReport out;
  VectorXd previous_core;
  VectorXd current_core;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double r = radii[j];
    if (j > 0 && !(r > radii[j - 1])) throw Error(ErrorCode::InvalidArgument, "radii must increase");
    std::vector<std::optional<double>> fixed(graph.vertex_count);
    std::size_t plus = 0;
    std::size_t minus = 0;
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
      if (graph.radius[v] >= r * (1.0 - 1e-9)) {
        if (side[v] == 0) throw Error(ErrorCode::TruncationTooTight, "core vertex beyond the truncation radius");
        fixed[v] = side[v] > 0 ? 1.0 : -1.0;
        (side[v] > 0 ? plus : minus) += 1;
      }
    }
    if (plus == 0 || minus == 0) {
      throw Error(ErrorCode::TruncationTooTight, "truncation at R=" + std::to_string(r) + " misses an end");
    }
    const DirichletSolution sol = dirichlet_solve(graph, fixed, {});
    out.radii.push_back(r);
    out.energies.push_back(graph.energy(sol.u));
    out.laplacian_residual = std::max(out.laplacian_residual, sol.residual);
    if (sol.u.maxCoeff() > 1.0 + 1e-12 || sol.u.minCoeff() < -1.0 - 1e-12) out.max_principle = false;
    current_core.resize(static_cast<Eigen::Index>(core.size()));
    for (std::size_t i = 0; i < core.size(); ++i) current_core[static_cast<Eigen::Index>(i)] = sol.u[static_cast<Eigen::Index>(core[i])];
    out.core_oscillation.push_back(current_core.maxCoeff() - current_core.minCoeff());
    std::array<double, 2> dev{0.0, 0.0};
    std::array<double, 2> mean_num{0.0, 0.0};
    std::array<double, 2> mean_den{0.0, 0.0};
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
      if (side[v] == 0) continue;
      const std::size_t which = side[v] > 0 ? 0 : 1;
      const double level = side[v] > 0 ? 1.0 : -1.0;
      const double u = sol.u[static_cast<Eigen::Index>(v)];
      const double m = graph.vertex_mass[static_cast<Eigen::Index>(v)];
      dev[which] += m * (u - level) * (u - level);
      if (graph.radius[v] >= 0.5 * r && graph.radius[v] < r) {
        mean_num[which] += m * u;
        mean_den[which] += m;
      }
    }
    out.end_deviation.push_back(dev);
    for (std::size_t i = 0; i < 2; ++i) {
      out.end_values[i] = mean_den[i] > 0.0 ? mean_num[i] / mean_den[i] : (i == 0 ? 1.0 : -1.0);
    }
    if (j > 0) {
      out.core_change = (current_core - previous_core).cwiseAbs().maxCoeff();
      if (out.energies[j] > out.energies[j - 1] * (1.0 + 1e-10)) out.energies_monotone = false;
    }
    previous_core = current_core;
    out.values = sol.u;
  }
  out.oscillation = out.core_oscillation.back();
  out.degenerate = out.oscillation < options.degenerate_tol;
  out.converged = radii.size() >= 2 && out.core_change <= options.tol;
  if (!out.converged && options.throw_nonconvergent) {
    throw Error(ErrorCode::NonConvergent, "core values moved by " + std::to_string(out.core_change) +
                                              " between the last two radii");
  }
  return out;
}

double lambda0_estimate(const EnergyGraph& graph, std::span<const std::uint8_t> domain_mask,
                        const EigenOptions& options) {
  if (domain_mask.size() != graph.vertex_count) throw Error(ErrorCode::InvalidArgument, "one mask flag per vertex required");
  std::vector<long> index(graph.vertex_count, -1);
  long n = 0;
  for (std::size_t v = 0; v < graph.vertex_count; ++v) {
    if (domain_mask[v]) index[v] = n++;
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty domain");
  std::vector<Eigen::Triplet<double>> t;
  VectorXd mass(n);
  for (std::size_t v = 0; v < graph.vertex_count; ++v) {
    if (index[v] >= 0) mass[index[v]] = graph.vertex_mass[static_cast<Eigen::Index>(v)];
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const long a = index[static_cast<std::size_t>(graph.edges[e][0])];
    const long b = index[static_cast<std::size_t>(graph.edges[e][1])];
    const double c = graph.conductance[static_cast<Eigen::Index>(e)];
    if (a >= 0) t.emplace_back(a, a, c);
    if (b >= 0) t.emplace_back(b, b, c);
    if (a >= 0 && b >= 0) {
      t.emplace_back(a, b, -c);
      t.emplace_back(b, a, -c);
    }
  }
  const SparseSym s = SparseSym::from_triplets(static_cast<std::size_t>(n), t);
  return smallest_eigenpairs(s, mass, 1, options).values[0];
}

}  // namespace l2hodge
