#pragma once

#include "l2hodge/complex.hpp"
#include "l2hodge/metric.hpp"

#include <filesystem>
#include <string>

namespace l2hodge {

struct MeshData {
  SimplicialComplex complex;
  Vertices positions;
};

/// nOFF text (dimension line, counts, coordinates, oriented triangles) plus a
/// sidecar `<path>.bnd` listing the boundary edges. Incidence is rebuilt on
/// load and the sidecar, when present, must agree with it.
void write_mesh(const std::filesystem::path& path, const SimplicialComplex& complex, const Vertices& positions);
MeshData read_mesh(const std::filesystem::path& path);

/// Per-edge lengths keyed by vertex pairs and per-triangle conformal factors,
/// printed with 17 significant digits.
void write_metric(const std::filesystem::path& path, const SimplicialComplex& complex, const MetricField& metric);
MetricField read_metric(const std::filesystem::path& path, const SimplicialComplex& complex);

std::filesystem::path boundary_sidecar(const std::filesystem::path& mesh_path);

}  // namespace l2hodge
