#include <doctest.h>

#include "l2hodge/error.hpp"
#include "l2hodge/mesh_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace l2hodge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "l2hodge_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("torus mesh round trip keeps simplices and orientation") {
  const auto torus = gen_closed_surface(1, 2);
  const auto path = scratch("torus.off");
  write_mesh(path, torus.complex, torus.positions);
  const auto back = read_mesh(path);
  CHECK(back.complex.vertex_count() == torus.complex.vertex_count());
  CHECK(back.complex.edges() == torus.complex.edges());
  CHECK(back.complex.triangles() == torus.complex.triangles());
  for (std::size_t t = 0; t < torus.complex.triangle_count(); ++t) {
    CHECK(back.complex.orientation(t) == torus.complex.orientation(t));
  }
  CHECK((back.positions - torus.positions).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("annulus round trip keeps boundary marks") {
  const auto annulus = gen_annulus(3, 10, 1.0, 2.0);
  const auto path = scratch("annulus.off");
  write_mesh(path, annulus.complex, annulus.positions);
  const auto back = read_mesh(path);
  CHECK(back.complex.boundary_edge_count() == 20);
  for (std::size_t e = 0; e < back.complex.edge_count(); ++e) {
    CHECK(back.complex.is_boundary_edge(e) == annulus.complex.is_boundary_edge(e));
  }
}

TEST_CASE("plain OFF without sidecar") {
  const auto path = scratch("square.off");
  fs::remove(boundary_sidecar(path));
  write_text(path, "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n");
  const auto mesh = read_mesh(path);
  CHECK(mesh.complex.triangle_count() == 2);
  CHECK(mesh.complex.boundary_edge_count() == 4);
}

TEST_CASE("truncated file reports the line") {
  const auto path = scratch("truncated.off");
  fs::remove(boundary_sidecar(path));
  write_text(path, "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2\n");
  try {
    read_mesh(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.line() == 9);
  }
}

TEST_CASE("malformed tokens report line and column") {
  const auto path = scratch("bad_token.off");
  fs::remove(boundary_sidecar(path));
  write_text(path, "OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n");
  try {
    read_mesh(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 3);
  }
  write_text(path, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  CHECK_THROWS_AS(read_mesh(path), ParseError);
  write_text(path, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\nextra\n");
  CHECK_THROWS_AS(read_mesh(path), ParseError);
  write_text(path, "PLY\n");
  CHECK_THROWS_AS(read_mesh(path), ParseError);
}

TEST_CASE("sidecar disagreeing with incidence is rejected") {
  const auto path = scratch("mismatch.off");
  write_text(path, "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n");
  write_text(boundary_sidecar(path), "boundary_edges 4\n0 1\n1 2\n2 3\n0 2\n");
  try {
    read_mesh(path);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("metric round trip is lossless") {
  const auto torus = gen_closed_surface(1, 1);
  auto metric = metric_from_embedding(torus.complex, torus.positions);
  std::vector<double> u(torus.complex.triangle_count());
  for (std::size_t t = 0; t < u.size(); ++t) u[t] = 0.1 * std::sin(0.37 * static_cast<double>(t)) + 1.0 / 3.0;
  metric = conformal_rescale(metric, u);
  const auto path = scratch("torus.metric");
  write_metric(path, torus.complex, metric);
  const auto back = read_metric(path, torus.complex);
  CHECK(back.source == metric.source);
  CHECK(back.edge_length == metric.edge_length);
  CHECK(back.conformal_factor == metric.conformal_factor);
  const auto again = scratch("torus2.metric");
  write_metric(again, torus.complex, back);
  CHECK(read_text(path) == read_text(again));
}

TEST_CASE("non-positive metric length is a validation error") {
  const auto torus = gen_closed_surface(1, 1);
  const auto metric = metric_from_embedding(torus.complex, torus.positions);
  const auto path = scratch("negative.metric");
  write_metric(path, torus.complex, metric);
  std::string text = read_text(path);
  const auto line = text.find('\n', text.find("edges"));
  const auto end = text.find('\n', line + 1);
  const auto last_space = text.rfind(' ', end);
  text.replace(last_space + 1, end - last_space - 1, "-0.5");
  write_text(path, text);
  try {
    read_metric(path, torus.complex);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("metric for a different mesh is rejected") {
  const auto small = gen_closed_surface(1, 1);
  const auto large = gen_closed_surface(1, 2);
  const auto path = scratch("other.metric");
  write_metric(path, small.complex, metric_from_embedding(small.complex, small.positions));
  try {
    read_metric(path, large.complex);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("missing file is an io error") {
  try {
    read_mesh(scratch("does_not_exist.off"));
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}
