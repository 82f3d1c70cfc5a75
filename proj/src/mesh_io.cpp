#include "l2hodge/mesh_io.hpp"

#include "l2hodge/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace l2hodge {

namespace {

struct Token {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

// Whitespace-separated tokens with '#' comments, remembering positions.
class TokenStream {
 public:
  TokenStream(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        tokens_.push_back({line.substr(i, j - i), number, i + 1});
        i = j;
      }
    }
    end_line_ = number + 1;
  }

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& next(const char* what) {
    if (done()) throw ParseError(end_line_, 1, source_ + ": unexpected end of file, expected " + what);
    return tokens_[pos_++];
  }

  void expect(const std::string& word) {
    const Token& t = next(word.c_str());
    if (t.text != word) fail(t, "expected '" + word + "', found '" + t.text + "'");
  }

  long integer(const char* what) {
    const Token& t = next(what);
    long value = 0;
    const auto* first = t.text.data();
    const auto* last = first + t.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(t, std::string("expected an integer ") + what + ", found '" + t.text + "'");
    return value;
  }

  long count(const char* what) {
    const long v = integer(what);
    if (v < 0) fail(last(), std::string(what) + " must be non-negative");
    return v;
  }

  double real(const char* what) {
    const Token& t = next(what);
    double value = 0.0;
    const auto* first = t.text.data();
    const auto* last = first + t.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(t, std::string("expected a number ") + what + ", found '" + t.text + "'");
    return value;
  }

  std::string word(const char* what) { return next(what).text; }

  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    throw ParseError(t.line, t.column, source_ + ": " + message);
  }

  const Token& last() const { return tokens_[pos_ - 1]; }

 private:
  std::string source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_line_ = 1;
};

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

int vertex_id(TokenStream& ts, long nv) {
  const long v = ts.integer("vertex index");
  if (v < 0 || v >= nv) ts.fail(ts.last(), "vertex index " + std::to_string(v) + " out of range");
  return static_cast<int>(v);
}

}  // namespace

std::filesystem::path boundary_sidecar(const std::filesystem::path& mesh_path) {
  return std::filesystem::path(mesh_path.string() + ".bnd");
}

void write_mesh(const std::filesystem::path& path, const SimplicialComplex& complex, const Vertices& positions) {
  if (static_cast<std::size_t>(positions.rows()) != complex.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "one position per vertex required");
  }
  {
    std::ofstream out = open_out(path);
    out << "nOFF\n" << positions.cols() << "\n";
    out << complex.vertex_count() << ' ' << complex.triangle_count() << " 0\n";
    for (Eigen::Index i = 0; i < positions.rows(); ++i) {
      for (Eigen::Index j = 0; j < positions.cols(); ++j) out << (j ? " " : "") << full(positions(i, j));
      out << '\n';
    }
    for (std::size_t t = 0; t < complex.triangle_count(); ++t) {
      const auto tri = complex.oriented_triangle(t);
      out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
    finish(out, path);
  }
  const auto side = boundary_sidecar(path);
  std::ofstream out = open_out(side);
  out << "# boundary marks\nboundary_edges " << complex.boundary_edge_count() << '\n';
  for (std::size_t e = 0; e < complex.edge_count(); ++e) {
    if (complex.is_boundary_edge(e)) out << complex.edges()[e][0] << ' ' << complex.edges()[e][1] << '\n';
  }
  finish(out, side);
}

MeshData read_mesh(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  TokenStream ts(in, path.string());
  const std::string header = ts.word("header");
  long dim = 3;
  if (header == "nOFF") {
    dim = ts.count("dimension");
    if (dim < 2 || dim > 4) ts.fail(ts.last(), "dimension must be 2, 3 or 4");
  } else if (header != "OFF") {
    ts.fail(ts.last(), "expected 'OFF' or 'nOFF' header");
  }
  const long nv = ts.count("vertex count");
  const long nf = ts.count("face count");
  ts.count("edge count");
  MeshData data;
  data.positions.resize(nv, dim);
  for (long i = 0; i < nv; ++i) {
    for (long j = 0; j < dim; ++j) data.positions(i, j) = ts.real("coordinate");
  }
  std::vector<SimplicialComplex::TriangleTuple> tris;
  for (long f = 0; f < nf; ++f) {
    const long arity = ts.integer("face size");
    if (arity != 3) ts.fail(ts.last(), "only triangles are supported");
    SimplicialComplex::TriangleTuple t{};
    for (int& v : t) v = vertex_id(ts, nv);
    tris.push_back(t);
  }
  if (!ts.done()) {
    const Token& extra = ts.next("end of file");
    ts.fail(extra, "trailing content '" + extra.text + "'");
  }
  data.complex = SimplicialComplex::build(static_cast<std::size_t>(nv), tris);

  const auto side = boundary_sidecar(path);
  if (std::filesystem::exists(side)) {
    std::ifstream sin = open_in(side);
    TokenStream bs(sin, side.string());
    bs.expect("boundary_edges");
    const long count = bs.count("boundary edge count");
    std::set<std::pair<int, int>> listed;
    for (long i = 0; i < count; ++i) {
      int a = vertex_id(bs, nv);
      int b = vertex_id(bs, nv);
      if (a > b) std::swap(a, b);
      listed.insert({a, b});
    }
    std::set<std::pair<int, int>> derived;
    for (std::size_t e = 0; e < data.complex.edge_count(); ++e) {
      if (data.complex.is_boundary_edge(e)) derived.insert({data.complex.edges()[e][0], data.complex.edges()[e][1]});
    }
    if (listed != derived) {
      throw Error(ErrorCode::ValidationError, side.string() + ": boundary marks disagree with the triangle incidence");
    }
  }
  return data;
}

void write_metric(const std::filesystem::path& path, const SimplicialComplex& complex, const MetricField& metric) {
  if (metric.edge_length.size() != complex.edge_count() || metric.conformal_factor.size() != complex.triangle_count()) {
    throw Error(ErrorCode::InvalidArgument, "metric does not match the complex");
  }
  std::ofstream out = open_out(path);
  out << "metric " << to_string(metric.source) << '\n';
  out << "edges " << complex.edge_count() << '\n';
  for (std::size_t e = 0; e < complex.edge_count(); ++e) {
    out << complex.edges()[e][0] << ' ' << complex.edges()[e][1] << ' ' << full(metric.edge_length[e]) << '\n';
  }
  out << "triangles " << complex.triangle_count() << '\n';
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) {
    const auto& tri = complex.triangles()[t];
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << full(metric.conformal_factor[t]) << '\n';
  }
  finish(out, path);
}

MetricField read_metric(const std::filesystem::path& path, const SimplicialComplex& complex) {
  std::ifstream in = open_in(path);
  TokenStream ts(in, path.string());
  const auto nv = static_cast<long>(complex.vertex_count());
  ts.expect("metric");
  const std::string source = ts.word("metric source");
  MetricField metric;
  if (source == "embedding") {
    metric.source = MetricSource::Embedding;
  } else if (source == "warped") {
    metric.source = MetricSource::Warped;
  } else if (source == "rescaled") {
    metric.source = MetricSource::Rescaled;
  } else if (source == "intrinsic") {
    metric.source = MetricSource::Intrinsic;
  } else {
    ts.fail(ts.last(), "unknown metric source '" + source + "'");
  }
  ts.expect("edges");
  const long ne = ts.count("edge count");
  if (ne != static_cast<long>(complex.edge_count())) {
    throw Error(ErrorCode::ValidationError, path.string() + ": edge count does not match the mesh");
  }
  metric.edge_length.assign(complex.edge_count(), 0.0);
  std::vector<std::uint8_t> seen(complex.edge_count(), 0);
  for (long i = 0; i < ne; ++i) {
    const int a = vertex_id(ts, nv);
    const int b = vertex_id(ts, nv);
    const auto e = complex.edge_index(a, b);
    if (!e) ts.fail(ts.last(), "edge " + std::to_string(a) + "-" + std::to_string(b) + " is not in the mesh");
    const double len = ts.real("edge length");
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw Error(ErrorCode::ValidationError, path.string() + ": edge " + std::to_string(a) + "-" + std::to_string(b) +
                                                  " has non-positive length " + full(len));
    }
    if (seen[*e]) ts.fail(ts.last(), "duplicate edge");
    seen[*e] = 1;
    metric.edge_length[*e] = len;
  }
  std::map<SimplicialComplex::TriangleTuple, std::size_t> index;
  for (std::size_t t = 0; t < complex.triangle_count(); ++t) index[complex.triangles()[t]] = t;
  ts.expect("triangles");
  const long nt = ts.count("triangle count");
  if (nt != static_cast<long>(complex.triangle_count())) {
    throw Error(ErrorCode::ValidationError, path.string() + ": triangle count does not match the mesh");
  }
  metric.conformal_factor.assign(complex.triangle_count(), 0.0);
  for (long i = 0; i < nt; ++i) {
    SimplicialComplex::TriangleTuple tri{};
    for (int& v : tri) v = vertex_id(ts, nv);
    std::sort(tri.begin(), tri.end());
    const auto it = index.find(tri);
    if (it == index.end()) ts.fail(ts.last(), "triangle is not in the mesh");
    metric.conformal_factor[it->second] = ts.real("conformal factor");
  }
  if (!ts.done()) {
    const Token& extra = ts.next("end of file");
    ts.fail(extra, "trailing content '" + extra.text + "'");
  }
  validate_metric(complex, metric);
  return metric;
}

}  // namespace l2hodge
