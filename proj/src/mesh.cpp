#include "cusp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cusp {
namespace {

double tri_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

int layer_offset(int j) { return j * (j + 1) / 2; }

}  // namespace

double GradedMesh::triangle_area(int t) const {
  const Tri& tr = triangles[t];
  return tri_area(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double GradedMesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
    area += triangle_area(t);
  return area;
}

double GradedMesh::domain_area() const { return 1.0 / (gamma1 + 1.0); }

double GradedMesh::area_gap() const {
  return std::abs(total_area() - domain_area());
}

double GradedMesh::diameter() const {
  double d2 = 0.0;
  for (const auto& p : vertices)
    for (const auto& q : vertices) {
      const double dx = p[0] - q[0], dy = p[1] - q[1];
      d2 = std::max(d2, dx * dx + dy * dy);
    }
  return std::sqrt(d2);
}

GradedMesh build_cusp_mesh(double gamma1, int N, double kappa) {
  if (!(gamma1 >= 1.0)) throw Error("GammaOutOfRange", "gamma1 must be >= 1");
  if (N < 2) throw Error("BadMesh", "N must be >= 2");
  if (!(kappa >= 1.0)) throw Error("BadMesh", "kappa must be >= 1");

  GradedMesh mesh;
  mesh.gamma1 = gamma1;
  mesh.kappa = kappa;
  mesh.levels = N;
  mesh.is_reference = (gamma1 == 1.0);

  mesh.vertices.reserve((N + 1) * (N + 2) / 2);
  for (int j = 0; j <= N; ++j) {
    const double t = std::pow(static_cast<double>(j) / N, kappa);
    const double w = std::pow(t, gamma1);
    for (int i = 0; i <= j; ++i) {
      const double x1 = (j == 0) ? 0.0 : w * static_cast<double>(i) / j;
      mesh.vertices.push_back({x1, t});
    }
  }

  for (int j = 0; j < N; ++j) {
    const int lo = layer_offset(j);
    const int hi = layer_offset(j + 1);
    for (int i = 0; i <= j; ++i)
      mesh.triangles.push_back({lo + i, hi + i + 1, hi + i});
    for (int i = 0; i < j; ++i)
      mesh.triangles.push_back({lo + i, lo + i + 1, hi + i + 1});
  }

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
    if (!(mesh.triangle_area(t) > 1e-300))
      throw Error("DegenerateTriangle",
                  "grading produced a zero-area element");
  return mesh;
}

GradedMesh build_reference_mesh(int N, double kappa) {
  return build_cusp_mesh(1.0, N, kappa);
}

QuadratureRule QuadratureRule::midpoint_order2() {
  QuadratureRule rule;
  rule.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  rule.order = 2;
  return rule;
}

double integrate(const GradedMesh& mesh,
                 const std::function<double(double, double)>& f,
                 const QuadratureRule& rule) {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const Tri& tr = mesh.triangles[t];
    const Point2& a = mesh.vertices[tr[0]];
    const Point2& b = mesh.vertices[tr[1]];
    const Point2& c = mesh.vertices[tr[2]];
    const double area = tri_area(a, b, c);
    double local = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k) {
      const auto& bc = rule.points[k];
      const double x = bc[0] * a[0] + bc[1] * b[0] + bc[2] * c[0];
      const double y = bc[0] * a[1] + bc[1] * b[1] + bc[2] * c[1];
      const double v = f(x, y);
      if (!std::isfinite(v))
        throw Error("NonfiniteIntegrand",
                    "integrand not finite at a quadrature point");
      local += rule.weights[k] * v;
    }
    sum += area * local;
  }
  return sum;
}

MeshQuality mesh_quality(const GradedMesh& mesh) {
  MeshQuality q;
  q.min_angle_deg = 180.0;
  q.h_min = std::numeric_limits<double>::max();
  for (const Tri& tr : mesh.triangles) {
    const Point2& a = mesh.vertices[tr[0]];
    const Point2& b = mesh.vertices[tr[1]];
    const Point2& c = mesh.vertices[tr[2]];
    const double la = std::hypot(c[0] - b[0], c[1] - b[1]);
    const double lb = std::hypot(c[0] - a[0], c[1] - a[1]);
    const double lc = std::hypot(b[0] - a[0], b[1] - a[1]);
    const double lmin = std::min({la, lb, lc});
    const double lmax = std::max({la, lb, lc});
    q.h_min = std::min(q.h_min, lmin);
    q.h_max = std::max(q.h_max, lmax);
    q.max_aspect = std::max(q.max_aspect, lmax / lmin);
    const double angles[3] = {
        std::acos(std::clamp((lb * lb + lc * lc - la * la) / (2 * lb * lc), -1.0, 1.0)),
        std::acos(std::clamp((la * la + lc * lc - lb * lb) / (2 * la * lc), -1.0, 1.0)),
        std::acos(std::clamp((la * la + lb * lb - lc * lc) / (2 * la * lb), -1.0, 1.0))};
    for (double ang : angles)
      q.min_angle_deg = std::min(q.min_angle_deg, ang * 180.0 / M_PI);
  }
  return q;
}

void write_mesh(const GradedMesh& mesh, std::ostream& os) {
  os << std::setprecision(17);
  os << "vertices " << mesh.vertices.size() << " triangles "
     << mesh.triangles.size() << " gamma " << mesh.gamma1 << " kappa "
     << mesh.kappa << "\n";
  for (const auto& v : mesh.vertices) os << v[0] << " " << v[1] << "\n";
  for (const auto& t : mesh.triangles)
    os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

void write_mesh_file(const GradedMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("IoError", "cannot open " + path + " for writing");
  write_mesh(mesh, os);
}

GradedMesh read_mesh(std::istream& is) {
  std::string kw_vertices, kw_triangles, kw_gamma, kw_kappa;
  size_t nv = 0, nt = 0;
  GradedMesh mesh;
  is >> kw_vertices >> nv >> kw_triangles >> nt >> kw_gamma >> mesh.gamma1 >>
      kw_kappa >> mesh.kappa;
  if (!is || kw_vertices != "vertices" || kw_triangles != "triangles" ||
      kw_gamma != "gamma" || kw_kappa != "kappa")
    throw Error("IoError", "malformed mesh header");
  mesh.is_reference = (mesh.gamma1 == 1.0);
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) is >> v[0] >> v[1];
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
  if (!is) throw Error("IoError", "truncated mesh file");
  return mesh;
}

GradedMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("IoError", "cannot open " + path);
  return read_mesh(is);
}

}  // namespace cusp
