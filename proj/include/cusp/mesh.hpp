#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp {

using Point2 = std::array<double, 2>;
using Tri = std::array<int, 3>;

// Layered triangulation of {0 < x2 < 1, 0 < x1 < x2^gamma1} with layer
// heights (j/N)^kappa. Layer j carries j+1 vertices; boundary vertices lie
// exactly on the curve x1 = x2^gamma1.
struct GradedMesh {
  std::vector<Point2> vertices;
  std::vector<Tri> triangles;
  double gamma1 = 1.0;
  double kappa = 1.0;
  int levels = 0;  // N
  bool is_reference = false;

  double triangle_area(int t) const;
  double total_area() const;                  // sum of triangle areas
  double domain_area() const;                 // exact: 1/(gamma1+1)
  double area_gap() const;                    // polygonal vs true, >= 0 trend O(h^2)
  double diameter() const;
};

GradedMesh build_cusp_mesh(double gamma1, int N, double kappa);
GradedMesh build_reference_mesh(int N, double kappa);

// Default grading matched to the cusp sharpness.
inline double default_kappa(double gamma1) { return gamma1 < 1.0 ? 1.0 : gamma1; }

// Symmetric interior rule on the unit triangle (barycentric points/weights).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;  // sum to 1, scaled by triangle area
  int order = 0;

  static QuadratureRule midpoint_order2();
};

double integrate(const GradedMesh& mesh,
                 const std::function<double(double, double)>& f,
                 const QuadratureRule& rule = QuadratureRule::midpoint_order2());

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
};

MeshQuality mesh_quality(const GradedMesh& mesh);

// Plain-text mesh format; bit-exact round trip.
void write_mesh(const GradedMesh& mesh, std::ostream& os);
void write_mesh_file(const GradedMesh& mesh, const std::string& path);
GradedMesh read_mesh(std::istream& is);
GradedMesh read_mesh_file(const std::string& path);

}  // namespace cusp
