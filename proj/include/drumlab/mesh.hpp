#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace drumlab {

enum class Topology { Interval, Rectangle, Torus2 };

// Which diagonal splits each grid quad into two triangles.
// Anti runs from (x+h, y) to (x, y+h).
enum class Diagonal { Main, Anti };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);
std::string to_string(Diagonal d);
Diagonal diagonal_from_string(const std::string& s);

using Point = std::array<double, 2>;

struct Cell {
  std::array<int, 3> v{-1, -1, -1};
  // Periodic image of each corner, in units of the torus periods. Adding
  // shift[k] * period to vertex v[k] gives an unwrapped, geometrically
  // correct cell. Zero for non-periodic meshes.
  std::array<std::array<int, 2>, 3> shift{};
};

struct Mesh {
  int dimension = 1;
  Topology topology = Topology::Interval;
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<int> boundary;
  // chart extent: [0, extent[0]] x [0, extent[1]]; extent[1] unused in 1D
  std::array<double, 2> extent{1.0, 1.0};

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int corners_per_cell() const { return dimension == 1 ? 2 : 3; }
  bool closed() const { return topology == Topology::Torus2; }
};

Mesh build_interval_mesh(int n_vertices, double length);
Mesh build_rect_mesh(int nx, int ny, double a, double b, Topology topology,
                     Diagonal diagonal = Diagonal::Anti);

// Corner coordinates of a cell with periodic images applied.
std::array<Point, 3> cell_corners(const Mesh& mesh, int cell);
double cell_volume(const Mesh& mesh, int cell);
double chart_volume(const Mesh& mesh);
double max_cell_diameter(const Mesh& mesh);

// Sorted neighbour lists of the vertex adjacency graph.
std::vector<std::vector<int>> vertex_neighbors(const Mesh& mesh);

// Displacement y - x in chart coordinates, minimum image on the torus.
Point displacement(const Mesh& mesh, const Point& x, const Point& y);

// Euclidean distance from x to the chart boundary; infinite on the torus.
double distance_to_boundary(const Mesh& mesh, const Point& x);

int nearest_vertex(const Mesh& mesh, std::span<const double> x);

// Throws invalid-mesh on any broken invariant.
void validate_mesh(const Mesh& mesh);

}  // namespace drumlab
