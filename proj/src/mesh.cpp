#include "drumlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "drumlab/errors.hpp"

namespace drumlab {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Interval: return "interval";
    case Topology::Rectangle: return "rectangle";
    case Topology::Torus2: return "torus2";
  }
  return "interval";
}

Topology topology_from_string(const std::string& s) {
  if (s == "interval") return Topology::Interval;
  if (s == "rectangle") return Topology::Rectangle;
  if (s == "torus2") return Topology::Torus2;
  fail(ErrorCode::InvalidMesh, "unknown topology '" + s + "'");
}

std::string to_string(Diagonal d) { return d == Diagonal::Main ? "main" : "anti"; }

Diagonal diagonal_from_string(const std::string& s) {
  if (s == "main") return Diagonal::Main;
  if (s == "anti") return Diagonal::Anti;
  fail(ErrorCode::InvalidMesh, "unknown diagonal '" + s + "'");
}

Mesh build_interval_mesh(int n_vertices, double length) {
  require(n_vertices >= 3, ErrorCode::InvalidMesh,
          "interval mesh needs at least 3 vertices, got " + std::to_string(n_vertices));
  require(length > 0.0 && std::isfinite(length), ErrorCode::InvalidMesh,
          "interval length must be positive");
  Mesh m;
  m.dimension = 1;
  m.topology = Topology::Interval;
  m.extent = {length, 0.0};
  const double h = length / (n_vertices - 1);
  m.vertices.reserve(n_vertices);
  for (int i = 0; i < n_vertices; ++i) {
    // the last vertex is placed exactly at the endpoint
    m.vertices.push_back({i == n_vertices - 1 ? length : i * h, 0.0});
  }
  for (int i = 0; i + 1 < n_vertices; ++i) {
    Cell c;
    c.v = {i, i + 1, -1};
    m.cells.push_back(c);
  }
  m.boundary = {0, n_vertices - 1};
  return m;
}

Mesh build_rect_mesh(int nx, int ny, double a, double b, Topology topology, Diagonal diagonal) {
  require(nx >= 3 && ny >= 3, ErrorCode::InvalidMesh,
          "rectangle mesh needs nx, ny >= 3, got " + std::to_string(nx) + "x" + std::to_string(ny));
  require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), ErrorCode::InvalidMesh,
          "rectangle side lengths must be positive");
  require(topology != Topology::Interval, ErrorCode::InvalidMesh,
          "build_rect_mesh needs rectangle or torus2 topology");
  Mesh m;
  m.dimension = 2;
  m.topology = topology;
  m.extent = {a, b};
  const double hx = a / (nx - 1);
  const double hy = b / (ny - 1);
  const bool torus = topology == Topology::Torus2;
  const int mx = torus ? nx - 1 : nx;
  const int my = torus ? ny - 1 : ny;

  auto coord = [](int i, int n, double h, double len) { return i == n - 1 ? len : i * h; };
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i)
      m.vertices.push_back({coord(i, nx, hx, a), coord(j, ny, hy, b)});

  auto corner = [&](int i, int j, Cell& c, int k) {
    int si = 0, sj = 0;
    if (torus) {
      si = i / mx;
      sj = j / my;
      i %= mx;
      j %= my;
    }
    c.v[k] = j * mx + i;
    c.shift[k] = {si, sj};
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      Cell t1, t2;
      if (diagonal == Diagonal::Main) {
        corner(i, j, t1, 0), corner(i + 1, j, t1, 1), corner(i + 1, j + 1, t1, 2);
        corner(i, j, t2, 0), corner(i + 1, j + 1, t2, 1), corner(i, j + 1, t2, 2);
      } else {
        corner(i, j, t1, 0), corner(i + 1, j, t1, 1), corner(i, j + 1, t1, 2);
        corner(i + 1, j, t2, 0), corner(i + 1, j + 1, t2, 1), corner(i, j + 1, t2, 2);
      }
      m.cells.push_back(t1);
      m.cells.push_back(t2);
    }
  }

  if (!torus) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) m.boundary.push_back(j * nx + i);
  }
  return m;
}

std::array<Point, 3> cell_corners(const Mesh& mesh, int cell) {
  const Cell& c = mesh.cells[cell];
  std::array<Point, 3> p{};
  for (int k = 0; k < mesh.corners_per_cell(); ++k) {
    const Point& x = mesh.vertices[c.v[k]];
    p[k] = {x[0] + c.shift[k][0] * mesh.extent[0], x[1] + c.shift[k][1] * mesh.extent[1]};
  }
  return p;
}

double cell_volume(const Mesh& mesh, int cell) {
  const auto p = cell_corners(mesh, cell);
  if (mesh.dimension == 1) return std::fabs(p[1][0] - p[0][0]);
  const double cross = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                       (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
  return 0.5 * std::fabs(cross);
}

double chart_volume(const Mesh& mesh) {
  return mesh.dimension == 1 ? mesh.extent[0] : mesh.extent[0] * mesh.extent[1];
}

double max_cell_diameter(const Mesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto p = cell_corners(mesh, c);
    const int nc = mesh.corners_per_cell();
    for (int a = 0; a < nc; ++a)
      for (int b = a + 1; b < nc; ++b)
        h = std::max(h, std::hypot(p[a][0] - p[b][0], p[a][1] - p[b][1]));
  }
  return h;
}

std::vector<std::vector<int>> vertex_neighbors(const Mesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.vertices.size());
  const int nc = mesh.corners_per_cell();
  for (const Cell& c : mesh.cells)
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b)
        if (a != b && c.v[a] != c.v[b]) nb[c.v[a]].push_back(c.v[b]);
  for (auto& l : nb) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return nb;
}

Point displacement(const Mesh& mesh, const Point& x, const Point& y) {
  Point d{y[0] - x[0], mesh.dimension == 2 ? y[1] - x[1] : 0.0};
  if (mesh.closed()) {
    for (int k = 0; k < 2; ++k) d[k] -= mesh.extent[k] * std::round(d[k] / mesh.extent[k]);
  }
  return d;
}

double distance_to_boundary(const Mesh& mesh, const Point& x) {
  if (mesh.closed()) return std::numeric_limits<double>::infinity();
  double d = std::min(x[0], mesh.extent[0] - x[0]);
  if (mesh.dimension == 2) d = std::min({d, x[1], mesh.extent[1] - x[1]});
  return d;
}

int nearest_vertex(const Mesh& mesh, std::span<const double> x) {
  require(static_cast<int>(x.size()) == mesh.dimension, ErrorCode::DimensionMismatch,
          "point has " + std::to_string(x.size()) + " coordinates, mesh dimension is " +
              std::to_string(mesh.dimension));
  const Point p{x[0], mesh.dimension == 2 ? x[1] : 0.0};
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Point d = displacement(mesh, p, mesh.vertices[i]);
    const double r = d[0] * d[0] + d[1] * d[1];
    if (r < best_d) {
      best_d = r;
      best = i;
    }
  }
  return best;
}

void validate_mesh(const Mesh& mesh) {
  const int n = mesh.num_vertices();
  require(mesh.dimension == 1 || mesh.dimension == 2, ErrorCode::InvalidMesh,
          "mesh dimension must be 1 or 2");
  require(n > 0 && !mesh.cells.empty(), ErrorCode::InvalidMesh, "mesh has no vertices or cells");
  require((mesh.dimension == 1) == (mesh.topology == Topology::Interval), ErrorCode::InvalidMesh,
          "topology " + to_string(mesh.topology) + " does not match dimension " +
              std::to_string(mesh.dimension));
  const int nc = mesh.corners_per_cell();
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    for (int k = 0; k < nc; ++k) {
      const int v = mesh.cells[c].v[k];
      require(v >= 0 && v < n, ErrorCode::InvalidMesh,
              "cell " + std::to_string(c) + " references vertex " + std::to_string(v));
    }
    require(cell_volume(mesh, static_cast<int>(c)) > 0.0, ErrorCode::InvalidMesh,
            "cell " + std::to_string(c) + " is degenerate");
  }

  const auto nb = vertex_neighbors(mesh);
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : nb[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  require(count == n, ErrorCode::InvalidMesh, "vertex adjacency graph is disconnected");

  if (mesh.closed()) {
    require(mesh.boundary.empty(), ErrorCode::InvalidMesh, "torus2 mesh must have no boundary");
  } else {
    require(!mesh.boundary.empty(), ErrorCode::InvalidMesh, "mesh needs boundary vertices");
    std::vector<char> marked(n, 0);
    for (int b : mesh.boundary) {
      require(b >= 0 && b < n, ErrorCode::InvalidMesh,
              "boundary index " + std::to_string(b) + " out of range");
      marked[b] = 1;
    }
    const double tol = 1e-12 * std::max(mesh.extent[0], mesh.extent[1]);
    for (int i = 0; i < n; ++i) {
      const bool geometric = distance_to_boundary(mesh, mesh.vertices[i]) <= tol;
      require(geometric == static_cast<bool>(marked[i]), ErrorCode::InvalidMesh,
              "boundary marker of vertex " + std::to_string(i) +
                  " disagrees with the chart boundary");
    }
  }

  double vol = 0.0;
  for (size_t c = 0; c < mesh.cells.size(); ++c) vol += cell_volume(mesh, static_cast<int>(c));
  const double chart = chart_volume(mesh);
  require(std::fabs(vol - chart) <= 1e-10 * chart, ErrorCode::InvalidMesh,
          "cells cover volume " + std::to_string(vol) + " but the chart has " +
              std::to_string(chart));
}

}  // namespace drumlab
