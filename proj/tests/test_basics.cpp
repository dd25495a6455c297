#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "drumlab/errors.hpp"
#include "drumlab/expression.hpp"
#include "drumlab/mesh.hpp"
#include "drumlab/metric.hpp"
#include "drumlab/rational.hpp"

using namespace drumlab;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no drumlab::Error thrown";
  return ErrorCode::Io;
}

double eval(const std::string& text, std::vector<double> x = {}) {
  return Expression::parse(text)(x);
}

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(eval("1+2*3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1+2)*3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("2^10"), 1024.0);
  EXPECT_DOUBLE_EQ(eval("-3+5"), 2.0);
  EXPECT_DOUBLE_EQ(eval("8/4/2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("10-4-3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("1.5e2"), 150.0);
}

TEST(Expression, FunctionsAndConstants) {
  EXPECT_NEAR(eval("sin(pi/2)"), 1.0, 1e-15);
  EXPECT_NEAR(eval("exp(log(3))"), 3.0, 1e-14);
  EXPECT_NEAR(eval("sqrt(2)^2"), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(eval("abs(-2.5)"), 2.5);
  EXPECT_NEAR(eval("e"), std::numbers::e, 1e-15);
  EXPECT_NEAR(eval("tan(0.3)"), std::tan(0.3), 1e-15);
}

TEST(Expression, Variables) {
  EXPECT_DOUBLE_EQ(eval("x", {0.25}), 0.25);
  EXPECT_DOUBLE_EQ(eval("x*y", {2.0, 3.0}), 6.0);
  EXPECT_DOUBLE_EQ(eval("x1+x2", {2.0, 3.0}), 5.0);
  EXPECT_NEAR(eval("log(1+0.5*sin(2*pi*x))", {0.25}), std::log(1.5), 1e-15);
}

TEST(Expression, Errors) {
  EXPECT_EQ(code_of([] { Expression::parse("1+"); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { Expression::parse("foo(1)"); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { Expression::parse("(1"); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { Expression::parse(""); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { eval("y", {1.0}); }), ErrorCode::Usage);
}

TEST(Mesh, Interval) {
  const Mesh m = build_interval_mesh(11, 2.0);
  EXPECT_EQ(m.num_vertices(), 11);
  EXPECT_EQ(m.cells.size(), 10u);
  EXPECT_EQ(m.boundary, (std::vector<int>{0, 10}));
  EXPECT_DOUBLE_EQ(m.vertices.back()[0], 2.0);
  EXPECT_NEAR(chart_volume(m), 2.0, 1e-14);
  EXPECT_NEAR(max_cell_diameter(m), 0.2, 1e-14);
  validate_mesh(m);
  EXPECT_EQ(code_of([] { build_interval_mesh(2, 1.0); }), ErrorCode::InvalidMesh);
}

TEST(Mesh, RectangleAndTorus) {
  const Mesh r = build_rect_mesh(5, 4, 2.0, 1.0, Topology::Rectangle);
  EXPECT_EQ(r.num_vertices(), 20);
  EXPECT_EQ(r.cells.size(), 2u * 4 * 3);
  EXPECT_EQ(r.boundary.size(), 14u);
  validate_mesh(r);
  double vol = 0;
  for (int c = 0; c < static_cast<int>(r.cells.size()); ++c) vol += cell_volume(r, c);
  EXPECT_NEAR(vol, 2.0, 1e-14);

  const Mesh t = build_rect_mesh(6, 6, 1.0, 1.0, Topology::Torus2, Diagonal::Main);
  EXPECT_EQ(t.num_vertices(), 25);
  EXPECT_TRUE(t.boundary.empty());
  validate_mesh(t);
  // every vertex of a triangulated torus has 6 neighbours
  for (const auto& nb : vertex_neighbors(t)) EXPECT_EQ(nb.size(), 6u);
}

TEST(Mesh, PeriodicGeometry) {
  const Mesh t = build_rect_mesh(11, 11, 1.0, 1.0, Topology::Torus2);
  const Point d = displacement(t, {0.95, 0.05}, {0.05, 0.95});
  EXPECT_NEAR(d[0], 0.1, 1e-14);
  EXPECT_NEAR(d[1], -0.1, 1e-14);
  EXPECT_TRUE(std::isinf(distance_to_boundary(t, {0.5, 0.5})));
  const std::vector<double> x{0.98, 0.51};
  EXPECT_EQ(t.vertices[nearest_vertex(t, x)], (Point{0.0, 0.5}));

  const Mesh r = build_rect_mesh(11, 11, 1.0, 1.0, Topology::Rectangle);
  EXPECT_NEAR(distance_to_boundary(r, {0.3, 0.8}), 0.2, 1e-14);
}

TEST(Mesh, ValidationCatchesBrokenMeshes) {
  Mesh m = build_rect_mesh(4, 4, 1.0, 1.0, Topology::Rectangle);
  Mesh bad = m;
  bad.cells[0].v[1] = 99;
  EXPECT_EQ(code_of([&] { validate_mesh(bad); }), ErrorCode::InvalidMesh);
  bad = m;
  bad.boundary.pop_back();
  EXPECT_EQ(code_of([&] { validate_mesh(bad); }), ErrorCode::InvalidMesh);
  bad = m;
  bad.cells.push_back(bad.cells[0]);  // overlapping cells
  EXPECT_EQ(code_of([&] { validate_mesh(bad); }), ErrorCode::InvalidMesh);
}

TEST(Metric, ConformalSampling) {
  const Mesh m = build_interval_mesh(5, 1.0);
  const MetricField f = sample_metric(MetricDescriptor::conformal("log(1+0.5*sin(2*pi*x))"), m);
  EXPECT_NEAR(f.g[1](0, 0), 1.5 * 1.5, 1e-14);  // x = 0.25
  EXPECT_NEAR(f.volume_density(1), 1.5, 1e-14);
  EXPECT_NEAR(f.volume_density(3), 0.5, 1e-14);
}

TEST(Metric, Validation) {
  const Mesh m = build_rect_mesh(3, 3, 1.0, 1.0, Topology::Rectangle);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  EXPECT_EQ(code_of([&] { sample_metric(MetricDescriptor::constant_matrix(asym), m); }),
            ErrorCode::MetricValidation);
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_EQ(code_of([&] { sample_metric(MetricDescriptor::constant_matrix(indef), m); }),
            ErrorCode::MetricValidation);
  EXPECT_EQ(code_of([&] { sample_metric(MetricDescriptor::identity(1), m); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] {
              sample_metric(MetricDescriptor::per_vertex({Eigen::MatrixXd::Identity(2, 2)}), m);
            }),
            ErrorCode::DimensionMismatch);
}

TEST(Metric, CellMetricIsCornerMean) {
  const Mesh m = build_interval_mesh(3, 1.0);
  std::vector<Eigen::MatrixXd> g(3, Eigen::MatrixXd::Identity(1, 1));
  g[1](0, 0) = 3.0;
  const MetricField f = sample_metric(MetricDescriptor::per_vertex(g), m);
  EXPECT_DOUBLE_EQ(cell_metric(m, f, 0)(0, 0), 2.0);
}

TEST(Errors, ExitCodeClasses) {
  EXPECT_TRUE(is_validation_error(ErrorCode::InvalidMesh));
  EXPECT_TRUE(is_validation_error(ErrorCode::Usage));
  EXPECT_FALSE(is_validation_error(ErrorCode::Numeric));
  EXPECT_FALSE(is_validation_error(ErrorCode::NonSimpleSpectrum));
  EXPECT_EQ(error_code_name(ErrorCode::ResolutionTooCoarse), "resolution-too-coarse");
}

TEST(Rational, Parsing) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
  EXPECT_EQ(parse_rational("3e-2"), Rational(3, 100));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(to_string(Rational(-6, 4)), "-3/2");
  EXPECT_EQ(rational_from_double(0.1), Rational(3602879701896397, BigInt(1) << 55));
  EXPECT_EQ(code_of([] { parse_rational("1/0"); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { parse_rational("abc"); }), ErrorCode::Usage);
}

TEST(Rational, MatrixAlgebra) {
  const QMatrix a = QMatrix::from_integers({{2, 1, 0}, {1, 3, 1}, {0, 1, 4}});
  EXPECT_EQ(determinant(a), Rational(18));
  const QMatrix ai = inverse(a);
  EXPECT_EQ(a * ai, QMatrix::identity(3));
  EXPECT_TRUE(a.symmetric());
  EXPECT_TRUE(a.is_integral());
  EXPECT_FALSE(ai.is_integral());
  EXPECT_EQ(ai.common_denominator(), BigInt(18));
  EXPECT_EQ(code_of([] { inverse(QMatrix::from_integers({{1, 2}, {2, 4}})); }), ErrorCode::Numeric);
}
