#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>
#include <string>
#include <vector>

namespace drumlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "p", "p/q", and decimal strings such as "-1.25" or "3e-2", exactly.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);
// Exact binary value of a double.
Rational rational_from_double(double x);
double to_double(const Rational& r);

// Dense square matrix of exact rationals, row major.
class QMatrix {
 public:
  QMatrix() = default;
  explicit QMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}
  static QMatrix identity(int n);
  static QMatrix from_rows(const std::vector<std::vector<Rational>>& rows);
  static QMatrix from_integers(const std::vector<std::vector<long long>>& rows);

  int size() const { return n_; }
  Rational& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  QMatrix transpose() const;
  QMatrix operator*(const QMatrix& b) const;
  bool operator==(const QMatrix& b) const { return n_ == b.n_ && a_ == b.a_; }
  bool symmetric() const;
  bool is_integral() const;

  Eigen::MatrixXd to_double() const;
  // least common multiple of the entry denominators
  BigInt common_denominator() const;

 private:
  int n_ = 0;
  std::vector<Rational> a_;
};

Rational determinant(const QMatrix& a);
// Throws numeric on a singular matrix.
QMatrix inverse(const QMatrix& a);

}  // namespace drumlab
