#include "drumlab/rational.hpp"

#include <cctype>
#include <cmath>

#include "drumlab/errors.hpp"

namespace drumlab {

namespace {

BigInt parse_integer(const std::string& s, const std::string& whole) {
  size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  require(i < s.size(), ErrorCode::Usage, "bad rational '" + whole + "'");
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    require(std::isdigit(static_cast<unsigned char>(s[i])), ErrorCode::Usage,
            "bad rational '" + whole + "'");
    v = v * 10 + (s[i] - '0');
  }
  return neg ? BigInt(-v) : v;
}

BigInt pow10(int k) {
  BigInt p = 1;
  for (int i = 0; i < k; ++i) p *= 10;
  return p;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), ErrorCode::Usage, "empty rational");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const BigInt num = parse_integer(s.substr(0, slash), text);
    const BigInt den = parse_integer(s.substr(slash + 1), text);
    require(den != 0, ErrorCode::Usage, "zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  int exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    exp10 = static_cast<int>(parse_integer(s.substr(e + 1), text));
    s = s.substr(0, e);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    exp10 -= static_cast<int>(frac.size());
    s = s.substr(0, dot) + frac;
    if (s.empty() || s == "-" || s == "+") s += "0";
  }
  Rational r(parse_integer(s, text));
  if (exp10 > 0) r *= pow10(exp10);
  if (exp10 < 0) r /= pow10(-exp10);
  return r;
}

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational rational_from_double(double x) {
  require(std::isfinite(x), ErrorCode::Usage, "non-finite value cannot be made rational");
  int e = 0;
  const double m = std::frexp(x, &e);
  // m * 2^53 is an exact integer
  const long long mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  e -= 53;
  BigInt p = 1;
  p <<= std::abs(e);
  if (e > 0) r *= p;
  if (e < 0) r /= p;
  return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

QMatrix QMatrix::identity(int n) {
  QMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
  const int n = static_cast<int>(rows.size());
  QMatrix m(n);
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(rows[i].size()) == n, ErrorCode::DimensionMismatch,
            "matrix is not square");
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

QMatrix QMatrix::from_integers(const std::vector<std::vector<long long>>& rows) {
  std::vector<std::vector<Rational>> q;
  for (const auto& r : rows) q.emplace_back(r.begin(), r.end());
  return from_rows(q);
}

QMatrix QMatrix::transpose() const {
  QMatrix t(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

QMatrix QMatrix::operator*(const QMatrix& b) const {
  require(n_ == b.n_, ErrorCode::DimensionMismatch, "matrix sizes differ");
  QMatrix c(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      if ((*this)(i, k) == 0) continue;
      for (int j = 0; j < n_; ++j) c(i, j) += (*this)(i, k) * b(k, j);
    }
  return c;
}

bool QMatrix::symmetric() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool QMatrix::is_integral() const {
  for (const auto& x : a_)
    if (boost::multiprecision::denominator(x) != 1) return false;
  return true;
}

Eigen::MatrixXd QMatrix::to_double() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = drumlab::to_double((*this)(i, j));
  return m;
}

BigInt QMatrix::common_denominator() const {
  BigInt l = 1;
  for (const auto& x : a_) {
    const BigInt d = boost::multiprecision::denominator(x);
    l = l / boost::multiprecision::gcd(l, d) * d;
  }
  return l;
}

namespace {

// Gaussian elimination; returns the determinant and optionally the inverse.
Rational eliminate(const QMatrix& a, QMatrix* inv) {
  const int n = a.size();
  QMatrix m = a;
  QMatrix r = QMatrix::identity(n);
  Rational det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(r(c, j), r(piv, j));
      }
      det = -det;
    }
    const Rational p = m(c, c);
    det *= p;
    for (int j = 0; j < n; ++j) {
      m(c, j) /= p;
      r(c, j) /= p;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(c, j);
        r(i, j) -= f * r(c, j);
      }
    }
  }
  if (inv) *inv = r;
  return det;
}

}  // namespace

Rational determinant(const QMatrix& a) { return eliminate(a, nullptr); }

QMatrix inverse(const QMatrix& a) {
  QMatrix inv;
  const Rational det = eliminate(a, &inv);
  require(det != 0, ErrorCode::Numeric, "matrix is singular");
  return inv;
}

}  // namespace drumlab
