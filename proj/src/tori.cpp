#include "drumlab/tori.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "drumlab/errors.hpp"

namespace drumlab {

namespace {

using Int = long long;
using IntGram = std::vector<std::vector<Int>>;

BigInt round_nearest(const Rational& x) {
  // floor(x + 1/2)
  const Rational y = x + Rational(1, 2);
  BigInt q = boost::multiprecision::numerator(y) / boost::multiprecision::denominator(y);
  if (y < 0 && Rational(q) != y) q -= 1;
  return q;
}

BigInt floor_rational(const Rational& x) {
  BigInt q = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
  if (x < 0 && Rational(q) != x) q -= 1;
  return q;
}

Int to_int(const BigInt& b, const char* what) {
  require(boost::multiprecision::abs(b) < (BigInt(1) << 50), ErrorCode::BoundTooLarge,
          std::string(what) + " does not fit the integer enumeration range");
  return static_cast<Int>(b);
}

IntGram scaled_integer_gram(const QMatrix& A, const BigInt& D) {
  const int n = A.size();
  IntGram M(n, std::vector<Int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Rational x = A(i, j) * D;
      require(boost::multiprecision::denominator(x) == 1, ErrorCode::Numeric,
              "scaled Gram entry is not integral");
      M[i][j] = to_int(boost::multiprecision::numerator(x), "Gram entry");
    }
  return M;
}

Int quad(const IntGram& M, const std::vector<Int>& v) {
  __int128 s = 0;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    if (!v[i]) continue;
    __int128 row = 0;
    for (int j = 0; j < n; ++j) row += static_cast<__int128>(M[i][j]) * v[j];
    s += row * v[i];
  }
  return static_cast<Int>(s);
}

// Fincke-Pohst: calls visit(v, norm) for every integer v with v^T M v <= bound.
void enumerate_ball(const IntGram& M, Int bound,
                    const std::function<void(const std::vector<Int>&, Int)>& visit) {
  const int n = static_cast<int>(M.size());
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = static_cast<double>(M[i][j]);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  require(llt.info() == Eigen::Success, ErrorCode::Numeric, "Gram matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  std::vector<double> qd(n);
  std::vector<std::vector<double>> qo(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    qd[i] = L(i, i) * L(i, i);
    for (int j = i + 1; j < n; ++j) qo[i][j] = L(j, i) / L(i, i);
  }
  const double T = static_cast<double>(bound) * (1.0 + 1e-9) + 1e-9;
  std::vector<Int> x(n, 0);
  std::vector<double> rem(n + 1, 0.0);
  rem[n] = T;

  std::function<void(int)> rec = [&](int i) {
    double c = 0.0;
    for (int j = i + 1; j < n; ++j) c -= qo[i][j] * static_cast<double>(x[j]);
    const double r = std::sqrt(std::max(rem[i + 1], 0.0) / qd[i]);
    const Int lo = static_cast<Int>(std::ceil(c - r - 1e-9));
    const Int hi = static_cast<Int>(std::floor(c + r + 1e-9));
    for (Int t = lo; t <= hi; ++t) {
      x[i] = t;
      const double d = static_cast<double>(t) - c;
      const double left = rem[i + 1] - qd[i] * d * d;
      if (left < -1e-9 * T - 1e-9) continue;
      rem[i] = left;
      if (i == 0) {
        const Int q = quad(M, x);
        if (q <= bound) visit(x, q);
      } else {
        rec(i - 1);
      }
    }
    x[i] = 0;
  };
  rec(n - 1);
}

void check_spd(const QMatrix& A) {
  require(A.size() >= 1, ErrorCode::DimensionMismatch, "empty Gram matrix");
  require(A.symmetric(), ErrorCode::Usage, "Gram matrix is not symmetric");
  // leading principal minors, exactly
  for (int k = 1; k <= A.size(); ++k) {
    QMatrix m(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) m(i, j) = A(i, j);
    require(determinant(m) > 0, ErrorCode::Usage, "Gram matrix is not positive definite");
  }
}

}  // namespace

LatticeForm make_form(QMatrix gram, std::string provenance) {
  check_spd(gram);
  return LatticeForm{std::move(gram), std::move(provenance)};
}

QMatrix dual_form(const QMatrix& A) {
  require(A.size() >= 1, ErrorCode::DimensionMismatch, "empty Gram matrix");
  return inverse(A);
}

long long NormSpectrum::total() const {
  long long t = 0;
  for (const auto& e : entries) t += e.second;
  return t;
}

QMatrix lll_reduce(const QMatrix& A, QMatrix* Vout) {
  check_spd(A);
  const int n = A.size();
  QMatrix V = QMatrix::identity(n);
  auto gram = [&]() { return V.transpose() * A * V; };
  auto gso = [&](const QMatrix& G, std::vector<std::vector<Rational>>& mu, std::vector<Rational>& B) {
    mu.assign(n, std::vector<Rational>(n));
    B.assign(n, Rational(0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        Rational s = G(i, j);
        for (int l = 0; l < j; ++l) s -= mu[j][l] * mu[i][l] * B[l];
        mu[i][j] = s / B[j];
      }
      Rational s = G(i, i);
      for (int l = 0; l < i; ++l) s -= mu[i][l] * mu[i][l] * B[l];
      B[i] = s;
    }
  };
  std::vector<std::vector<Rational>> mu;
  std::vector<Rational> B;
  int k = 1;
  while (k < n) {
    for (int j = k - 1; j >= 0; --j) {
      gso(gram(), mu, B);
      const BigInt r = round_nearest(mu[k][j]);
      if (r != 0)
        for (int i = 0; i < n; ++i) V(i, k) -= Rational(r) * V(i, j);
    }
    gso(gram(), mu, B);
    if (B[k] >= (Rational(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
    } else {
      for (int i = 0; i < n; ++i) std::swap(V(i, k), V(i, k - 1));
      k = std::max(k - 1, 1);
    }
  }
  if (Vout) *Vout = V;
  return gram();
}

double enumeration_volume(const QMatrix& A, const Rational& B) {
  const int d = A.size();
  const double omega = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return omega * std::pow(to_double(B), d / 2.0) / std::sqrt(to_double(determinant(A)));
}

NormSpectrum enumerate_norms(const QMatrix& A, const Rational& B) {
  check_spd(A);
  require(B > 0, ErrorCode::Usage, "bound must be positive");
  require(enumeration_volume(A, B) <= kEnumerationLimit, ErrorCode::BoundTooLarge,
          "enumeration volume estimate " + std::to_string(enumeration_volume(A, B)) +
              " exceeds 1e8 points");
  const QMatrix R = lll_reduce(A);
  const BigInt D = R.common_denominator();
  const IntGram M = scaled_integer_gram(R, D);
  const Int bound = to_int(floor_rational(B * D), "bound");
  std::map<Int, long long> counts;
  enumerate_ball(M, bound, [&](const std::vector<Int>&, Int q) { ++counts[q]; });
  NormSpectrum s;
  s.bound = B;
  for (const auto& [q, m] : counts) s.entries.emplace_back(Rational(BigInt(q), D), m);
  return s;
}

long long counting_function(const NormSpectrum& spec, double lambda) {
  const double bound_lambda = 2.0 * std::numbers::pi * std::sqrt(to_double(spec.bound));
  require(lambda <= bound_lambda * (1.0 + 1e-12), ErrorCode::OutOfRange,
          "lambda " + std::to_string(lambda) + " is beyond the enumerated range " +
              std::to_string(bound_lambda));
  if (lambda < 0) return 0;
  const double r = lambda / (2.0 * std::numbers::pi);
  const double cut = r * r * (1.0 + 1e-12);
  long long n = 0;
  for (const auto& [norm, m] : spec.entries) {
    if (to_double(norm) > cut) break;
    n += m;
  }
  return n;
}

double torus_volume(const LatticeForm& form) { return std::sqrt(to_double(determinant(form.gram))); }

double local_weyl_torus(const LatticeForm& form, const NormSpectrum& spec, double lambda) {
  return static_cast<double>(counting_function(spec, lambda)) / torus_volume(form);
}

QMatrix to_qmatrix(const IntMatrix& m) { return QMatrix::from_integers(m); }

IsometryResult search_isometry(const QMatrix& A1, const QMatrix& A2, long long node_limit) {
  require(A1.size() == A2.size(), ErrorCode::DimensionMismatch, "forms have different dimensions");
  check_spd(A1);
  check_spd(A2);
  const int n = A1.size();
  IsometryResult res;
  IsometryCertificate& cert = res.certificate;
  if (determinant(A1) != determinant(A2)) {
    cert.determinants_equal = false;
    cert.statement = "determinants differ, so no unimodular U can exist";
    return res;
  }

  QMatrix V;
  const QMatrix R2 = lll_reduce(A2, &V);
  BigInt D = A1.common_denominator();
  const BigInt D2 = R2.common_denominator();
  D = D / boost::multiprecision::gcd(D, D2) * D2;
  const IntGram M1 = scaled_integer_gram(A1, D);
  const IntGram M2 = scaled_integer_gram(R2, D);

  Int maxnorm = 0;
  for (int i = 0; i < n; ++i) maxnorm = std::max(maxnorm, M2[i][i]);
  std::map<Int, std::vector<std::vector<Int>>> bucket;
  for (int i = 0; i < n; ++i) bucket[M2[i][i]];
  long long total = 0;
  enumerate_ball(M1, maxnorm, [&](const std::vector<Int>& v, Int q) {
    auto it = bucket.find(q);
    if (it == bucket.end()) return;
    it->second.push_back(v);
    require(++total <= node_limit, ErrorCode::SearchInfeasible,
            "candidate sets exceed the search limit");
  });
  // sparse vectors first, then lexicographically descending: finds the
  // simplest U first and makes the search deterministic
  for (auto& [q, vs] : bucket)
    std::sort(vs.begin(), vs.end(), [](const auto& a, const auto& b) {
      const auto nz = [](const auto& v) { return std::count_if(v.begin(), v.end(), [](Int t) { return t != 0; }); };
      const auto na = nz(a), nb = nz(b);
      if (na != nb) return na < nb;
      return a > b;
    });

  std::vector<const std::vector<std::vector<Int>>*> cand(n);
  for (int i = 0; i < n; ++i) {
    cand[i] = &bucket[M2[i][i]];
    cert.candidate_counts.push_back(static_cast<long long>(cand[i]->size()));
    cert.column_norms.push_back(R2(i, i));
  }

  auto inner = [&](const std::vector<Int>& a, const std::vector<Int>& b) {
    __int128 s = 0;
    for (int i = 0; i < n; ++i) {
      if (!a[i]) continue;
      __int128 row = 0;
      for (int j = 0; j < n; ++j) row += static_cast<__int128>(M1[i][j]) * b[j];
      s += row * a[i];
    }
    return static_cast<Int>(s);
  };

  std::vector<const std::vector<Int>*> cols(n, nullptr);
  std::optional<QMatrix> found;
  std::function<bool(int)> rec = [&](int i) -> bool {
    if (i == n) {
      QMatrix U(n);
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) U(r, c) = (*cols[c])[r];
      const Rational det = determinant(U);
      if (det != 1 && det != -1) return false;
      found = U;
      return true;
    }
    for (const auto& v : *cand[i]) {
      // -U is a solution whenever U is; fix the sign of the first column
      if (i == 0) {
        const auto nzi = std::find_if(v.begin(), v.end(), [](Int t) { return t != 0; });
        if (nzi != v.end() && *nzi < 0) continue;
      }
      require(++cert.nodes <= node_limit, ErrorCode::SearchInfeasible,
              "isometry search exceeded " + std::to_string(node_limit) + " nodes");
      bool ok = true;
      for (int k = 0; k < i && ok; ++k) ok = inner(*cols[k], v) == M2[k][i];
      if (!ok) continue;
      cols[i] = &v;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  rec(0);

  std::ostringstream os;
  os << "reduced target basis norms";
  for (const auto& r : cert.column_norms) os << ' ' << to_string(r);
  os << "; every source vector of each norm was enumerated exactly (candidate counts";
  for (auto c : cert.candidate_counts) os << ' ' << c;
  os << "); " << cert.nodes << " partial assignments checked against all pairwise inner products";
  if (found) {
    const QMatrix U = (*found) * inverse(V);
    require(U.transpose() * A1 * U == A2, ErrorCode::Numeric, "isometry verification failed");
    IntMatrix out(n, std::vector<long long>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i][j] = static_cast<long long>(boost::multiprecision::numerator(U(i, j)));
    res.U = out;
    os << "; found U";
  } else {
    os << "; no unimodular U exists";
  }
  cert.statement = os.str();
  return res;
}

}  // namespace drumlab
