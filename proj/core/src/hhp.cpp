#include "almgren/hhp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "almgren/sampling.hpp"

namespace almgren {

namespace {

using RMatrix = std::vector<std::vector<Rational>>;

// all degree-d monomials in n variables, graded-lex ascending
std::vector<Monomial> monomials_of_degree(int n, int d) {
  std::vector<Monomial> out;
  std::vector<uint32_t> cur(n, 0);
  // lexicographic recursion on exponents
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == n - 1) {
      cur[pos] = rem;
      out.emplace_back(cur);
      return;
    }
    for (int e = 0; e <= rem; ++e) {
      cur[pos] = e;
      self(self, pos + 1, rem - e);
    }
  };
  if (d >= 0) rec(rec, 0, d);
  return out;
}

// in-place reduced row echelon form; returns pivot columns
std::vector<int> rref(RMatrix& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && m[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[r]);
    Rational inv = m[r][c];
    for (size_t j = c; j < cols; ++j) m[r][j] /= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  return pivots;
}

// kernel vectors of m (columns ordered as given), free columns ascending
std::vector<std::vector<Rational>> kernel_basis(RMatrix m, size_t cols) {
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> out;
  for (size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (size_t pi = 0; pi < pivots.size(); ++pi) {
      v[pivots[pi]] = -m[pi][f];
    }
    out.push_back(std::move(v));
  }
  return out;
}

ExactPoly poly_x_norm2(int n) {
  ExactPoly r(n);
  for (int i = 0; i < n; ++i) {
    std::vector<uint32_t> e(n, 0);
    e[i] = 2;
    r.add_term(Monomial(std::move(e)), Rational(1));
  }
  return r;
}

void require_hhp(const ExactPoly& P, const char* what) {
  if (P.is_zero() || !P.is_homogeneous() || !laplacian(P).is_zero()) {
    throw std::invalid_argument(std::string(what) +
                                ": expected a nonzero homogeneous harmonic polynomial");
  }
}

}  // namespace

long hhp_dim(int n, int d) {
  if (n < 2 || d < 0) throw std::invalid_argument("hhp_dim: need n >= 2, d >= 0");
  if (d == 0) return 1;
  if (d == 1) return n;
  auto binom = [](long a, long b) {
    if (b < 0 || b > a) return 0L;
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), a, b);
    return r.get_si();
  };
  return binom(n + d - 1, n - 1) - binom(n + d - 3, n - 1);
}

double HhpBasis::unit_eval(size_t i, const std::vector<double>& x) const {
  return elements[i].eval(x) / std::sqrt(to_double(norm2[i]));
}

HhpBasis basis(int n, int d) {
  if (n < 2 || d < 0) throw std::invalid_argument("basis: need n >= 2, d >= 0");
  HhpBasis b;
  b.n = n;
  b.d = d;
  std::vector<Monomial> cols = monomials_of_degree(n, d);
  std::vector<ExactPoly> kernel;
  if (d < 2) {
    for (const auto& m : cols) kernel.push_back(ExactPoly::monomial(n, m, Rational(1)));
  } else {
    std::vector<Monomial> rows = monomials_of_degree(n, d - 2);
    std::map<Monomial, size_t> row_index;
    for (size_t i = 0; i < rows.size(); ++i) row_index[rows[i]] = i;
    RMatrix m(rows.size(), std::vector<Rational>(cols.size(), Rational(0)));
    for (size_t c = 0; c < cols.size(); ++c) {
      ExactPoly lap = laplacian(ExactPoly::monomial(n, cols[c], Rational(1)));
      for (const auto& [mon, coef] : lap.terms()) {
        m[row_index.at(mon)][c] = coef;
      }
    }
    for (auto& v : kernel_basis(std::move(m), cols.size())) {
      ExactPoly p(n);
      for (size_t c = 0; c < cols.size(); ++c) {
        if (v[c] != 0) p.add_term(cols[c], v[c]);
      }
      kernel.push_back(std::move(p));
    }
  }
  // modified Gram-Schmidt with primitive rescaling to tame coefficients
  for (auto& p : kernel) {
    for (size_t j = 0; j < b.elements.size(); ++j) {
      Rational c = inner(p, b.elements[j]);
      if (c != 0) p -= b.elements[j] * (c / b.norm2[j]);
    }
    if (p.is_zero()) continue;
    p.make_primitive();
    b.norm2.push_back(norm2(p));
    b.elements.push_back(std::move(p));
  }
  if (static_cast<long>(b.elements.size()) != hhp_dim(n, d)) {
    throw std::logic_error("basis: dimension formula mismatch");
  }
  return b;
}

const HhpBasis& basis_cached(int n, int d) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<HhpBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, d);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<HhpBasis>(basis(n, d))).first;
  }
  return *it->second;
}

HhpBasis basis_2d(int d) {
  if (d < 1) throw std::invalid_argument("basis_2d: need d >= 1");
  // Re/Im((x+iy)^k) recurrence
  ExactPoly re = ExactPoly::constant(2, Rational(1));
  ExactPoly im(2);
  ExactPoly x = ExactPoly::variable(2, 0), y = ExactPoly::variable(2, 1);
  for (int k = 0; k < d; ++k) {
    ExactPoly re2 = re * x - im * y;
    ExactPoly im2 = im * x + re * y;
    re = std::move(re2);
    im = std::move(im2);
  }
  HhpBasis b;
  b.n = 2;
  b.d = d;
  b.elements.push_back(im * Rational(2));  // 2 r^d sin(d theta)
  b.elements.push_back(re * Rational(2));  // 2 r^d cos(d theta)
  b.norm2.push_back(norm2(b.elements[0]));
  b.norm2.push_back(norm2(b.elements[1]));
  return b;
}

Rational gradient_norm_sq(const ExactPoly& P) {
  require_hhp(P, "gradient_norm_sq");
  int d = P.degree();
  int n = P.dim();
  Rational s(0);
  for (int i = 0; i < n; ++i) {
    ExactPoly dp = partial(P, i);
    s += inner(dp, dp);
  }
  if (s != Rational(d) * Rational(2 * d + n - 2) * inner(P, P)) {
    throw std::logic_error("gradient_norm_sq: norm identity failed");
  }
  return s;
}

SupNormCheck sup_norm_bound_check(const ExactPoly& P, int samples) {
  require_hhp(P, "sup_norm_bound_check");
  int n = P.dim();
  if (samples <= 0) samples = 10000 * n;
  double nrm = std::sqrt(to_double(norm2(P)));
  double sup = 0.0;
  for (const auto& x : sphere_points(n, samples)) {
    sup = std::max(sup, std::fabs(P.eval(x)));
  }
  SupNormCheck c;
  c.measured_sup = sup / nrm;
  c.bound = std::sqrt(static_cast<double>(hhp_dim(n, P.degree())));
  return c;
}

ExactPoly kelvin(const ExactPoly& p, int axis) {
  require_hhp(p, "kelvin");
  int n = p.dim();
  int d = p.degree() + 1;
  ExactPoly k = ExactPoly::variable(n, axis) * p;
  int denom = 2 * d + n - 4;
  if (denom != 0) {
    k -= poly_x_norm2(n) * partial(p, axis) * Rational(1, denom);
  }
  return k;
}

namespace {

// orthogonal basis of the axes-invariant subspace of P_d, embedded in n vars
std::vector<std::pair<ExactPoly, Rational>> invariant_basis(int n, int d,
                                                            const std::vector<int>& axes) {
  std::vector<bool> drop(n, false);
  for (int a : axes) {
    if (a < 0 || a >= n) throw std::invalid_argument("axes out of range");
    drop[a] = true;
  }
  int k = static_cast<int>(axes.size());
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  if (static_cast<int>(keep.size()) != n - k) throw std::invalid_argument("duplicate axes");
  std::vector<std::pair<ExactPoly, Rational>> out;
  if (n - k < 2) {
    // a single remaining variable only supports degree <= 1
    if (d == 0) {
      ExactPoly one = ExactPoly::constant(n, Rational(1));
      out.emplace_back(one, Rational(1));
    } else if (d == 1 && n - k == 1) {
      ExactPoly v = ExactPoly::variable(n, keep[0]);
      Rational nn = norm2(v);
      out.emplace_back(std::move(v), std::move(nn));
    }
    return out;
  }
  const HhpBasis& sub = basis_cached(n - k, d);
  for (const auto& q : sub.elements) {
    ExactPoly e(n);
    for (const auto& [m, c] : q.terms()) {
      std::vector<uint32_t> exps(n, 0);
      for (size_t j = 0; j < m.exps.size(); ++j) exps[keep[j]] = m.exps[j];
      e.add_term(Monomial(std::move(exps)), c);
    }
    Rational nn = norm2(e);
    out.emplace_back(std::move(e), std::move(nn));
  }
  return out;
}

}  // namespace

InvariantSplit invariant_decompose(const ExactPoly& P, const std::vector<int>& axes) {
  require_hhp(P, "invariant_decompose");
  int n = P.dim();
  int d = P.degree();
  if (axes.empty() || static_cast<int>(axes.size()) > n - 2) {
    throw std::invalid_argument("invariant_decompose: need 1 <= |axes| <= n-2");
  }
  InvariantSplit s;
  s.Q = ExactPoly(n);
  for (const auto& [q, qn] : invariant_basis(n, d, axes)) {
    Rational c = inner(P, q);
    if (c != 0) s.Q += q * (c / qn);
  }
  s.R = P - s.Q;
  s.delta2 = norm2(s.R) / norm2(P);
  s.delta = std::sqrt(to_double(s.delta2));
  return s;
}

PerpDerivativeCheck perp_derivative_bound_check(const ExactPoly& h, int axis) {
  InvariantSplit s = invariant_decompose(h, {axis});
  if (!s.Q.is_zero()) {
    throw std::invalid_argument(
        "perp_derivative_bound_check: input has a nonzero invariant component");
  }
  PerpDerivativeCheck c;
  c.h_norm2 = norm2(h);
  ExactPoly dh = partial(h, axis);
  c.dh_norm2 = norm2(dh);
  return c;
}

Rational restriction_norm_ratio(int n, int d) {
  if (n < 3) throw std::invalid_argument("restriction_norm_ratio: need n >= 3");
  Rational r(1);
  for (int k = 1; k <= d; ++k) {
    r *= Rational(n + 2 * k - 2, n + 2 * k - 3);
  }
  return r;
}

AlmostInvariantReport almost_invariant_subspace(const ExactPoly& P,
                                                const ExactPoly& Pprime,
                                                double eps, double tau,
                                                int sphere_samples) {
  require_hhp(P, "almost_invariant_subspace");
  require_hhp(Pprime, "almost_invariant_subspace");
  int n = P.dim();
  int d = P.degree();
  if (d < 2 || Pprime.degree() != d) {
    throw std::invalid_argument("almost_invariant_subspace: need matching degree >= 2");
  }
  if (sphere_samples <= 0) sphere_samples = 10000 * n;

  Rational pn2 = norm2(P), qn2 = norm2(Pprime);
  // closeness precondition in the normalized sense:
  // ||P^ - P'^||^2 = 2 - 2 <P,P'> / (||P|| ||P'||)   (sign chosen favorably)
  double cross = std::fabs(to_double(inner(P, Pprime))) /
                 std::sqrt(to_double(pn2) * to_double(qn2));
  double dist2 = 2.0 - 2.0 * std::min(1.0, cross);
  if (dist2 > eps * 1.0000001) {
    throw std::invalid_argument("almost_invariant_subspace: ||P - P'|| > sqrt(eps)");
  }

  auto gram = [&](const ExactPoly& A, const Rational& an2) {
    Eigen::MatrixXd M(n, n);
    std::vector<ExactPoly> parts;
    parts.reserve(n);
    for (int i = 0; i < n; ++i) parts.push_back(partial(A, i));
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double v = to_double(inner(parts[i], parts[j]) / an2);
        M(i, j) = v;
        M(j, i) = v;
      }
    }
    return M;
  };

  Eigen::MatrixXd M = gram(P, pn2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  double threshold = eps * d * (2 * d + n - 2);

  AlmostInvariantReport rep;
  rep.tau = tau;
  for (int i = 0; i < n; ++i) rep.gram_eigenvalues.push_back(es.eigenvalues()(i));
  std::vector<Eigen::VectorXd> vbasis;
  for (int i = 0; i < n; ++i) {
    if (es.eigenvalues()(i) <= threshold) {
      vbasis.push_back(es.eigenvectors().col(i));
      std::vector<double> col(n);
      for (int j = 0; j < n; ++j) col[j] = es.eigenvectors()(j, i);
      rep.V.push_back(std::move(col));
    }
  }
  if (static_cast<int>(rep.V.size()) > n - 2) {
    throw std::logic_error(
        "almost_invariant_subspace: almost invariant subspace has dimension > n-2");
  }

  Eigen::MatrixXd Mp = gram(Pprime, qn2);
  double max_dist = 0.0;
  auto consider = [&](const std::vector<double>& x) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = x[i];
    bool almost = (v.dot(M * v) <= threshold) || (v.dot(Mp * v) <= threshold);
    if (!almost) return;
    rep.directions.push_back(x);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(n);
    for (const auto& b : vbasis) proj += b.dot(v) * b;
    max_dist = std::max(max_dist, (v - proj).norm());
  };
  for (const auto& x : sphere_points(n, sphere_samples)) consider(x);
  // the uniform net rarely hits the thin tube around V, so enrich the
  // sample with a targeted cloud of perturbed V directions
  if (!vbasis.empty()) {
    int per_dir = std::max(16, sphere_samples / 100);
    auto cloud = sphere_points(n, per_dir);
    for (const auto& b : vbasis) {
      for (int sgn : {1, -1}) {
        for (const auto& c : cloud) {
          std::vector<double> x(n);
          double nrm = 0;
          for (int i = 0; i < n; ++i) {
            x[i] = sgn * b(i) + 2.0 * tau * c[i];
            nrm += x[i] * x[i];
          }
          nrm = std::sqrt(nrm);
          for (int i = 0; i < n; ++i) x[i] /= nrm;
          consider(x);
        }
      }
    }
  }
  rep.max_dist = max_dist;
  return rep;
}

int invariant_subspace_dim_exact(const ExactPoly& P) {
  require_hhp(P, "invariant_subspace_dim_exact");
  int n = P.dim();
  std::vector<ExactPoly> parts;
  std::map<Monomial, size_t> row_index;
  for (int i = 0; i < n; ++i) {
    parts.push_back(partial(P, i));
    for (const auto& [m, c] : parts.back().terms()) {
      row_index.emplace(m, row_index.size());
    }
  }
  RMatrix m(row_index.size(), std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) {
    for (const auto& [mon, coef] : parts[i].terms()) {
      m[row_index.at(mon)][i] = coef;
    }
  }
  size_t rank = rref(m).size();
  return n - static_cast<int>(rank);
}

}  // namespace almgren
