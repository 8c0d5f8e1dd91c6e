#pragma once

// Sparse multivariate polynomials with complex coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jointspec/commuting_tuple.hpp"
#include "jointspec/matrix_core.hpp"
#include "jointspec/parallel.hpp"

namespace jointspec {

using Exponent = std::vector<unsigned>;

class MPoly {
public:
  static constexpr double default_drop = 1e-12;

  explicit MPoly(std::size_t nvars) : nvars_(nvars) {
    if (nvars == 0) throw InputError("MPoly: nvars must be positive");
  }

  static MPoly constant(std::size_t nvars, Complex c) {
    MPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }

  static MPoly variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw InputError("MPoly::variable: index out of range");
    Exponent e(nvars, 0);
    e[index] = 1;
    MPoly p(nvars);
    p.add_term(e, 1.0);
    return p;
  }

  static MPoly monomial(Exponent e, Complex c) {
    MPoly p(e.size());
    p.add_term(e, c);
    return p;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Exponent, Complex>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(),
                                              terms_.begin()->first.end(),
                                              [](unsigned k) { return k == 0; }));
  }

  unsigned total_degree() const {
    unsigned best = 0;
    for (const auto& [e, c] : terms_) {
      unsigned s = 0;
      for (unsigned k : e) s += k;
      best = std::max(best, s);
    }
    return best;
  }

  unsigned degree_in(std::size_t v) const {
    unsigned best = 0;
    for (const auto& [e, c] : terms_) best = std::max(best, e.at(v));
    return best;
  }

  Complex coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Complex{} : it->second;
  }

  /// Adds c * z^e; a coefficient that cancels to exactly zero is removed.
  void add_term(const Exponent& e, Complex c) {
    if (e.size() != nvars_) throw InputError("MPoly::add_term: exponent length mismatch");
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex{}) terms_.erase(it);
    }
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  double norm1() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += std::abs(c);
    return s;
  }

  double norm2() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += std::norm(c);
    return std::sqrt(s);
  }

  /// Copy without coefficients below rel * max|coeff|.
  MPoly pruned(double rel = default_drop) const {
    MPoly out(nvars_);
    const double cut = rel * max_abs_coefficient();
    for (const auto& [e, c] : terms_) {
      if (std::abs(c) > cut) out.terms_.emplace(e, c);
    }
    return out;
  }

  MPoly& operator+=(const MPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  MPoly& operator-=(const MPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  MPoly& operator*=(Complex s) {
    if (s == Complex{}) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(MPoly a, Complex s) { return a *= s; }
  friend MPoly operator*(Complex s, MPoly a) { return a *= s; }
  friend MPoly operator-(MPoly a) { return a *= -1.0; }

  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    a.check_compatible(b);
    MPoly out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  MPoly pow(unsigned k) const {
    MPoly out = constant(nvars_, 1.0);
    for (unsigned i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  /// Evaluates at a point of C^nvars.
  Complex operator()(std::span<const Complex> point) const {
    if (point.size() != nvars_) {
      throw InputError("MPoly: evaluation point has " + std::to_string(point.size()) +
                       " coordinates, expected " + std::to_string(nvars_));
    }
    const auto powers = power_table(point);
    Complex acc{};
    for (const auto& [e, c] : terms_) {
      Complex m = c;
      for (std::size_t v = 0; v < nvars_; ++v) {
        if (e[v] != 0) m *= powers[v][e[v]];
      }
      acc += m;
    }
    return acc;
  }

  Complex operator()(const CPoint& point) const {
    return (*this)(std::span<const Complex>(point.data(), static_cast<std::size_t>(point.size())));
  }

  /// Substitutes the first values.size() variables, leaving a polynomial in the rest.
  MPoly substitute_leading(std::span<const Complex> values) const {
    const std::size_t m = values.size();
    if (m >= nvars_) throw InputError("MPoly::substitute_leading: must leave at least one variable");
    const auto powers = power_table_partial(values);
    MPoly out(nvars_ - m);
    Exponent rest(nvars_ - m);
    for (const auto& [e, c] : terms_) {
      Complex f = c;
      for (std::size_t v = 0; v < m; ++v) {
        if (e[v] != 0) f *= powers[v][e[v]];
      }
      std::copy(e.begin() + static_cast<std::ptrdiff_t>(m), e.end(), rest.begin());
      out.add_term(rest, f);
    }
    return out;
  }

  /// Same polynomial viewed in more variables (new variables appended, unused).
  MPoly extended(std::size_t nvars) const {
    if (nvars < nvars_) throw InputError("MPoly::extended: cannot drop variables");
    MPoly out(nvars);
    for (const auto& [e, c] : terms_) {
      Exponent f(nvars, 0);
      std::copy(e.begin(), e.end(), f.begin());
      out.terms_.emplace(std::move(f), c);
    }
    return out;
  }

  /// Same polynomial with variable v renamed to offset + v inside `nvars` variables.
  MPoly shifted_into(std::size_t nvars, std::size_t offset) const {
    if (offset + nvars_ > nvars) throw InputError("MPoly::shifted_into: does not fit");
    MPoly out(nvars);
    for (const auto& [e, c] : terms_) {
      Exponent f(nvars, 0);
      std::copy(e.begin(), e.end(), f.begin() + static_cast<std::ptrdiff_t>(offset));
      out.terms_.emplace(std::move(f), c);
    }
    return out;
  }

  friend bool operator==(const MPoly& a, const MPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

private:
  void check_compatible(const MPoly& o) const {
    if (o.nvars_ != nvars_) throw InputError("MPoly: variable count mismatch");
  }

  std::vector<std::vector<Complex>> power_table(std::span<const Complex> point) const {
    std::vector<std::vector<Complex>> powers(nvars_);
    for (std::size_t v = 0; v < nvars_; ++v) {
      const unsigned deg = degree_in(v);
      powers[v].resize(deg + 1);
      powers[v][0] = 1.0;
      for (unsigned k = 1; k <= deg; ++k) powers[v][k] = powers[v][k - 1] * point[v];
    }
    return powers;
  }

  std::vector<std::vector<Complex>> power_table_partial(std::span<const Complex> values) const {
    std::vector<std::vector<Complex>> powers(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
      const unsigned deg = degree_in(v);
      powers[v].resize(deg + 1);
      powers[v][0] = 1.0;
      for (unsigned k = 1; k <= deg; ++k) powers[v][k] = powers[v][k - 1] * values[v];
    }
    return powers;
  }

  std::size_t nvars_;
  std::map<Exponent, Complex> terms_;
};

inline Complex eval_scalar(const MPoly& p, const CPoint& point) { return p(point); }

/// Substitutes z_j -> mats[j]; the constant term multiplies the identity.
/// Caller guarantees the matrices commute (evaluation order is then irrelevant).
inline CMatrix eval_matrices(const MPoly& p, std::span<const CMatrix> mats) {
  if (mats.size() != p.nvars()) {
    throw InputError("eval_matrices: polynomial has " + std::to_string(p.nvars()) +
                     " variables but " + std::to_string(mats.size()) + " matrices were given");
  }
  const auto n = mats.front().rows();
  std::vector<std::vector<CMatrix>> powers(mats.size());
  for (std::size_t v = 0; v < mats.size(); ++v) {
    if (mats[v].rows() != n || mats[v].cols() != n) {
      throw InputError("eval_matrices: matrices must share a square shape");
    }
    const unsigned deg = p.degree_in(v);
    powers[v].reserve(deg + 1);
    powers[v].push_back(CMatrix::Identity(n, n));
    for (unsigned k = 1; k <= deg; ++k) powers[v].push_back(powers[v].back() * mats[v]);
  }
  CMatrix acc = CMatrix::Zero(n, n);
  CMatrix term(n, n);
  for (const auto& [e, c] : p.terms()) {
    bool first = true;
    for (std::size_t v = 0; v < mats.size(); ++v) {
      if (e[v] == 0) continue;
      if (first) {
        term = powers[v][e[v]];
        first = false;
      } else {
        term = term * powers[v][e[v]];
      }
    }
    if (first) {
      acc.diagonal().array() += c;
    } else {
      acc += c * term;
    }
  }
  return acc;
}

inline CMatrix eval_matrix_tuple(const MPoly& p, const CommutingTuple& t) {
  return eval_matrices(p, t.mats());
}

/// Square matrix of polynomials sharing one variable count.
class PolyMatrix {
public:
  PolyMatrix(std::size_t n, std::size_t nvars) : n_(n), nvars_(nvars), entries_(n * n, MPoly(nvars)) {
    if (n == 0) throw InputError("PolyMatrix: size must be positive");
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t nvars() const noexcept { return nvars_; }

  const MPoly& operator()(std::size_t r, std::size_t c) const { return entries_.at(r * n_ + c); }

  void set(std::size_t r, std::size_t c, MPoly p) {
    if (p.nvars() != nvars_) throw InputError("PolyMatrix::set: variable count mismatch");
    entries_.at(r * n_ + c) = std::move(p);
  }

  CMatrix eval(std::span<const Complex> point) const {
    const auto n = static_cast<Eigen::Index>(n_);
    CMatrix out(n, n);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries_[r * n_ + c](point);
      }
    }
    return out;
  }

  CMatrix eval(const CPoint& point) const {
    return eval(std::span<const Complex>(point.data(), static_cast<std::size_t>(point.size())));
  }

  /// Constant matrix m viewed as a polynomial matrix.
  static PolyMatrix constant(const CMatrix& m, std::size_t nvars) {
    require_square(m, "PolyMatrix::constant");
    PolyMatrix out(static_cast<std::size_t>(m.rows()), nvars);
    for (std::size_t r = 0; r < out.n_; ++r) {
      for (std::size_t c = 0; c < out.n_; ++c) {
        out.entries_[r * out.n_ + c] =
            MPoly::constant(nvars, m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      }
    }
    return out;
  }

  /// Entrywise a + m * p for a constant matrix m and polynomial p.
  void add_scaled(const CMatrix& m, const MPoly& p) {
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        const Complex s = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (s != Complex{}) entries_[r * n_ + c] += s * p;
      }
    }
  }

  /// Adds p to each diagonal entry.
  void add_diagonal(const MPoly& p) {
    for (std::size_t r = 0; r < n_; ++r) entries_[r * n_ + r] += p;
  }

private:
  std::size_t n_;
  std::size_t nvars_;
  std::vector<MPoly> entries_;
};

struct DetOptions {
  unsigned max_total_degree = 64;
  std::size_t max_grid_points = 4'000'000;
  double drop = MPoly::default_drop;
};

/// Exact determinant polynomial by evaluation on a tensor grid of roots of
/// unity (one more node than the degree bound per variable) followed by an
/// inverse DFT along each axis.
inline MPoly det_poly_matrix(const PolyMatrix& m, const DetOptions& opt = {}) {
  const std::size_t n = m.n();
  const std::size_t nv = m.nvars();

  // Degree bounds: the smaller of row-wise and column-wise max-degree sums.
  std::vector<unsigned> bound(nv, 0);
  unsigned total_bound = 0;
  {
    std::vector<unsigned> row_sum(nv, 0), col_sum(nv, 0);
    unsigned row_total = 0, col_total = 0;
    for (std::size_t r = 0; r < n; ++r) {
      bool row_nonzero = false;
      unsigned row_max_total = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (!m(r, c).is_zero()) row_nonzero = true;
        row_max_total = std::max(row_max_total, m(r, c).total_degree());
      }
      if (!row_nonzero) return MPoly(nv);
      row_total += row_max_total;
      for (std::size_t v = 0; v < nv; ++v) {
        unsigned mx = 0;
        for (std::size_t c = 0; c < n; ++c) mx = std::max(mx, m(r, c).degree_in(v));
        row_sum[v] += mx;
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      unsigned col_max_total = 0;
      for (std::size_t r = 0; r < n; ++r) col_max_total = std::max(col_max_total, m(r, c).total_degree());
      col_total += col_max_total;
      for (std::size_t v = 0; v < nv; ++v) {
        unsigned mx = 0;
        for (std::size_t r = 0; r < n; ++r) mx = std::max(mx, m(r, c).degree_in(v));
        col_sum[v] += mx;
      }
    }
    for (std::size_t v = 0; v < nv; ++v) bound[v] = std::min(row_sum[v], col_sum[v]);
    total_bound = std::min(row_total, col_total);
  }
  if (total_bound > opt.max_total_degree) {
    throw InputError("det_poly_matrix: total degree bound " + std::to_string(total_bound) +
                     " exceeds cap " + std::to_string(opt.max_total_degree));
  }

  std::vector<std::size_t> sizes(nv);
  std::size_t grid = 1;
  for (std::size_t v = 0; v < nv; ++v) {
    sizes[v] = bound[v] + 1;
    if (grid > opt.max_grid_points / sizes[v]) {
      throw InputError("det_poly_matrix: interpolation grid exceeds " +
                       std::to_string(opt.max_grid_points) + " points");
    }
    grid *= sizes[v];
  }

  // Nodes: variable 0 varies fastest in the flattened layout.
  std::vector<std::vector<Complex>> nodes(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    nodes[v].resize(sizes[v]);
    for (std::size_t k = 0; k < sizes[v]; ++k) {
      nodes[v][k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(sizes[v]));
    }
  }

  std::vector<Complex> values(grid);
  parallel_for(grid, [&](std::size_t flat) {
    std::vector<Complex> point(nv);
    std::size_t rem = flat;
    for (std::size_t v = 0; v < nv; ++v) {
      point[v] = nodes[v][rem % sizes[v]];
      rem /= sizes[v];
    }
    values[flat] = det(m.eval(point));
  });

  // Inverse DFT along each axis.
  std::size_t stride = 1;
  std::vector<Complex> line, out_line;
  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t len = sizes[v];
    if (len > 1) {
      line.resize(len);
      out_line.resize(len);
      const std::size_t block = stride * len;
      for (std::size_t base = 0; base < grid; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
          for (std::size_t j = 0; j < len; ++j) line[j] = values[base + off + j * stride];
          for (std::size_t k = 0; k < len; ++k) {
            Complex acc{};
            for (std::size_t j = 0; j < len; ++j) {
              acc += line[j] * std::conj(nodes[v][(j * k) % len]);
            }
            out_line[k] = acc / static_cast<double>(len);
          }
          for (std::size_t k = 0; k < len; ++k) values[base + off + k * stride] = out_line[k];
        }
      }
    }
    stride *= len;
  }

  MPoly out(nv);
  Exponent e(nv);
  for (std::size_t flat = 0; flat < grid; ++flat) {
    std::size_t rem = flat;
    unsigned total = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      e[v] = static_cast<unsigned>(rem % sizes[v]);
      rem /= sizes[v];
      total += e[v];
    }
    if (total > total_bound) continue;
    out.add_term(e, values[flat]);
  }
  return out.pruned(opt.drop);
}

struct GcdResult {
  MPoly gcd;
  /// max relative least-squares residual of p = g s_p and q = g s_q.
  double residual = 0.0;
  unsigned degree_z1 = 0;
  unsigned degree_z2 = 0;
};

namespace detail {

struct Bidegree {
  unsigned d1 = 0;
  unsigned d2 = 0;
  std::size_t size() const { return static_cast<std::size_t>(d1 + 1) * (d2 + 1); }
  std::size_t index(unsigned i1, unsigned i2) const { return static_cast<std::size_t>(i1) * (d2 + 1) + i2; }
};

inline Bidegree bidegree_of(const MPoly& p) { return {p.degree_in(0), p.degree_in(1)}; }

inline CVector coefficients(const MPoly& p, Bidegree shape) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(shape.size()));
  for (const auto& [e, c] : p.terms()) v(static_cast<Eigen::Index>(shape.index(e[0], e[1]))) = c;
  return v;
}

inline MPoly from_coefficients(const CVector& v, Bidegree shape) {
  MPoly out(2);
  for (unsigned i1 = 0; i1 <= shape.d1; ++i1) {
    for (unsigned i2 = 0; i2 <= shape.d2; ++i2) {
      out.add_term({i1, i2}, v(static_cast<Eigen::Index>(shape.index(i1, i2))));
    }
  }
  return out;
}

/// Matrix of g -> f*g for g of the given bidegree.
inline CMatrix multiplication_matrix(const MPoly& f, Bidegree g_shape) {
  const Bidegree fs = bidegree_of(f);
  const Bidegree out_shape{fs.d1 + g_shape.d1, fs.d2 + g_shape.d2};
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(out_shape.size()),
                            static_cast<Eigen::Index>(g_shape.size()));
  for (unsigned j1 = 0; j1 <= g_shape.d1; ++j1) {
    for (unsigned j2 = 0; j2 <= g_shape.d2; ++j2) {
      const auto col = static_cast<Eigen::Index>(g_shape.index(j1, j2));
      for (const auto& [e, c] : f.terms()) {
        m(static_cast<Eigen::Index>(out_shape.index(e[0] + j1, e[1] + j2)), col) += c;
      }
    }
  }
  return m;
}

struct KernelProbe {
  double ratio = 0.0;  // sigma_min / sigma_max, 0 when the map is wide
  CVector null_vector;
};

/// Tests whether p*v = q*u has a nonzero solution with cofactors sized for a
/// common factor of bidegree (g1, g2). This is the bivariate Sylvester
/// subresultant map.
inline KernelProbe cofactor_kernel(const MPoly& p, const MPoly& q, unsigned g1, unsigned g2) {
  const Bidegree a = bidegree_of(p), b = bidegree_of(q);
  const Bidegree u_shape{a.d1 - g1, a.d2 - g2};
  const Bidegree v_shape{b.d1 - g1, b.d2 - g2};
  const CMatrix mp = multiplication_matrix(p, v_shape);
  const CMatrix mq = multiplication_matrix(q, u_shape);
  CMatrix sylvester(mp.rows(), mp.cols() + mq.cols());
  sylvester << mp, -mq;
  Eigen::JacobiSVD<CMatrix> svd(sylvester, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  KernelProbe out;
  out.null_vector = svd.matrixV().col(sylvester.cols() - 1);
  if (sylvester.cols() > sylvester.rows()) {
    out.ratio = 0.0;
  } else {
    out.ratio = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
  }
  return out;
}

inline bool has_kernel(const MPoly& p, const MPoly& q, unsigned g1, unsigned g2, double tol,
                       KernelProbe* probe = nullptr) {
  KernelProbe k = cofactor_kernel(p, q, g1, g2);
  if (k.ratio > tol && k.ratio <= 10.0 * tol) {
    throw InconclusiveError("approx_gcd_bivariate: gcd degree ambiguous at this tolerance (sigma ratio " +
                            std::to_string(k.ratio) + " at bidegree (" + std::to_string(g1) + "," +
                            std::to_string(g2) + "))");
  }
  const bool found = k.ratio <= tol;
  if (probe) *probe = std::move(k);
  return found;
}

}  // namespace detail

/// Monic normalization: the lexicographically largest monomial (z1 compared
/// first) gets coefficient 1.
inline MPoly monic(const MPoly& p) {
  if (p.is_zero()) return p;
  return p * (1.0 / p.terms().rbegin()->second);
}

/// Approximate greatest common divisor of two bivariate polynomials.
///
/// The bidegree (G1, G2) of the gcd is found from the numerical rank of the
/// bivariate Sylvester map (u, v) -> p v - q u: the map has a kernel for a
/// cofactor shape sized by (g1, g2) exactly when g1 <= G1 and g2 <= G2. The
/// kernel at (G1, G2) yields the cofactors, and the gcd follows by joint
/// least-squares division. Returns the constant 1 when the rank test certifies
/// coprimality.
inline GcdResult approx_gcd_bivariate(const MPoly& p_in, const MPoly& q_in, double tol = 1e-8) {
  if (p_in.nvars() != 2 || q_in.nvars() != 2) {
    throw InputError("approx_gcd_bivariate: both polynomials must have exactly two variables");
  }
  if (p_in.is_zero() || q_in.is_zero()) throw InputError("approx_gcd_bivariate: zero polynomial");
  if (!(tol > 0.0)) throw InputError("approx_gcd_bivariate: tolerance must be positive");

  const MPoly p = p_in * (1.0 / p_in.norm2());
  const MPoly q = q_in * (1.0 / q_in.norm2());
  const detail::Bidegree a = detail::bidegree_of(p), b = detail::bidegree_of(q);

  unsigned g1 = 0, g2 = 0;
  for (unsigned k = std::min(a.d1, b.d1); k >= 1; --k) {
    if (detail::has_kernel(p, q, k, 0, tol)) {
      g1 = k;
      break;
    }
  }
  for (unsigned k = std::min(a.d2, b.d2); k >= 1; --k) {
    if (detail::has_kernel(p, q, 0, k, tol)) {
      g2 = k;
      break;
    }
  }

  GcdResult out{MPoly::constant(2, 1.0), 0.0, g1, g2};
  if (g1 == 0 && g2 == 0) return out;

  detail::KernelProbe probe;
  if (!detail::has_kernel(p, q, g1, g2, tol, &probe)) {
    throw InconclusiveError("approx_gcd_bivariate: inconsistent degree certificates");
  }
  const detail::Bidegree u_shape{a.d1 - g1, a.d2 - g2};
  const detail::Bidegree v_shape{b.d1 - g1, b.d2 - g2};
  const auto v_len = static_cast<Eigen::Index>(v_shape.size());
  const MPoly v = detail::from_coefficients(probe.null_vector.head(v_len), v_shape);
  const MPoly u = detail::from_coefficients(probe.null_vector.tail(probe.null_vector.size() - v_len), u_shape);

  // g solves [mult(u); mult(v)] g = [p; q]
  const detail::Bidegree g_shape{g1, g2};
  const CMatrix mu = detail::multiplication_matrix(u, g_shape);
  const CMatrix mv = detail::multiplication_matrix(v, g_shape);
  const CVector cp = detail::coefficients(p, {u_shape.d1 + g1, u_shape.d2 + g2});
  const CVector cq = detail::coefficients(q, {v_shape.d1 + g1, v_shape.d2 + g2});
  CMatrix stacked(mu.rows() + mv.rows(), mu.cols());
  stacked << mu, mv;
  CVector rhs(cp.size() + cq.size());
  rhs << cp, cq;
  const CVector gc = stacked.colPivHouseholderQr().solve(rhs);
  MPoly g = monic(detail::from_coefficients(gc, g_shape).pruned(1e-10));

  // Residual of dividing each input by the normalized g.
  auto division_residual = [&](const MPoly& f) {
    const detail::Bidegree fs = detail::bidegree_of(f);
    const detail::Bidegree s_shape{fs.d1 - g1, fs.d2 - g2};
    const CMatrix mg = detail::multiplication_matrix(g, s_shape);
    const CVector cf = detail::coefficients(f, {g.degree_in(0) + s_shape.d1, g.degree_in(1) + s_shape.d2});
    if (mg.rows() != cf.size()) return 1.0;
    const CVector s = mg.colPivHouseholderQr().solve(cf);
    return (mg * s - cf).norm() / cf.norm();
  };
  if (g.degree_in(0) != g1 || g.degree_in(1) != g2) {
    throw NumericalError("approx_gcd_bivariate: recovered factor lost its leading terms");
  }
  out.residual = std::max(division_residual(p), division_residual(q));
  out.gcd = std::move(g);
  if (out.residual > tol) {
    throw NumericalError("approx_gcd_bivariate: division residual " + std::to_string(out.residual) +
                         " exceeds tolerance");
  }
  return out;
}

}  // namespace jointspec
