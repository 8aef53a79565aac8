#include "upieces/filtration.hpp"

#include <algorithm>
#include <numeric>

#include "upieces/errors.hpp"

namespace upieces {
namespace {

std::vector<Matrix> powers(const Matrix& n, unsigned up_to) {
  std::vector<Matrix> p;
  p.reserve(up_to + 1);
  p.push_back(Matrix::identity(n.field(), n.rows()));
  for (unsigned k = 1; k <= up_to; ++k) p.push_back(p.back() * n);
  return p;
}

unsigned order_of(const Matrix& n) {
  require_nilpotent(n);
  return *nilpotency_order(n);
}

/// Greedily extends `inner` by candidates that are independent modulo it.
std::vector<Vector> extend_basis(const Subspace& inner, const std::vector<Vector>& candidates) {
  std::vector<Vector> acc = inner.basis_vectors();
  std::vector<Vector> chosen;
  std::size_t current = inner.dim();
  for (const auto& v : candidates) {
    acc.push_back(v);
    const std::size_t r = Subspace::span(inner.field(), inner.ambient_dim(), acc).dim();
    if (r > current) {
      chosen.push_back(v);
      current = r;
    } else {
      acc.pop_back();
    }
  }
  return chosen;
}

Elem random_elem(std::mt19937_64& rng, const Field& f) {
  return static_cast<Elem>(std::uniform_int_distribution<int>(0, f.q() - 1)(rng));
}

/// A shuffled spanning set of `outer`: random combinations of its basis
/// shifted by random elements of `inner`.
std::vector<Vector> random_candidates(std::mt19937_64& rng, const Subspace& inner,
                                      const Subspace& outer) {
  const Field& f = outer.field();
  const std::size_t n = outer.ambient_dim();
  std::vector<Vector> out;
  const auto ob = outer.basis_vectors();
  const auto ib = inner.basis_vectors();
  for (std::size_t t = 0; t < 2 * ob.size() + 4; ++t) {
    Vector v(n, 0);
    for (const auto& b : ob) v = vec_add(f, v, vec_scale(f, random_elem(rng, f), b));
    for (const auto& b : ib) v = vec_add(f, v, vec_scale(f, random_elem(rng, f), b));
    out.push_back(std::move(v));
  }
  out.insert(out.end(), ob.begin(), ob.end());
  return out;
}

}  // namespace

int Partition::total() const { return std::accumulate(parts.begin(), parts.end(), 0); }

int Partition::multiplicity(int part) const {
  return static_cast<int>(std::count(parts.begin(), parts.end(), part));
}

std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(Partition{cur});
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  std::sort(out.begin(), out.end());
  return out;
}

void require_nilpotent(const Matrix& n) {
  if (!n.square()) throw DimensionMismatch("expected a square matrix");
  if (!nilpotency_order(n)) throw NotNilpotent("matrix is not nilpotent");
}

Partition jordan_type(const Matrix& n) {
  const unsigned e = order_of(n);
  std::vector<std::size_t> r;
  Matrix p = Matrix::identity(n.field(), n.rows());
  for (unsigned j = 0; j <= e + 1; ++j) {
    r.push_back(rank(p));
    p = p * n;
  }
  Partition out;
  for (int j = static_cast<int>(e); j >= 1; --j) {
    const long long mult = static_cast<long long>(r[j - 1]) - 2 * static_cast<long long>(r[j]) +
                           static_cast<long long>(r[j + 1]);
    for (long long m = 0; m < mult; ++m) out.parts.push_back(j);
  }
  return out;
}

std::vector<JordanChain> jordan_basis(const Matrix& n, std::mt19937_64* rng) {
  const unsigned e = order_of(n);
  const auto pw = powers(n, e + 1);
  std::vector<Subspace> ker;
  for (unsigned s = 0; s <= e + 1; ++s) ker.push_back(kernel(pw[s]));
  std::vector<JordanChain> chains;
  for (int s = static_cast<int>(e); s >= 1; --s) {
    const Subspace inner = subspace_sum(ker[s - 1], image_of(n, ker[s + 1]));
    const auto candidates = rng ? random_candidates(*rng, inner, ker[s]) : ker[s].basis_vectors();
    for (auto& top : extend_basis(inner, candidates)) chains.push_back({std::move(top), s});
  }
  return chains;
}

Filtration::Filtration(Field f, std::size_t n, int lo, std::vector<Subspace> steps)
    : field_(f), n_(n), lo_(lo), steps_(std::move(steps)) {
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].ambient_dim() != n || steps_[i].field() != f) {
      throw DimensionMismatch("filtration step does not live in the ambient space");
    }
    if (i > 0 && !steps_[i - 1].contains(steps_[i])) {
      throw InvalidInput("filtration steps are not descending");
    }
  }
}

Subspace Filtration::at(int a) const {
  if (a < lo_) return Subspace::full(field_, n_);
  if (a > hi()) return Subspace::zero(field_, n_);
  return steps_[static_cast<std::size_t>(a - lo_)];
}

Filtration Filtration::shifted(int k) const { return Filtration(field_, n_, lo_ + k, steps_); }

bool operator==(const Filtration& a, const Filtration& b) {
  if (a.field_ != b.field_ || a.n_ != b.n_) return false;
  const int lo = std::min(a.lo(), b.lo()) - 1;
  const int hi = std::max(a.hi(), b.hi()) + 1;
  for (int i = lo; i <= hi; ++i)
    if (!(a.at(i) == b.at(i))) return false;
  return true;
}

Filtration dk_filtration(const Matrix& n) {
  const int e = static_cast<int>(order_of(n));
  const Field& f = n.field();
  const std::size_t dim = n.rows();
  if (e == 0) return Filtration(f, dim, 0, {Subspace::zero(f, dim)});
  const auto pw = powers(n, 2 * e + 1);
  std::vector<Subspace> ker;
  for (int s = 0; s <= 2 * e + 1; ++s) ker.push_back(kernel(pw[s]));
  std::vector<Subspace> steps;
  for (int a = 1 - e; a <= e - 1; ++a) {
    Subspace acc = Subspace::zero(f, dim);
    for (int j = std::max(0, a); j <= e - 1; ++j) {
      const int k = std::min(2 * j - a + 1, 2 * e + 1);
      acc = subspace_sum(acc, image_of(pw[j], ker[k]));
    }
    steps.push_back(std::move(acc));
  }
  return Filtration(f, dim, 1 - e, std::move(steps));
}

// ------------------------------------------------------------- GradedSpace

std::size_t GradedSpace::offset(int a) const {
  return static_cast<std::size_t>(std::lower_bound(degrees.begin(), degrees.end(), a) -
                                  degrees.begin());
}

std::size_t GradedSpace::gr_dim(int a) const { return offset(a + 1) - offset(a); }

Matrix GradedSpace::block(const Matrix& m, int b, int a) const {
  return m.block(offset(b), offset(a), gr_dim(b), gr_dim(a));
}

void GradedSpace::set_block(Matrix& m, int b, int a, const Matrix& blk) const {
  if (blk.rows() != gr_dim(b) || blk.cols() != gr_dim(a)) throw DimensionMismatch("graded block");
  m.set_block(offset(b), offset(a), blk);
}

Matrix GradedSpace::homogeneous_part(const Matrix& m, int d) const {
  Matrix out(field, dim, dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r)
      if (degrees[r] - degrees[c] == d) out(r, c) = m(r, c);
  return out;
}

bool GradedSpace::is_homogeneous(const Matrix& m, int d) const {
  if (m.rows() != dim || m.cols() != dim) throw DimensionMismatch("graded endomorphism size");
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if (m(r, c) != 0 && degrees[r] - degrees[c] != d) return false;
  return true;
}

Vector GradedSpace::embed(int a, std::span<const Elem> x) const {
  if (x.size() != gr_dim(a)) throw DimensionMismatch("graded piece vector length");
  Vector v(dim, 0);
  std::copy(x.begin(), x.end(), v.begin() + static_cast<std::ptrdiff_t>(offset(a)));
  return v;
}

Vector GradedSpace::project(int a, std::span<const Elem> x) const {
  if (x.size() != dim) throw DimensionMismatch("graded vector length");
  const auto begin = x.begin() + static_cast<std::ptrdiff_t>(offset(a));
  return Vector(begin, begin + static_cast<std::ptrdiff_t>(gr_dim(a)));
}

Matrix GradedSpace::nu_power_block(int a, unsigned k) const {
  return block(nu.pow(k), a + 2 * static_cast<int>(k), a);
}

GradedSpace graded_space(const Matrix& n, std::mt19937_64* rng) {
  const int e = static_cast<int>(order_of(n));
  const Field& f = n.field();
  const std::size_t dim = n.rows();
  struct Column {
    int degree;
    Vector v;
  };
  std::vector<Column> cols;
  for (const auto& chain : jordan_basis(n, rng)) {
    Vector v = chain.top;
    for (int k = 0; k < chain.length; ++k) {
      cols.push_back({2 * k + 1 - chain.length, v});
      v = n.apply(v);
    }
  }
  std::stable_sort(cols.begin(), cols.end(),
                   [](const Column& x, const Column& y) { return x.degree < y.degree; });
  std::vector<Vector> vs;
  std::vector<int> degrees;
  for (auto& c : cols) {
    degrees.push_back(c.degree);
    vs.push_back(std::move(c.v));
  }
  Matrix basis = Matrix::from_columns(f, dim, vs);
  auto inv = inverse(basis);
  ensure(inv.has_value(), "Jordan chains do not form a basis");
  Matrix nu = *inv * n * basis;
  GradedSpace g{f, dim, e, basis, *inv, degrees, nu, dk_filtration(n), {}};
  ensure(g.is_homogeneous(nu, 2), "nu is not homogeneous of degree 2");
  for (int a = g.min_degree(); a <= g.max_degree(); ++a) {
    std::vector<Vector> upper;
    for (std::size_t i = g.offset(a); i < dim; ++i) upper.push_back(basis.column(i));
    ensure(Subspace::span(f, dim, upper) == g.filtration.at(a),
           "graded splitting does not split the canonical filtration");
  }
  for (int c = g.min_degree(); c <= 0; ++c) {
    g.primitive.emplace(c, kernel(g.nu_power_block(c, static_cast<unsigned>(1 - c))));
  }
  return g;
}

bool in_filtered_degree(const Filtration& v, const Matrix& m, int d) {
  if (!m.square() || m.rows() != v.ambient_dim()) throw DimensionMismatch("filtered degree");
  for (int a = v.lo() - 1; a <= v.hi(); ++a) {
    if (!v.at(a + d).contains(image_of(m, v.at(a)))) return false;
  }
  return true;
}

bool verify_characterization(const Filtration& v, const Matrix& n) {
  if (!n.square() || n.rows() != v.ambient_dim() || n.field() != v.field()) {
    throw DimensionMismatch("filtration and matrix disagree");
  }
  if (!in_filtered_degree(v, n, 2)) return false;
  const int reach = std::max(std::abs(v.lo()), std::abs(v.hi())) + 1;
  Matrix np = Matrix::identity(n.field(), n.rows());
  for (int k = 0; k <= reach; ++k) {
    if (v.gr_dim(-k) != v.gr_dim(k)) return false;
    const auto reps = complement_basis(v.at(-k + 1), v.at(-k));
    const Subspace above = v.at(k + 1);
    std::vector<Vector> imgs = above.basis_vectors();
    for (const auto& x : reps) imgs.push_back(np.apply(x));
    const Subspace s = Subspace::span(n.field(), n.rows(), imgs);
    if (s.dim() != above.dim() + reps.size()) return false;
    np = np * n;
  }
  ensure(v == dk_filtration(n), "characterization holds but filtration is not canonical");
  return true;
}

Matrix commutator_solve(const GradedSpace& g, const Matrix& r, int j) {
  if (j < 0) throw DegreeMismatch("solution degree must be nonnegative");
  if (!g.is_homogeneous(r, j + 2)) {
    throw DegreeMismatch("right-hand side is not homogeneous of degree " + std::to_string(j + 2));
  }
  const Field& f = g.field;
  const auto nu_pw = powers(g.nu, static_cast<unsigned>(2 * g.e + 2));
  std::vector<Vector> domain, images;
  for (int c = g.min_degree(); c <= 0; ++c) {
    const unsigned m = static_cast<unsigned>(1 - c);
    for (const auto& px : g.primitive.at(c).basis_vectors()) {
      const Vector x = g.embed(c, px);
      // nu^(1-c) tau_0(x) = -sum_{i+i'=-c} nu^i R nu^i' x.
      Vector rhs(g.dim, 0);
      for (unsigned i = 0; i < m; ++i) {
        rhs = vec_add(f, rhs, nu_pw[i].apply(r.apply(nu_pw[m - 1 - i].apply(x))));
      }
      rhs = vec_scale(f, f.neg(1), rhs);
      const int src = c + j;
      const int dst = src + 2 * static_cast<int>(m);
      Vector tau(g.dim, 0);
      if (src <= g.max_degree()) {
        const auto sol = solve(g.nu_power_block(src, m), g.project(dst, rhs));
        ensure(sol.has_value(), "primitive equation has no solution");
        tau = g.embed(src, *sol);
      }
      ensure(nu_pw[m].apply(tau) == rhs, "primitive equation residual");
      Vector xk = x;
      for (unsigned k = 0; k < m; ++k) {
        domain.push_back(xk);
        images.push_back(tau);
        tau = vec_add(f, g.nu.apply(tau), r.apply(xk));
        xk = g.nu.apply(xk);
      }
    }
  }
  const Matrix d = Matrix::from_columns(f, g.dim, domain);
  const auto d_inv = inverse(d);
  ensure(d_inv.has_value(), "primitive decomposition is not a basis");
  Matrix t = Matrix::from_columns(f, g.dim, images) * *d_inv;
  ensure(g.is_homogeneous(t, j), "commutator solution has the wrong degree");
  ensure(t * g.nu - g.nu * t == r, "commutator residual is nonzero");
  return t;
}

Matrix straighten(const Matrix& n, const Matrix& s) {
  require_nilpotent(n);
  if (s.rows() != n.rows() || s.cols() != n.cols() || s.field() != n.field()) {
    throw DimensionMismatch("perturbation size");
  }
  const GradedSpace g = graded_space(n);
  const Matrix sg = g.to_graded(s);
  const int span = 2 * g.e;
  for (int d = -span; d < 3; ++d) {
    if (!g.homogeneous_part(sg, d).is_zero()) {
      throw NotInE3("perturbation has a component of filtered degree " + std::to_string(d));
    }
  }
  std::vector<Matrix> s_parts, t_parts;
  for (int d = 0; d <= span + 2; ++d) s_parts.push_back(g.homogeneous_part(sg, d));
  const Matrix zero(g.field, g.dim, g.dim);
  t_parts.push_back(zero);
  Matrix total = zero;
  for (int j = 1; j <= span; ++j) {
    Matrix rhs = s_parts[static_cast<std::size_t>(j + 2)];
    for (int jp = 1; jp <= j - 1; ++jp) {
      rhs = rhs + s_parts[static_cast<std::size_t>(j + 2 - jp)] * t_parts[static_cast<std::size_t>(jp)];
    }
    t_parts.push_back(commutator_solve(g, rhs, j));
    total = total + t_parts.back();
  }
  Matrix t = g.from_graded(total);
  const Matrix one = Matrix::identity(g.field, g.dim);
  ensure((one + t) * n == (n + s) * (one + t), "straightening residual is nonzero");
  return t;
}

Vector lift_primitive(const GradedSpace& g, int n, std::span<const Elem> x) {
  if (n < 0) throw DimensionMismatch("primitive index must be nonnegative");
  const int a = -n;
  if (x.size() != g.gr_dim(a)) throw DimensionMismatch("primitive vector length");
  if (g.gr_dim(a) == 0) return Vector(g.dim, 0);
  const Vector img = g.nu_power_block(a, static_cast<unsigned>(n + 1)).apply(x);
  for (Elem c : img)
    if (c != 0) throw NotPrimitive("vector is not killed by nu^(n+1)");
  return g.basis.apply(g.embed(a, x));
}

Matrix lift_graded_endomorphism(const GradedSpace& g, const Matrix& sigma) {
  if (!g.is_homogeneous(sigma, 1)) throw DegreeMismatch("sigma is not homogeneous of degree 1");
  if (!(sigma * g.nu == g.nu * sigma)) throw NotCommuting("sigma does not commute with nu");
  return g.from_graded(sigma);
}

}  // namespace upieces
