#include "upieces/symplectic.hpp"

#include "upieces/errors.hpp"

namespace upieces {
namespace {

void require_m_member(const Matrix& n, const SymplecticSpace& s) {
  if (!is_m_member(n, s)) throw NotMMember("1 + N does not preserve the symplectic form");
}

void check_size(const Matrix& m, const SymplecticSpace& s) {
  if (!m.square() || m.rows() != s.dim || m.field() != s.field) {
    throw DimensionMismatch("matrix does not act on the symplectic space");
  }
}

}  // namespace

bool is_alternating(const Matrix& gram) {
  if (!gram.square()) return false;
  const Field& f = gram.field();
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    if (gram(i, i) != 0) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (gram(i, j) != f.neg(gram(j, i))) return false;
  }
  return true;
}

Matrix standard_gram(const Field& f, std::size_t dim) {
  if (dim % 2 != 0) throw OddDimension("symplectic dimension " + std::to_string(dim) + " is odd");
  Matrix g(f, dim, dim);
  for (std::size_t i = 0; i < dim; ++i) g(i, dim - 1 - i) = i < dim / 2 ? 1 : f.neg(1);
  return g;
}

SymplecticSpace standard_symplectic(std::size_t dim, int q) {
  const Field f = Field::make(q);
  return {f, dim, standard_gram(f, dim)};
}

SymplecticSpace make_symplectic(const Matrix& gram) {
  if (!gram.square()) throw InvalidInput("gram matrix is not square");
  if (gram.rows() % 2 != 0) throw OddDimension("gram matrix has odd size");
  if (!is_alternating(gram)) throw InvalidInput("gram matrix is not alternating");
  if (rank(gram) != gram.rows()) throw InvalidInput("gram matrix is degenerate");
  return {gram.field(), gram.rows(), gram};
}

bool is_sp_member(const Matrix& g, const SymplecticSpace& s) {
  check_size(g, s);
  return g.transpose() * s.gram * g == s.gram;
}

bool is_m_member(const Matrix& n, const SymplecticSpace& s) {
  check_size(n, s);
  if (!nilpotency_order(n)) return false;
  const Matrix nt = n.transpose();
  return (nt * s.gram + s.gram * n + nt * s.gram * n).is_zero();
}

Matrix dagger(const Matrix& n, const SymplecticSpace& s) {
  require_m_member(n, s);
  const Matrix one = Matrix::identity(s.field, s.dim);
  const auto inv = inverse(one + n);
  ensure(inv.has_value(), "1 + N is not invertible");
  Matrix d = *inv - one;
  ensure(s.gram * n == d.transpose() * s.gram, "dagger is not the adjoint");
  return d;
}

bool check_self_dual(const Matrix& n, const SymplecticSpace& s) {
  require_m_member(n, s);
  const Filtration v = dk_filtration(n);
  for (int a = v.lo() - 1; a <= v.hi() + 1; ++a) {
    if (!(perp(v.at(a), s.gram) == v.at(1 - a))) return false;
  }
  return true;
}

Elem GradedSymplecticData::pair0(std::span<const Elem> x, std::span<const Elem> y) const {
  return bilinear(gram0, x, y);
}

GradedSymplecticData graded_symplectic(const Matrix& n, const SymplecticSpace& s,
                                       std::mt19937_64* rng) {
  require_m_member(n, s);
  GradedSpace g = graded_space(n, rng);
  const Field& f = s.field;
  const Matrix full = g.basis.transpose() * s.gram * g.basis;
  Matrix gram0(f, g.dim, g.dim);
  for (std::size_t r = 0; r < g.dim; ++r) {
    for (std::size_t c = 0; c < g.dim; ++c) {
      const int sum = g.degrees[r] + g.degrees[c];
      if (sum == 0) gram0(r, c) = full(r, c);
      if (sum > 0) ensure(full(r, c) == 0, "canonical filtration is not self-dual");
    }
  }
  ensure(rank(gram0) == g.dim && is_alternating(gram0), "induced form is not symplectic");
  ensure((g.nu.transpose() * gram0 + gram0 * g.nu).is_zero(), "nu is not skew-adjoint");

  GradedSymplecticData out{std::move(g), std::move(gram0), {}, {}};
  const GradedSpace& gs = out.graded;
  for (int k = 0; k <= gs.max_degree(); ++k) {
    const auto basis = gs.primitive.at(-k).basis_vectors();
    const Matrix nk = gs.nu.pow(static_cast<unsigned>(k));
    Matrix b(f, basis.size(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Vector x = gs.embed(-k, basis[i]);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        b(i, j) = out.pair0(x, nk.apply(gs.embed(-k, basis[j])));
      }
    }
    const Elem sign = k % 2 == 1 ? 1 : f.neg(1);
    ensure(b.transpose() == b.scaled(sign), "b_n has the wrong symmetry");
    ensure(rank(b) == b.rows(), "b_n is degenerate");
    if (k % 2 == 0) {
      ensure(is_alternating(b), "b_n is not alternating for even n");
      ensure(basis.size() % 2 == 0, "odd-dimensional P_{-n} for even n");
    }
    out.primitive_basis.emplace(k, basis);
    out.bn.emplace(k, std::move(b));
  }
  return out;
}

Matrix darboux_basis(const Matrix& gram) {
  if (!gram.square() || gram.rows() % 2 != 0 || !is_alternating(gram)) {
    throw InvalidInput("darboux basis needs an alternating form of even size");
  }
  const Field& f = gram.field();
  const std::size_t dim = gram.rows();
  std::vector<Vector> pool;
  for (std::size_t i = 0; i < dim; ++i) {
    Vector v(dim, 0);
    v[i] = 1;
    pool.push_back(std::move(v));
  }
  std::vector<Vector> cols(dim);
  for (std::size_t i = 0; i < dim / 2; ++i) {
    const Vector u = pool.front();
    std::size_t wi = 1;
    while (wi < pool.size() && bilinear(gram, u, pool[wi]) == 0) ++wi;
    if (wi == pool.size()) throw InvalidInput("form is degenerate");
    const Vector w = vec_scale(f, f.inv(bilinear(gram, u, pool[wi])), pool[wi]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(wi));
    pool.erase(pool.begin());
    for (auto& x : pool) {
      // x + <w,x> u - <u,x> w is orthogonal to both u and w.
      const Elem a = bilinear(gram, w, x);
      const Elem b = bilinear(gram, u, x);
      x = vec_add(f, x, vec_add(f, vec_scale(f, a, u), vec_scale(f, f.neg(b), w)));
    }
    cols[i] = u;
    cols[dim - 1 - i] = w;
  }
  Matrix fm = Matrix::from_columns(f, dim, cols);
  ensure(fm.transpose() * gram * fm == standard_gram(f, dim), "darboux basis is not symplectic");
  return fm;
}

std::vector<std::pair<std::size_t, std::size_t>> sp_positive_roots(std::size_t dim) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < dim / 2; ++i)
    for (std::size_t j = i + 1; j <= dim - 1 - i; ++j) out.emplace_back(i, j);
  return out;
}

Matrix sp_root_element(const Field& f, std::size_t dim, std::size_t i, std::size_t j, Elem t) {
  if (i >= dim || j >= dim || i == j) throw InvalidInput("root position out of range");
  const Matrix g = standard_gram(f, dim);
  const std::size_t pi = dim - 1 - j, pj = dim - 1 - i;
  for (Elem sign : {Elem{1}, f.neg(1)}) {
    Matrix x(f, dim, dim);
    x(i, j) = 1;
    if (pi != i) x(pi, pj) = sign;
    const Matrix xt = x.transpose();
    if ((xt * g + g * x).is_zero() && (xt * g * x).is_zero()) {
      return Matrix::identity(f, dim) + x.scaled(t);
    }
  }
  throw InternalError("no sign makes the root element symplectic");
}

}  // namespace upieces
