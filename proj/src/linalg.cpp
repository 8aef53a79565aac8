#include "upieces/linalg.hpp"

#include <cstdint>
#include <string>

#include "upieces/errors.hpp"

namespace upieces {
namespace {

void check_same_shape(const Matrix& a, const Matrix& b) {
  if (a.field() != b.field() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("matrix shapes or fields differ");
  }
}

}  // namespace

Matrix Matrix::identity(Field f, std::size_t n) {
  Matrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::from_rows(Field f, const std::vector<std::vector<int>>& rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows[0].size();
  Matrix m(f, nr, nc);
  for (std::size_t r = 0; r < nr; ++r) {
    if (rows[r].size() != nc) throw InvalidInput("ragged matrix rows");
    for (std::size_t c = 0; c < nc; ++c) {
      const int v = rows[r][c];
      if (v < 0 || v >= f.q()) {
        throw InvalidInput("entry " + std::to_string(v) + " is not an element of F_" +
                           std::to_string(f.q()));
      }
      m(r, c) = static_cast<Elem>(v);
    }
  }
  return m;
}

Matrix Matrix::from_columns(Field f, std::size_t n, const std::vector<Vector>& columns) {
  Matrix m(f, n, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) throw DimensionMismatch("column length");
    for (std::size_t r = 0; r < n; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  Matrix b(field_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  for (std::size_t r = 0; r < b.rows(); ++r)
    for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
}

bool Matrix::is_zero() const {
  for (Elem e : data_)
    if (e != 0) return false;
  return true;
}

Matrix Matrix::pow(unsigned k) const {
  if (!square()) throw DimensionMismatch("power of a non-square matrix");
  Matrix result = identity(field_, rows_);
  Matrix base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

Matrix Matrix::scaled(Elem c) const {
  Matrix s = *this;
  for (auto& e : s.data_) e = field_.mul(c, e);
  return s;
}

Vector Matrix::apply(std::span<const Elem> x) const {
  if (x.size() != cols_) throw DimensionMismatch("matrix-vector product");
  Vector y(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    Elem acc = 0;
    const Elem* row_ptr = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (row_ptr[c] != 0 && x[c] != 0) acc = field_.add(acc, field_.mul(row_ptr[c], x[c]));
    }
    y[r] = acc;
  }
  return y;
}

std::vector<std::vector<int>> Matrix::to_rows() const {
  std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r][c] = (*this)(r, c);
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  Matrix s = a;
  for (std::size_t i = 0; i < s.data_.size(); ++i) s.data_[i] = a.field_.add(a.data_[i], b.data_[i]);
  return s;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  Matrix s = a;
  for (std::size_t i = 0; i < s.data_.size(); ++i) s.data_[i] = a.field_.sub(a.data_[i], b.data_[i]);
  return s;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.field_ != b.field_ || a.cols_ != b.rows_) throw DimensionMismatch("matrix product");
  const Field& f = a.field_;
  Matrix p(f, a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    Elem* out = p.data_.data() + i * b.cols_;
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Elem aik = a.data_[i * a.cols_ + k];
      if (aik == 0) continue;
      const Elem* brow = b.data_.data() + k * b.cols_;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        if (brow[j] != 0) out[j] = f.add(out[j], f.mul(aik, brow[j]));
      }
    }
  }
  return p;
}

namespace detail {

Matrix rref_generic(const Matrix& m, std::vector<std::size_t>* pivots) {
  const Field& f = m.field();
  Matrix a = m;
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t sel = r;
    while (sel < a.rows() && a(sel, c) == 0) ++sel;
    if (sel == a.rows()) continue;
    if (sel != r) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(sel, j), a(r, j));
    }
    const Elem inv = f.inv(a(r, c));
    for (std::size_t j = c; j < a.cols(); ++j) a(r, j) = f.mul(inv, a(r, j));
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      const Elem factor = a(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) {
        if (a(r, j) != 0) a(i, j) = f.sub(a(i, j), f.mul(factor, a(r, j)));
      }
    }
    piv.push_back(c);
    ++r;
  }
  if (pivots) *pivots = piv;
  return a.block(0, 0, r, a.cols());
}

Matrix rref_gf2_packed(const Matrix& m, std::vector<std::size_t>* pivots) {
  if (m.field().q() != 2 || m.cols() > 64) {
    throw DimensionMismatch("packed elimination needs q = 2 and at most 64 columns");
  }
  std::vector<std::uint64_t> rows(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m(i, c)) rows[i] |= std::uint64_t{1} << c;
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < rows.size(); ++c) {
    const std::uint64_t bit = std::uint64_t{1} << c;
    std::size_t sel = r;
    while (sel < rows.size() && !(rows[sel] & bit)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && (rows[i] & bit)) rows[i] ^= rows[r];
    piv.push_back(c);
    ++r;
  }
  Matrix out(m.field(), r, m.cols());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t c = 0; c < m.cols(); ++c) out(i, c) = (rows[i] >> c) & 1u;
  if (pivots) *pivots = piv;
  return out;
}

}  // namespace detail

Matrix rref(const Matrix& m, std::vector<std::size_t>* pivots) {
  if (m.field().q() == 2 && m.cols() <= 64) return detail::rref_gf2_packed(m, pivots);
  return detail::rref_generic(m, pivots);
}

std::size_t rank(const Matrix& m) { return rref(m).rows(); }

std::optional<Matrix> inverse(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix aug(m.field(), n, 2 * n);
  aug.set_block(0, 0, m);
  aug.set_block(0, n, Matrix::identity(m.field(), n));
  std::vector<std::size_t> piv;
  Matrix red = detail::rref_generic(aug, &piv);
  if (red.rows() < n || piv[n - 1] >= n) return std::nullopt;
  return red.block(0, n, n, n);
}

std::optional<Vector> solve(const Matrix& a, std::span<const Elem> b) {
  if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length");
  Matrix aug(a.field(), a.rows(), a.cols() + 1);
  aug.set_block(0, 0, a);
  for (std::size_t r = 0; r < a.rows(); ++r) aug(r, a.cols()) = b[r];
  std::vector<std::size_t> piv;
  Matrix red = rref(aug, &piv);
  Vector x(a.cols(), 0);
  for (std::size_t i = 0; i < piv.size(); ++i) {
    if (piv[i] == a.cols()) return std::nullopt;
    x[piv[i]] = red(i, a.cols());
  }
  return x;
}

std::optional<unsigned> nilpotency_order(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("nilpotency of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix p = Matrix::identity(m.field(), n);
  for (unsigned e = 0; e <= n; ++e) {
    if (p.is_zero()) return e;
    p = p * m;
  }
  return std::nullopt;
}

Vector vec_add(const Field& f, std::span<const Elem> a, std::span<const Elem> b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sum");
  Vector s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = f.add(a[i], b[i]);
  return s;
}

Vector vec_scale(const Field& f, Elem c, std::span<const Elem> a) {
  Vector s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = f.mul(c, a[i]);
  return s;
}

Elem dot(const Field& f, std::span<const Elem> a, std::span<const Elem> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot product");
  Elem acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) acc = f.add(acc, f.mul(a[i], b[i]));
  return acc;
}

Elem bilinear(const Matrix& gram, std::span<const Elem> x, std::span<const Elem> y) {
  return dot(gram.field(), x, gram.apply(y));
}

// ---------------------------------------------------------------- Subspace

Subspace Subspace::zero(Field f, std::size_t n) { return Subspace(Matrix(f, 0, n), {}); }

Subspace Subspace::full(Field f, std::size_t n) {
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  return Subspace(Matrix::identity(f, n), std::move(piv));
}

Subspace Subspace::from_rows(const Matrix& rows) {
  std::vector<std::size_t> piv;
  Matrix b = rref(rows, &piv);
  return Subspace(std::move(b), std::move(piv));
}

Subspace Subspace::span(Field f, std::size_t n, const std::vector<Vector>& vectors) {
  Matrix rows(f, vectors.size(), n);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != n) throw DimensionMismatch("spanning vector length");
    for (std::size_t c = 0; c < n; ++c) rows(i, c) = vectors[i][c];
  }
  return from_rows(rows);
}

std::vector<Vector> Subspace::basis_vectors() const {
  std::vector<Vector> out;
  out.reserve(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    auto r = basis_.row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

bool Subspace::contains(std::span<const Elem> v) const {
  if (v.size() != ambient_dim()) throw DimensionMismatch("vector length");
  const Field& f = field();
  Vector w(v.begin(), v.end());
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    const Elem c = w[pivots_[i]];
    if (c == 0) continue;
    auto r = basis_.row(i);
    for (std::size_t j = 0; j < w.size(); ++j)
      if (r[j]) w[j] = f.sub(w[j], f.mul(c, r[j]));
  }
  for (Elem e : w)
    if (e != 0) return false;
  return true;
}

bool Subspace::contains(const Subspace& other) const {
  if (other.ambient_dim() != ambient_dim() || other.field() != field()) {
    throw DimensionMismatch("subspace containment");
  }
  if (other.dim() > dim()) return false;
  for (std::size_t i = 0; i < other.dim(); ++i)
    if (!contains(other.basis_.row(i))) return false;
  return true;
}

Subspace kernel(const Matrix& m) {
  std::vector<std::size_t> piv;
  Matrix red = rref(m, &piv);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : piv) is_pivot[c] = true;
  const Field& f = m.field();
  std::vector<Vector> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vector v(n, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = f.neg(red(i, free));
    basis.push_back(std::move(v));
  }
  return Subspace::span(f, n, basis);
}

Subspace image(const Matrix& m) { return Subspace::from_rows(m.transpose()); }

Subspace image_of(const Matrix& m, const Subspace& w) {
  if (m.cols() != w.ambient_dim()) throw DimensionMismatch("image of subspace");
  // rows of (M B^T)^T = B M^T
  return Subspace::from_rows(w.basis() * m.transpose());
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.field() != b.field()) {
    throw DimensionMismatch("subspace sum");
  }
  Matrix rows(a.field(), a.dim() + b.dim(), a.ambient_dim());
  rows.set_block(0, 0, a.basis());
  rows.set_block(a.dim(), 0, b.basis());
  return Subspace::from_rows(rows);
}

Subspace subspace_meet(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.field() != b.field()) {
    throw DimensionMismatch("subspace meet");
  }
  const Field& f = a.field();
  const std::size_t n = a.ambient_dim();
  // Coefficient vectors (c, d) with cA + dB = 0; the meet is spanned by cA.
  Matrix stacked(f, a.dim() + b.dim(), n);
  stacked.set_block(0, 0, a.basis());
  stacked.set_block(a.dim(), 0, b.basis());
  Subspace relations = kernel(stacked.transpose());
  std::vector<Vector> gens;
  for (const auto& rel : relations.basis_vectors()) {
    Vector v(n, 0);
    for (std::size_t i = 0; i < a.dim(); ++i) {
      if (rel[i] == 0) continue;
      v = vec_add(f, v, vec_scale(f, rel[i], a.basis().row(i)));
    }
    gens.push_back(std::move(v));
  }
  return Subspace::span(f, n, gens);
}

bool contains(const Subspace& a, const Subspace& b) { return a.contains(b); }

Subspace perp(const Subspace& w, const Matrix& gram) {
  if (!gram.square() || gram.rows() != w.ambient_dim() || gram.field() != w.field()) {
    throw DimensionMismatch("perp: gram does not match the subspace");
  }
  // <x, w> = x^T G w = (G w)^T x, so W^perp = ker of the rows (G w)^T.
  return kernel(w.basis() * gram.transpose());
}

std::vector<Vector> complement_basis(const Subspace& inner, const Subspace& outer) {
  std::vector<Vector> acc = inner.basis_vectors();
  std::vector<Vector> extra;
  std::size_t current = inner.dim();
  for (const auto& v : outer.basis_vectors()) {
    acc.push_back(v);
    const std::size_t r = Subspace::span(outer.field(), outer.ambient_dim(), acc).dim();
    if (r > current) {
      extra.push_back(v);
      current = r;
    } else {
      acc.pop_back();
    }
  }
  return extra;
}

}  // namespace upieces
