#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "upieces/ff.hpp"

namespace upieces {

using Vector = std::vector<Elem>;

/// Dense matrix over a small finite field, row-major. Acts on column
/// vectors: (Mx)_i = sum_j M_ij x_j.
class Matrix {
 public:
  Matrix(Field f, std::size_t rows, std::size_t cols)
      : field_(f), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static Matrix identity(Field f, std::size_t n);
  /// Entries are FieldElement encodings; throws InvalidInput when an entry
  /// is outside [0, q) or rows are ragged.
  static Matrix from_rows(Field f, const std::vector<std::vector<int>>& rows);
  static Matrix from_columns(Field f, std::size_t n, const std::vector<Vector>& columns);

  const Field& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Elem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const Elem> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<Elem> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Elem> data() const { return data_; }
  Vector column(std::size_t c) const;

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  bool is_zero() const;
  Matrix pow(unsigned k) const;
  Matrix scaled(Elem c) const;
  Vector apply(std::span<const Elem> x) const;
  std::vector<std::vector<int>> to_rows() const;

  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Elem> data_;
};

/// Reduced row-echelon form; pivot columns are returned through `pivots`.
/// Zero rows are dropped.
Matrix rref(const Matrix& m, std::vector<std::size_t>* pivots = nullptr);
std::size_t rank(const Matrix& m);
std::optional<Matrix> inverse(const Matrix& m);
/// Some x with A x = b, or nullopt when the system is inconsistent.
std::optional<Vector> solve(const Matrix& a, std::span<const Elem> b);
/// Smallest e >= 0 with m^e = 0, or nullopt if m is not nilpotent.
std::optional<unsigned> nilpotency_order(const Matrix& m);

Vector vec_add(const Field& f, std::span<const Elem> a, std::span<const Elem> b);
Vector vec_scale(const Field& f, Elem c, std::span<const Elem> a);
Elem dot(const Field& f, std::span<const Elem> a, std::span<const Elem> b);
/// x^T G y.
Elem bilinear(const Matrix& gram, std::span<const Elem> x, std::span<const Elem> y);

namespace detail {
Matrix rref_generic(const Matrix& m, std::vector<std::size_t>* pivots);
/// Bit-packed elimination for q = 2 and at most 64 columns.
Matrix rref_gf2_packed(const Matrix& m, std::vector<std::size_t>* pivots);
}  // namespace detail

/// A linear subspace of F_q^n stored as the reduced row-echelon basis of
/// its row span. Two subspaces are equal iff their representations are.
class Subspace {
 public:
  static Subspace zero(Field f, std::size_t n);
  static Subspace full(Field f, std::size_t n);
  /// Span of the rows of `rows`.
  static Subspace from_rows(const Matrix& rows);
  static Subspace span(Field f, std::size_t n, const std::vector<Vector>& vectors);

  std::size_t dim() const { return basis_.rows(); }
  std::size_t ambient_dim() const { return basis_.cols(); }
  const Field& field() const { return basis_.field(); }
  const Matrix& basis() const { return basis_; }
  std::vector<Vector> basis_vectors() const;
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  bool contains(std::span<const Elem> v) const;
  bool contains(const Subspace& other) const;

  friend bool operator==(const Subspace& a, const Subspace& b) { return a.basis_ == b.basis_; }

 private:
  Subspace(Matrix basis, std::vector<std::size_t> pivots)
      : basis_(std::move(basis)), pivots_(std::move(pivots)) {}
  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

/// {x : Mx = 0}.
Subspace kernel(const Matrix& m);
/// Column space of M.
Subspace image(const Matrix& m);
/// M(W).
Subspace image_of(const Matrix& m, const Subspace& w);
Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace subspace_meet(const Subspace& a, const Subspace& b);
/// True iff B is contained in A.
bool contains(const Subspace& a, const Subspace& b);
/// {x : x^T G w = 0 for all w in W}.
Subspace perp(const Subspace& w, const Matrix& gram);
/// Vectors of `outer` that extend a basis of `inner` (inner must lie in outer).
std::vector<Vector> complement_basis(const Subspace& inner, const Subspace& outer);

}  // namespace upieces
