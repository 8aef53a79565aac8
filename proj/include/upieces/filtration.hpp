#pragma once

#include <map>
#include <random>
#include <vector>

#include "upieces/linalg.hpp"

namespace upieces {

/// Weakly decreasing positive parts.
struct Partition {
  std::vector<int> parts;

  int total() const;
  int multiplicity(int part) const;
  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;
};

/// All partitions of n, in lexicographically increasing order of parts.
std::vector<Partition> partitions_of(int n);

/// Throws NotNilpotent unless N is square with N^dim = 0.
void require_nilpotent(const Matrix& n);

/// Jordan type of a nilpotent matrix from its rank sequence.
Partition jordan_type(const Matrix& n);

struct JordanChain {
  Vector top;  // v with N^length v = 0 and N^(length-1) v != 0
  int length;
};

/// Chains {N^k v_r} whose members form a basis, longest chains first.
/// Chain tops of length s are a complement of ker N^(s-1) + N ker N^(s+1) in
/// ker N^s. With `rng` the complements are chosen randomly.
std::vector<JordanChain> jordan_basis(const Matrix& n, std::mt19937_64* rng = nullptr);

/// A descending filtration V_{>=a} of F_q^n. Steps are stored on the window
/// [lo, hi]; V_{>=a} = V for a < lo and 0 for a > hi.
class Filtration {
 public:
  /// Throws InvalidInput when the steps are not descending.
  Filtration(Field f, std::size_t n, int lo, std::vector<Subspace> steps);

  const Field& field() const { return field_; }
  std::size_t ambient_dim() const { return n_; }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(steps_.size()) - 1; }
  Subspace at(int a) const;
  std::size_t gr_dim(int a) const { return at(a).dim() - at(a + 1).dim(); }
  /// The filtration W with W_{>=a} = V_{>=a-k}.
  Filtration shifted(int k) const;

  friend bool operator==(const Filtration& a, const Filtration& b);

 private:
  Field field_;
  std::size_t n_;
  int lo_;
  std::vector<Subspace> steps_;
};

/// V_{>=a} = sum over j >= max(0, a) of N^j(ker N^(2j-a+1)), stored on the
/// window [1-e, e-1] where e is the nilpotency order.
Filtration dk_filtration(const Matrix& n);

/// Graded coordinates for a nilpotent N: the columns of `basis` are the
/// Jordan chain vectors N^k v_r, sorted by ascending degree 2k+1-e_r. In
/// these coordinates N becomes `nu`, homogeneous of degree 2.
struct GradedSpace {
  Field field;
  std::size_t dim = 0;
  int e = 0;                    // nilpotency order; degrees lie in [1-e, e-1]
  Matrix basis;                 // graded coordinates -> original coordinates
  Matrix basis_inv;
  std::vector<int> degrees;     // degree of each graded coordinate
  Matrix nu;
  Filtration filtration;
  /// P_c in gr_c coordinates, for c in [1-e, 0].
  std::map<int, Subspace> primitive;

  int min_degree() const { return 1 - e; }
  int max_degree() const { return e - 1; }
  std::size_t offset(int a) const;
  std::size_t gr_dim(int a) const;

  Matrix to_graded(const Matrix& m) const { return basis_inv * m * basis; }
  Matrix from_graded(const Matrix& m) const { return basis * m * basis_inv; }
  /// Block of a graded-coordinate matrix mapping gr_a to gr_b.
  Matrix block(const Matrix& m, int b, int a) const;
  void set_block(Matrix& m, int b, int a, const Matrix& blk) const;
  /// The degree-d homogeneous component of a graded-coordinate matrix.
  Matrix homogeneous_part(const Matrix& m, int d) const;
  bool is_homogeneous(const Matrix& m, int d) const;
  /// Embeds a vector of gr_a coordinates into graded coordinates of V.
  Vector embed(int a, std::span<const Elem> x) const;
  /// The gr_a coordinates of a graded-coordinate vector.
  Vector project(int a, std::span<const Elem> x) const;
  /// nu^k restricted to gr_a -> gr_{a+2k}.
  Matrix nu_power_block(int a, unsigned k) const;
};

GradedSpace graded_space(const Matrix& n, std::mt19937_64* rng = nullptr);

/// True iff N lies in E_{>=2} of V_* and the induced degree-2 map satisfies
/// the Lefschetz condition. When true, V_* equals dk_filtration(N); a
/// disagreement raises InternalError.
bool verify_characterization(const Filtration& v, const Matrix& n);

/// T of degree j with T nu - nu T = R, for R homogeneous of degree j + 2 in
/// graded coordinates. Throws DegreeMismatch otherwise.
Matrix commutator_solve(const GradedSpace& g, const Matrix& r, int j);

/// For S in E_{>=3} of the canonical filtration of N, returns T in E_{>=1}
/// with (1+T)N = (N+S)(1+T). Both matrices are in original coordinates.
Matrix straighten(const Matrix& n, const Matrix& s);

/// The representative of x in P_{-n} lying in the chosen splitting, in
/// original coordinates. Throws NotPrimitive.
Vector lift_primitive(const GradedSpace& g, int n, std::span<const Elem> x);

/// Lift of sigma (graded coordinates, degree 1, commuting with nu) to an
/// endomorphism of V commuting with N. Throws DegreeMismatch when sigma is
/// not homogeneous of degree 1 and NotCommuting when sigma nu != nu sigma.
Matrix lift_graded_endomorphism(const GradedSpace& g, const Matrix& sigma);

/// True iff M maps V_{>=a} into V_{>=a+d} for every a.
bool in_filtered_degree(const Filtration& v, const Matrix& m, int d);

}  // namespace upieces
