#pragma once

#include <map>
#include <random>

#include "upieces/filtration.hpp"

namespace upieces {

/// A nondegenerate alternating form on F_q^dim.
struct SymplecticSpace {
  Field field;
  std::size_t dim = 0;
  Matrix gram;
};

/// Gram matrix pairing e_i with e_{dim-1-i}: entry (i, dim-1-i) is 1 for
/// i < dim/2 and -1 otherwise. Throws OddDimension.
SymplecticSpace standard_symplectic(std::size_t dim, int q);
Matrix standard_gram(const Field& f, std::size_t dim);
/// Validates that `gram` is alternating (zero diagonal, antisymmetric) and
/// invertible; throws InvalidInput otherwise.
SymplecticSpace make_symplectic(const Matrix& gram);

/// g^T G g = G.
bool is_sp_member(const Matrix& g, const SymplecticSpace& s);
/// N nilpotent and N^T G + G N + N^T G N = 0, i.e. 1 + N preserves the form.
bool is_m_member(const Matrix& n, const SymplecticSpace& s);
/// N^dagger = (1+N)^-1 - 1, the adjoint: <x, N y> = <N^dagger x, y>.
Matrix dagger(const Matrix& n, const SymplecticSpace& s);
/// (V_{>=a})^perp = V_{>=1-a} for the canonical filtration of N.
bool check_self_dual(const Matrix& n, const SymplecticSpace& s);

/// The induced admissible form and the forms b_n, all in the graded
/// coordinates of `graded`.
struct GradedSymplecticData {
  GradedSpace graded;
  /// Blocks (a, -a) of B^T G B; every other block is zero.
  Matrix gram0;
  /// Basis of P_{-n} in gr_{-n} coordinates, for n in [0, e-1].
  std::map<int, std::vector<Vector>> primitive_basis;
  /// Gram matrix of b_n(x, y) = <x, nu^n y>_0 on primitive_basis[n].
  std::map<int, Matrix> bn;

  /// <x, y>_0 for graded-coordinate vectors.
  Elem pair0(std::span<const Elem> x, std::span<const Elem> y) const;
};

/// Throws NotMMember. Asserts admissibility, skew-adjointness of nu and the
/// symmetry, nondegeneracy and parity properties of every b_n.
GradedSymplecticData graded_symplectic(const Matrix& n, const SymplecticSpace& s,
                                       std::mt19937_64* rng = nullptr);

/// True iff the Gram matrix has zero diagonal (and is antisymmetric).
bool is_alternating(const Matrix& gram);

/// F with F^T G F equal to the standard Gram matrix of the same size, for an
/// alternating nondegenerate G.
Matrix darboux_basis(const Matrix& gram);

/// Positions (i, j) of the positive roots for the standard form: i < j and
/// j <= dim-1-i, one per root (dim^2/4 of them).
std::vector<std::pair<std::size_t, std::size_t>> sp_positive_roots(std::size_t dim);

/// 1 + tX where X has its (i, j) entry equal to 1 and, unless j = dim-1-i,
/// a partner entry at (dim-1-j, dim-1-i) with the sign making 1 + tX
/// preserve the standard form.
Matrix sp_root_element(const Field& f, std::size_t dim, std::size_t i, std::size_t j, Elem t);

}  // namespace upieces
