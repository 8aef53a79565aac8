#pragma once

#include <map>
#include <optional>
#include <set>

#include "upieces/symplectic.hpp"

namespace upieces {

/// A quadratic form on a space with a chosen basis, stored by its values on
/// the basis and the Gram matrix of its polarization.
struct QuadraticForm {
  Field field;
  /// Basis of the domain in the coordinates of the ambient graded piece.
  std::vector<Vector> domain_basis;
  Vector basis_values;
  Matrix polar;

  std::size_t dim() const { return domain_basis.size(); }
  /// Q(sum a_i x_i) = sum a_i^2 Q(x_i) + sum_{i<j} a_i a_j polar(i, j).
  Elem evaluate(std::span<const Elem> coeffs) const;
};

struct LSets {
  /// Even n in [2, e+2]; beyond that window every condition holds vacuously.
  std::set<int> L;
  std::set<int> Lprime;
  int nn = 0;  // smallest element of Lprime
};

struct SplittingInvariant {
  std::set<int> L;
  std::set<int> Lprime;
  std::optional<int> nn;  // characteristic 2 only
  std::set<int> I;
  std::set<int> J;
  std::map<int, int> c;
};

/// Throws CharMismatch in odd characteristic and NotMMember.
LSets sets_L(const Matrix& n, const SymplecticSpace& s);
LSets sets_L(const GradedSymplecticData& d);

/// q_n on P_{-n} via lifts in the chosen splitting. Lift independence is
/// certified; a failure raises InternalError. Throws NotInL.
QuadraticForm qform_qn(const Matrix& n, const SymplecticSpace& s, int k);
QuadraticForm qform_qn(const Matrix& n, const SymplecticSpace& s, const GradedSymplecticData& d,
                       const LSets& l, int k);

/// Q_n on gr_{-n}, with its polarization identity, representative
/// independence and its decomposition through the q_{n+2k} asserted.
/// Throws NotInLprime.
QuadraticForm qform_Qn(const Matrix& n, const SymplecticSpace& s, int k);
QuadraticForm qform_Qn(const Matrix& n, const SymplecticSpace& s, const GradedSymplecticData& d,
                       const LSets& l, int k);

/// I, J, c and (in characteristic 2) the L sets. Throws NotMMember.
SplittingInvariant splitting_invariant(const Matrix& n, const SymplecticSpace& s);
SplittingInvariant splitting_invariant(const GradedSymplecticData& d);

/// Odd n with c_n = dim gr_{-n} - dim gr_{-n-2} positive and even, from graded
/// dimensions alone.
std::set<int> odd_invariant_set(const std::map<int, int>& gr_dims);

}  // namespace upieces
