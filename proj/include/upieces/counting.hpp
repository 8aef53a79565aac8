#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "upieces/pieces.hpp"

namespace upieces {

/// Integer polynomial in q, constant term first, no trailing zeros.
struct IntPolynomial {
  std::vector<std::int64_t> coefficients;

  static IntPolynomial constant(std::int64_t c);
  static IntPolynomial monomial(std::int64_t c, std::size_t degree);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  bool is_zero() const { return coefficients.empty(); }
  /// Throws RangeError if the value leaves the int64 range.
  std::int64_t evaluate(std::int64_t q) const;
  /// e.g. "q^3 - q^2".
  std::string to_string() const;

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;
  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
};

/// Exact quotient; throws NonIntegralFit when b does not divide a over Z.
IntPolynomial exact_divide(const IntPolynomial& a, const IntPolynomial& b);

/// Number of dp-dimensional subspaces of F_q^d. Throws RangeError unless
/// 0 <= dp <= d.
std::int64_t gaussian_count(int d, int dp, std::int64_t q);

/// f(d, q) = q^{d(d+1)/2} - sum_{d'=1..d} g(d, d', q) f(d - d', q): the number
/// of nondegenerate symmetric d x d matrices over F_q.
std::int64_t count_sym_nondeg(int d, std::int64_t q);

/// The interpolating polynomial of minimal degree, computed over the
/// rationals. Throws InvalidInput on repeated q and NonIntegralFit when a
/// coefficient is not an integer.
IntPolynomial interpolate_int(const std::vector<std::pair<std::int64_t, std::int64_t>>& points);

/// The fit is integral and unchanged when any single point is dropped.
bool fit_is_stable(const std::vector<std::pair<std::int64_t, std::int64_t>>& points);

/// |GL_n(F_q)| and |Sp_2m(F_q)| as polynomials in q.
IntPolynomial gl_order_polynomial(std::size_t n);
IntPolynomial sp_order_polynomial(std::size_t dim);
IntPolynomial group_order_polynomial(const GroupSpec& spec);
std::uint64_t group_order(const GroupSpec& spec);

/// dim of G^lambda_k = (1 + E_{>=k}) in G, for k >= 1, from graded dims.
std::size_t filtered_subgroup_dim(Family family, const std::map<int, int>& gr_dims, int k);
/// |G^lambda_0(F_q)|, the stabilizer of the filtration: Levi times q^{dim G_1}.
/// The Levi is prod GL(g_a) for GL and Sp(g_0) x prod_{a>0} GL(g_a) for Sp.
IntPolynomial stabilizer_order_polynomial(Family family, const std::map<int, int>& gr_dims);

struct PieceCount {
  Partition lambda;
  std::map<int, std::uint64_t> counts;   // q -> |H^lambda(F_q)|
  /// q -> |H| |G_0| / (|G| q^{dim G_3}), the count of the graded part.
  std::map<int, std::int64_t> reduced;
  std::optional<IntPolynomial> reduced_poly;
  std::optional<IntPolynomial> poly;     // |H^lambda| as a polynomial in q
  bool stable = false;
  bool ok = false;
  std::string diagnostic;
};

struct CountReport {
  Family family = Family::Sp;
  std::size_t dim = 0;
  std::vector<int> qs;
  std::vector<PieceCount> pieces;  // sorted by lambda
  /// q -> (sum of piece counts, q^{2 N+}).
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> totals;
  bool ok() const;
};

/// Enumerates the group at every q, sums the J-fibers of each piece, divides
/// out the structural factor and fits the quotient exactly.
CountReport piece_count_polynomials(Family family, std::size_t dim, const std::vector<int>& qs,
                                    unsigned jobs = 1);

struct ProductFormulaReport {
  GroupSpec spec;
  Partition lambda;
  std::map<int, int> c;                      // c_n for n in I
  std::map<std::set<int>, std::uint64_t> fibers;  // J -> count
  bool ok = false;
  std::string diagnostic;
};

/// Inside one piece, |fiber J| = prod_{n in J} (q^{c_n} - 1) |fiber {}|.
ProductFormulaReport verify_product_formula(const Partition& lambda, const ClassReport& report);
ProductFormulaReport verify_product_formula(const PieceLabel& label, const GroupSpec& spec);

}  // namespace upieces
