#include "upieces/counting.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <limits>
#include <set>

#include "upieces/errors.hpp"

namespace upieces {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

std::int64_t to_int64(const cpp_int& v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw RangeError(std::string(what) + " does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

void trim(std::vector<std::int64_t>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

cpp_int ipow(std::int64_t b, std::size_t e) {
  cpp_int r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

IntPolynomial IntPolynomial::constant(std::int64_t c) {
  IntPolynomial p{{c}};
  trim(p.coefficients);
  return p;
}

IntPolynomial IntPolynomial::monomial(std::int64_t c, std::size_t degree) {
  IntPolynomial p{std::vector<std::int64_t>(degree + 1, 0)};
  p.coefficients[degree] = c;
  trim(p.coefficients);
  return p;
}

std::int64_t IntPolynomial::evaluate(std::int64_t q) const {
  cpp_int acc = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * q + *it;
  return to_int64(acc, "polynomial value");
}

std::string IntPolynomial::to_string() const {
  if (coefficients.empty()) return "0";
  std::string out;
  for (int d = degree(); d >= 0; --d) {
    const std::int64_t c = coefficients[static_cast<std::size_t>(d)];
    if (c == 0) continue;
    const std::int64_t mag = c < 0 ? -c : c;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (mag != 1 || d == 0) out += std::to_string(mag);
    if (d >= 1) out += "q";
    if (d >= 2) out += "^" + std::to_string(d);
  }
  return out;
}

IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
  IntPolynomial r{std::vector<std::int64_t>(std::max(a.coefficients.size(), b.coefficients.size()), 0)};
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) r.coefficients[i] += a.coefficients[i];
  for (std::size_t i = 0; i < b.coefficients.size(); ++i) r.coefficients[i] += b.coefficients[i];
  trim(r.coefficients);
  return r;
}

IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
  IntPolynomial neg = b;
  for (auto& c : neg.coefficients) c = -c;
  return a + neg;
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<cpp_int> acc(a.coefficients.size() + b.coefficients.size() - 1, 0);
  for (std::size_t i = 0; i < a.coefficients.size(); ++i)
    for (std::size_t j = 0; j < b.coefficients.size(); ++j)
      acc[i + j] += cpp_int(a.coefficients[i]) * b.coefficients[j];
  IntPolynomial r;
  for (const auto& c : acc) r.coefficients.push_back(to_int64(c, "polynomial coefficient"));
  trim(r.coefficients);
  return r;
}

IntPolynomial exact_divide(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw InvalidInput("division by the zero polynomial");
  std::vector<cpp_int> rem(a.coefficients.begin(), a.coefficients.end());
  const int db = b.degree();
  const std::int64_t lead = b.coefficients.back();
  IntPolynomial q{std::vector<std::int64_t>(a.degree() >= db ? a.degree() - db + 1 : 0, 0)};
  for (int d = a.degree(); d >= db; --d) {
    const cpp_int top = rem[static_cast<std::size_t>(d)];
    if (top == 0) continue;
    if (top % lead != 0) throw NonIntegralFit("quotient has a non-integer coefficient");
    const cpp_int c = top / lead;
    q.coefficients[static_cast<std::size_t>(d - db)] = to_int64(c, "quotient coefficient");
    for (int k = 0; k <= db; ++k) rem[static_cast<std::size_t>(d - db + k)] -= c * b.coefficients[static_cast<std::size_t>(k)];
  }
  for (const auto& r : rem)
    if (r != 0) throw NonIntegralFit("polynomial division leaves a remainder");
  trim(q.coefficients);
  return q;
}

std::int64_t gaussian_count(int d, int dp, std::int64_t q) {
  if (d < 0 || dp < 0 || dp > d) {
    throw RangeError("need 0 <= d' <= d, got d = " + std::to_string(d) + ", d' = " + std::to_string(dp));
  }
  if (q < 2) throw RangeError("q must be at least 2");
  cpp_int num = 1;
  cpp_int den = 1;
  for (int i = 0; i < dp; ++i) {
    num *= ipow(q, static_cast<std::size_t>(d - i)) - 1;
    den *= ipow(q, static_cast<std::size_t>(i + 1)) - 1;
  }
  ensure(num % den == 0, "Gaussian binomial is not an integer");
  return to_int64(num / den, "Gaussian binomial");
}

std::int64_t count_sym_nondeg(int d, std::int64_t q) {
  if (d < 0) throw RangeError("d must be nonnegative");
  std::vector<cpp_int> f(static_cast<std::size_t>(d) + 1);
  f[0] = 1;
  for (int n = 1; n <= d; ++n) {
    cpp_int v = ipow(q, static_cast<std::size_t>(n * (n + 1) / 2));
    for (int k = 1; k <= n; ++k) v -= cpp_int(gaussian_count(n, k, q)) * f[static_cast<std::size_t>(n - k)];
    f[static_cast<std::size_t>(n)] = v;
  }
  return to_int64(f[static_cast<std::size_t>(d)], "f(d, q)");
}

IntPolynomial interpolate_int(const std::vector<std::pair<std::int64_t, std::int64_t>>& points) {
  std::set<std::int64_t> xs;
  for (const auto& [x, y] : points) {
    if (!xs.insert(x).second) throw InvalidInput("repeated interpolation node " + std::to_string(x));
  }
  const std::size_t n = points.size();
  std::vector<cpp_rational> coeffs(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    // Basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j).
    std::vector<cpp_rational> basis{1};
    cpp_rational denom = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<cpp_rational> next(basis.size() + 1, 0);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        next[k + 1] += basis[k];
        next[k] -= basis[k] * points[j].first;
      }
      basis = std::move(next);
      denom *= points[i].first - points[j].first;
    }
    for (std::size_t k = 0; k < basis.size(); ++k) coeffs[k] += basis[k] * points[i].second / denom;
  }
  IntPolynomial out;
  for (const auto& c : coeffs) {
    if (denominator(c) != 1) {
      throw NonIntegralFit("interpolating polynomial has the coefficient " + c.str());
    }
    out.coefficients.push_back(to_int64(numerator(c), "interpolated coefficient"));
  }
  trim(out.coefficients);
  return out;
}

bool fit_is_stable(const std::vector<std::pair<std::int64_t, std::int64_t>>& points) {
  try {
    const IntPolynomial full = interpolate_int(points);
    for (std::size_t drop = 0; drop < points.size(); ++drop) {
      auto fewer = points;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(drop));
      if (!(interpolate_int(fewer) == full)) return false;
    }
    return true;
  } catch (const NonIntegralFit&) {
    return false;
  }
}

IntPolynomial gl_order_polynomial(std::size_t n) {
  IntPolynomial p = IntPolynomial::monomial(1, n == 0 ? 0 : n * (n - 1) / 2);
  for (std::size_t i = 1; i <= n; ++i) p = p * (IntPolynomial::monomial(1, i) - IntPolynomial::constant(1));
  return p;
}

IntPolynomial sp_order_polynomial(std::size_t dim) {
  if (dim % 2 != 0) throw OddDimension("Sp needs an even dimension");
  const std::size_t m = dim / 2;
  IntPolynomial p = IntPolynomial::monomial(1, m * m);
  for (std::size_t i = 1; i <= m; ++i) p = p * (IntPolynomial::monomial(1, 2 * i) - IntPolynomial::constant(1));
  return p;
}

IntPolynomial group_order_polynomial(const GroupSpec& spec) {
  return spec.family == Family::GL ? gl_order_polynomial(spec.dim) : sp_order_polynomial(spec.dim);
}

std::uint64_t group_order(const GroupSpec& spec) {
  spec.validate();
  return static_cast<std::uint64_t>(group_order_polynomial(spec).evaluate(spec.q));
}

std::size_t filtered_subgroup_dim(Family family, const std::map<int, int>& gr_dims, int k) {
  if (k < 1) throw RangeError("filtered subgroups are unipotent for k >= 1 only");
  std::size_t pairs = 0;
  for (const auto& [a, ga] : gr_dims)
    for (const auto& [b, gb] : gr_dims)
      if (b - a >= k) pairs += static_cast<std::size_t>(ga) * static_cast<std::size_t>(gb);
  if (family == Family::GL) return pairs;
  // Maps gr_a -> gr_b pair up with gr_{-b} -> gr_{-a}; for b = -a the
  // self-paired block contributes g_b (g_b + 1) / 2.
  std::size_t twice = pairs;
  for (const auto& [b, gb] : gr_dims)
    if (2 * b >= k) twice += static_cast<std::size_t>(gb);
  ensure(twice % 2 == 0, "odd count of filtered coordinates");
  return twice / 2;
}

IntPolynomial stabilizer_order_polynomial(Family family, const std::map<int, int>& gr_dims) {
  IntPolynomial levi = IntPolynomial::constant(1);
  for (const auto& [a, ga] : gr_dims) {
    if (ga == 0) continue;
    const auto g = static_cast<std::size_t>(ga);
    if (family == Family::GL || a > 0) {
      levi = levi * gl_order_polynomial(g);
    } else if (a == 0) {
      levi = levi * sp_order_polynomial(g);
    }
  }
  return levi * IntPolynomial::monomial(1, filtered_subgroup_dim(family, gr_dims, 1));
}

bool CountReport::ok() const {
  for (const auto& p : pieces)
    if (!p.ok) return false;
  for (const auto& [q, t] : totals)
    if (t.first != t.second) return false;
  return !pieces.empty();
}

CountReport piece_count_polynomials(Family family, std::size_t dim, const std::vector<int>& qs,
                                    unsigned jobs) {
  CountReport report{family, dim, qs, {}, {}};
  std::map<Partition, PieceCount> by_lambda;
  for (int q : qs) {
    const GroupSpec spec{family, dim, q};
    VerifyOptions options;
    options.jobs = jobs;
    options.sample = 0;
    options.label_all = false;
    const ClassReport r = verify_pieces(spec, options);
    std::uint64_t sum = 0;
    for (const auto& rec : r.labels) {
      PieceCount& pc = by_lambda[rec.label.lambda];
      pc.lambda = rec.label.lambda;
      pc.counts[q] += rec.count;
      sum += rec.count;
    }
    report.totals[q] = {sum, r.expected_total};
  }

  const IntPolynomial g_poly = group_order_polynomial(GroupSpec{family, dim, 2});
  for (auto& [lambda, pc] : by_lambda) {
    const auto dims = graded_dims(lambda);
    const IntPolynomial p_poly = stabilizer_order_polynomial(family, dims);
    const std::size_t g3 = filtered_subgroup_dim(family, dims, 3);
    // |H| = |G/G_0| q^{dim G_3} |E|.
    const IntPolynomial factor = exact_divide(g_poly, p_poly) * IntPolynomial::monomial(1, g3);
    std::vector<std::pair<std::int64_t, std::int64_t>> points;
    bool integral = true;
    for (const auto& [q, count] : pc.counts) {
      const cpp_int num = cpp_int(count);
      const cpp_int den = cpp_int(factor.evaluate(q));
      if (num % den != 0) {
        integral = false;
        pc.diagnostic = "count at q = " + std::to_string(q) + " is not divisible by |G/G_0| q^{dim G_3}";
        continue;
      }
      pc.reduced[q] = to_int64(num / den, "reduced count");
      points.emplace_back(q, pc.reduced[q]);
    }
    if (!integral) continue;
    try {
      pc.reduced_poly = interpolate_int(points);
    } catch (const NonIntegralFit& e) {
      pc.diagnostic = std::string(e.what()) +
                      " (polynomiality is expected only when q - 1 is sufficiently divisible)";
      continue;
    }
    pc.stable = fit_is_stable(points);
    pc.poly = factor * *pc.reduced_poly;
    bool reproduces = true;
    for (const auto& [q, count] : pc.counts)
      reproduces = reproduces && pc.poly->evaluate(q) == static_cast<std::int64_t>(count);
    pc.ok = pc.stable && reproduces;
    if (!pc.stable) pc.diagnostic = "fit changes when a single point is dropped";
    if (!reproduces) pc.diagnostic = "fitted polynomial does not reproduce the counts";
  }
  for (auto& [lambda, pc] : by_lambda) report.pieces.push_back(std::move(pc));
  return report;
}

ProductFormulaReport verify_product_formula(const Partition& lambda, const ClassReport& report) {
  ProductFormulaReport out;
  out.spec = report.spec;
  out.lambda = lambda;
  const auto dims = graded_dims(lambda);
  for (int n : invariant_set_I(lambda)) {
    const int lo = dims.count(-n) ? dims.at(-n) : 0;
    const int hi = dims.count(-n - 2) ? dims.at(-n - 2) : 0;
    out.c[n] = lo - hi;
  }
  for (const auto& rec : report.labels)
    if (rec.label.lambda == lambda) out.fibers[rec.label.J] = rec.count;
  if (out.fibers.empty()) {
    out.diagnostic = "no admissible label with this partition";
    return out;
  }
  const std::uint64_t base = out.fibers.begin()->first.empty() ? out.fibers.begin()->second : 0;
  if (base == 0) {
    out.diagnostic = "the fiber J = {} is empty";
    return out;
  }
  out.ok = true;
  for (const auto& [j, count] : out.fibers) {
    cpp_int ratio = 1;
    for (int n : j) ratio *= ipow(report.spec.q, static_cast<std::size_t>(out.c.at(n))) - 1;
    if (cpp_int(count) != ratio * base) {
      out.ok = false;
      out.diagnostic = "fiber size ratio differs from prod (q^{c_n} - 1)";
    }
  }
  return out;
}

ProductFormulaReport verify_product_formula(const PieceLabel& label, const GroupSpec& spec) {
  VerifyOptions options;
  options.sample = 0;
  options.label_all = false;
  return verify_product_formula(label.lambda, verify_pieces(spec, options));
}

}  // namespace upieces
