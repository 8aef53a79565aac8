// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
//
// Usage: acceptance <path to upieces CLI> <golden file> [criterion ...]
#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "support/oracles.hpp"
#include "support/random.hpp"
#include "upieces/counting.hpp"
#include "upieces/errors.hpp"

namespace {

using namespace upieces;
namespace t = upieces::testing;

struct Outcome {
  bool pass = true;
  std::string detail;  // counts on success, the first violation on failure
};

/// Records the first violation; later ones only bump the counter.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    std::lock_guard lock(mutex_);
    if (failures_++ == 0) first_ = what;
  }
  std::uint64_t checks() const { return checks_; }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary + ", " + std::to_string(checks_) + " checks"};
    return {false, std::to_string(failures_) + " violations; first: " + first_};
  }

 private:
  std::atomic<std::uint64_t> checks_{0};
  std::uint64_t failures_ = 0;
  std::string first_;
  std::mutex mutex_;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// fn(i) for i in [0, n) over all cores; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned w = workers();
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex m;
  for (unsigned k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string rows_text(const Matrix& m) {
  std::string s;
  for (const auto& r : m.to_rows()) {
    s += "[";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
    s += "]";
  }
  return s;
}

std::string parts_text(const std::vector<int>& parts) {
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + std::to_string(parts[i]);
  return s + ")";
}

std::string set_text(const std::set<int>& xs) {
  std::string s = "{";
  for (int x : xs) s += (s.size() > 1 ? "," : "") + std::to_string(x);
  return s + "}";
}

std::uint64_t ipow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

/// Number of unipotents, q^(2 N+), with N+ counted from the root system.
std::uint64_t unipotent_count(const GroupSpec& spec) {
  const std::uint64_t n = spec.dim;
  const std::uint64_t roots = spec.family == Family::GL ? n * (n - 1) / 2 : (n / 2) * (n / 2);
  return ipow(static_cast<std::uint64_t>(spec.q), 2 * roots);
}

// ---------------------------------------------------------------------------
// Partition and graded-dimension oracles, independent of the library.

void partitions_rec(int rest, int cap, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (rest == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(rest, cap); p >= 1; --p) {
    cur.push_back(p);
    partitions_rec(rest - p, p, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions_rec(n, n, cur, out);
  return out;
}

bool symplectic_type(const std::vector<int>& parts) {
  std::map<int, int> mult;
  for (int p : parts) ++mult[p];
  for (const auto& [p, m] : mult)
    if (p % 2 == 1 && m % 2 == 1) return false;
  return true;
}

/// A Jordan block of size j spreads over degrees 1-j, 3-j, ..., j-1.
std::map<int, int> block_degrees(const std::vector<int>& parts) {
  std::map<int, int> dims;
  for (int j : parts)
    for (int a = 1 - j; a <= j - 1; a += 2) ++dims[a];
  return dims;
}

int dim_at(const std::map<int, int>& dims, int a) {
  const auto it = dims.find(a);
  return it == dims.end() ? 0 : it->second;
}

/// Odd n with dim gr_{-n} - dim gr_{-n-2} positive and even, and those
/// differences.
std::map<int, int> odd_jumps(const std::vector<int>& parts) {
  const auto dims = block_degrees(parts);
  std::map<int, int> out;
  for (int n = 1; n <= parts.front(); n += 2) {
    const int c = dim_at(dims, -n) - dim_at(dims, -n - 2);
    if (c > 0 && c % 2 == 0) out[n] = c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1-4: filtrations and solvers.

/// Jordan representatives of every nilpotent class in dims 1..6 plus random
/// conjugates, over F_2, F_3, F_4.
template <class Fn>
void filtration_corpus(std::uint64_t seed, int conjugates, Fn&& fn) {
  std::mt19937_64 rng(seed);
  for (int q : {2, 3, 4}) {
    const Field f = Field::make(q);
    for (int n = 1; n <= 6; ++n) {
      for (const auto& parts : all_partitions(n)) {
        const Matrix j = t::jordan_matrix(f, parts);
        fn(j, parts);
        for (int k = 0; k < conjugates; ++k) fn(t::conjugate(t::random_invertible(rng, f, n), j), parts);
      }
    }
  }
}

Outcome criterion_1() {
  Verdict v;
  filtration_corpus(101, 100, [&](const Matrix& n, const std::vector<int>&) {
    v.require(dk_filtration(n) == t::basis_rule_filtration(n), "kernel-sum filtration differs for " + rows_text(n));
  });
  return v.outcome("dims 1-6, q in {2,3,4}, 100 conjugates per class");
}

Outcome criterion_2() {
  Verdict v;
  filtration_corpus(102, 100, [&](const Matrix& n, const std::vector<int>& parts) {
    const GradedSpace g = graded_space(n);
    std::map<int, int> mult;
    for (int p : parts) ++mult[p];
    for (int c = g.min_degree(); c <= 0; ++c) {
      const int j = 1 - c;
      v.require(static_cast<int>(g.primitive.at(c).dim()) == (mult.count(j) ? mult[j] : 0),
                "dim P_" + std::to_string(c) + " is not the multiplicity of " + std::to_string(j));
      v.require(g.primitive.at(c).dim() == g.gr_dim(c) - g.gr_dim(c - 2),
                "dim P_" + std::to_string(c) + " is not a difference of graded dims");
    }
  });
  return v.outcome("same corpus");
}

Outcome criterion_3() {
  Verdict v;
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 500; ++trial) {
    const Field f = Field::make(std::array{2, 3, 4}[trial % 3]);
    const Matrix n = t::random_nilpotent(rng, f, 1 + trial % 6);
    const Filtration base = dk_filtration(n);
    const GradedSpace g = graded_space(n);
    const Matrix s = t::random_filtered(rng, g, 3);
    v.require(dk_filtration(n + s) == base, "E_{>=3} perturbation moved the filtration of " + rows_text(n));
    Elem c1 = t::random_elem(rng, f);
    if (c1 == 0) c1 = 1;
    const Matrix poly = n.scaled(c1) + (n * n).scaled(t::random_elem(rng, f));
    v.require(dk_filtration(poly) == base, "c1 N + c2 N^2 moved the filtration of " + rows_text(n));
  }
  return v.outcome("500 random E_{>=3} and polynomial perturbations");
}

Outcome criterion_4() {
  Verdict v;
  const Field f2 = Field::make(2);
  // Exhaustive over dim <= 4 at q = 2: every homogeneous right-hand side for
  // the commutator equation and every S in E_{>=3} for straightening.
  for (int n = 1; n <= 4; ++n) {
    for (const auto& parts : all_partitions(n)) {
      const Matrix nil = t::jordan_matrix(f2, parts);
      const GradedSpace g = graded_space(nil);
      const Matrix one = Matrix::identity(f2, g.dim);
      for (int j = 0; j <= 2 * g.e; ++j) {
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t r = 0; r < g.dim; ++r)
          for (std::size_t c = 0; c < g.dim; ++c)
            if (g.degrees[r] - g.degrees[c] == j + 2) slots.emplace_back(r, c);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << slots.size()); ++bits) {
          Matrix r(f2, g.dim, g.dim);
          for (std::size_t i = 0; i < slots.size(); ++i) r(slots[i].first, slots[i].second) = (bits >> i) & 1;
          const Matrix sol = commutator_solve(g, r, j);
          v.require(sol * g.nu - g.nu * sol == r, "commutator residual for " + parts_text(parts));
        }
      }
      std::vector<std::pair<std::size_t, std::size_t>> slots;
      for (std::size_t r = 0; r < g.dim; ++r)
        for (std::size_t c = 0; c < g.dim; ++c)
          if (g.degrees[r] - g.degrees[c] >= 3) slots.emplace_back(r, c);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << slots.size()); ++bits) {
        Matrix sg(f2, g.dim, g.dim);
        for (std::size_t i = 0; i < slots.size(); ++i) sg(slots[i].first, slots[i].second) = (bits >> i) & 1;
        const Matrix s = g.from_graded(sg);
        const Matrix tt = straighten(nil, s);
        v.require((one + tt) * nil == (nil + s) * (one + tt), "straighten residual for " + parts_text(parts));
      }
    }
  }
  std::mt19937_64 rng(104);
  for (int trial = 0; trial < 1000; ++trial) {
    const Field f = Field::make(std::array{2, 3, 4, 5}[trial % 4]);
    const std::size_t dim = 5 + trial % 4;
    const Matrix n = t::random_nilpotent(rng, f, static_cast<int>(dim));
    const GradedSpace g = graded_space(n, &rng);
    const int j = static_cast<int>(rng() % 5);
    Matrix r(f, dim, dim);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        if (g.degrees[a] - g.degrees[b] == j + 2) r(a, b) = t::random_elem(rng, f);
    const Matrix sol = commutator_solve(g, r, j);
    v.require(sol * g.nu - g.nu * sol == r, "random commutator residual");
    const Matrix s = t::random_filtered(rng, g, 3);
    const Matrix tt = straighten(n, s);
    const Matrix one = Matrix::identity(f, dim);
    v.require((one + tt) * n == (n + s) * (one + tt), "random straighten residual");
  }
  return v.outcome("exhaustive dim <= 4 over F_2 plus 1000 random dims 5-8");
}

// ---------------------------------------------------------------------------
// 5-7: exhaustive symplectic checks.

struct Corpus {
  GroupSpec spec;
  std::vector<std::uint64_t> keys;
};

const Corpus& corpus(const GroupSpec& spec) {
  static std::map<std::string, Corpus> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(spec.name());
  if (it == cache.end()) it = cache.emplace(spec.name(), Corpus{spec, enumerate_unipotents(spec)}).first;
  return it->second;
}

template <class Fn>
void for_each_unipotent(const GroupSpec& spec, Fn&& fn) {
  const Corpus& c = corpus(spec);
  const MatrixCodec codec(spec.field(), spec.dim);
  parallel_for(c.keys.size(), [&](std::size_t i) { fn(i, codec.decode(c.keys[i])); });
}

/// <x, y> under the original form, for graded-coordinate vectors.
Elem graded_pair(const SymplecticSpace& s, const GradedSpace& g, const Vector& x, const Vector& y) {
  return bilinear(s.gram, g.basis.apply(x), g.basis.apply(y));
}

Outcome criteria_5_6(bool forms) {
  Verdict v;
  const std::vector<GroupSpec> groups{{Family::Sp, 4, 2}, {Family::Sp, 6, 2}, {Family::Sp, 4, 3}};
  std::uint64_t elements = 0;
  for (const GroupSpec& spec : groups) {
    const SymplecticSpace s = standard_symplectic(spec.dim, spec.q);
    const Field& f = s.field;
    const Matrix one = Matrix::identity(f, spec.dim);
    v.require(corpus(spec).keys.size() == unipotent_count(spec), spec.name() + " unipotent count");
    elements += corpus(spec).keys.size();
    for_each_unipotent(spec, [&](std::size_t, const Matrix& u) {
      const Matrix n = u - one;
      if (!forms) {
        const Filtration fil = dk_filtration(n);
        for (int a = fil.lo() - 1; a <= fil.hi() + 1; ++a) {
          v.require(perp(fil.at(a), s.gram) == fil.at(1 - a),
                    "V_{>=" + std::to_string(a) + "} perp differs for " + rows_text(u));
        }
        return;
      }
      const GradedSpace g = graded_space(n);
      for (int k = 0; k <= g.max_degree(); ++k) {
        const auto basis = g.primitive.at(-k).basis_vectors();
        const std::size_t d = basis.size();
        const Matrix nuk = g.nu.pow(static_cast<unsigned>(k));
        Matrix b(f, d, d);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            b(i, j) = graded_pair(s, g, g.embed(-k, basis[i]), nuk.apply(g.embed(-k, basis[j])));
        const std::string at = " (n=" + std::to_string(k) + ") for " + rows_text(u);
        v.require(rank(b) == d, "b_n degenerate" + at);
        const Matrix sign = k % 2 ? b : Matrix(f, d, d) - b;
        v.require(b.transpose() == sign, "b_n has the wrong symmetry" + at);
        if (k % 2 == 0) {
          v.require(d % 2 == 0, "dim P_{-n} odd for even n" + at);
          if (f.p() == 2) {
            bool alternating = true;
            for (std::size_t i = 0; i < d; ++i) alternating = alternating && b(i, i) == 0;
            v.require(alternating, "b_n not alternating for even n" + at);
          }
        }
      }
    });
  }
  return v.outcome(std::to_string(elements) + " unipotents of Sp_4(F_2), Sp_6(F_2), Sp_4(F_3)");
}

Outcome criterion_5() { return criteria_5_6(false); }
Outcome criterion_6() { return criteria_5_6(true); }

/// Random element of a subspace.
Vector random_in(std::mt19937_64& rng, const Subspace& w) {
  const Field& f = w.field();
  Vector x(w.ambient_dim(), 0);
  for (const auto& b : w.basis_vectors()) x = vec_add(f, x, vec_scale(f, t::random_elem(rng, f), b));
  return x;
}

Outcome criterion_7() {
  Verdict v;
  std::uint64_t elements = 0;
  for (std::size_t dim : {4u, 6u}) {
    const GroupSpec spec{Family::Sp, dim, 2};
    const SymplecticSpace s = standard_symplectic(dim, 2);
    const Field& f = s.field;
    const Matrix one = Matrix::identity(f, dim);
    elements += corpus(spec).keys.size();
    for_each_unipotent(spec, [&](std::size_t index, const Matrix& u) {
      std::mt19937_64 rng(index * 7919 + dim);
      const Matrix n = u - one;
      const GradedSymplecticData d = graded_symplectic(n, s);
      const GradedSpace& g = d.graded;
      const LSets l = sets_L(d);
      const std::string who = " for " + rows_text(u);
      // <x, N^(k-1) x> for x in original coordinates.
      auto direct = [&](int k, const Vector& x) {
        return bilinear(s.gram, x, n.pow(static_cast<unsigned>(k - 1)).apply(x));
      };
      // Graded pairing <x, nu^k y>_0 from the original form.
      auto polar = [&](int k, const Vector& x, const Vector& y) {
        return graded_pair(s, g, g.embed(-k, x), g.nu.pow(static_cast<unsigned>(k)).apply(g.embed(-k, y)));
      };
      auto combine = [&](const std::vector<Vector>& basis, const Vector& c, std::size_t len) {
        Vector x(len, 0);
        for (std::size_t i = 0; i < basis.size(); ++i) x = vec_add(f, x, vec_scale(f, c[i], basis[i]));
        return x;
      };
      // A lift of a primitive x in gr_{-k}: in V_{>=-k}, killed by N^(k+1).
      auto q_direct = [&](int k, const Vector& x, bool shift) {
        Vector lift = g.basis.apply(g.embed(-k, x));
        if (shift) {
          const Subspace other = subspace_meet(g.filtration.at(1 - k), kernel(n.pow(static_cast<unsigned>(k + 1))));
          lift = vec_add(f, lift, random_in(rng, other));
        }
        v.require(g.filtration.at(-k).contains(lift), "lift leaves V_{>=-n}" + who);
        const Vector killed = n.pow(static_cast<unsigned>(k + 1)).apply(lift);
        v.require(std::all_of(killed.begin(), killed.end(), [](Elem e) { return e == 0; }),
                  "lift is not killed by N^(n+1)" + who);
        return direct(k, lift);
      };

      for (int k : l.L) {
        const QuadraticForm qn = qform_qn(n, s, d, l, k);
        const std::size_t gd = g.gr_dim(-k);
        for (int trial = 0; trial < 4 && qn.dim() > 0; ++trial) {
          const Vector a = t::random_vector(rng, f, qn.dim());
          const Vector b = t::random_vector(rng, f, qn.dim());
          const Vector x = combine(qn.domain_basis, a, gd);
          const Vector y = combine(qn.domain_basis, b, gd);
          const Elem qx = q_direct(k, x, false);
          v.require(q_direct(k, x, true) == qx, "q_n depends on the lift" + who);
          v.require(qn.evaluate(a) == qx, "stored q_n differs from the lift value" + who);
          const Elem qy = q_direct(k, y, true);
          v.require(q_direct(k, vec_add(f, x, y), true) == f.add(f.add(qx, qy), polar(k, x, y)),
                    "q_n polarization" + who);
        }
      }
      for (int k : l.Lprime) {
        const QuadraticForm qf = qform_Qn(n, s, d, l, k);
        const std::size_t gd = g.gr_dim(-k);
        if (gd == 0) continue;
        auto rep = [&](const Vector& x) {
          return vec_add(f, g.basis.apply(g.embed(-k, x)), random_in(rng, g.filtration.at(1 - k)));
        };
        for (int trial = 0; trial < 4; ++trial) {
          const Vector a = t::random_vector(rng, f, qf.dim());
          const Vector b = t::random_vector(rng, f, qf.dim());
          const Vector x = combine(qf.domain_basis, a, gd);
          const Vector y = combine(qf.domain_basis, b, gd);
          const Elem qx = direct(k, rep(x));
          v.require(direct(k, rep(x)) == qx, "Q_n depends on the representative" + who);
          v.require(qf.evaluate(a) == qx, "stored Q_n differs from the representative value" + who);
          v.require(direct(k, rep(vec_add(f, x, y))) == f.add(f.add(qx, direct(k, rep(y))), polar(k, x, y)),
                    "Q_n polarization" + who);
          // x = sum_m nu^m y_m with y_m primitive in gr_{-k-2m}.
          Vector z(gd, 0);
          Elem parts = 0;
          for (int m = 0; k + 2 * m <= g.max_degree(); ++m) {
            const int deg = k + 2 * m;
            const Vector ym = random_in(rng, g.primitive.at(-deg));
            z = vec_add(f, z, g.nu_power_block(-deg, static_cast<unsigned>(m)).apply(ym));
            parts = f.add(parts, q_direct(deg, ym, true));
          }
          v.require(direct(k, rep(z)) == parts, "Q_n does not split over primitive parts" + who);
        }
      }
    });
  }
  return v.outcome(std::to_string(elements) + " unipotents of Sp_4(F_2), Sp_6(F_2)");
}

// ---------------------------------------------------------------------------
// 8-10: labels, orbits, representatives.

Outcome criterion_8() {
  Verdict v;
  const std::vector<GroupSpec> groups{{Family::GL, 2, 2}, {Family::GL, 3, 2}, {Family::GL, 4, 2},
                                      {Family::GL, 2, 3}, {Family::GL, 3, 3}, {Family::Sp, 2, 2},
                                      {Family::Sp, 4, 2}, {Family::Sp, 6, 2}, {Family::Sp, 4, 3}};
  std::string sp4;
  for (const GroupSpec& spec : groups) {
    const auto& keys = corpus(spec).keys;
    v.require(keys.size() == unipotent_count(spec), spec.name() + ": wrong unipotent count");
    const auto admissible = admissible_labels(spec);
    const std::set<PieceLabel> allowed(admissible.begin(), admissible.end());
    std::vector<PieceLabel> labels(keys.size());
    for_each_unipotent(spec, [&](std::size_t i, const Matrix& u) { labels[i] = label_of(u, spec); });
    std::set<PieceLabel> seen;
    for (const auto& l : labels) {
      v.require(allowed.count(l) == 1, spec.name() + ": inadmissible label");
      seen.insert(l);
    }
    const OrbitPartition orbits = conjugacy_orbits(keys, spec);
    std::uint64_t covered = 0;
    for (const auto& orbit : orbits.orbits) {
      covered += orbit.size();
      for (std::uint32_t i : orbit)
        v.require(labels[i] == labels[orbit.front()], spec.name() + ": label varies on a conjugacy class");
    }
    v.require(covered == keys.size(), spec.name() + ": orbits do not cover the unipotents");
    if (spec.family == Family::Sp && spec.dim == 4 && spec.q == 2) {
      v.require(seen.size() == 5, "Sp_4(F_2) has " + std::to_string(seen.size()) + " labels, expected 5");
      v.require(orbits.orbits.size() == 6,
                "Sp_4(F_2) has " + std::to_string(orbits.orbits.size()) + " orbits, expected 6");
      sp4 = "Sp_4(F_2): " + std::to_string(seen.size()) + " labels, " + std::to_string(orbits.orbits.size()) + " orbits";
    }
  }
  return v.outcome(sp4 + "; 9 groups exhaustive");
}

Outcome criterion_9() {
  Verdict v;
  // Oracle: each symplectic partition contributes 2^|I| labels in
  // characteristic 2 and one label otherwise.
  auto oracle = [](int dim, bool char2) {
    std::size_t total = 0;
    for (const auto& parts : all_partitions(dim)) {
      if (!symplectic_type(parts)) continue;
      total += char2 ? std::size_t{1} << odd_jumps(parts).size() : 1;
    }
    return total;
  };
  const std::vector<std::pair<GroupSpec, std::size_t>> cases{
      {{Family::Sp, 4, 2}, 5}, {{Family::Sp, 4, 3}, 4}, {{Family::Sp, 6, 2}, oracle(6, true)}};
  v.require(oracle(4, true) == 5 && oracle(4, false) == 4, "partition oracle disagrees with the small cases");
  std::string summary;
  for (const auto& [spec, expected] : cases) {
    const auto labels = admissible_labels(spec);
    v.require(labels.size() == expected, spec.name() + ": " + std::to_string(labels.size()) +
                                             " labels, oracle " + std::to_string(expected));
    for (const auto& l : labels) {
      const Matrix u = canonical_representative(l, spec);
      v.require(label_of(u, spec) == l, spec.name() + ": representative of " + parts_text(l.lambda.parts) +
                                            set_text(l.J) + " has another label");
    }
    summary += (summary.empty() ? "" : ", ") + spec.name() + " " + std::to_string(labels.size());
  }
  return v.outcome(summary);
}

Outcome criterion_10() {
  Verdict v;
  std::size_t built = 0;
  for (int q : {2, 3}) {
    for (std::size_t dim = 2; dim <= (q == 2 ? 6u : 4u); dim += 2) {
      const GroupSpec spec{Family::Sp, dim, q};
      const SymplecticSpace s = standard_symplectic(dim, q);
      const Field& f = s.field;
      for (const auto& label : admissible_labels(spec)) {
        ++built;
        const std::string who = spec.name() + " " + parts_text(label.lambda.parts) + set_text(label.J);
        const ConstructedN c = construct_N_detailed(label, spec);
        const Matrix& n = c.n;
        const Matrix& tr = c.transport;
        const Matrix u = Matrix::identity(f, dim) + n;
        v.require(u.transpose() * s.gram * u == s.gram, who + ": 1 + N is not symplectic");
        v.require(tr.transpose() * s.gram * tr == c.model.gram0, who + ": transport does not carry the forms");
        // Target filtration: spans of transported coordinates of degree >= a.
        const auto& deg = c.model.degrees;
        std::vector<Subspace> steps;
        for (int a = deg.front(); a <= deg.back(); ++a) {
          std::vector<Vector> cols;
          for (std::size_t i = 0; i < dim; ++i)
            if (deg[i] >= a) cols.push_back(tr.column(i));
          steps.push_back(Subspace::span(f, dim, cols));
        }
        v.require(dk_filtration(n) == Filtration(f, dim, deg.front(), steps), who + ": filtration mismatch");
        // In model coordinates N has degree >= 2 with degree-2 part nu.
        const Matrix m = *inverse(tr) * n * tr;
        bool filtered = true, nu = true;
        for (std::size_t r = 0; r < dim; ++r) {
          for (std::size_t col = 0; col < dim; ++col) {
            const int shift = deg[r] - deg[col];
            if (shift < 2 && m(r, col) != 0) filtered = false;
            if (shift == 2 && m(r, col) != c.model.nu(r, col)) nu = false;
          }
        }
        v.require(filtered, who + ": N is not in E_{>=2}");
        v.require(nu, who + ": degree-2 part is not the model nu");
        if (q == 2 && c.target_q.dim() > 0) {
          const int nn = c.model.nn;
          const Matrix npow = n.pow(static_cast<unsigned>(nn - 1));
          const std::size_t off = c.model.offset(-nn);
          const std::size_t qd = c.target_q.dim();
          for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << qd); ++idx) {
            Vector coeffs(qd), model(dim, 0);
            for (std::size_t i = 0; i < qd; ++i) coeffs[i] = (idx >> i) & 1;
            for (std::size_t i = 0; i < qd; ++i)
              for (std::size_t k = 0; k < qd; ++k)
                model[off + k] = f.add(model[off + k], f.mul(coeffs[i], c.target_q.domain_basis[i][k]));
            const Vector x = tr.apply(model);
            v.require(bilinear(s.gram, x, npow.apply(x)) == c.target_q.evaluate(coeffs),
                      who + ": Q_nn differs from the prescribed form");
          }
        }
        v.require(sp_label(u, s) == label, who + ": label round trip");
      }
    }
  }
  return v.outcome(std::to_string(built) + " labels, Sp dims 2-6 over F_2 and 2-4 over F_3");
}

// ---------------------------------------------------------------------------
// 11-13: counting.

Outcome criterion_11() {
  Verdict v;
  auto brute = [](int d, int q) {
    const Field f = Field::make(q);
    const auto n = static_cast<std::size_t>(d);
    const std::uint64_t total = ipow(static_cast<std::uint64_t>(q), n * (n + 1) / 2);
    std::int64_t count = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      Matrix m(f, n, n);
      std::uint64_t rest = idx;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          m(i, j) = m(j, i) = static_cast<Elem>(rest % static_cast<std::uint64_t>(q));
          rest /= static_cast<std::uint64_t>(q);
        }
      }
      if (rank(m) == n) ++count;
    }
    return count;
  };
  for (int q : {2, 3})
    for (int d = 0; d <= 3; ++d)
      v.require(count_sym_nondeg(d, q) == brute(d, q), "f(" + std::to_string(d) + "," + std::to_string(q) + ")");
  v.require(count_sym_nondeg(4, 2) == brute(4, 2), "f(4,2)");
  v.require(count_sym_nondeg(2, 2) == 4, "f(2,2) != 4");
  return v.outcome("d <= 3 at q = 2, 3 and d = 4 at q = 2");
}

Outcome criterion_12() {
  Verdict v;
  std::string example;
  for (const GroupSpec& spec : {GroupSpec{Family::Sp, 4, 2}, GroupSpec{Family::Sp, 4, 4}, GroupSpec{Family::Sp, 6, 2}}) {
    VerifyOptions options;
    options.jobs = workers();
    options.sample = 0;
    const ClassReport report = verify_pieces(spec, options);
    v.require(report.total == unipotent_count(spec), spec.name() + ": unipotent count");
    std::map<std::vector<int>, std::map<std::set<int>, std::uint64_t>> fibers;
    for (const auto& rec : report.labels) fibers[rec.label.lambda.parts][rec.label.J] = rec.count;
    for (const auto& [parts, byJ] : fibers) {
      const auto jumps = odd_jumps(parts);
      v.require(byJ.size() == (std::size_t{1} << jumps.size()), spec.name() + " " + parts_text(parts) + ": fiber count");
      const std::uint64_t base = byJ.count({}) ? byJ.at({}) : 0;
      v.require(base > 0, spec.name() + " " + parts_text(parts) + ": empty fiber J = {}");
      for (const auto& [j, count] : byJ) {
        std::uint64_t ratio = 1;
        for (int n : j) ratio *= ipow(static_cast<std::uint64_t>(spec.q), static_cast<std::uint64_t>(jumps.at(n))) - 1;
        v.require(count == ratio * base, spec.name() + " " + parts_text(parts) + set_text(j) + ": fiber ratio");
        if (spec.q == 2 && spec.dim == 4 && parts == std::vector<int>{2, 2} && j == std::set<int>{1})
          example = "(2,2) in Sp_4(F_2): ratio " + std::to_string(count / base);
      }
    }
  }
  v.require(example == "(2,2) in Sp_4(F_2): ratio 3", "Sp_4(F_2) (2,2) ratio is not 3");
  return v.outcome(example + "; Sp_4(F_2), Sp_4(F_4), Sp_6(F_2) exhaustive");
}

Outcome criterion_13() {
  Verdict v;
  std::size_t pieces = 0;
  const std::vector<std::pair<Family, std::size_t>> groups{{Family::Sp, 4}, {Family::GL, 2}, {Family::GL, 3}};
  for (const auto& [family, dim] : groups) {
    // Sp_4 needs a fifth point: its largest reduced count has degree 3.
    const std::vector<int> qs = family == Family::Sp ? std::vector<int>{2, 3, 4, 5, 7} : std::vector<int>{2, 3, 4, 5};
    const CountReport report = piece_count_polynomials(family, dim, qs, workers());
    const std::string name = std::string(family == Family::Sp ? "Sp_" : "GL_") + std::to_string(dim);
    v.require(report.ok(), name + ": count report not ok");
    for (int q : qs) {
      std::uint64_t sum = 0;
      for (const auto& p : report.pieces) sum += p.counts.at(q);
      v.require(sum == unipotent_count(GroupSpec{family, dim, q}), name + ": piece sizes do not sum to q^(2N+)");
    }
    for (const auto& p : report.pieces) {
      ++pieces;
      const std::string who = name + " " + parts_text(p.lambda.parts);
      v.require(p.poly.has_value() && p.reduced_poly.has_value(), who + ": no integral fit");
      if (!p.poly || !p.reduced_poly) continue;
      for (int q : qs)
        v.require(static_cast<std::uint64_t>(p.poly->evaluate(q)) == p.counts.at(q), who + ": polynomial misses a count");
      std::vector<std::pair<std::int64_t, std::int64_t>> pts(p.reduced.begin(), p.reduced.end());
      for (std::size_t drop = 0; drop < pts.size(); ++drop) {
        auto fewer = pts;
        fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(drop));
        bool same = false;
        try {
          same = interpolate_int(fewer) == *p.reduced_poly;
        } catch (const NonIntegralFit&) {
        }
        v.require(same, who + ": fit changes when q = " + std::to_string(pts[drop].first) + " is dropped");
      }
    }
  }
  return v.outcome(std::to_string(pieces) + " pieces of Sp_4 (q = 2,3,4,5,7), GL_2 and GL_3 (q = 2,3,4,5)");
}

// ---------------------------------------------------------------------------
// 14: golden file.

std::string g_cli;
std::string g_golden;

std::string run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("cannot run " + cmd);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  if (status != 0) throw std::runtime_error(cmd + " exited with status " + std::to_string(status));
  return out;
}

Outcome criterion_14() {
  Verdict v;
  std::ifstream in(g_golden, std::ios::binary);
  v.require(static_cast<bool>(in), "cannot read " + g_golden);
  std::stringstream golden;
  golden << in.rdbuf();
  const std::string first = run_cli("enumerate --group sp --dim 4 --q 2");
  v.require(first == golden.str(), "output differs from the golden file");
  v.require(run_cli("enumerate --group sp --dim 4 --q 2 --jobs 4") == first, "output depends on --jobs");
  return v.outcome(std::to_string(first.size()) + " bytes identical");
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <upieces CLI> <golden file> [criterion ...]\n";
    return 2;
  }
  g_cli = argv[1];
  g_golden = argv[2];
  std::set<int> only;
  for (int i = 3; i < argc; ++i) only.insert(std::stoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "filtration oracle equivalence", criterion_1},
      {2, "primitive dimensions", criterion_2},
      {3, "perturbation stability", criterion_3},
      {4, "solver residuals", criterion_4},
      {5, "self-duality of the canonical filtration", criterion_5},
      {6, "properties of the forms b_n", criterion_6},
      {7, "quadratic-form identities", criterion_7},
      {8, "labels partition the unipotents and are class functions", criterion_8},
      {9, "label census and representative round trip", criterion_9},
      {10, "constructor postconditions", criterion_10},
      {11, "f(d,q) recursion against brute force", criterion_11},
      {12, "fiber product formula", criterion_12},
      {13, "piece counts are integer polynomials in q", criterion_13},
      {14, "golden enumerate output", criterion_14},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1fs", secs);
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title << " [" << timing << "] "
              << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
