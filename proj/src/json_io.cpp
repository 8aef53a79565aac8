#include "upieces/json_io.hpp"

#include "upieces/errors.hpp"

namespace upieces {
namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

int as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InvalidInput(std::string(what) + " must be an integer");
  return j.get<int>();
}

std::vector<std::vector<int>> grid_from_json(const Json& j, int q, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string(what) + " must be an array of rows");
  std::vector<std::vector<int>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw InvalidInput(std::string(what) + " rows must be arrays");
    std::vector<int> r;
    for (const auto& x : row) {
      const int v = as_int(x, "matrix entry");
      if (v < 0 || v >= q) throw InvalidInput("matrix entry " + std::to_string(v) + " is not an element of F_" + std::to_string(q));
      r.push_back(v);
    }
    if (!rows.empty() && r.size() != rows.front().size()) throw InvalidInput(std::string(what) + " is not rectangular");
    rows.push_back(std::move(r));
  }
  return rows;
}

template <class Set>
Json int_array(const Set& s) {
  Json out = Json::array();
  for (int x : s) out.push_back(x);
  return out;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json out;
  out["q"] = m.field().q();
  out["rows"] = m.to_rows();
  return out;
}

Matrix matrix_from_json(const Json& j) {
  const int q = as_int(member(j, "q"), "\"q\"");
  const Field f = Field::make(q);
  const auto rows = grid_from_json(member(j, "rows"), q, "\"rows\"");
  if (rows.empty()) return Matrix(f, 0, 0);
  return Matrix::from_rows(f, rows);
}

Json to_json(const Filtration& v) {
  Json out;
  out["e"] = 1 - v.lo();
  Json steps = Json::object();
  for (int a = v.lo(); a <= v.hi(); ++a) steps[std::to_string(a)] = v.at(a).basis().to_rows();
  out["steps"] = std::move(steps);
  return out;
}

Json to_json(const Partition& p) { return int_array(p.parts); }

Partition partition_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("a partition is an array of positive integers");
  Partition p;
  for (const auto& x : j) {
    const int part = as_int(x, "partition part");
    if (part <= 0) throw InvalidInput("partition parts must be positive");
    if (!p.parts.empty() && part > p.parts.back()) throw InvalidInput("partition parts must be weakly decreasing");
    p.parts.push_back(part);
  }
  return p;
}

Json to_json(const PieceLabel& label) {
  Json out;
  out["lambda"] = to_json(label.lambda);
  out["J"] = int_array(label.J);
  return out;
}

PieceLabel label_from_json(const Json& j) {
  PieceLabel label;
  label.lambda = partition_from_json(member(j, "lambda"));
  if (j.contains("J")) {
    const Json& js = j.at("J");
    if (!js.is_array()) throw InvalidInput("\"J\" must be an array of odd integers");
    for (const auto& x : js) label.J.insert(as_int(x, "J member"));
  }
  return label;
}

Json to_json(const SplittingInvariant& inv) {
  Json out;
  out["I"] = int_array(inv.I);
  out["J"] = int_array(inv.J);
  Json c = Json::object();
  for (const auto& [n, cn] : inv.c) c[std::to_string(n)] = cn;
  out["c"] = std::move(c);
  out["L"] = int_array(inv.L);
  out["Lprime"] = int_array(inv.Lprime);
  return out;
}

Json to_json(const SymplecticSpace& s) {
  Json out;
  out["q"] = s.field.q();
  out["gram"] = s.gram.to_rows();
  return out;
}

SymplecticSpace symplectic_from_json(const Json& j) {
  const int q = as_int(member(j, "q"), "\"q\"");
  const Field f = Field::make(q);
  const auto rows = grid_from_json(member(j, "gram"), q, "\"gram\"");
  if (rows.empty() || rows.size() != rows.front().size()) throw InvalidInput("gram matrix must be square and nonempty");
  try {
    return make_symplectic(Matrix::from_rows(f, rows));
  } catch (const Error& e) {
    throw InvalidInput(e.what());
  }
}

Json to_json(const LabelRecord& record) {
  Json out = to_json(record.label);
  out["count"] = record.count;
  out["orbits"] = record.orbit_sizes;
  return out;
}

Json to_json(const IntPolynomial& p) { return p.coefficients; }

Json to_json(const PieceCount& piece) {
  Json out;
  out["label"] = to_json(piece.lambda);
  Json counts = Json::object();
  for (const auto& [q, n] : piece.counts) counts[std::to_string(q)] = n;
  out["counts"] = std::move(counts);
  out["poly"] = piece.poly ? to_json(*piece.poly) : Json(nullptr);
  out["ok"] = piece.ok;
  if (piece.poly) out["poly_text"] = piece.poly->to_string();
  Json reduced = Json::object();
  for (const auto& [q, n] : piece.reduced) reduced[std::to_string(q)] = n;
  out["reduced"] = std::move(reduced);
  out["reduced_poly"] = piece.reduced_poly ? to_json(*piece.reduced_poly) : Json(nullptr);
  out["stable"] = piece.stable;
  if (!piece.diagnostic.empty()) out["diagnostic"] = piece.diagnostic;
  return out;
}

}  // namespace upieces
