#pragma once

#include "json.hpp"

#include "upieces/counting.hpp"

namespace upieces {

/// Insertion-ordered JSON, so emitted documents have a fixed key order.
using Json = nlohmann::ordered_json;

/// {"q": int, "rows": [[int, ...], ...]} with entries as element encodings.
Json to_json(const Matrix& m);
/// Throws InvalidInput on a malformed document and UnsupportedField.
Matrix matrix_from_json(const Json& j);

/// {"e": int, "steps": {"a": rows of the RREF basis}} for a in the window.
Json to_json(const Filtration& v);

Json to_json(const Partition& p);
Partition partition_from_json(const Json& j);

/// {"lambda": [...], "J": [...]}.
Json to_json(const PieceLabel& label);
PieceLabel label_from_json(const Json& j);

/// {"I", "J", "c", "L", "Lprime"}; L and Lprime are empty in odd
/// characteristic.
Json to_json(const SplittingInvariant& inv);

/// {"q": int, "gram": rows}.
Json to_json(const SymplecticSpace& s);
/// Throws InvalidInput unless the gram matrix is square, alternating and
/// nondegenerate.
SymplecticSpace symplectic_from_json(const Json& j);

/// {"lambda", "J", "count", "orbits"}.
Json to_json(const LabelRecord& record);

/// {"label", "counts", "poly", "ok"} followed by the reduced counts, the
/// readable polynomial and a diagnostic when the fit failed.
Json to_json(const PieceCount& piece);

Json to_json(const IntPolynomial& p);

}  // namespace upieces
