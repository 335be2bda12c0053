#pragma once

#include <json.hpp>

#include "covforge/genfun.hpp"
#include "covforge/group.hpp"
#include "covforge/integrity.hpp"
#include "covforge/poly.hpp"

namespace covforge {

using nlohmann::json;

// FieldScalar travels as four "num/den" strings [a, b, c, d] for the
// components of a + b*sqrt2 + c*sqrt3 + d*sqrt6.
json field_to_json(const FieldScalar& v);
FieldScalar field_from_json(const json& j);

json poly_to_json(const MultiPoly& p);
MultiPoly poly_from_json(const json& j);

json genfun_to_json(const GenFun& g);

json group_to_json(const FiniteGroup& G);
FiniteGroup group_from_json(const json& j);

json basis_to_json(const IntegrityBasis& B, int final_irrep,
                   const std::vector<std::string>& initial_labels);
/// Loads a basis file; the group must match the file's "group" field.
IntegrityBasis basis_from_json(const json& j, const FiniteGroup& G);
std::vector<std::string> basis_initial_labels(const json& j);

/// Plain-text basis listing: one polynomial per line, degree-sorted.
std::string basis_to_text(const IntegrityBasis& B, int final_irrep,
                          const std::vector<std::string>& initial_labels);

}  // namespace covforge
