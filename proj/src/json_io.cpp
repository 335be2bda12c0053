#include "covforge/json_io.hpp"

namespace covforge {

json field_to_json(const FieldScalar& v) {
  return json::array(
      {rational_str(v.a), rational_str(v.b), rational_str(v.c), rational_str(v.d)});
}

FieldScalar field_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("bad field scalar encoding");
  return FieldScalar(rational_from_str(j[0].get<std::string>()),
                     rational_from_str(j[1].get<std::string>()),
                     rational_from_str(j[2].get<std::string>()),
                     rational_from_str(j[3].get<std::string>()));
}

json poly_to_json(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) {
    terms.push_back(json{{"exp", e}, {"coeff", field_to_json(c)}});
  }
  return json{{"vars", p.vars().names()}, {"terms", terms}};
}

MultiPoly poly_from_json(const json& j) {
  MultiPoly p(VarTable(j.at("vars").get<std::vector<std::string>>()));
  for (const auto& t : j.at("terms")) {
    p.add_term(t.at("exp").get<Exponents>(), field_from_json(t.at("coeff")));
  }
  return p;
}

json genfun_to_json(const GenFun& g) {
  json num = json::object();
  for (const auto& [e, c] : g.num) {
    std::string key;
    for (size_t i = 0; i < e.size(); ++i) {
      if (i) key += ",";
      key += std::to_string(e[i]);
    }
    num[key] = c.get_str();
  }
  json den = json::array();
  for (const auto& [var, deg] : g.denom) den.push_back(json::array({var, deg}));
  return json{{"nvars", g.nvars}, {"numerator", num}, {"denominator", den}};
}

json group_to_json(const FiniteGroup& G) {
  json irreps = json::array();
  for (const auto& irrep : G.irreps) {
    json mats = json::array();
    for (const auto& M : irrep.mats) {
      json rows = json::array();
      for (int i = 0; i < irrep.dim; ++i) {
        json row = json::array();
        for (int j = 0; j < irrep.dim; ++j) row.push_back(field_to_json(M(i, j)));
        rows.push_back(row);
      }
      mats.push_back(rows);
    }
    irreps.push_back(json{{"label", irrep.label},
                          {"dim", irrep.dim},
                          {"primary_degrees", irrep.primary_degrees},
                          {"matrices", mats}});
  }
  return json{{"name", G.name}, {"elements", G.labels}, {"mult_table", G.mult}, {"irreps", irreps}};
}

FiniteGroup group_from_json(const json& j) {
  FiniteGroup G;
  G.name = j.at("name").get<std::string>();
  G.labels = j.at("elements").get<std::vector<std::string>>();
  G.mult = j.at("mult_table").get<std::vector<std::vector<int>>>();
  for (const auto& ij : j.at("irreps")) {
    Irrep irrep;
    irrep.label = ij.at("label").get<std::string>();
    irrep.dim = ij.at("dim").get<int>();
    irrep.primary_degrees = ij.at("primary_degrees").get<std::vector<int>>();
    for (const auto& mj : ij.at("matrices")) {
      FMat M(irrep.dim, irrep.dim);
      for (int r = 0; r < irrep.dim; ++r) {
        for (int c = 0; c < irrep.dim; ++c) M(r, c) = field_from_json(mj.at(r).at(c));
      }
      irrep.mats.push_back(std::move(M));
    }
    G.irreps.push_back(std::move(irrep));
  }
  G.finish_setup();
  G.validate();
  return G;
}

json basis_to_json(const IntegrityBasis& B, int final_irrep,
                   const std::vector<std::string>& initial_labels) {
  json denoms = json::array();
  for (const auto& f : B.denominators) denoms.push_back(poly_to_json(f));
  json nums = json::array();
  for (const auto& t : B.numerators_for(final_irrep)) {
    json partners = json::array();
    for (const auto& p : t.partners) partners.push_back(poly_to_json(p));
    nums.push_back(json{{"degree", t.degree}, {"partners", partners}});
  }
  return json{{"group", B.group->name},
              {"initial_rep", initial_labels},
              {"final_irrep", B.group->irreps[final_irrep].label},
              {"denominators", denoms},
              {"numerators", nums}};
}

std::vector<std::string> basis_initial_labels(const json& j) {
  return j.at("initial_rep").get<std::vector<std::string>>();
}

std::string basis_to_text(const IntegrityBasis& B, int final_irrep,
                          const std::vector<std::string>& initial_labels) {
  const Irrep& fin = B.group->irreps[final_irrep];
  std::string out = "# integrity basis: group " + B.group->name + ", initial ";
  for (size_t i = 0; i < initial_labels.size(); ++i) {
    out += (i ? "," : "") + initial_labels[i];
  }
  out += ", final " + fin.label + "\n";
  out += "# denominators (" + std::to_string(B.denominators.size()) + ")\n";
  for (size_t i = 0; i < B.denominators.size(); ++i) {
    out += "f" + std::to_string(i + 1) + " = " + B.denominators[i].str() + "\n";
  }
  const auto& nums = B.numerators_for(final_irrep);
  out += "# numerators (" + std::to_string(nums.size()) + " of symmetry " + fin.label +
         ", degree-sorted)\n";
  static const char* suffix3[] = {"x", "y", "z"};
  static const char* suffix2[] = {"a", "b"};
  for (size_t k = 0; k < nums.size(); ++k) {
    for (size_t p = 0; p < nums[k].partners.size(); ++p) {
      out += "g" + std::to_string(k + 1);
      if (fin.dim == 2) {
        out += std::string("[") + suffix2[p] + "]";
      } else if (fin.dim == 3) {
        out += std::string("[") + suffix3[p] + "]";
      }
      out += " deg=" + std::to_string(nums[k].degree) + " : " + nums[k].partners[p].str() + "\n";
    }
  }
  return out;
}

IntegrityBasis basis_from_json(const json& j, const FiniteGroup& G) {
  if (j.at("group").get<std::string>() != G.name) {
    throw std::invalid_argument("basis file belongs to group " + j.at("group").get<std::string>());
  }
  IntegrityBasis B;
  B.group = &G;
  B.rep = RepSum::make(G, basis_initial_labels(j));
  for (const auto& fj : j.at("denominators")) {
    MultiPoly f = poly_from_json(fj);
    if (f.vars() != B.rep.vars) throw std::invalid_argument("basis file variable table mismatch");
    B.denominators.push_back(std::move(f));
  }
  const int fi = G.irrep_index(j.at("final_irrep").get<std::string>());
  auto& tuples = B.numerators[fi];
  for (const auto& tj : j.at("numerators")) {
    CovariantTuple t;
    t.irrep = fi;
    t.degree = tj.at("degree").get<int>();
    for (const auto& pj : tj.at("partners")) t.partners.push_back(poly_from_json(pj));
    tuples.push_back(std::move(t));
  }
  return B;
}

}  // namespace covforge
