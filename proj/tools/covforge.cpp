// covforge — exact Molien generating functions and integrity bases for
// finite point groups acting on symmetry-adapted coordinates.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 internal inconsistency (count mismatch / failed invariant).

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "covforge/genfun.hpp"
#include "covforge/group.hpp"
#include "covforge/integrity.hpp"
#include "covforge/json_io.hpp"
#include "covforge/linalg.hpp"

namespace {

using namespace covforge;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Keeps file-loaded groups alive for the lifetime of the process.
std::optional<FiniteGroup> g_loaded_group;

const FiniteGroup& load_group(const std::string& spec) {
  if (spec == "ci" || spec == "Ci") return FiniteGroup::ci();
  if (spec == "td" || spec == "Td") return FiniteGroup::td();
  std::ifstream in(spec);
  if (!in) throw ConfigError("cannot open group file: " + spec);
  json j;
  try {
    in >> j;
    g_loaded_group = group_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError("invalid group file " + spec + ": " + e.what());
  }
  return *g_loaded_group;
}

std::vector<std::string> parse_initial(const FiniteGroup& G, const std::string& initial) {
  std::vector<std::string> labels;
  if (initial.empty()) {
    if (G.name == "Ci") return {"A2", "A2", "A2"};
    if (G.name == "Td") return {"A1", "E", "F2", "F2"};
    throw ConfigError("--initial is required for group files");
  }
  std::stringstream ss(initial);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) labels.push_back(item);
  }
  if (labels.empty()) throw ConfigError("empty --initial list");
  for (const auto& l : labels) G.irrep_index(l);  // validates
  return labels;
}

int parse_partner(const FiniteGroup& G, int irrep, const std::string& partner) {
  const int dim = G.irreps[irrep].dim;
  static const std::vector<std::string> names3 = {"x", "y", "z"};
  static const std::vector<std::string> names2 = {"a", "b"};
  if (dim > 1) {
    const auto& names = dim == 3 ? names3 : names2;
    for (int i = 0; i < dim; ++i) {
      if (partner == names[i]) return i;
    }
  }
  try {
    const int idx = std::stoi(partner) - 1;
    if (idx >= 0 && idx < dim) return idx;
  } catch (...) {
  }
  throw ConfigError("bad partner '" + partner + "' for irrep " + G.irreps[irrep].label);
}

std::string counts_summary(const std::vector<CovariantTuple>& nums) {
  std::map<int, int> prof;
  for (const auto& t : nums) prof[t.degree]++;
  if (prof.empty()) return "none; total 0";
  std::ostringstream os;
  const int lo = prof.begin()->first;
  const int hi = prof.rbegin()->first;
  for (int d = lo; d <= hi; ++d) {
    if (d > lo) os << " ";
    os << (prof.count(d) ? prof[d] : 0);
  }
  os << "; total " << nums.size();
  return os.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

int max_threads() {
  if (const char* env = std::getenv("COVFORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------

struct MolienArgs {
  std::string group, initial, final_irrep = "A1", output, format = "text";
  int order = 10;
  int append_trivial = 0;
};

int cmd_molien(const MolienArgs& a) {
  const FiniteGroup& G = load_group(a.group);
  const auto labels = parse_initial(G, a.initial);
  const int fi = G.irrep_index(a.final_irrep);
  RepSum R = RepSum::make(G, labels);
  GenFun m = molien_direct(R, fi);
  for (int k = 0; k < a.append_trivial; ++k) m = m.append_trivial_factor();
  const auto coeffs = m.taylor(a.order);

  std::ostringstream os;
  if (a.format == "json") {
    json j{{"genfun", genfun_to_json(m)}, {"collapsed", m.collapsed().str()}};
    json tj = json::array();
    for (const auto& c : coeffs) tj.push_back(c.get_str());
    j["taylor"] = tj;
    os << j.dump(2) << "\n";
  } else {
    os << "M(" << G.irreps[fi].label << "; ";
    for (size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
    os << "; t) = " << m.collapsed().str() << "\n";
    os << "taylor:";
    for (const auto& c : coeffs) os << " " << c.get_str();
    os << "\n";
  }
  write_output(a.output, os.str());
  return 0;
}

struct BasisArgs {
  std::string group, initial, final_irrep, output, format = "json";
};

int cmd_basis(const BasisArgs& a) {
  const FiniteGroup& G = load_group(a.group);
  const auto labels = parse_initial(G, a.initial);
  const int fi = G.irrep_index(a.final_irrep);
  IntegrityBasis B = build_family(G, labels);
  const auto& nums = B.numerators_for(fi);
  if (!a.output.empty()) {
    if (a.format == "text") {
      write_output(a.output, basis_to_text(B, fi, labels));
    } else {
      write_output(a.output, basis_to_json(B, fi, labels).dump(2) + "\n");
    }
  }
  std::cout << "denominators: " << B.denominators.size() << " of degrees";
  for (int d : B.denominator_degrees()) std::cout << " " << d;
  std::cout << "\n";
  std::cout << "numerators per degree: " << counts_summary(nums) << "\n";
  return 0;
}

struct EnumArgs {
  std::string group, initial, final_irrep, basis_file, partner = "1", output, format = "text";
  int dmax = 4;
};

int cmd_enumerate(const EnumArgs& a) {
  std::optional<IntegrityBasis> B;
  const FiniteGroup* G = nullptr;
  int fi = 0;
  if (!a.basis_file.empty()) {
    std::ifstream in(a.basis_file);
    if (!in) throw ConfigError("cannot open basis file: " + a.basis_file);
    json j;
    try {
      in >> j;
      const std::string gname = j.at("group").get<std::string>();
      G = &load_group(gname == "Ci" ? "ci" : gname == "Td" ? "td" : a.group);
      B = basis_from_json(j, *G);
      fi = G->irrep_index(j.at("final_irrep").get<std::string>());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("invalid basis file: " + std::string(e.what()));
    }
  } else {
    G = &load_group(a.group);
    const auto labels = parse_initial(*G, a.initial);
    if (a.final_irrep.empty()) throw ConfigError("--final is required");
    fi = G->irrep_index(a.final_irrep);
    B = build_full_basis(*G, labels, a.final_irrep);
  }
  const int partner = parse_partner(*G, fi, a.partner);
  const auto terms = enumerate_hironaka(*B, fi, partner, a.dmax);

  std::ostringstream os;
  if (a.format == "json") {
    json arr = json::array();
    for (const auto& t : terms) {
      arr.push_back(json{{"degree", t.degree},
                         {"numerator_index", t.numerator_index},
                         {"denominator_exponents", t.denom_exponents},
                         {"value", poly_to_json(t.value)}});
    }
    os << json{{"terms", arr}}.dump(2) << "\n";
  } else {
    std::map<int, int> per_degree;
    for (const auto& t : terms) per_degree[t.degree]++;
    int cur = -1;
    for (const auto& t : terms) {
      if (t.degree != cur) {
        cur = t.degree;
        os << "degree " << cur << ": " << per_degree[cur] << " terms\n";
      }
      os << "  g" << (t.numerator_index + 1);
      for (size_t i = 0; i < t.denom_exponents.size(); ++i) {
        if (t.denom_exponents[i] > 0) {
          os << "*f" << (i + 1);
          if (t.denom_exponents[i] > 1) os << "^" << t.denom_exponents[i];
        }
      }
      os << " = " << t.value.str() << "\n";
    }
    os << "total " << terms.size() << " terms up to degree " << a.dmax << "\n";
  }
  write_output(a.output, os.str());
  return 0;
}

struct VerifyArgs {
  std::string group, initial, final_irrep = "all";
  int dmax = 4;
};

struct VerifyRow {
  std::string irrep;
  int degree;
  long oracle, molien, span;
  bool ok;
};

int cmd_verify(const VerifyArgs& a) {
  const FiniteGroup& G = load_group(a.group);
  const auto labels = parse_initial(G, a.initial);
  std::vector<int> finals;
  if (a.final_irrep == "all") {
    for (size_t f = 0; f < G.irreps.size(); ++f) finals.push_back(static_cast<int>(f));
  } else {
    finals.push_back(G.irrep_index(a.final_irrep));
  }

  IntegrityBasis fam = build_family(G, labels);

  std::vector<std::vector<VerifyRow>> rows(finals.size());
  std::vector<std::string> errors(finals.size());
  const auto work = [&](size_t idx) {
    const int fi = finals[idx];
    try {
      ProjectionOracle oracle(fam.rep, fi, 0);
      const auto taylor = fam.genfuns.at(fi).taylor(a.dmax);
      const auto terms = enumerate_hironaka(fam, fi, 0, a.dmax);
      for (int d = 0; d <= a.dmax; ++d) {
        std::vector<MultiPoly> slice;
        for (const auto& t : terms) {
          if (t.degree == d) slice.push_back(t.value);
        }
        const int dim_oracle = oracle.dimension(d);
        const long dim_molien = taylor[d].get_si();
        const int dim_span = rank_and_basis(slice).rank;
        bool ok = dim_oracle == dim_molien && dim_molien == dim_span;
        if (ok && dim_span > 0) {
          // The enumerated slice must coincide with the projector image, not
          // merely have the right dimension.
          std::vector<MultiPoly> both = oracle.span(d);
          const int oracle_rank = rank_and_basis(both).rank;
          both.insert(both.end(), slice.begin(), slice.end());
          ok = rank_and_basis(both).rank == oracle_rank;
        }
        rows[idx].push_back(VerifyRow{G.irreps[fi].label, d, static_cast<long>(dim_oracle),
                                      dim_molien, static_cast<long>(dim_span), ok});
      }
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  };

  const int nthreads = std::min<int>(max_threads(), static_cast<int>(finals.size()));
  if (nthreads <= 1) {
    for (size_t i = 0; i < finals.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < finals.size(); i = next.fetch_add(1)) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  bool all_ok = true;
  std::string first_fail;
  std::cout << "irrep degree oracle molien span status\n";
  for (size_t i = 0; i < finals.size(); ++i) {
    if (!errors[i].empty()) {
      all_ok = false;
      if (first_fail.empty()) first_fail = G.irreps[finals[i]].label + ": " + errors[i];
      std::cout << G.irreps[finals[i]].label << " - - - - error: " << errors[i] << "\n";
      continue;
    }
    for (const auto& r : rows[i]) {
      std::cout << r.irrep << " " << r.degree << " " << r.oracle << " " << r.molien << " "
                << r.span << " " << (r.ok ? "ok" : "MISMATCH") << "\n";
      if (!r.ok) {
        all_ok = false;
        if (first_fail.empty()) {
          first_fail = "(" + r.irrep + ", degree " + std::to_string(r.degree) + ")";
        }
      }
    }
  }
  if (!all_ok) {
    std::cout << "FAIL: first disagreement at " << first_fail << "\n";
    return 1;
  }
  std::cout << "PASS: " << finals.size() << " irreps x " << (a.dmax + 1) << " degrees\n";
  return 0;
}

struct ExportArgs {
  std::string group, output;
};

int cmd_export_group(const ExportArgs& a) {
  const FiniteGroup& G = load_group(a.group);
  write_output(a.output, group_to_json(G).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Molien series and integrity bases for finite point groups"};
  app.require_subcommand(1);

  MolienArgs ma;
  auto* molien = app.add_subcommand("molien", "compute a Molien generating function");
  molien->add_option("--group", ma.group, "ci, td, or a group JSON file")->required();
  molien->add_option("--initial", ma.initial, "comma-separated irrep list (default per group)");
  molien->add_option("--final", ma.final_irrep, "final irrep label");
  molien->add_option("--order", ma.order, "Taylor expansion order");
  molien->add_option("--append-trivial", ma.append_trivial, "append 1/(1-t) factors");
  molien->add_option("-o,--output", ma.output, "output file (default stdout)");
  molien->add_option("--format", ma.format, "text or json");

  BasisArgs ba;
  auto* basis = app.add_subcommand("basis", "build an integrity basis");
  basis->add_option("--group", ba.group)->required();
  basis->add_option("--initial", ba.initial);
  basis->add_option("--final", ba.final_irrep)->required();
  basis->add_option("-o,--output", ba.output, "basis output file");
  basis->add_option("--format", ba.format, "json (loadable) or text (one polynomial per line)");

  EnumArgs ea;
  auto* enumerate = app.add_subcommand("enumerate", "enumerate Hironaka products");
  enumerate->add_option("--group", ea.group);
  enumerate->add_option("--initial", ea.initial);
  enumerate->add_option("--final", ea.final_irrep);
  enumerate->add_option("--basis", ea.basis_file, "basis JSON file from `basis -o`");
  enumerate->add_option("--partner", ea.partner, "symmetry-type partner (x|y|z|a|b or 1-based)");
  enumerate->add_option("--dmax", ea.dmax, "maximal total degree");
  enumerate->add_option("-o,--output", ea.output);
  enumerate->add_option("--format", ea.format, "text or json");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "three-way agreement: oracle vs series vs spans");
  verify->add_option("--group", va.group)->required();
  verify->add_option("--initial", va.initial);
  verify->add_option("--final", va.final_irrep, "irrep label or 'all'");
  verify->add_option("--dmax", va.dmax, "degree cutoff");

  ExportArgs xa;
  auto* xport = app.add_subcommand("export-group", "write a built-in group definition file");
  xport->add_option("--group", xa.group)->required();
  xport->add_option("-o,--output", xa.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const bool in_verify = verify->parsed();
  try {
    if (molien->parsed()) return cmd_molien(ma);
    if (basis->parsed()) return cmd_basis(ba);
    if (enumerate->parsed()) return cmd_enumerate(ea);
    if (verify->parsed()) return cmd_verify(va);
    if (xport->parsed()) return cmd_export_group(xa);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CountMismatch& e) {
    std::cerr << (in_verify ? "verification failure: " : "internal count mismatch: ") << e.what()
              << "\n";
    return in_verify ? 1 : 3;
  } catch (const NotCovariant& e) {
    std::cerr << (in_verify ? "verification failure: " : "internal inconsistency: ") << e.what()
              << "\n";
    return in_verify ? 1 : 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
