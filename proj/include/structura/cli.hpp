#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "structura/cohom.hpp"
#include "structura/errors.hpp"
#include "structura/hochschild.hpp"
#include "structura/io.hpp"
#include "structura/ktheory.hpp"
#include "structura/ringspec.hpp"

namespace structura::cli {

using io::Json;

// Enumeration bound for rings and monoids, overridable per invocation.
inline std::size_t max_elements_from_env() {
  const char* v = std::getenv("STRUCTURA_MAX_ELEMENTS");
  if (!v) return 64;
  char* end = nullptr;
  bool digits = *v != '\0';
  for (const char* p = v; *p; ++p)
    if (!std::isdigit(static_cast<unsigned char>(*p))) digits = false;
  unsigned long long n = digits ? std::strtoull(v, &end, 10) : 0;
  if (!digits || n == 0)
    input_error(ErrorCode::ParseError,
                "STRUCTURA_MAX_ELEMENTS must be a positive integer, got '" +
                    std::string(v) + "'");
  return static_cast<std::size_t>(n);
}

namespace detail {

struct Ctx {
  std::vector<std::string> files;
  std::string mode = "derived";
  std::string assembly = "rows";
  std::size_t max_degree = 2;
  std::string covers_path, verticals_path;
  bool mode_set = false, assembly_set = false;
  std::size_t max_elements = 64;
  bool json = false;
};

inline const std::string& one_file(const Ctx& c, const std::string& cmd) {
  if (c.files.size() != 1)
    input_error(ErrorCode::ParseError, cmd + " takes exactly one input file");
  return c.files.front();
}

inline cohom::Assembly assembly_of(const std::string& name) {
  if (name == "rows") return cohom::Assembly::Rows;
  if (name == "hpq") return cohom::Assembly::Hpq;
  return cohom::Assembly::Total;
}

inline void print_degree_lines(std::ostream& out, const std::string& prefix,
                               const std::vector<exactla::FgAbGroup>& row) {
  for (std::size_t n = 0; n < row.size(); ++n)
    out << prefix << "H^" << n << " = " << io::group_text(row[n]) << "\n";
}

inline std::string row_text(const std::vector<exactla::FgAbGroup>& row) {
  std::string s;
  for (std::size_t n = 0; n < row.size(); ++n) {
    if (n) s += ", ";
    s += "H^" + std::to_string(n) + " = " + io::group_text(row[n]);
  }
  return s;
}

inline std::string dim_row_text(const std::vector<long>& row) {
  std::string s;
  for (std::size_t n = 0; n < row.size(); ++n) {
    if (n) s += ", ";
    s += "HH^" + std::to_string(n) + " = " + std::to_string(row[n]);
  }
  return s;
}

inline Json group_row_json(const std::vector<exactla::FgAbGroup>& row) {
  Json out = Json::array();
  for (const exactla::FgAbGroup& g : row) out.push_back(io::group_json(g));
  return out;
}

// ------------------------------------------------------------------ check

inline int cmd_check(const Ctx& c, std::ostream& out) {
  const std::string& path = one_file(c, "check");
  sheaf::Presheaf f = io::parse_presheaf(io::load_file(path), path);

  struct Entry {
    std::size_t member = 0;  // 0 when the presheaf itself is the subject
    sheaf::SheafFailure failure;
  };
  std::vector<Entry> failures;
  std::size_t members = 0;
  auto collect = [&](const sheaf::Presheaf& g, std::size_t member) {
    sheaf::SheafReport rep = g.kind() == sheaf::ValueKind::AbGroup
                                 ? sheaf::check_sheaf_axioms(g)
                                 : ringspec::check_ring_sheaf_axioms(g);
    for (sheaf::SheafFailure& x : rep.failures)
      failures.push_back({member, std::move(x)});
  };
  if (f.kind() == sheaf::ValueKind::Structured) {
    std::vector<sheaf::Presheaf> comps = sheaf::decompose_structured(f);
    members = comps.size();
    for (std::size_t p = 0; p < comps.size(); ++p) collect(comps[p], p + 1);
  } else {
    collect(f, 0);
  }

  const bool ok = failures.empty();
  if (c.json) {
    Json j;
    j["command"] = "check";
    j["kind"] = sheaf::kind_name(f.kind());
    if (members) j["members"] = members;
    j["sheaf"] = ok;
    Json fs = Json::array();
    for (const Entry& e : failures) {
      Json fj;
      if (e.member) fj["member"] = e.member;
      fj["open"] = io::open_key(f.space(), e.failure.open);
      fj["axiom"] = e.failure.axiom;
      fj["witness"] = e.failure.witness;
      fs.push_back(std::move(fj));
    }
    j["failures"] = std::move(fs);
    out << io::dump(j);
  } else {
    out << "kind: " << sheaf::kind_name(f.kind()) << "\n";
    if (members) out << "members: " << members << "\n";
    out << "sheaf: " << (ok ? "yes" : "no") << "\n";
    for (const Entry& e : failures) {
      out << "open " << f.space().set_label(e.failure.open) << ": ";
      if (e.member) out << "member " << e.member << ": ";
      out << e.failure.axiom << ": " << e.failure.witness << "\n";
    }
  }
  return ok ? 0 : 1;
}

// ------------------------------------------------------------- cohomology

inline int cmd_cohomology(const Ctx& c, std::ostream& out) {
  sheaf::Presheaf f = [&] {
    if (c.files.size() == 1)
      return io::parse_presheaf(io::load_file(c.files[0]), c.files[0]);
    if (c.files.size() == 2) {
      finspace::FiniteSpace s =
          io::parse_space(io::load_file(c.files[0]), c.files[0]);
      exactla::FgAbGroup g = io::parse_group(io::load_file(c.files[1]), c.files[1]);
      return sheaf::constant_sheaf(s, g);
    }
    input_error(ErrorCode::ParseError,
                "cohomology takes a presheaf file, or a space file and a group file");
  }();

  if (c.mode != "structured") {
    if (c.assembly_set)
      input_error(ErrorCode::OptionConflict, "--assembly needs --mode structured");
    if (!c.verticals_path.empty())
      input_error(ErrorCode::OptionConflict, "--verticals needs --mode structured");
    if (f.kind() != sheaf::ValueKind::AbGroup)
      input_error(ErrorCode::OptionConflict,
                  "mode " + c.mode + " works on group values; this input is " +
                      sheaf::kind_name(f.kind()));
  }

  Json j;
  j["command"] = "cohomology";
  j["mode"] = c.mode;
  j["max_degree"] = c.max_degree;

  if (c.mode == "derived") {
    if (!c.covers_path.empty())
      input_error(ErrorCode::OptionConflict, "--covers needs --mode cech or structured");
    std::vector<exactla::FgAbGroup> h = cohom::derived_limit_cohomology(f, c.max_degree);
    if (c.json) {
      j["cohomology"] = group_row_json(h);
      out << io::dump(j);
    } else {
      print_degree_lines(out, "", h);
    }
    return 0;
  }

  if (c.mode == "cech") {
    if (c.covers_path.empty())
      input_error(ErrorCode::OptionConflict, "mode cech needs a cover chain; pass --covers");
    std::vector<finspace::Cover> chain = io::parse_cover_chain(
        io::load_file(c.covers_path), f.space(), c.covers_path);
    std::vector<exactla::FgAbGroup> h =
        cohom::refined_cech_cohomology(f, chain, c.max_degree);
    if (c.json) {
      j["cohomology"] = group_row_json(h);
      out << io::dump(j);
    } else {
      print_degree_lines(out, "", h);
    }
    return 0;
  }

  if (f.kind() != sheaf::ValueKind::Structured)
    input_error(ErrorCode::OptionConflict,
                "mode structured needs a structured presheaf; this input is " +
                    std::string(sheaf::kind_name(f.kind())));
  std::vector<finspace::Cover> chain;
  cohom::Mode inner = cohom::Mode::Sheaf;
  if (!c.covers_path.empty()) {
    chain = io::parse_cover_chain(io::load_file(c.covers_path), f.space(),
                                  c.covers_path);
    inner = cohom::Mode::Cech;
  }
  complexes::VerticalFamily verts =
      c.verticals_path.empty()
          ? complexes::VerticalFamily::trivial()
          : io::parse_verticals(io::load_file(c.verticals_path), c.verticals_path);
  cohom::StructuredResult r = cohom::structured_cohomology(
      f, inner, verts, assembly_of(c.assembly), c.max_degree, chain);

  j["inner"] = inner == cohom::Mode::Cech ? "cech" : "derived";
  j["assembly"] = c.assembly;
  if (c.json) {
    Json table = Json::array();
    for (const auto& row : r.table) table.push_back(group_row_json(row));
    j["table"] = std::move(table);
    out << io::dump(j);
  } else if (r.assembly == cohom::Assembly::Total) {
    out << "total: " << row_text(r.table.front()) << "\n";
  } else {
    for (std::size_t p = 0; p < r.table.size(); ++p)
      out << "member " << p + 1 << ": " << row_text(r.table[p]) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- hochschild

inline int cmd_hochschild(const Ctx& c, std::ostream& out) {
  const std::string& path = one_file(c, "hochschild");
  Json in = io::load_file(path);
  Json j;
  j["command"] = "hochschild";
  j["max_degree"] = c.max_degree;

  if (!io::detail::has(in, "kind")) {
    if (c.assembly_set)
      input_error(ErrorCode::OptionConflict,
                  "--assembly applies to structured input, not a single algebra");
    if (!c.verticals_path.empty())
      input_error(ErrorCode::OptionConflict,
                  "--verticals applies to structured input, not a single algebra");
    hochschild::FiniteDimAlgebra a = io::parse_algebra(in, path);
    std::vector<long> dims = hochschild::hochschild_cohomology(a, c.max_degree);
    if (c.json) {
      j["input"] = "algebra";
      j["field"] = a.field.name();
      j["dim"] = a.dim;
      j["dims"] = dims;
      out << io::dump(j);
    } else {
      out << "algebra: dim " << a.dim << " over " << a.field.name() << "\n";
      for (std::size_t n = 0; n < dims.size(); ++n)
        out << "HH^" << n << " = " << dims[n] << "\n";
    }
    return 0;
  }

  sheaf::Presheaf f = io::parse_presheaf(in, path);
  hochschild::FieldVerticalFamily verts =
      c.verticals_path.empty()
          ? hochschild::FieldVerticalFamily::trivial()
          : io::parse_field_verticals(io::load_file(c.verticals_path),
                                      c.verticals_path);
  hochschild::StructuredHochschild r = hochschild::structured_hochschild(
      f, verts, assembly_of(c.assembly), c.max_degree, 3, c.max_elements);

  if (c.json) {
    j["input"] = "structured";
    j["assembly"] = c.assembly;
    Json as = Json::array();
    for (const hochschild::FiniteDimAlgebra& a : r.algebras) {
      Json aj;
      aj["dim"] = a.dim;
      aj["field"] = a.field.name();
      as.push_back(std::move(aj));
    }
    j["algebras"] = std::move(as);
    j["table"] = r.table;
    out << io::dump(j);
  } else {
    if (r.assembly == cohom::Assembly::Total) {
      for (std::size_t p = 0; p < r.algebras.size(); ++p)
        out << "member " << p + 1 << ": dim " << r.algebras[p].dim << " over "
            << r.algebras[p].field.name() << "\n";
      out << "total: " << dim_row_text(r.table.front()) << "\n";
    } else {
      for (std::size_t p = 0; p < r.table.size(); ++p)
        out << "member " << p + 1 << " (dim " << r.algebras[p].dim << " over "
            << r.algebras[p].field.name() << "): " << dim_row_text(r.table[p])
            << "\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------- spec

inline int cmd_spec(const Ctx& c, std::ostream& out) {
  const std::string& path = one_file(c, "spec");
  ringspec::FiniteRing r = io::parse_ring(io::load_file(path), path);
  ringspec::SpecResult res = ringspec::spec_of_ring(r, c.max_elements);
  ringspec::LocallyRingedReport loc = ringspec::check_locally_ringed(res.ringed);
  const finspace::FiniteSpace& s = res.ringed.space;

  // a stalk whose unit generates the additive group is Z/n on the nose
  auto stalk_name = [](const ringspec::FiniteRing& st) {
    if (st.characteristic() == static_cast<int>(st.size()))
      return "Z/" + std::to_string(st.size());
    return std::to_string(st.size()) + " elements";
  };

  if (c.json) {
    Json j;
    j["command"] = "spec";
    Json pts = Json::array();
    for (std::size_t i = 0; i < s.point_count(); ++i) {
      const ringspec::FiniteRing& st = ringspec::stalk_ring(res.ringed, i);
      Json pj;
      pj["label"] = s.label(i);
      pj["stalk"] = stalk_name(st);
      pj["stalk_size"] = st.size();
      pj["local"] = loc.points[i].local;
      pts.push_back(std::move(pj));
    }
    j["points"] = std::move(pts);
    Json opens = Json::array();
    for (finspace::Mask u : s.opens()) {
      Json open = Json::array();
      for (std::size_t i = 0; i < s.point_count(); ++i)
        if (u >> i & 1) open.push_back(s.label(i));
      opens.push_back(std::move(open));
    }
    j["opens"] = std::move(opens);
    j["locally_ringed"] = loc.ok;
    out << io::dump(j);
  } else {
    out << "points:";
    for (std::size_t i = 0; i < s.point_count(); ++i)
      out << (i ? ", " : " ") << s.label(i);
    out << "\n";
    out << "opens:";
    for (std::size_t i = 0; i < s.opens().size(); ++i)
      out << (i ? ", " : " ") << s.set_label(s.opens()[i]);
    out << "\n";
    for (std::size_t i = 0; i < s.point_count(); ++i)
      out << "stalk at " << s.label(i) << ": "
          << stalk_name(ringspec::stalk_ring(res.ringed, i)) << "\n";
    out << "locally ringed: " << (loc.ok ? "yes" : "no") << "\n";
  }
  return loc.ok ? 0 : 1;
}

// --------------------------------------------------------------------- k0

inline int cmd_k0(const Ctx& c, std::ostream& out) {
  const std::string& path = one_file(c, "k0");
  ktheory::BundleModel b = io::parse_bundle(io::load_file(path), path);
  exactla::FgAbGroup g = ktheory::k0(b.base, b.m);
  std::vector<std::string> gens = ktheory::k0_generator_labels(b.base, b.m);
  std::vector<long> cls;
  for (const std::vector<long>& row : b.canonical)
    cls.insert(cls.end(), row.begin(), row.end());

  if (c.json) {
    Json j;
    j["command"] = "k0";
    j["m"] = b.m;
    j["k0"] = io::group_json(g);
    j["generators"] = gens;
    j["class"] = cls;
    out << io::dump(j);
  } else {
    out << "K0 = " << io::group_text(g) << "\n";
    out << "generators:";
    for (std::size_t i = 0; i < gens.size(); ++i) out << (i ? ", " : " ") << gens[i];
    out << "\n";
    out << "class: (";
    for (std::size_t i = 0; i < cls.size(); ++i) out << (i ? ", " : "") << cls[i];
    out << ")\n";
  }
  return 0;
}

// --------------------------------------------------------------- complete

inline int cmd_complete(const Ctx& c, std::ostream& out) {
  const std::string& path = one_file(c, "complete");
  ktheory::AbelianMonoidPresentation m =
      io::parse_monoid(io::load_file(path), c.max_elements, path);
  ktheory::GrothendieckCompletion g = ktheory::grothendieck_complete(m);

  if (c.json) {
    Json j;
    j["command"] = "complete";
    j["group"] = io::group_json(g.group);
    j["classes"] = g.classes;
    Json imgs = Json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      Json ij;
      ij["element"] = m.labels[i];
      Json coords = Json::array();
      for (const exactla::Int& v : g.element_image[i]) coords.push_back(io::int_json(v));
      ij["coords"] = std::move(coords);
      imgs.push_back(std::move(ij));
    }
    j["images"] = std::move(imgs);
    out << io::dump(j);
  } else {
    out << "group = " << io::group_text(g.group) << "\n";
    out << "classes: " << g.classes << "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
      out << m.labels[i] << " -> (";
      const std::vector<exactla::Int>& coords = g.element_image[i];
      for (std::size_t k = 0; k < coords.size(); ++k)
        out << (k ? ", " : "") << coords[k].str();
      out << ")\n";
    }
  }
  return 0;
}

}  // namespace detail

// Parse an argument list, dispatch the command, and map rejections to exit
// codes: 0 for success, 1 for mathematical rejection, 2 for bad input.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands = {"check",      "cohomology",
                                                    "hochschild", "spec",
                                                    "k0",         "complete"};
  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      std::find(commands.begin(), commands.end(), args[0]) == commands.end()) {
    err << "UnknownCommand: '" << args[0] << "' is not a structura command\n";
    return 2;
  }

  detail::Ctx c;
  std::string output = "text";

  CLI::App app{"exact workbench for structured-space constructions on finite models"};
  app.name("structura");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--output", output, "report format")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* check = app.add_subcommand("check", "test the sheaf axioms of a presheaf file");
  check->add_option("files", c.files, "presheaf file")->expected(-1);

  CLI::App* coho = app.add_subcommand("cohomology", "cohomology of a sheaf or structured presheaf");
  coho->add_option("files", c.files, "presheaf file, or space and group files")->expected(-1);
  CLI::Option* mode_opt = coho->add_option("--mode", c.mode, "derived, cech, or structured")
                              ->check(CLI::IsMember({"derived", "cech", "structured"}));
  CLI::Option* asm_coho = coho->add_option("--assembly", c.assembly, "rows, hpq, or total")
                              ->check(CLI::IsMember({"rows", "hpq", "total"}));
  coho->add_option("--max-degree", c.max_degree, "top reported degree");
  coho->add_option("--covers", c.covers_path, "cover chain file for cech mode");
  coho->add_option("--verticals", c.verticals_path, "vertical family file");

  CLI::App* hoch = app.add_subcommand("hochschild", "Hochschild cohomology of an algebra or structured ring presheaf");
  hoch->add_option("files", c.files, "algebra or presheaf file")->expected(-1);
  CLI::Option* asm_hoch = hoch->add_option("--assembly", c.assembly, "rows, hpq, or total")
                              ->check(CLI::IsMember({"rows", "hpq", "total"}));
  hoch->add_option("--max-degree", c.max_degree, "top reported degree");
  hoch->add_option("--verticals", c.verticals_path, "vertical family file");

  CLI::App* spec = app.add_subcommand("spec", "prime spectrum of a finite commutative ring");
  spec->add_option("files", c.files, "ring file")->expected(-1);

  CLI::App* k0 = app.add_subcommand("k0", "zeroth K-group of a bundle's base");
  k0->add_option("files", c.files, "bundle file")->expected(-1);

  CLI::App* complete = app.add_subcommand("complete", "Grothendieck completion of an abelian monoid");
  complete->add_option("files", c.files, "monoid file")->expected(-1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::vector<CLI::App*> subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ParseError: " << e.what() << "\n";
    return 2;
  }

  c.mode_set = mode_opt->count() > 0;
  c.assembly_set = asm_coho->count() > 0 || asm_hoch->count() > 0;
  c.json = output == "json";

  try {
    c.max_elements = max_elements_from_env();
    if (check->parsed()) return detail::cmd_check(c, out);
    if (coho->parsed()) return detail::cmd_cohomology(c, out);
    if (hoch->parsed()) return detail::cmd_hochschild(c, out);
    if (spec->parsed()) return detail::cmd_spec(c, out);
    if (k0->parsed()) return detail::cmd_k0(c, out);
    if (complete->parsed()) return detail::cmd_complete(c, out);
    err << "UnknownCommand: no command given\n";
    return 2;
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const MathError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "InvariantViolation: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace structura::cli
