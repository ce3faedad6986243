#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "structura/abelian.hpp"
#include "structura/complexes.hpp"
#include "structura/errors.hpp"
#include "structura/field.hpp"
#include "structura/finite_ring.hpp"
#include "structura/finspace.hpp"
#include "structura/hochschild.hpp"
#include "structura/ktheory.hpp"
#include "structura/presheaf.hpp"
#include "structura/strcat.hpp"

namespace structura::io {

using Json = nlohmann::json;
using finspace::FiniteSpace;
using finspace::Mask;

// Json objects store keys sorted, so dumping the same data always produces
// the same bytes; every emitter below relies on that for determinism.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

[[noreturn]] inline void bad(const std::string& where, const std::string& why) {
  input_error(ErrorCode::ParseError, where + ": " + why);
}

inline const Json& member(const Json& j, const std::string& key,
                          const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, "missing field '" + key + "'");
  return *it;
}

inline bool has(const Json& j, const char* key) {
  return j.is_object() && j.contains(key);
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

inline long as_long(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<long>();
}

inline std::size_t as_index(const Json& j, const std::string& where) {
  long v = as_long(j, where);
  if (v < 0) bad(where, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline exactla::Int as_int(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return exactla::Int(j.get<long long>());
  if (j.is_string()) {
    try {
      return exactla::Int(j.get<std::string>());
    } catch (const std::exception&) {
      bad(where, "'" + j.get<std::string>() + "' is not an integer");
    }
  }
  bad(where, "expected an integer or an integer string");
}

inline exactla::Rat as_rat(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return exactla::Rat(j.get<long long>());
  if (j.is_string()) {
    try {
      return exactla::Rat(j.get<std::string>());
    } catch (const std::exception&) {
      bad(where, "'" + j.get<std::string>() + "' is not a rational");
    }
  }
  bad(where, "expected an integer or a rational string like \"3/2\"");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) { parts.push_back(cur); cur.clear(); }
    else cur += c;
  }
  parts.push_back(cur);
  return parts;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Read and parse one file; parse failures keep the position annotation the
// parser provides.
inline Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) input_error(ErrorCode::ParseError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    std::string msg = e.what();
    std::size_t cut = msg.find("] ");
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    input_error(ErrorCode::ParseError, path + ": " + msg);
  }
}

// --------------------------------------------------------------------------
// Spaces.  The file lists the nonempty opens by point labels; the empty set
// is implied.  Labels double as key fragments in presheaf files, so the two
// separator sequences are reserved.

inline FiniteSpace parse_space(const Json& j, const std::string& where = "space") {
  const Json& pts = detail::member(j, "points", where);
  if (!pts.is_array() || pts.empty()) detail::bad(where + ".points", "expected a nonempty array");
  std::vector<std::string> points;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::string p = detail::as_string(pts[i], where + ".points[" + std::to_string(i) + "]");
    if (p.empty() || p.find('|') != std::string::npos ||
        p.find("<=") != std::string::npos)
      detail::bad(where + ".points[" + std::to_string(i) + "]",
                  "labels must be nonempty and avoid '|' and '<='");
    index.emplace(p, i);
    points.push_back(std::move(p));
  }
  const Json& ops = detail::member(j, "opens", where);
  if (!ops.is_array()) detail::bad(where + ".opens", "expected an array");
  std::vector<Mask> opens{0};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string ow = where + ".opens[" + std::to_string(i) + "]";
    if (!ops[i].is_array()) detail::bad(ow, "expected an array of point labels");
    Mask m = 0;
    for (const Json& e : ops[i]) {
      std::string p = detail::as_string(e, ow);
      auto it = index.find(p);
      if (it == index.end()) detail::bad(ow, "unknown point '" + p + "'");
      m |= Mask(1) << it->second;
    }
    opens.push_back(m);
  }
  return finspace::validate_space(points, std::move(opens)).space;
}

inline Json space_json(const FiniteSpace& s) {
  Json j;
  j["points"] = s.points();
  Json opens = Json::array();
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    Json open = Json::array();
    for (std::size_t i = 0; i < s.point_count(); ++i)
      if (u >> i & 1) open.push_back(s.label(i));
    opens.push_back(std::move(open));
  }
  j["opens"] = std::move(opens);
  return j;
}

// The open-set key of presheaf files: the point labels, sorted, joined by |.
inline std::string open_key(const FiniteSpace& s, Mask u) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < s.point_count(); ++i)
    if (u >> i & 1) labels.push_back(s.label(i));
  std::sort(labels.begin(), labels.end());
  std::string key;
  for (std::size_t i = 0; i < labels.size(); ++i)
    key += (i ? "|" : "") + labels[i];
  return key;
}

inline Mask parse_open_key(const std::string& key, const FiniteSpace& s,
                           const std::string& where) {
  if (detail::trim(key).empty())
    detail::bad(where, "the empty set is implied and never named");
  Mask m = 0;
  for (const std::string& part : detail::split(key, '|'))
    m |= Mask(1) << s.point_index(detail::trim(part));
  return m;
}

// --------------------------------------------------------------------------
// Groups and their maps.  Literals are taken at face value: a non-canonical
// torsion list is a legal group whose generators the matrices refer to.

inline exactla::FgAbGroup parse_group(const Json& j, const std::string& where = "group") {
  if (!j.is_object()) detail::bad(where, "expected a group object");
  exactla::FgAbGroup g;
  if (detail::has(j, "rank")) {
    g.rank = detail::as_long(j["rank"], where + ".rank");
    if (g.rank < 0) detail::bad(where + ".rank", "expected a nonnegative integer");
  }
  if (detail::has(j, "torsion")) {
    const Json& t = j["torsion"];
    if (!t.is_array()) detail::bad(where + ".torsion", "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      exactla::Int d = detail::as_int(t[i], where + ".torsion[" + std::to_string(i) + "]");
      if (d < 2) detail::bad(where + ".torsion[" + std::to_string(i) + "]",
                             "torsion orders are at least 2");
      g.torsion.push_back(std::move(d));
    }
  }
  return g;
}

inline Json int_json(const exactla::Int& v) {
  static const exactla::Int lo(std::numeric_limits<long long>::min());
  static const exactla::Int hi(std::numeric_limits<long long>::max());
  if (v < lo || v > hi) return Json(v.str());
  return Json(static_cast<long long>(v));
}

inline Json group_json(const exactla::FgAbGroup& g) {
  Json j;
  j["rank"] = g.rank;
  Json t = Json::array();
  for (const exactla::Int& d : g.torsion) t.push_back(int_json(d));
  j["torsion"] = std::move(t);
  return j;
}

inline std::string group_text(const exactla::FgAbGroup& g) {
  return exactla::to_string(g);
}

inline exactla::IntMatrix parse_matrix(const Json& j, std::size_t rows,
                                       std::size_t cols, const std::string& where) {
  if (!j.is_array()) detail::bad(where, "expected an array of rows");
  if (j.size() != rows)
    detail::bad(where, "expected " + std::to_string(rows) + " rows, got " +
                           std::to_string(j.size()));
  exactla::IntMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) detail::bad(rw, "expected an array");
    if (j[r].size() != cols)
      detail::bad(rw, "expected " + std::to_string(cols) + " entries, got " +
                          std::to_string(j[r].size()));
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = detail::as_int(j[r][c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline Json matrix_json(const exactla::IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(int_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline exactla::GroupMap parse_group_map(const Json& j,
                                         const std::string& where = "map") {
  exactla::FgAbGroup src = parse_group(detail::member(j, "source", where), where + ".source");
  exactla::FgAbGroup tgt = parse_group(detail::member(j, "target", where), where + ".target");
  exactla::IntMatrix m = parse_matrix(detail::member(j, "matrix", where),
                                      tgt.gens(), src.gens(), where + ".matrix");
  return exactla::GroupMap(std::move(src), std::move(tgt), std::move(m));
}

// form used inside presheaf files, where the endpoints are already known
inline exactla::GroupMap parse_group_map_between(const Json& j,
                                                 const exactla::FgAbGroup& src,
                                                 const exactla::FgAbGroup& tgt,
                                                 const std::string& where) {
  exactla::IntMatrix m = parse_matrix(detail::member(j, "matrix", where),
                                      tgt.gens(), src.gens(), where + ".matrix");
  return exactla::GroupMap(src, tgt, std::move(m));
}

inline Json map_json(const exactla::GroupMap& m) {
  Json j;
  j["source"] = group_json(m.source);
  j["target"] = group_json(m.target);
  j["matrix"] = matrix_json(m.matrix);
  return j;
}

// --------------------------------------------------------------------------
// Fields, rationals, matrices over fields.

inline exactla::ExactField parse_field(const Json& j, const std::string& where = "field") {
  if (j.is_string()) {
    if (j.get<std::string>() == "Q") return exactla::ExactField::rationals();
    detail::bad(where, "the only named field is \"Q\"; use {\"prime\": p} otherwise");
  }
  if (detail::has(j, "prime"))
    return exactla::ExactField::prime_field(detail::as_int(j["prime"], where + ".prime"));
  detail::bad(where, "expected \"Q\" or {\"prime\": p}");
}

inline Json field_json(const exactla::ExactField& f) {
  if (f.characteristic == 0) return Json("Q");
  Json j;
  j["prime"] = int_json(f.characteristic);
  return j;
}

inline Json rat_json(const exactla::Rat& v) {
  if (denominator(v) == 1) return int_json(numerator(v));
  return Json(numerator(v).str() + "/" + denominator(v).str());
}

inline exactla::FieldMatrix parse_field_matrix(const Json& j,
                                               const exactla::ExactField& field,
                                               std::size_t rows, std::size_t cols,
                                               const std::string& where) {
  if (!j.is_array()) detail::bad(where, "expected an array of rows");
  if (j.size() != rows)
    detail::bad(where, "expected " + std::to_string(rows) + " rows, got " +
                           std::to_string(j.size()));
  exactla::FieldMatrix m(field, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      detail::bad(rw, "expected " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = field.normalize(detail::as_rat(j[r][c], rw + "[" + std::to_string(c) + "]"));
  }
  return m;
}

inline Json field_matrix_json(const exactla::FieldMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(rat_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// --------------------------------------------------------------------------
// Rings: explicit tables, the Z/n shortcut, or a product of further rings.

inline ringspec::FiniteRing parse_ring(const Json& j, const std::string& where = "ring") {
  if (detail::has(j, "zmod")) {
    long n = detail::as_long(j["zmod"], where + ".zmod");
    if (n < 1) detail::bad(where + ".zmod", "expected a positive modulus");
    return ringspec::FiniteRing::zmod(static_cast<int>(n));
  }
  if (detail::has(j, "product")) {
    const Json& ps = j["product"];
    if (!ps.is_array() || ps.size() < 2)
      detail::bad(where + ".product", "expected an array of at least two rings");
    ringspec::FiniteRing r =
        parse_ring(ps[0], where + ".product[0]");
    for (std::size_t i = 1; i < ps.size(); ++i)
      r = ringspec::FiniteRing::product(
          r, parse_ring(ps[i], where + ".product[" + std::to_string(i) + "]"));
    return r;
  }
  const Json& els = detail::member(j, "elements", where);
  if (!els.is_array() || els.empty())
    detail::bad(where + ".elements", "expected a nonempty array of labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < els.size(); ++i)
    labels.push_back(detail::as_string(els[i], where + ".elements[" + std::to_string(i) + "]"));
  const std::size_t n = labels.size();
  auto table = [&](const char* key) {
    const Json& t = detail::member(j, key, where);
    const std::string tw = where + "." + key;
    if (!t.is_array() || t.size() != n)
      detail::bad(tw, "expected " + std::to_string(n) + " rows");
    std::vector<int> flat;
    for (std::size_t r = 0; r < n; ++r) {
      const std::string rw = tw + "[" + std::to_string(r) + "]";
      if (!t[r].is_array() || t[r].size() != n)
        detail::bad(rw, "expected " + std::to_string(n) + " entries");
      for (std::size_t c = 0; c < n; ++c)
        flat.push_back(static_cast<int>(detail::as_index(
            t[r][c], rw + "[" + std::to_string(c) + "]")));
    }
    return flat;
  };
  std::vector<int> add = table("add"), mul = table("mul");
  return ringspec::FiniteRing::from_tables(std::move(labels), std::move(add),
                                           std::move(mul));
}

inline Json ring_json(const ringspec::FiniteRing& r) {
  Json j;
  Json els = Json::array();
  for (std::size_t i = 0; i < r.size(); ++i) els.push_back(r.label(i));
  j["elements"] = std::move(els);
  Json add = Json::array(), mul = Json::array();
  for (std::size_t x = 0; x < r.size(); ++x) {
    Json arow = Json::array(), mrow = Json::array();
    for (std::size_t y = 0; y < r.size(); ++y) {
      arow.push_back(r.add(static_cast<int>(x), static_cast<int>(y)));
      mrow.push_back(r.mul(static_cast<int>(x), static_cast<int>(y)));
    }
    add.push_back(std::move(arow));
    mul.push_back(std::move(mrow));
  }
  j["add"] = std::move(add);
  j["mul"] = std::move(mul);
  return j;
}

inline ringspec::RingMap parse_ring_map_between(const Json& j,
                                                const ringspec::FiniteRing& src,
                                                const ringspec::FiniteRing& tgt,
                                                const std::string& where) {
  const Json& imgs = detail::member(j, "images", where);
  const std::string iw = where + ".images";
  if (!imgs.is_array() || imgs.size() != src.size())
    detail::bad(iw, "expected one target index per source element");
  std::vector<int> images;
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    std::size_t v = detail::as_index(imgs[i], iw + "[" + std::to_string(i) + "]");
    if (v >= tgt.size())
      detail::bad(iw + "[" + std::to_string(i) + "]", "index beyond the target ring");
    images.push_back(static_cast<int>(v));
  }
  return ringspec::RingMap(src, tgt, std::move(images));
}

// --------------------------------------------------------------------------
// Structured families and their morphisms.

inline strcat::StructuredFamily parse_family(const Json& j,
                                             const std::string& where = "family") {
  bool part = true;
  if (detail::has(j, "partitionable")) {
    if (!j["partitionable"].is_boolean())
      detail::bad(where + ".partitionable", "expected a boolean");
    part = j["partitionable"].get<bool>();
  }
  const Json& es = detail::member(j, "entries", where);
  if (!es.is_array()) detail::bad(where + ".entries", "expected an array");
  std::vector<strcat::FamilyEntry> entries;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string ew = where + ".entries[" + std::to_string(i) + "]";
    const Json& e = es[i];
    if (detail::has(e, "p") &&
        detail::as_index(e["p"], ew + ".p") != i + 1)
      detail::bad(ew + ".p", "entry " + std::to_string(i + 1) + " is misnumbered");
    std::string tag = detail::as_string(detail::member(e, "tag", ew), ew + ".tag");
    if (tag == "AbGroup") {
      entries.push_back({strcat::StructureTag::ab_group(),
                         parse_group(detail::member(e, "carrier", ew), ew + ".carrier")});
    } else if (tag == "Ring") {
      entries.push_back({strcat::StructureTag::ring(),
                         parse_ring(detail::member(e, "carrier", ew), ew + ".carrier")});
    } else if (tag == "VectorSpace") {
      exactla::ExactField f =
          parse_field(detail::member(e, "field", ew), ew + ".field");
      entries.push_back({strcat::StructureTag::vector_space(f),
                         detail::as_index(detail::member(e, "carrier", ew), ew + ".carrier")});
    } else if (tag == "Opaque") {
      std::string name = detail::as_string(detail::member(e, "name", ew), ew + ".name");
      std::string carrier = detail::has(e, "carrier")
                                ? detail::as_string(e["carrier"], ew + ".carrier")
                                : name;
      entries.push_back({strcat::StructureTag::opaque(name), std::move(carrier)});
    } else {
      detail::bad(ew + ".tag", "unknown tag '" + tag + "'");
    }
  }
  return strcat::StructuredFamily(part, std::move(entries));
}

inline Json family_json(const strcat::StructuredFamily& f) {
  Json j;
  j["partitionable"] = f.partitionable;
  Json es = Json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const strcat::FamilyEntry& e = f.entries[i];
    Json ej;
    ej["p"] = i + 1;
    switch (e.tag.kind) {
      case strcat::StructureTag::Kind::AbGroup:
        ej["tag"] = "AbGroup";
        ej["carrier"] = group_json(std::get<exactla::FgAbGroup>(e.carrier));
        break;
      case strcat::StructureTag::Kind::Ring:
        ej["tag"] = "Ring";
        ej["carrier"] = ring_json(std::get<ringspec::FiniteRing>(e.carrier));
        break;
      case strcat::StructureTag::Kind::VectorSpace:
        ej["tag"] = "VectorSpace";
        ej["field"] = field_json(e.tag.field);
        ej["carrier"] = std::get<std::size_t>(e.carrier);
        break;
      case strcat::StructureTag::Kind::Opaque:
        ej["tag"] = "Opaque";
        ej["name"] = e.tag.name;
        ej["carrier"] = std::get<std::string>(e.carrier);
        break;
    }
    es.push_back(std::move(ej));
  }
  j["entries"] = std::move(es);
  return j;
}

inline strcat::StructuredHom parse_family_hom(const Json& j,
                                              const strcat::StructuredFamily& src,
                                              const strcat::StructuredFamily& tgt,
                                              const std::string& where) {
  strcat::Alignment al = strcat::Alignment::identity(src.size());
  if (detail::has(j, "alignment")) {
    const Json& a = j["alignment"];
    const std::string aw = where + ".alignment";
    if (!a.is_array() || a.size() != src.size())
      detail::bad(aw, "expected one 1-based target index per member");
    al.image.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::size_t v = detail::as_index(a[i], aw + "[" + std::to_string(i) + "]");
      if (v == 0) detail::bad(aw + "[" + std::to_string(i) + "]", "indices are 1-based");
      al.image.push_back(v - 1);
    }
  }
  const Json& cs = detail::member(j, "components", where);
  if (!cs.is_array() || cs.size() != src.size())
    detail::bad(where + ".components", "expected one component per member");
  std::vector<strcat::HomComponent> comps;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::string cw = where + ".components[" + std::to_string(i) + "]";
    if (al.image[i] >= tgt.size())
      detail::bad(where + ".alignment", "index beyond the target family");
    const strcat::FamilyEntry& a = src.entries[i];
    const strcat::FamilyEntry& b = tgt.entries[al.image[i]];
    switch (a.tag.kind) {
      case strcat::StructureTag::Kind::AbGroup:
        comps.emplace_back(parse_group_map_between(
            cs[i], std::get<exactla::FgAbGroup>(a.carrier),
            std::get<exactla::FgAbGroup>(b.carrier), cw));
        break;
      case strcat::StructureTag::Kind::Ring:
        comps.emplace_back(parse_ring_map_between(
            cs[i], std::get<ringspec::FiniteRing>(a.carrier),
            std::get<ringspec::FiniteRing>(b.carrier), cw));
        break;
      case strcat::StructureTag::Kind::VectorSpace:
        comps.emplace_back(parse_field_matrix(
            detail::member(cs[i], "matrix", cw), a.tag.field,
            std::get<std::size_t>(b.carrier), std::get<std::size_t>(a.carrier),
            cw + ".matrix"));
        break;
      case strcat::StructureTag::Kind::Opaque:
        if (!cs[i].is_null())
          detail::bad(cw, "opaque members take null, the identity");
        comps.emplace_back(std::monostate{});
        break;
    }
  }
  return strcat::StructuredHom(src, tgt, std::move(al), std::move(comps));
}

// --------------------------------------------------------------------------
// Presheaf files.  Values sit under open keys, restrictions under
// "<small><=<large>" keys; pairs left out are composed or defaulted by the
// presheaf constructor exactly as for programmatic construction.

inline sheaf::Presheaf parse_presheaf(const Json& j,
                                      const std::string& where = "presheaf") {
  FiniteSpace s = parse_space(detail::member(j, "space", where), where + ".space");
  std::string kind_name =
      detail::as_string(detail::member(j, "kind", where), where + ".kind");
  sheaf::ValueKind kind;
  if (kind_name == "AbGroup") kind = sheaf::ValueKind::AbGroup;
  else if (kind_name == "RingFamily") kind = sheaf::ValueKind::RingFamily;
  else if (kind_name == "Structured") kind = sheaf::ValueKind::Structured;
  else detail::bad(where + ".kind", "unknown kind '" + kind_name + "'");

  const Json& vs = detail::member(j, "values", where);
  if (!vs.is_object()) detail::bad(where + ".values", "expected an object");
  std::map<Mask, sheaf::Value> values;
  for (const auto& [key, val] : vs.items()) {
    const std::string vw = where + ".values." + key;
    Mask u = parse_open_key(key, s, vw);
    switch (kind) {
      case sheaf::ValueKind::AbGroup: values.emplace(u, parse_group(val, vw)); break;
      case sheaf::ValueKind::RingFamily: values.emplace(u, parse_ring(val, vw)); break;
      case sheaf::ValueKind::Structured: values.emplace(u, parse_family(val, vw)); break;
    }
  }

  std::map<std::pair<Mask, Mask>, sheaf::Morphism> rho;
  if (detail::has(j, "restrictions")) {
    const Json& rs = j["restrictions"];
    if (!rs.is_object()) detail::bad(where + ".restrictions", "expected an object");
    for (const auto& [key, val] : rs.items()) {
      const std::string rw = where + ".restrictions." + key;
      std::size_t cut = key.find("<=");
      if (cut == std::string::npos)
        detail::bad(rw, "keys look like \"small<=large\"");
      Mask u = parse_open_key(key.substr(0, cut), s, rw);
      Mask v = parse_open_key(key.substr(cut + 2), s, rw);
      auto needs = [&](Mask m) -> const sheaf::Value& {
        auto it = values.find(m);
        if (it == values.end())
          detail::bad(rw, "no value was given on " + s.set_label(m));
        return it->second;
      };
      switch (kind) {
        case sheaf::ValueKind::AbGroup:
          rho.emplace(std::make_pair(u, v),
                      parse_group_map_between(
                          val, std::get<exactla::FgAbGroup>(needs(v)),
                          std::get<exactla::FgAbGroup>(needs(u)), rw));
          break;
        case sheaf::ValueKind::RingFamily:
          rho.emplace(std::make_pair(u, v),
                      parse_ring_map_between(
                          val, std::get<ringspec::FiniteRing>(needs(v)),
                          std::get<ringspec::FiniteRing>(needs(u)), rw));
          break;
        case sheaf::ValueKind::Structured:
          rho.emplace(std::make_pair(u, v),
                      parse_family_hom(
                          val, std::get<strcat::StructuredFamily>(needs(v)),
                          std::get<strcat::StructuredFamily>(needs(u)), rw));
          break;
      }
    }
  }
  return sheaf::Presheaf(std::move(s), kind, std::move(values), rho);
}

namespace detail {

inline Json morphism_json(const sheaf::Morphism& m) {
  if (const auto* gm = std::get_if<exactla::GroupMap>(&m)) {
    Json j;
    j["matrix"] = matrix_json(gm->matrix);
    return j;
  }
  if (const auto* rm = std::get_if<ringspec::RingMap>(&m)) {
    Json j;
    j["images"] = rm->images;
    return j;
  }
  const auto& sm = std::get<strcat::StructuredHom>(m);
  Json j;
  Json al = Json::array();
  for (std::size_t v : sm.alignment.image) al.push_back(v + 1);
  j["alignment"] = std::move(al);
  Json cs = Json::array();
  for (std::size_t i = 0; i < sm.components.size(); ++i) {
    const strcat::HomComponent& c = sm.components[i];
    if (const auto* gm = std::get_if<exactla::GroupMap>(&c)) {
      Json cj;
      cj["matrix"] = matrix_json(gm->matrix);
      cs.push_back(std::move(cj));
    } else if (const auto* rm = std::get_if<ringspec::RingMap>(&c)) {
      Json cj;
      cj["images"] = rm->images;
      cs.push_back(std::move(cj));
    } else if (const auto* fm = std::get_if<exactla::FieldMatrix>(&c)) {
      Json cj;
      cj["matrix"] = field_matrix_json(*fm);
      cs.push_back(std::move(cj));
    } else {
      cs.push_back(nullptr);
    }
  }
  j["components"] = std::move(cs);
  return j;
}

}  // namespace detail

inline Json presheaf_json(const sheaf::Presheaf& f) {
  const FiniteSpace& s = f.space();
  Json j;
  j["space"] = space_json(s);
  j["kind"] = sheaf::kind_name(f.kind());
  Json vs;
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    switch (f.kind()) {
      case sheaf::ValueKind::AbGroup:
        vs[open_key(s, u)] = group_json(f.group_value(u));
        break;
      case sheaf::ValueKind::RingFamily:
        vs[open_key(s, u)] = ring_json(f.ring_value(u));
        break;
      case sheaf::ValueKind::Structured:
        vs[open_key(s, u)] = family_json(f.family_value(u));
        break;
    }
  }
  j["values"] = std::move(vs);
  Json rs = Json::object();
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      rs[open_key(s, u) + "<=" + open_key(s, v)] = detail::morphism_json(f.rho(u, v));
    }
  j["restrictions"] = std::move(rs);
  return j;
}

// --------------------------------------------------------------------------
// Cover chains, vertical families, bundles, monoids.

inline std::vector<finspace::Cover> parse_cover_chain(const Json& j,
                                                      const FiniteSpace& s,
                                                      const std::string& where = "covers") {
  const Json& chain = detail::has(j, "chain") ? j["chain"] : j;
  if (!chain.is_array() || chain.empty())
    detail::bad(where, "expected a nonempty array of covers");
  std::vector<finspace::Cover> out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const std::string cw = where + "[" + std::to_string(i) + "]";
    if (!chain[i].is_array() || chain[i].empty())
      detail::bad(cw, "expected a nonempty array of members");
    std::vector<Mask> members;
    for (const Json& mem : chain[i]) {
      if (!mem.is_array()) detail::bad(cw, "members are arrays of point labels");
      std::vector<std::string> labels;
      for (const Json& l : mem) labels.push_back(detail::as_string(l, cw));
      members.push_back(s.mask_of(labels));
    }
    out.push_back(finspace::make_cover(s, s.full_mask(), members));
  }
  return out;
}

inline complexes::VerticalFamily parse_verticals(const Json& j,
                                                 const std::string& where = "verticals") {
  if (j.is_string() && j.get<std::string>() == "trivial")
    return complexes::VerticalFamily::trivial();
  const Json& rows = detail::has(j, "maps") ? j["maps"] : j;
  if (!rows.is_array()) detail::bad(where, "expected \"trivial\" or an array of map rows");
  std::vector<std::vector<exactla::GroupMap>> maps;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!rows[r].is_array()) detail::bad(rw, "expected an array of maps");
    std::vector<exactla::GroupMap> row;
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      row.push_back(parse_group_map(rows[r][c], rw + "[" + std::to_string(c) + "]"));
    maps.push_back(std::move(row));
  }
  return complexes::VerticalFamily::given(std::move(maps));
}

inline hochschild::FieldVerticalFamily parse_field_verticals(
    const Json& j, const std::string& where = "verticals") {
  if (j.is_string() && j.get<std::string>() == "trivial")
    return hochschild::FieldVerticalFamily::trivial();
  exactla::ExactField field =
      parse_field(detail::member(j, "field", where), where + ".field");
  const Json& rows = detail::member(j, "maps", where);
  if (!rows.is_array()) detail::bad(where + ".maps", "expected an array of map rows");
  std::vector<std::vector<exactla::FieldMatrix>> maps;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string rw = where + ".maps[" + std::to_string(r) + "]";
    if (!rows[r].is_array()) detail::bad(rw, "expected an array of matrices");
    std::vector<exactla::FieldMatrix> row;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const Json& mj = rows[r][c];
      const std::string mw = rw + "[" + std::to_string(c) + "]";
      if (!mj.is_array()) detail::bad(mw, "expected an array of rows");
      std::size_t nr = mj.size();
      std::size_t nc = nr == 0 ? 0 : (mj[0].is_array() ? mj[0].size() : 0);
      row.push_back(parse_field_matrix(mj, field, nr, nc, mw));
    }
    maps.push_back(std::move(row));
  }
  return hochschild::FieldVerticalFamily::given(std::move(maps));
}

inline hochschild::FiniteDimAlgebra parse_algebra(const Json& j,
                                                  const std::string& where = "algebra") {
  exactla::ExactField field =
      parse_field(detail::member(j, "field", where), where + ".field");
  std::size_t dim = detail::as_index(detail::member(j, "dim", where), where + ".dim");
  if (dim == 0) detail::bad(where + ".dim", "expected a positive dimension");
  const Json& mul = detail::member(j, "mul", where);
  if (!mul.is_array() || mul.size() != dim)
    detail::bad(where + ".mul", "expected " + std::to_string(dim) + " rows");
  std::vector<exactla::Rat> structure(dim * dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string iw = where + ".mul[" + std::to_string(i) + "]";
    if (!mul[i].is_array() || mul[i].size() != dim)
      detail::bad(iw, "expected " + std::to_string(dim) + " products");
    for (std::size_t k = 0; k < dim; ++k) {
      const std::string kw = iw + "[" + std::to_string(k) + "]";
      if (!mul[i][k].is_array() || mul[i][k].size() != dim)
        detail::bad(kw, "expected " + std::to_string(dim) + " coordinates");
      for (std::size_t c = 0; c < dim; ++c)
        structure[(i * dim + k) * dim + c] =
            detail::as_rat(mul[i][k][c], kw + "[" + std::to_string(c) + "]");
    }
  }
  const Json& one = detail::member(j, "one", where);
  if (!one.is_array() || one.size() != dim)
    detail::bad(where + ".one", "expected " + std::to_string(dim) + " coordinates");
  std::vector<exactla::Rat> unit;
  for (std::size_t c = 0; c < dim; ++c)
    unit.push_back(detail::as_rat(one[c], where + ".one[" + std::to_string(c) + "]"));
  return hochschild::FiniteDimAlgebra::make(field, dim, std::move(structure),
                                            std::move(unit));
}

inline ktheory::BundleModel parse_bundle(const Json& j,
                                         const std::string& where = "bundle") {
  FiniteSpace base = parse_space(detail::member(j, "base", where), where + ".base");
  std::size_t m = detail::as_index(detail::member(j, "m", where), where + ".m");
  std::string field = detail::has(j, "field")
                          ? detail::as_string(j["field"], where + ".field")
                          : "K";
  const Json& rs = detail::member(j, "ranks", where);
  if (!rs.is_object()) detail::bad(where + ".ranks", "expected an object");
  std::map<std::string, std::vector<long>> ranks;
  for (const auto& [point, row] : rs.items()) {
    const std::string rw = where + ".ranks." + point;
    if (!row.is_array()) detail::bad(rw, "expected an array of ranks");
    std::vector<long> r;
    for (std::size_t i = 0; i < row.size(); ++i)
      r.push_back(detail::as_long(row[i], rw + "[" + std::to_string(i) + "]"));
    ranks.emplace(point, std::move(r));
  }
  return ktheory::validate_bundle(base, std::move(field), m, ranks);
}

inline ktheory::AbelianMonoidPresentation parse_monoid(
    const Json& j, std::size_t max_elements, const std::string& where = "monoid") {
  if (detail::has(j, "bounded_naturals"))
    return ktheory::bounded_naturals(
        detail::as_index(j["bounded_naturals"], where + ".bounded_naturals"),
        max_elements);
  if (detail::has(j, "bounded_ranks")) {
    const Json& br = j["bounded_ranks"];
    const std::string bw = where + ".bounded_ranks";
    return ktheory::bounded_rank_monoid(
        detail::as_index(detail::member(br, "slots", bw), bw + ".slots"),
        detail::as_index(detail::member(br, "bound", bw), bw + ".bound"),
        max_elements);
  }
  const Json& els = detail::member(j, "elements", where);
  if (!els.is_array() || els.empty())
    detail::bad(where + ".elements", "expected a nonempty array of labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < els.size(); ++i)
    labels.push_back(detail::as_string(els[i], where + ".elements[" + std::to_string(i) + "]"));
  const std::size_t n = labels.size();
  const Json& zj = detail::member(j, "zero", where);
  std::size_t zero;
  if (zj.is_string()) {
    auto it = std::find(labels.begin(), labels.end(), zj.get<std::string>());
    if (it == labels.end())
      detail::bad(where + ".zero", "no element labelled '" + zj.get<std::string>() + "'");
    zero = static_cast<std::size_t>(it - labels.begin());
  } else {
    zero = detail::as_index(zj, where + ".zero");
    if (zero >= n) detail::bad(where + ".zero", "index beyond the element list");
  }
  const Json& t = detail::member(j, "add", where);
  const std::string tw = where + ".add";
  if (!t.is_array() || t.size() != n)
    detail::bad(tw, "expected " + std::to_string(n) + " rows");
  std::vector<std::size_t> table;
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rw = tw + "[" + std::to_string(r) + "]";
    if (!t[r].is_array() || t[r].size() != n)
      detail::bad(rw, "expected " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      if (t[r][c].is_null()) {
        table.push_back(ktheory::AbelianMonoidPresentation::outside);
        continue;
      }
      std::size_t v = detail::as_index(t[r][c], rw + "[" + std::to_string(c) + "]");
      if (v >= n) detail::bad(rw + "[" + std::to_string(c) + "]",
                              "index beyond the element list");
      table.push_back(v);
    }
  }
  return ktheory::AbelianMonoidPresentation::make(std::move(labels), zero,
                                                  std::move(table), max_elements);
}

}  // namespace structura::io
