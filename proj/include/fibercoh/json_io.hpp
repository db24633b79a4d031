#pragma once

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fibercoh/assembly.hpp"
#include "fibercoh/poset.hpp"
#include "fibercoh/simplicial.hpp"
#include "fibercoh/weight.hpp"

namespace fibercoh {

using Json = nlohmann::json;

inline void to_json(Json& j, const GradedDim& g) { j = g.dims(); }
inline void from_json(const Json& j, GradedDim& g) { g = GradedDim(j.get<std::vector<Rank>>()); }

inline void to_json(Json& j, const Flag& f) { j = Json{{"value", f.value}, {"source", f.source}}; }
inline void from_json(const Json& j, Flag& f) {
  if (j.is_boolean()) {
    f = {j.get<bool>(), ""};
    return;
  }
  f.value = j.at("value").get<bool>();
  f.source = j.value("source", "");
}

inline void to_json(Json& j, const Hypersurface& h) {
  j = Json{{"id", h.id}, {"dim_fiber", h.dim_fiber}, {"dim_base", h.dim_base}};
  j["link_ih"] = h.link_ih ? Json(*h.link_ih) : Json(nullptr);
  j["flags"] = h.flags;
  if (!h.fiber.empty()) j["fiber"] = h.fiber;
}
inline void from_json(const Json& j, Hypersurface& h) {
  h.id = j.at("id").get<std::string>();
  h.dim_fiber = j.at("dim_fiber").get<int>();
  h.dim_base = j.at("dim_base").get<int>();
  h.link_ih.reset();
  if (j.contains("link_ih") && !j["link_ih"].is_null()) h.link_ih = j["link_ih"].get<GradedDim>();
  h.flags = j.value("flags", std::map<std::string, Flag>{});
  h.fiber = j.value("fiber", "");
}

inline void to_json(Json& j, const FiberedCornersPoset& p) {
  j = Json{{"ambient_dim", p.ambient_dim}, {"hypersurfaces", p.hypersurfaces}};
  j["order"] = Json::array();
  for (auto& [a, b] : p.order) j["order"].push_back({a, b});
  j["chains"] = p.chains;
}
inline void from_json(const Json& j, FiberedCornersPoset& p) {
  p.ambient_dim = j.at("ambient_dim").get<int>();
  p.hypersurfaces = j.at("hypersurfaces").get<std::vector<Hypersurface>>();
  p.order.clear();
  for (auto& pair : j.value("order", Json::array())) {
    if (!pair.is_array() || pair.size() != 2) throw Error(ErrorKind::invalid_input, "order entries are [lower, upper]");
    p.order.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  p.chains = j.value("chains", std::vector<std::vector<std::string>>{});
}

inline void to_json(Json& j, const KernelData& k) {
  j = Json{{"kernels", k.kernels}, {"projected", k.projected}, {"degree_sets", k.degree_sets}};
  if (!k.provenance.empty()) j["provenance"] = k.provenance;
}
inline void from_json(const Json& j, KernelData& k) {
  k.kernels = j.value("kernels", std::map<std::string, GradedDim>{});
  k.projected = j.value("projected", std::map<std::string, GradedDim>{});
  k.degree_sets = j.value("degree_sets", std::map<std::string, std::set<int>>{});
  k.provenance = j.value("provenance", std::map<std::string, std::string>{});
}

inline void to_json(Json& j, const StratumDecl& s) { j = Json{{"codim", s.codim}, {"simplices", s.simplices}}; }
inline void from_json(const Json& j, StratumDecl& s) {
  s.codim = j.at("codim").get<int>();
  s.simplices = j.at("simplices").get<std::vector<Simplex>>();
}

inline void to_json(Json& j, const StratifiedComplex& x) {
  j = Json{{"n", x.n}, {"simplices", x.simplices}, {"strata", x.strata}};
}
inline void from_json(const Json& j, StratifiedComplex& x) {
  x.n = j.at("n").get<int>();
  x.simplices = j.at("simplices").get<std::vector<Simplex>>();
  x.strata = j.value("strata", std::vector<StratumDecl>{});
}

/// Accepts "eps", "-eps", "2eps", "3/2", "1/2+eps", "-1-2eps".
inline WeightEntry parse_weight_entry(const std::string& text) {
  static const std::regex rational(R"(^([+-]?\d+(?:/\d+)?)$)");
  static const std::regex with_eps(R"(^(?:([+-]?\d+(?:/\d+)?)(?=[+-]))?([+-]?)(\d*)eps$)");
  static const std::regex spaced_sign(R"(\s*([+-])\s*)"), edges(R"(^\s+|\s+$)");
  std::string t = std::regex_replace(std::regex_replace(text, spaced_sign, "$1"), edges, "");
  std::smatch m;
  WeightEntry w;
  if (std::regex_match(t, m, rational)) {
    w.r = parse_rational(m[1].str());
  } else if (std::regex_match(t, m, with_eps)) {
    if (m[1].matched) w.r = parse_rational(m[1].str());
    std::int64_t c = m[3].length() ? std::stoll(m[3].str()) : 1;
    w.s = m[2].str() == "-" ? -c : c;
  } else {
    throw Error(ErrorKind::invalid_input, "cannot read weight '" + text + "'");
  }
  return w;
}

inline void to_json(Json& j, const WeightEntry& w) { j = Json{{"r", to_string(w.r)}, {"s", w.s}}; }
inline void from_json(const Json& j, WeightEntry& w) {
  if (j.is_string()) {
    w = parse_weight_entry(j.get<std::string>());
    return;
  }
  const Json& r = j.at("r");
  w.r = r.is_string() ? parse_rational(r.get<std::string>()) : rat(r.get<long>());
  w.s = j.value("s", std::int64_t{0});
}

/// Arrays list values from codimension two; objects carry a name and values; strings name a classical perversity.
inline Perversity perversity_from_json(const Json& j) {
  if (j.is_string()) return Perversity::named(j.get<std::string>());
  if (j.is_array()) return Perversity("custom", j.get<std::vector<int>>());
  return Perversity(j.value("name", "custom"), j.at("values").get<std::vector<int>>());
}
inline Json perversity_to_json(const Perversity& p) { return Json{{"name", p.name()}, {"values", p.values()}}; }

inline void to_json(Json& j, const FiberTables& f) {
  j = Json::object();
  if (f.absolute) j[kAbsolute] = *f.absolute;
  if (f.compact) j[kCompact] = *f.compact;
  if (!f.ih.empty()) j["ih"] = f.ih;
  if (!f.injective.empty()) j["injective"] = f.injective;
  if (f.invariant_dims) j["invariant_dims"] = *f.invariant_dims;
  if (!f.provenance.empty()) j["provenance"] = f.provenance;
}
inline void from_json(const Json& j, FiberTables& f) {
  f = {};
  if (j.contains(kAbsolute)) f.absolute = j[kAbsolute].get<GradedDim>();
  if (j.contains(kCompact)) f.compact = j[kCompact].get<GradedDim>();
  f.ih = j.value("ih", std::map<std::string, GradedDim>{});
  f.injective = j.value("injective", std::map<std::string, Flag>{});
  if (j.contains("invariant_dims")) f.invariant_dims = j["invariant_dims"].get<GradedDim>();
  f.provenance = j.value("provenance", "");
}

inline void to_json(Json& j, const LeafData& l) { j = Json{{"fibers", l.fibers}}; }
inline void from_json(const Json& j, LeafData& l) {
  l.fibers = j.at("fibers").get<std::map<std::string, FiberTables>>();
}

/// Line and column (both 1-based) of a byte offset.
inline std::pair<std::size_t, std::size_t> text_position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = text_position(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::invalid_input,
                origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Json load_json(const std::filesystem::path& path) { return parse_json_text(read_text(path), path.string()); }

/// Decodes `j` as T, reporting schema problems against `origin`.
template <class T>
T decode(const Json& j, const std::string& origin) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::invalid_input, origin + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_input, origin + ": " + e.what());
  }
}

template <class T>
T load(const std::filesystem::path& path) {
  return decode<T>(load_json(path), path.string());
}

inline std::map<std::string, GradedDim> load_reference(const std::filesystem::path& path) {
  return load<std::map<std::string, GradedDim>>(path);
}

/// Directory holding poset.json and leaf.json, with reference.json when a global value is requested.
struct CohomologyBundle {
  FiberedCornersPoset poset;
  LeafData leaf;
  std::map<std::string, GradedDim> reference;
};

inline CohomologyBundle load_cohomology_bundle(const std::filesystem::path& dir) {
  CohomologyBundle b;
  b.poset = load<FiberedCornersPoset>(dir / "poset.json");
  b.leaf = load<LeafData>(dir / "leaf.json");
  if (std::filesystem::exists(dir / "reference.json")) b.reference = load_reference(dir / "reference.json");
  return b;
}

namespace detail {

inline void require_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::invalid_input, "missing bundle " + dir.string());
}

inline std::map<std::string, std::string> provenance_of(const Json& j) {
  return j.value("provenance", std::map<std::string, std::string>{});
}

}  // namespace detail

/// poset.json, leaf.json and case.json {n, absolute, compact, middle_image_rank, provenance}.
inline QaleInputs load_qale_bundle(const std::filesystem::path& dir) {
  detail::require_dir(dir);
  QaleInputs in;
  in.poset = load<FiberedCornersPoset>(dir / "poset.json");
  in.leaf = load<LeafData>(dir / "leaf.json");
  auto path = (dir / "case.json").string();
  Json c = load_json(path);
  in.n = decode<int>(c.at("n"), path);
  in.absolute = decode<GradedDim>(c.at("absolute"), path);
  in.compact = decode<GradedDim>(c.at("compact"), path);
  in.middle_image_rank = decode<Rank>(c.at("middle_image_rank"), path);
  in.provenance = decode<std::map<std::string, std::string>>(c.value("provenance", Json::object()), path);
  return in;
}

/// poset.json, kernels.json and case.json with the remaining MonopoleInputs fields.
inline MonopoleInputs load_monopole_bundle(const std::filesystem::path& dir) {
  detail::require_dir(dir);
  MonopoleInputs in;
  in.poset = load<FiberedCornersPoset>(dir / "poset.json");
  in.kernels = load<KernelData>(dir / "kernels.json");
  auto path = (dir / "case.json").string();
  Json c = load_json(path);
  try {
    in.cover_base = c.at("cover_base").get<GradedDim>();
    in.cover_invariants = c.at("cover_invariants").get<GradedDim>();
    in.product_stratum = c.at("product_stratum").get<std::string>();
    in.closed_stratum = c.at("closed_stratum").get<std::string>();
    in.closed_fiber = c.at("closed_fiber").get<GradedDim>();
    in.base_cover = c.at("base_cover").get<GradedDim>();
    in.base_deck_order = c.value("base_deck_order", 2);
    in.ambient_sphere = c.at("ambient_sphere").get<GradedDim>();
    in.singular_component = c.at("singular_component").get<GradedDim>();
    in.singular_components = c.at("singular_components").get<int>();
    in.middle_dim_trials = c.at("middle_dim_trials").get<std::vector<Rank>>();
    in.provenance = detail::provenance_of(c);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::invalid_input, path + ": " + e.what());
  }
  return in;
}

/// Bundle for a named case study under `root`; hilbert(n) needs none.
inline CaseBundle load_case_bundle(const std::string& name, const std::filesystem::path& root) {
  CaseBundle b;
  if (name == "qale_sp2") b.qale = load_qale_bundle(root / name);
  if (name == "monopole_k3") b.monopole = load_monopole_bundle(root / name);
  return b;
}

}  // namespace fibercoh
