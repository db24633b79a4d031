#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fibercoh/assembly.hpp"
#include "fibercoh/halfline.hpp"
#include "fibercoh/hilbert.hpp"
#include "fibercoh/json_io.hpp"
#include "fibercoh/report.hpp"
#include "fibercoh/simplicial.hpp"

namespace fs = std::filesystem;
using namespace fibercoh;

namespace {

enum Status { kOk = 0, kAuditFailed = 1, kInputError = 2 };

int status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_input:
    case ErrorKind::insufficient_data:
    case ErrorKind::unknown_case_study:
    case ErrorKind::perversity_range:
    case ErrorKind::critical_weight:
      return kInputError;
    default:
      return kAuditFailed;
  }
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct Sink {
  std::string out_dir;
  bool quiet = false;

  void prepare() const {
    if (!out_dir.empty()) fs::create_directories(out_dir);
  }
  void write_file(const std::string& name, const std::string& text) const {
    if (out_dir.empty()) return;
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::invalid_input, "cannot write " + (fs::path(out_dir) / name).string());
    f << text;
  }
  void emit(const Table& t, bool titled) const {
    write_file(t.name + ".tsv", to_tsv(t));
    if (quiet) return;
    if (titled) std::cout << "# " << t.name << '\n';
    std::cout << to_tsv(t);
  }
  void emit(const std::vector<Table>& ts) const {
    for (auto& t : ts) emit(t, ts.size() > 1);
  }
  void say(const std::string& line) const {
    if (!quiet) std::cout << line << '\n';
  }
};

// poset ------------------------------------------------------------------------------------------

struct PosetArgs {
  std::string file, kernels;
  bool relaxed = false;
};

int cmd_poset(const PosetArgs& a, const Sink& sink) {
  auto p = load<FiberedCornersPoset>(a.file);
  bool clean = true;
  Table t{"poset_report", {"check", "result", "detail"}, {}};
  auto row = [&](const std::string& check, const std::string& result, const std::string& detail) {
    if (result == "fail") clean = false;
    t.add({check, result, detail});
  };

  auto v = validate(p);
  std::string detail;
  for (auto& x : v.violations) {
    std::string ids;
    for (auto& id : x.ids) ids += (ids.empty() ? "" : ",") + id;
    detail += (detail.empty() ? "" : "; ") + x.kind + "(" + ids + ")" + (x.detail.empty() ? "" : " " + x.detail);
  }
  row("validate", v.ok() ? "pass" : "fail", detail);
  if (!v.ok()) {
    sink.emit(t, false);
    return kAuditFailed;
  }
  const int d = depth(p);
  row("depth", std::to_string(d), "");

  try {
    auto w = witt_check(p);
    std::string off;
    for (auto& id : w.offending) off += (off.empty() ? "" : ",") + id;
    row("witt", w.witt ? "pass" : "fail", off.empty() ? "" : "nonzero middle link cohomology at " + off);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::insufficient_data) throw;
    row("witt", "unknown", e.what());
  }

  if (d == 2) {
    try {
      auto s = check_submaximal_fibers(p);
      std::string why;
      for (auto& id : s.too_small) why += (why.empty() ? "" : "; ") + std::string("fiber too small at ") + id;
      for (auto& id : s.flag_false) why += (why.empty() ? "" : "; ") + std::string("boundary flag false at ") + id;
      row("submaximal_fibers", s.pass ? "pass" : "fail", why);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::insufficient_data) throw;
      row("submaximal_fibers", "unknown", e.what());
    }
  }

  if (!a.kernels.empty()) {
    auto k = load<KernelData>(a.kernels);
    for (auto& verdict : check_decay_conditions(p, k, a.relaxed).verdicts) {
      std::string off;
      for (int q : verdict.offending) off += (off.empty() ? "" : ",") + std::to_string(q);
      row("decay " + verdict.upper + ">=" + verdict.lower + " " + to_string(verdict.condition),
          verdict.pass() ? "pass" : "fail", off.empty() ? "" : "offending degrees " + off);
    }
  }
  sink.emit(t, false);
  return clean ? kOk : kAuditFailed;
}

// cohomology -------------------------------------------------------------------------------------

struct CohomologyArgs {
  int hilbert = 0;
  std::string bundle;
  std::vector<std::string> weights;
};

Weight build_weight(const FiberedCornersPoset& p, const std::vector<std::string>& specs) {
  if (specs.empty()) throw Error(ErrorKind::invalid_input, "--weight is required");
  Weight w;
  for (auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      for (auto& id : p.ids()) w[id] = parse_weight_entry(s);
      continue;
    }
    std::string id = s.substr(0, eq);
    p.at(id);
    w[id] = parse_weight_entry(s.substr(eq + 1));
  }
  for (auto& id : p.ids())
    if (!w.count(id)) throw Error(ErrorKind::invalid_input, "no weight for hypersurface " + id);
  return w;
}

int cmd_cohomology(const CohomologyArgs& a, const Sink& sink) {
  CohomologyBundle b;
  if (a.hilbert > 0 && !a.bundle.empty()) throw Error(ErrorKind::invalid_input, "give either --hilbert or --bundle");
  if (a.hilbert > 0) {
    if (a.hilbert < 2) throw Error(ErrorKind::invalid_input, "--hilbert needs n >= 2");
    b.poset = enumerate_strata(a.hilbert);
    b.leaf = hilbert_leaf(a.hilbert);
    b.reference = {{kAbsolute, betti_hilb(a.hilbert)}, {kCompact, poincare_dual(betti_hilb(a.hilbert), b.poset.ambient_dim)}};
  } else if (!a.bundle.empty()) {
    b = load_cohomology_bundle(a.bundle);
  } else {
    throw Error(ErrorKind::invalid_input, "give --hilbert N or --bundle DIR");
  }
  const int m = b.poset.ambient_dim;
  Weight w = build_weight(b.poset, a.weights);
  auto r = wh_global(b.poset, w, b.leaf, b.reference);
  std::vector<Table> out{detail::local_table("local", r.local)};
  if (!r.value) {
    sink.emit(out);
    sink.say("no theory matches the local models");
    for (auto& t : r.attempts) sink.say(detail::describe(t));
    return kAuditFailed;
  }
  out.push_back(detail::certificate_table("certificate", {r.certificate->theory, r.certificate->rows}));

  std::optional<GradedDim> dual;
  std::string dual_note;
  try {
    auto d = wh_global(b.poset, negate(w), b.leaf, b.reference);
    if (d.value) dual = d.value;
    else dual_note = "no match at the negated weight";
  } catch (const Error& e) {
    dual_note = e.what();
  }
  Table values{"cohomology", {"degree", "wh", "wh_negated"}, {}};
  for (int q = 0; q <= m; ++q)
    values.add({std::to_string(q), std::to_string((*r.value)[q]), dual ? std::to_string((*dual)[q]) : "unknown"});
  out.push_back(values);
  Table audit{"duality", {"ambient_dim", "result", "detail"}, {}};
  bool ok = true;
  if (dual) {
    ok = duality_audit(*r.value, *dual, m);
    audit.add({std::to_string(m), ok ? "pass" : "fail", ""});
  } else {
    audit.add({std::to_string(m), "skipped", dual_note});
  }
  out.push_back(audit);
  sink.emit(out);
  return ok ? kOk : kAuditFailed;
}

// case -------------------------------------------------------------------------------------------

struct CaseArgs {
  std::string name, fixtures = "fixtures", goldens;
  bool write_goldens = false;
};

std::string golden_dir_name(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

/// Golden text with '#' comment lines removed.
std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + '\n';
  return out;
}

int cmd_case(const CaseArgs& a, const Sink& sink) {
  auto bundle = load_case_bundle(a.name, a.fixtures);
  auto r = run_case_study(a.name, bundle);
  fs::path gdir = a.goldens.empty() ? fs::path(a.fixtures) / "goldens" / golden_dir_name(a.name) : fs::path(a.goldens);
  std::string transcript;
  for (auto& line : r.transcript) transcript += line + '\n';
  sink.write_file("transcript.txt", transcript);
  sink.emit(r.tables);

  if (a.write_goldens) {
    fs::create_directories(gdir);
    for (auto& t : r.tables) {
      std::ofstream f(gdir / (t.name + ".tsv"), std::ios::binary);
      f << to_tsv(t);
    }
  }
  Table cmp{"golden_comparison", {"table", "result"}, {}};
  bool same = true;
  std::set<std::string> seen;
  for (auto& t : r.tables) {
    seen.insert(t.name + ".tsv");
    auto path = gdir / (t.name + ".tsv");
    std::string result = !fs::exists(path) ? "missing" : strip_comments(read_text(path)) == to_tsv(t) ? "identical" : "differs";
    same = same && result == "identical";
    cmp.add({t.name, result});
  }
  if (fs::is_directory(gdir))
    for (auto& e : fs::directory_iterator(gdir))
      if (e.path().extension() == ".tsv" && !seen.count(e.path().filename().string())) {
        cmp.add({e.path().stem().string(), "unexpected"});
        same = false;
      }
  std::sort(cmp.rows.begin(), cmp.rows.end());
  sink.emit(cmp, true);
  for (auto& f : r.failed_audits) std::cerr << "audit failed: " << f << '\n';
  return r.pass() && same ? kOk : kAuditFailed;
}

// ic ---------------------------------------------------------------------------------------------

struct IcArgs {
  std::string file;
  std::vector<std::string> perversities;
  bool duality = false;
};

Perversity read_perversity(const std::string& s) {
  if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-')) {
    std::vector<int> v;
    std::istringstream in(s);
    std::string part;
    while (std::getline(in, part, ',')) {
      try {
        v.push_back(std::stoi(part));
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_input, "bad perversity '" + s + "'");
      }
    }
    return Perversity(s, v);
  }
  return Perversity::named(s);
}

int cmd_ic(const IcArgs& a, const Sink& sink) {
  auto x = load<StratifiedComplex>(a.file);
  std::vector<Perversity> ps;
  for (auto& s : a.perversities.empty() ? std::vector<std::string>{"lower_middle", "upper_middle"} : a.perversities)
    ps.push_back(read_perversity(s));
  std::vector<std::string> labels;
  std::vector<GradedDim> values;
  for (auto& p : ps) {
    labels.push_back(p.name());
    values.push_back(intersection_cohomology(x, p));
  }
  std::vector<Table> out{graded_table("ic", labels, values, x.n + 1)};
  bool ok = true;
  if (a.duality) {
    Table d{"duality", {"perversity", "complement", "result"}, {}};
    for (auto& p : ps) {
      auto audit = duality_audit(x, p, complement(p));
      ok = ok && audit.dual;
      d.add({p.name(), to_string(audit.ih_q), audit.dual ? "pass" : "fail"});
    }
    out.push_back(d);
  }
  sink.emit(out);
  return ok ? kOk : kAuditFailed;
}

// hilbert ----------------------------------------------------------------------------------------

int cmd_hilbert(int n, const Sink& sink) {
  if (n < 2) throw Error(ErrorKind::invalid_input, "n must be at least 2");
  auto p = enumerate_strata(n);
  sink.write_file("poset.json", Json(p).dump(2) + "\n");
  Table strata{"strata", {"shape", "span_dim", "base_dim", "fiber_dim", "pointwise", "setwise", "quotient", "fiber_betti"}, {}};
  for (auto& s : hilbert_strata(n)) {
    auto g = group_orders(representative(s.shape));
    strata.add({shape_id(s.shape), std::to_string(s.dims.complex_span), std::to_string(s.dims.base),
                std::to_string(s.dims.fiber), std::to_string(g.pointwise), std::to_string(g.setwise),
                std::to_string(g.quotient), to_string(fiber_cohomology(s.shape))});
  }
  auto betti = betti_hilb(n);
  sink.emit({strata, graded_table("betti", {"betti"}, {betti}, betti.top() + 1)});
  auto check = check_stratum_dimensions(n);
  for (auto& prob : check.problems) std::cerr << "dimension check: " << prob << '\n';
  return check.pass ? kOk : kAuditFailed;
}

// halfline ---------------------------------------------------------------------------------------

struct HalflineArgs {
  double lambda = -1;
  std::vector<double> deltas{0.1, 1, 10};
  int resolution = 4096;
  double tolerance = 1e-8;
};

int cmd_halfline(const HalflineArgs& a, const Sink& sink) {
  if (!(a.tolerance > 0)) throw Error(ErrorKind::invalid_input, "tolerance must be positive");
  auto r = norm_report(a.lambda, a.deltas, a.resolution);
  Table norms{"norms", {"delta", "norm_G", "norm_P"}, {}};
  for (auto& row : r.rows) norms.add({num(row.delta), num(row.norm_G), num(row.norm_P)});
  Table res{"residuals", {"delta", "d_after_G", "P_idempotence", "G_against_constants"}, {}};
  bool ok = true;
  for (double d : a.deltas) {
    auto x = operator_residuals(a.lambda, d, a.resolution);
    for (double v : {x.d_after_G, x.P_idempotence, x.G_against_constants})
      if (!std::isnan(v) && v > a.tolerance) ok = false;
    res.add({num(d), num(x.d_after_G), num(x.P_idempotence), num(x.G_against_constants)});
  }
  Table spread{"spread", {"quantity", "relative_spread"}, {}};
  spread.add({"norm_G", num(r.spread_G)});
  if (a.lambda < 0) spread.add({"norm_P", num(r.spread_P)});
  sink.emit({norms, res, spread});
  return ok ? kOk : kAuditFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted and intersection cohomology of spaces with fibered corners"};
  app.require_subcommand(1);
  Sink sink;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", sink.out_dir, "Directory receiving TSV tables");
    sub->add_flag("--quiet", sink.quiet, "Suppress standard output tables");
  };

  PosetArgs pa;
  auto* poset = app.add_subcommand("poset", "Validate a poset and check its hypotheses");
  poset->add_option("file", pa.file, "Poset JSON")->required();
  poset->add_option("--kernels", pa.kernels, "Kernel JSON keyed by i:j");
  poset->add_flag("--relaxed", pa.relaxed, "Relax the closed window at submaximal strata below maximal ones");
  common(poset);

  CohomologyArgs ca;
  auto* coh = app.add_subcommand("cohomology", "Global weighted cohomology for a weight");
  coh->add_option("--hilbert", ca.hilbert, "Use the Hilbert scheme strata of n points");
  coh->add_option("--bundle", ca.bundle, "Directory with poset.json, leaf.json, reference.json");
  coh->add_option("--weight", ca.weights, "Weight for every hypersurface, or id=weight")->allow_extra_args(false);
  common(coh);

  CaseArgs cs;
  auto* kase = app.add_subcommand("case", "Run a case study and compare with goldens");
  kase->add_option("name", cs.name, "qale_sp2, monopole_k3 or hilbert(n)")->required();
  kase->add_option("--fixtures", cs.fixtures, "Fixture root");
  kase->add_option("--goldens", cs.goldens, "Golden directory");
  kase->add_flag("--write-goldens", cs.write_goldens, "Overwrite goldens with the current tables");
  common(kase);

  IcArgs ia;
  auto* ic = app.add_subcommand("ic", "Simplicial intersection cohomology");
  ic->add_option("file", ia.file, "Complex JSON")->required();
  ic->add_option("--perversity", ia.perversities, "Name or comma list from codimension 2")->allow_extra_args(false);
  ic->add_flag("--duality", ia.duality, "Audit duality against the complementary perversity");
  common(ic);

  int hn = 0;
  auto* hilb = app.add_subcommand("hilbert", "Strata of the Hilbert scheme of n points");
  hilb->add_option("n", hn, "Number of points")->required();
  common(hilb);

  HalflineArgs ha;
  auto* half = app.add_subcommand("halfline", "Half-line operator norms and residuals");
  half->add_option("--lambda", ha.lambda, "Weight exponent")->required();
  half->add_option("--delta", ha.deltas, "Collar length, repeatable")->allow_extra_args(false);
  half->add_option("--resolution", ha.resolution, "Grid intervals");
  half->add_option("--tolerance", ha.tolerance, "Residual tolerance");
  common(half);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    sink.prepare();
    if (*poset) return cmd_poset(pa, sink);
    if (*coh) return cmd_cohomology(ca, sink);
    if (*kase) return cmd_case(cs, sink);
    if (*ic) return cmd_ic(ia, sink);
    if (*hilb) return cmd_hilbert(hn, sink);
    if (*half) return cmd_halfline(ha, sink);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return status_of(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
