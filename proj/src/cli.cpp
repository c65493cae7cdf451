#include "dml/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#ifdef _WIN32
#include <io.h>
#define DML_ISATTY _isatty
#define DML_FILENO _fileno
#else
#include <unistd.h>
#define DML_ISATTY isatty
#define DML_FILENO fileno
#endif

#include "CLI11.hpp"
#include "dml/codegen.hpp"
#include "dml/corpus.hpp"
#include "dml/dsl.hpp"
#include "dml/graph.hpp"
#include "dml/oo.hpp"
#include "dml/pushout.hpp"

namespace dml::cli {

namespace {

namespace fs = std::filesystem;

// Usage-level I/O problems (missing or unreadable files) exit with 2.
struct IoFailure {
  std::string message;
};

bool color_enabled() {
  const char* v = std::getenv("DML_COLOR");
  if (v && std::string_view(v) == "0") return false;
  return DML_ISATTY(DML_FILENO(stdout)) != 0;
}

struct Report {
  std::ostringstream human;
  std::ostringstream machine;
  bool color = color_enabled();

  void line(const std::string& s) { human << s << "\n"; }
  void kv(const std::string& key, const std::string& value) { machine << key << ": " << value << "\n"; }
  std::string good(const std::string& s) const { return color ? "\x1b[32m" + s + "\x1b[0m" : s; }
  std::string bad(const std::string& s) const { return color ? "\x1b[31m" + s + "\x1b[0m" : s; }
};

std::string member_set(const Specification& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [n, _] : s.members) {
    if (!first) out += ", ";
    out += n;
    first = false;
  }
  return out + "}";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

Diagram load_file(const std::string& path) {
  if (!fs::exists(path)) throw IoFailure{"file not found: " + path};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure{"cannot read: " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const PushoutDecl& find_decl(const Diagram& d, const std::string& name) {
  auto it = d.pushout_decls.find(name);
  if (it != d.pushout_decls.end()) return it->second;
  for (const auto& [_, po] : d.pushout_decls)
    if (po.vertex == name) return po;
  throw UnknownEntity("no pushout declaration named '" + name + "'");
}

Cone cone_of(const Diagram& d, const PushoutDecl& po) {
  Cone c;
  c.base = Span{po.apex, po.left, po.right};
  c.vertex = po.vertex;
  c.left_coproj = po.left_coproj;
  c.right_coproj = po.right_coproj;
  auto discover = [&](const std::string& from) {
    std::string found;
    for (const auto& [n, m] : d.morphisms) {
      if (m.source != from || m.target != po.vertex) continue;
      if (!found.empty())
        throw UnknownEntity("ambiguous coprojection from '" + from + "' into '" + po.vertex + "'");
      found = n;
    }
    if (found.empty())
      throw UnknownEntity("no coprojection from '" + from + "' into '" + po.vertex + "'");
    return found;
  };
  if (c.left_coproj.empty()) c.left_coproj = discover(d.morphism(po.left).target);
  if (c.right_coproj.empty()) c.right_coproj = discover(d.morphism(po.right).target);
  return c;
}

// Shortest path of declared morphisms (between 2 and 4 steps) whose
// composite mapping equals the given arrow; returns the kind sequence.
std::optional<std::vector<std::string>> decompose_arrow(const Diagram& d, const Morphism& arrow) {
  struct State {
    std::string at;
    std::vector<std::string> path;
  };
  std::deque<State> queue{{arrow.source, {}}};
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    if (s.path.size() >= 4) continue;
    for (const auto& [n, m] : d.morphisms) {
      if (m.source != s.at || n == arrow.name) continue;
      std::vector<std::string> next = s.path;
      next.push_back(n);
      if (m.target == arrow.target && next.size() >= 2) {
        Morphism composite = compose_path(d, Path{next, {}});
        if (composite.mapping == arrow.mapping) {
          std::vector<std::string> kinds;
          for (const auto& step : next) kinds.push_back(std::string(to_string(d.morphism(step).kind)));
          return kinds;
        }
      }
      if (next.size() < 4) queue.push_back({m.target, std::move(next)});
    }
  }
  return std::nullopt;
}

// Certificate text plus machine keys for one verification.
void report_certificate(Report& rep, const Certificate& cert, const std::string& prefix) {
  rep.kv(prefix + "certificate.kind", std::string(to_string(cert.kind)));
  switch (cert.kind) {
    case Certificate::Kind::Isomorphism:
      break;
    case Certificate::Kind::ExtraMember:
    case Certificate::Kind::KindMismatch:
    case Certificate::Kind::CompositeImage:
      rep.kv(prefix + "certificate.witness", cert.witness_member);
      rep.line("  witness: " + cert.detail);
      break;
    case Certificate::Kind::MergedPair:
      rep.kv(prefix + "certificate.witness",
             cert.witness_pair.first + ", " + cert.witness_pair.second);
      rep.line("  witness: " + cert.detail);
      break;
  }
}

// Reports how each coprojection arises: the factorization of the opposite
// span leg through declared arrows (the coprojection is that composite
// pushed along the other leg).
void report_decompositions(Report& rep, const Diagram& d, const Cone& cone, const std::string& prefix) {
  struct Pair {
    const char* tag;
    std::string coproj;
    std::string opposite_leg;
  };
  for (const Pair& p : {Pair{"left", cone.left_coproj, cone.base.right},
                        Pair{"right", cone.right_coproj, cone.base.left}}) {
    auto kinds = decompose_arrow(d, d.morphism(p.opposite_leg));
    if (!kinds) continue;
    const Morphism& g = d.morphism(p.coproj);
    rep.line("  coprojection " + p.coproj + " (" + g.source + " -> " + g.target +
             ") decomposes as: " + join(*kinds, ", then ") + " (" +
             std::to_string(kinds->size()) + " morphism kinds)");
    rep.kv(prefix + "coprojection." + p.tag + ".decomposition", join(*kinds, ";"));
  }
}

int cmd_validate(Report& rep, const std::string& file, int depth) {
  rep.kv("command", "validate");
  rep.kv("file", file);
  Diagram d;
  try {
    d = load_file(file);
  } catch (const ValidationError& e) {
    rep.line("validation failed: " + std::string(e.what()));
    rep.kv("violations", std::to_string(e.violations().size()));
    int i = 0;
    for (const auto& v : e.violations()) {
      rep.line("  [" + v.rule + "] " + v.detail);
      rep.kv("violation." + std::to_string(++i), v.rule + " " + v.entity);
    }
    return 1;
  }
  rep.kv("violations", "0");
  rep.line("diagram " + rep.good("OK") + ": " + std::to_string(d.specifications.size()) +
           " specifications, " + std::to_string(d.morphisms.size()) + " morphisms, " +
           std::to_string(d.equations.size()) + " equations");
  int i = 0;
  for (const auto& eq : d.equations) {
    PathEquality pe = paths_equal(d, eq.lhs, eq.rhs, depth);
    std::string verdict = pe.verdict == Ternary::Equal     ? "equal"
                          : pe.verdict == Ternary::Unequal ? "unequal"
                                                           : "unknown";
    rep.kv("equation." + std::to_string(++i), verdict);
    if (pe.verdict == Ternary::Unequal)
      rep.line("  note: declared equation '" + eq.lhs.render() + " = " + eq.rhs.render() +
               "' has differing member maps (certificate: " + pe.certificate_member + ")");
  }
  return 0;
}

int cmd_pushout(Report& rep, const std::string& file, const std::string& span_name,
                const std::string& vertex) {
  rep.kv("command", "pushout");
  Diagram d = load_file(file);
  Span span;
  if (auto it = d.spans.find(span_name); it != d.spans.end())
    span = Span{it->second.apex, it->second.left, it->second.right};
  else {
    const PushoutDecl& po = find_decl(d, span_name);
    span = Span{po.apex, po.left, po.right};
  }
  PushoutResult r = compute_pushout(d, span, vertex);
  rep.kv("pushout.vertex", r.vertex_spec.name);
  rep.kv("pushout.vertex.kind", std::string(to_string(r.vertex_spec.kind)));
  rep.line("pushout of span(" + span.apex + ", " + span.left + ", " + span.right + ")");
  rep.line("vertex " + r.vertex_spec.name + " members: " + member_set(r.vertex_spec));
  for (const auto& [member, origins] : r.provenance) {
    std::vector<std::string> parts;
    for (const auto& o : origins)
      parts.push_back(std::string(o.side == Side::Left ? "left:" : "right:") + o.member);
    rep.kv("provenance." + member, join(parts, " "));
  }
  rep.kv("coprojection.left", r.left_coproj.name);
  rep.kv("coprojection.right", r.right_coproj.name);
  rep.kv("equation", r.added_equation.lhs.render() + " = " + r.added_equation.rhs.render());
  return 0;
}

int cmd_verify(Report& rep, const std::string& file, const std::string& cone_name) {
  rep.kv("command", "verify");
  Diagram d = load_file(file);
  const PushoutDecl& po = find_decl(d, cone_name);
  Cone cone = cone_of(d, po);
  rep.kv("cone", po.name);
  rep.kv("pushout.vertex", cone.vertex);
  PushoutCheck check = is_pushout(d, cone);
  if (check.ok) {
    rep.line("cone " + po.name + " at vertex " + cone.vertex + ": " + rep.good("pushout verified"));
    rep.line("  vertex members: " + member_set(d.spec(cone.vertex)));
    report_certificate(rep, check.certificate, "");
    report_decompositions(rep, d, cone, "");
    return 0;
  }
  rep.line("cone " + po.name + " at vertex " + cone.vertex + ": " + rep.bad("not a pushout"));
  report_certificate(rep, check.certificate, "");
  return 1;
}

int cmd_classify(Report& rep, const std::string& file, const std::string& name) {
  rep.kv("command", "classify");
  Diagram d = load_file(file);
  const PushoutDecl& po = find_decl(d, name);
  Cone cone = cone_of(d, po);
  PushoutResult r = pushout_result_of(d, cone);
  PushoutPattern pattern = classify_pushout(d, r);
  rep.kv("pushout.vertex", cone.vertex);
  rep.kv("pattern.tag", std::string(to_string(pattern.tag)));
  for (const auto& [role, spec] : pattern.bindings) rep.kv("pattern.binding." + role, spec);
  rep.line("pushout " + po.name + " matches pattern: " + std::string(to_string(pattern.tag)));
  return 0;
}

int cmd_skeleton(Report& rep, const std::string& file, const std::string& dialect_name,
                 const std::string& out_dir) {
  rep.kv("command", "skeleton");
  Diagram d = load_file(file);
  Dialect dialect = dialect_name == "interface" ? Dialect::Interface : Dialect::Curly;
  std::vector<SkeletonUnit> units = emit_skeleton(d, dialect);
  rep.kv("skeleton.dialect", dialect_name);
  rep.kv("skeleton.count", std::to_string(units.size()));
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& u : units) {
      fs::path p = fs::path(out_dir) / skeleton_file_name(u);
      std::ofstream out(p, std::ios::binary);
      out << u.text;
      rep.kv("skeleton.unit", p.string());
      rep.line("wrote " + p.string());
    }
  } else {
    for (const auto& u : units) {
      rep.line("// ---- " + u.spec_name + " ----");
      rep.human << u.text;
      rep.kv("skeleton.unit", u.spec_name);
    }
  }
  return 0;
}

int cmd_dot(Report& rep, const std::string& file, const std::string& out_file) {
  rep.kv("command", "dot");
  Diagram d = load_file(file);
  std::string dot = emit_dot_marked(d, declared_coprojections(d));
  rep.kv("dot.bytes", std::to_string(dot.size()));
  if (!out_file.empty() && out_file != "-") {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw IoFailure{"cannot write: " + out_file};
    out << dot;
    rep.kv("dot.file", out_file);
    rep.line("wrote " + out_file);
  } else {
    rep.human << dot;
  }
  return 0;
}

struct DemoEntry {
  std::string_view cli_name;
  std::string_view corpus_name;
};

constexpr DemoEntry kDemos[] = {
    {"linbox-copy", "linbox_copy"},
    {"linbox-inherit", "linbox_inherit"},
    {"virtual-inheritance", "virtual_inheritance"},
    {"polymorphism", "polymorphism"},
    {"template", "template"},
};

Diagram load_corpus(std::string_view corpus_name) {
  auto text = corpus::find(corpus_name);
  if (!text) throw UnknownEntity("no bundled corpus '" + std::string(corpus_name) + "'");
  return parse(*text);
}

// The structural differences between the inheritance-envelope field
// architecture and the copy-envelope one.
void report_linbox_diff(Report& rep) {
  Diagram copy = load_corpus("linbox_copy");
  Diagram inherit = load_corpus("linbox_inherit");
  for (const auto& [n, _] : copy.specifications)
    if (!inherit.has_spec(n)) {
      rep.line("  diff: specification absent: " + n);
      rep.kv("diff.spec.removed", n);
    }
  for (const auto& [n, _] : inherit.specifications)
    if (!copy.has_spec(n)) {
      rep.line("  diff: specification added: " + n);
      rep.kv("diff.spec.added", n);
    }
  for (const auto& [n, m] : copy.morphisms) {
    auto it = inherit.morphisms.find(n);
    if (it == inherit.morphisms.end()) {
      rep.kv("diff.morphism.removed", n);
      continue;
    }
    if (it->second.kind != m.kind) {
      rep.line("  diff: morphism " + n + " (" + m.source + " -> " + m.target + ") kind " +
               std::string(to_string(m.kind)) + " -> " + std::string(to_string(it->second.kind)));
      rep.kv("diff.morphism.kind-changed",
             n + " " + std::string(to_string(m.kind)) + " " + std::string(to_string(it->second.kind)));
    } else if (it->second.source != m.source || it->second.target != m.target) {
      rep.kv("diff.morphism.retargeted", n);
    }
  }
  for (const auto& [n, _] : inherit.morphisms)
    if (!copy.morphisms.count(n)) rep.kv("diff.morphism.added", n);

  // The value 2 now reaches E2 directly.
  for (const auto& [n, m] : inherit.morphisms)
    if (m.source == "2;" && inherit.spec(m.target).kind == SpecKind::Object) {
      rep.line("  diff: E2 constructed from value 2 (arrow " + n + " into " + m.target + ")");
      rep.kv("diff.e2.construction", "value 2");
    }
}

int cmd_demo(Report& rep, const std::string& name) {
  rep.kv("command", "demo");
  rep.kv("demo", name);
  const DemoEntry* entry = nullptr;
  for (const auto& e : kDemos)
    if (e.cli_name == name) entry = &e;
  if (!entry) throw UnknownEntity("unknown demo '" + name + "'");

  Diagram d = load_corpus(entry->corpus_name);
  rep.line("demo " + name + ": " + std::to_string(d.specifications.size()) + " specifications, " +
           std::to_string(d.morphisms.size()) + " morphisms, " +
           std::to_string(d.equations.size()) + " equations");
  bool all_ok = true;
  for (const auto& [po_name, po] : d.pushout_decls) {
    Cone cone = cone_of(d, po);
    std::string prefix = "pushout." + po_name + ".";
    rep.kv("pushout.name", po_name);
    rep.kv(prefix + "vertex", cone.vertex);
    PushoutCheck check = is_pushout(d, cone);
    rep.kv(prefix + "verified", check.ok ? "true" : "false");
    if (!check.ok) {
      all_ok = false;
      rep.line("pushout " + po_name + ": " + rep.bad("FAILED verification"));
      report_certificate(rep, check.certificate, prefix);
      continue;
    }
    PushoutResult r = pushout_result_of(d, cone);
    PushoutPattern pattern = classify_pushout(d, r);
    rep.kv(prefix + "pattern.tag", std::string(to_string(pattern.tag)));
    rep.line("pushout " + po_name + ": " + rep.good("verified") + ", pattern=" +
             std::string(to_string(pattern.tag)));
    rep.line("  vertex " + cone.vertex + " members: " + member_set(d.spec(cone.vertex)));
    report_decompositions(rep, d, cone, prefix);
    std::vector<Member> ctors = constructor_adjustment(r);
    if (!ctors.empty()) {
      std::vector<std::string> names;
      for (const auto& m : ctors) names.push_back(m.name);
      rep.line("  re-declare explicitly (not inherited): " + join(names, ", "));
      rep.kv(prefix + "constructor-adjustment", join(names, ";"));
    }
  }

  for (Dialect dialect : {Dialect::Curly, Dialect::Interface}) {
    std::vector<SkeletonUnit> units = emit_skeleton(d, dialect);
    std::vector<SkeletonUnit> again = emit_skeleton(d, dialect);
    bool deterministic = units.size() == again.size();
    size_t bytes = 0;
    for (size_t i = 0; i < units.size() && deterministic; ++i) {
      deterministic = units[i].text == again[i].text;
      bytes += units[i].text.size();
    }
    std::string tag = std::string(to_string(dialect));
    rep.kv("skeleton." + tag + ".units", std::to_string(units.size()));
    rep.kv("skeleton." + tag + ".bytes", std::to_string(bytes));
    rep.kv("skeleton." + tag + ".deterministic", deterministic ? "true" : "false");
    if (!deterministic) all_ok = false;
  }
  std::string dot = emit_dot_marked(d, declared_coprojections(d));
  bool dot_deterministic = dot == emit_dot_marked(d, declared_coprojections(d));
  rep.kv("dot.bytes", std::to_string(dot.size()));
  rep.kv("dot.deterministic", dot_deterministic ? "true" : "false");
  if (!dot_deterministic) all_ok = false;

  if (name == "linbox-inherit") report_linbox_diff(rep);

  rep.kv("demo.ok", all_ok ? "true" : "false");
  rep.line(all_ok ? "demo " + name + ": " + rep.good("all pushouts verified")
                  : "demo " + name + ": " + rep.bad("verification failures"));
  return all_ok ? 0 : 1;
}

}  // namespace

CommandResult run(const std::vector<std::string>& args) {
  CLI::App app{"dml: categorical diagram engine for object-oriented specifications"};
  app.require_subcommand(1);
  int depth = 8;
  app.add_option("--depth", depth, "rewrite depth for path equality")->capture_default_str();

  std::string file, span_name, vertex, cone_name, pushout_name, dialect = "curly", out_path, demo_name;

  CLI::App* validate = app.add_subcommand("validate", "check a diagram's invariants");
  validate->add_option("file", file)->required();

  CLI::App* pushout = app.add_subcommand("pushout", "compute a pushout of a declared span");
  pushout->add_option("file", file)->required();
  pushout->add_option("--span", span_name, "declared span or pushout name")->required();
  pushout->add_option("--vertex", vertex, "name for the new vertex")->required();

  CLI::App* verify = app.add_subcommand("verify", "check the universal property of a declared cone");
  verify->add_option("file", file)->required();
  verify->add_option("--cone", cone_name)->required();

  CLI::App* classify = app.add_subcommand("classify", "classify a verified pushout");
  classify->add_option("file", file)->required();
  classify->add_option("--pushout", pushout_name)->required();

  CLI::App* skeleton = app.add_subcommand("skeleton", "emit code skeletons");
  skeleton->add_option("file", file)->required();
  skeleton->add_option("--dialect", dialect)->check(CLI::IsMember({"curly", "interface"}));
  skeleton->add_option("--out", out_path, "output directory");

  CLI::App* dot = app.add_subcommand("dot", "emit a DOT rendering");
  dot->add_option("file", file)->required();
  dot->add_option("--out", out_path, "output file ('-' for stdout)");

  CLI::App* demo = app.add_subcommand("demo", "run a bundled diagram end to end");
  demo->add_option("name", demo_name)
      ->required()
      ->check(CLI::IsMember({"linbox-copy", "linbox-inherit", "virtual-inheritance", "polymorphism",
                             "template"}));

  CommandResult result;
  Report rep;
  std::vector<const char*> argv;
  argv.push_back("dml");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
    if (validate->parsed()) result.exit_code = cmd_validate(rep, file, depth);
    else if (pushout->parsed()) result.exit_code = cmd_pushout(rep, file, span_name, vertex);
    else if (verify->parsed()) result.exit_code = cmd_verify(rep, file, cone_name);
    else if (classify->parsed()) result.exit_code = cmd_classify(rep, file, pushout_name);
    else if (skeleton->parsed()) result.exit_code = cmd_skeleton(rep, file, dialect, out_path);
    else if (dot->parsed()) result.exit_code = cmd_dot(rep, file, out_path);
    else if (demo->parsed()) result.exit_code = cmd_demo(rep, demo_name);
  } catch (const CLI::CallForHelp&) {
    result.report = app.help();
    result.exit_code = 0;
    return result;
  } catch (const CLI::ParseError& e) {
    result.report = std::string(e.what()) + "\n\n" + app.help();
    result.exit_code = 2;
    return result;
  } catch (const ParseError& e) {
    rep.line("parse error at line " + std::to_string(e.location().line) + ", column " +
             std::to_string(e.location().column) + ": " + e.what());
    if (!e.expected().empty()) rep.line("expected: " + join(e.expected(), " or "));
    rep.kv("error", "ParseError");
    result.exit_code = 2;
  } catch (const ValidationError& e) {
    rep.line("validation failed: " + std::string(e.what()));
    int i = 0;
    for (const auto& v : e.violations()) {
      rep.line("  [" + v.rule + "] " + v.detail);
      rep.kv("violation." + std::to_string(++i), v.rule + " " + v.entity);
    }
    rep.kv("error", "ValidationError");
    result.exit_code = 1;
  } catch (const IoFailure& e) {
    rep.line("error: " + e.message);
    rep.kv("error", "io");
    result.exit_code = 2;
  } catch (const Error& e) {
    rep.line("error: " + e.code() + ": " + e.what());
    rep.kv("error", e.code());
    result.exit_code = 1;
  }
  result.report = rep.human.str();
  result.machine_report = rep.machine.str();
  return result;
}

}  // namespace dml::cli
