#include <algorithm>
#include <cctype>
#include <optional>

#include "dml/dsl.hpp"

namespace dml {

std::string ValidationError::summary(const std::vector<Violation>& v) {
  std::string out = "diagram has " + std::to_string(v.size()) + " violation(s)";
  if (!v.empty()) out += ": [" + v.front().rule + "] " + v.front().detail;
  return out;
}

namespace {

enum class Tok { Name, Quoted, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

// Names are identifiers, optionally carrying a balanced angle-bracket
// suffix (Envelope<Zp>); unicode angle brackets normalize to ASCII.
class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_trivia();
    Token t;
    t.span = here(0);
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = text_[pos_];
    if (c == '"') return quoted();
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    // Multi-char punct: "->"
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      t.kind = Tok::Punct;
      t.text = "->";
      t.span.length = 2;
      advance(2);
      return t;
    }
    t.kind = Tok::Punct;
    t.text = std::string(1, c);
    t.span.length = 1;
    advance(1);
    return t;
  }

private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;

  SourceSpan here(int length) const { return {line_, column_, length}; }

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  bool at_utf8(const char* seq) const {
    size_t len = std::char_traits<char>::length(seq);
    return text_.substr(pos_, len) == seq;
  }

  Token quoted() {
    Token t;
    t.kind = Tok::Quoted;
    t.span = here(0);
    advance(1);  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        advance(1);
        t.text += text_[pos_];
        advance(1);
      } else {
        t.text += text_[pos_];
        advance(1);
      }
    }
    if (pos_ >= text_.size())
      throw ParseError("unterminated string literal", t.span, {"closing '\"'"});
    advance(1);  // closing quote
    t.span.length = int(t.text.size()) + 2;
    return t;
  }

  Token number() {
    Token t;
    t.kind = Tok::Number;
    t.span = here(0);
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      // A trailing '.' belongs to the grammar (member expressions), not to
      // the number; only consume '.' followed by a digit.
      if (text_[pos_] == '.' &&
          !(pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))))
        break;
      t.text += text_[pos_];
      advance(1);
    }
    t.span.length = int(t.text.size());
    return t;
  }

  Token name() {
    Token t;
    t.kind = Tok::Name;
    t.span = here(0);
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      t.text += text_[pos_];
      advance(1);
    }
    // Immediate angle-bracket suffix extends the name: Envelope<Zp>.
    if (pos_ < text_.size() && (text_[pos_] == '<' || at_utf8("⟨"))) {
      int depth = 0;
      while (pos_ < text_.size()) {
        if (text_[pos_] == '<') {
          ++depth;
          t.text += '<';
          advance(1);
        } else if (text_[pos_] == '>') {
          --depth;
          t.text += '>';
          advance(1);
          if (depth == 0) break;
        } else if (at_utf8("⟨")) {
          ++depth;
          t.text += '<';
          advance(3);
        } else if (at_utf8("⟩")) {
          --depth;
          t.text += '>';
          advance(3);
          if (depth == 0) break;
        } else {
          t.text += text_[pos_];
          advance(1);
        }
      }
      if (depth != 0)
        throw ParseError("unbalanced angle brackets in name '" + t.text + "'", t.span, {"'>'"});
    }
    t.span.length = int(t.text.size());
    return t;
  }
};

class Parser {
public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  Diagram run() {
    while (cur_.kind != Tok::End) statement();
    resolve_pushout_spans();
    fill_default_mappings();
    return std::move(diagram_);
  }

private:
  Lexer lexer_;
  Token cur_;
  Diagram diagram_;
  std::vector<std::pair<std::string, std::string>> pending_span_refs_;  // pushout name -> span name

  void shift() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
    throw ParseError(msg, cur_.span, std::move(expected));
  }

  bool at_punct(std::string_view p) const { return cur_.kind == Tok::Punct && cur_.text == p; }
  bool at_word(std::string_view w) const { return cur_.kind == Tok::Name && cur_.text == w; }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("expected '" + std::string(p) + "', found '" + cur_.text + "'",
                           {"'" + std::string(p) + "'"});
    shift();
  }

  std::string expect_name(const std::string& what) {
    if (cur_.kind != Tok::Name && cur_.kind != Tok::Quoted && cur_.kind != Tok::Number)
      fail("expected " + what + ", found '" + cur_.text + "'", {what});
    std::string out = cur_.text;
    shift();
    return out;
  }

  std::string expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "', found '" + cur_.text + "'",
                          {"'" + std::string(w) + "'"});
    shift();
    return std::string(w);
  }

  // Kind keywords may contain '-' (abstract-class, template-parameter).
  std::string kind_word(const std::string& what) {
    if (cur_.kind != Tok::Name) fail("expected " + what + ", found '" + cur_.text + "'", {what});
    std::string out = cur_.text;
    shift();
    while (at_punct("-")) {
      shift();
      if (cur_.kind != Tok::Name) fail("expected " + what + " continuation", {what});
      out += "-" + cur_.text;
      shift();
    }
    return out;
  }

  void statement() {
    if (at_word("spec")) return spec_decl();
    if (at_word("generic")) return generic_decl();
    if (at_word("morphism")) return morphism_decl();
    if (at_word("equation")) return equation_decl();
    if (at_word("span")) return span_decl();
    if (at_word("pushout")) return pushout_decl();
    fail("expected a declaration, found '" + cur_.text + "'",
         {"'spec'", "'generic'", "'morphism'", "'equation'", "'span'", "'pushout'"});
  }

  void add_spec_checked(Specification s, const SourceSpan& at) {
    if (diagram_.has_spec(s.name))
      throw ParseError("specification '" + s.name + "' declared twice", at, {});
    diagram_.specifications.emplace(s.name, std::move(s));
  }

  void spec_decl() {
    SourceSpan at = cur_.span;
    shift();
    Specification s;
    s.name = expect_name("a specification name");
    std::string kind = kind_word("a specification kind");
    auto k = spec_kind_from(kind);
    if (!k || *k == SpecKind::GenericClass)
      fail("unknown specification kind '" + kind + "'",
           {"'class'", "'abstract-class'", "'builtin-type'", "'object'", "'type-parameter'", "'unit'"});
    s.kind = *k;
    member_block(s);
    add_spec_checked(std::move(s), at);
  }

  void generic_decl() {
    SourceSpan at = cur_.span;
    shift();
    Specification s;
    s.kind = SpecKind::GenericClass;
    s.name = expect_name("a specification name");
    while (!at_punct("{")) s.type_params.push_back(expect_name("a type parameter"));
    if (s.type_params.empty()) fail("generic class needs at least one type parameter", {"a type parameter"});
    member_block(s);
    add_spec_checked(std::move(s), at);
  }

  void member_block(Specification& s) {
    expect_punct("{");
    while (!at_punct("}")) {
      SourceSpan at = cur_.span;
      Member m = member();
      if (s.members.count(m.name))
        throw ParseError("member '" + m.name + "' declared twice in '" + s.name + "'", at, {});
      s.members.emplace(m.name, std::move(m));
      if (at_punct(";")) shift();
    }
    shift();
  }

  Member member() {
    Member m;
    bool pure = false, generic = false;
    while (at_word("pure") || at_word("generic")) {
      if (at_word("pure")) pure = true;
      if (at_word("generic")) generic = true;
      shift();
    }
    m.is_generic = generic;
    if (at_word("method")) {
      shift();
      m.kind = pure ? MemberKind::PureVirtualMethod : MemberKind::Method;
      m.name = expect_name("a member name");
      m.signature = signature();
      return m;
    }
    if (pure || generic) fail("'pure'/'generic' apply to methods only", {"'method'"});
    if (at_word("ctor")) {
      shift();
      m.kind = MemberKind::Constructor;
      m.name = "ctor";
      m.signature = signature();
      return m;
    }
    if (at_word("dtor")) {
      shift();
      m.kind = MemberKind::Destructor;
      m.name = "dtor";
      m.signature = signature();
      return m;
    }
    if (at_word("field")) {
      shift();
      m.kind = MemberKind::Field;
      m.name = expect_name("a member name");
      expect_punct(":");
      m.signature = {expect_name("a sort name")};
      return m;
    }
    if (at_word("value")) {
      shift();
      m.kind = MemberKind::Value;
      m.name = expect_name("a member name");
      expect_punct("=");
      m.signature = {expect_name("a literal")};
      return m;
    }
    if (at_word("type")) {
      shift();
      m.kind = MemberKind::TypeMember;
      m.name = expect_name("a member name");
      return m;
    }
    fail("expected a member, found '" + cur_.text + "'",
         {"'method'", "'pure'", "'generic'", "'ctor'", "'dtor'", "'field'", "'value'", "'type'"});
  }

  std::vector<std::string> signature() {
    expect_punct("(");
    std::vector<std::string> out;
    while (!at_punct(")")) {
      if (!out.empty()) expect_punct(",");
      out.push_back(expect_name("a sort name"));
    }
    shift();
    return out;
  }

  void morphism_decl() {
    SourceSpan at = cur_.span;
    shift();
    Morphism m;
    m.name = expect_name("a morphism name");
    expect_punct(":");
    m.source = expect_name("a source specification");
    expect_punct("->");
    m.target = expect_name("a target specification");
    expect_word("kind");
    expect_punct("=");
    std::string kind = kind_word("a morphism kind");
    auto k = morphism_kind_from(kind);
    if (!k) fail("unknown morphism kind '" + kind + "'", {"a morphism kind"});
    m.kind = *k;
    if (at_punct("{")) {
      shift();
      while (!at_punct("}")) {
        std::string from = expect_name("a member name");
        expect_punct("->");
        MemberExpr expr;
        expr.steps.push_back(expect_name("a member name"));
        while (at_punct(".")) {
          shift();
          expr.steps.push_back(expect_name("a member name"));
        }
        m.mapping[from] = std::move(expr);
        if (at_punct(";")) shift();
      }
      shift();
    }
    if (diagram_.has_morphism(m.name))
      throw ParseError("morphism '" + m.name + "' declared twice", at, {});
    diagram_.morphisms.emplace(m.name, std::move(m));
  }

  Path path() {
    if (at_word("id")) {
      shift();
      expect_punct("(");
      Path p = Path::identity(expect_name("a specification name"));
      expect_punct(")");
      return p;
    }
    Path p;
    p.steps.push_back(expect_name("a morphism name"));
    while (at_punct(";")) {
      shift();
      p.steps.push_back(expect_name("a morphism name"));
    }
    return p;
  }

  void equation_decl() {
    shift();
    Equation eq;
    eq.lhs = path();
    expect_punct("=");
    eq.rhs = path();
    diagram_.equations.push_back(std::move(eq));
  }

  void span_decl() {
    SourceSpan at = cur_.span;
    shift();
    SpanDecl sp;
    sp.name = expect_name("a span name");
    expect_punct("(");
    sp.apex = expect_name("an apex specification");
    expect_punct(",");
    sp.left = expect_name("a leg morphism");
    expect_punct(",");
    sp.right = expect_name("a leg morphism");
    expect_punct(")");
    if (diagram_.spans.count(sp.name))
      throw ParseError("span '" + sp.name + "' declared twice", at, {});
    diagram_.spans.emplace(sp.name, std::move(sp));
  }

  void pushout_decl() {
    SourceSpan at = cur_.span;
    shift();
    PushoutDecl po;
    po.vertex = expect_name("a vertex specification");
    expect_word("from");
    std::string span_ref;
    if (at_word("span")) {
      shift();
      expect_punct("(");
      po.apex = expect_name("an apex specification");
      expect_punct(",");
      po.left = expect_name("a leg morphism");
      expect_punct(",");
      po.right = expect_name("a leg morphism");
      expect_punct(")");
    } else {
      span_ref = expect_name("a span name");
    }
    if (at_word("coprojections")) {
      shift();
      expect_punct("(");
      po.left_coproj = expect_name("a coprojection morphism");
      expect_punct(",");
      po.right_coproj = expect_name("a coprojection morphism");
      expect_punct(")");
    }
    po.name = po.vertex;
    if (at_word("as")) {
      shift();
      po.name = expect_name("a pushout name");
    }
    if (diagram_.pushout_decls.count(po.name))
      throw ParseError("pushout '" + po.name + "' declared twice", at, {});
    if (!span_ref.empty()) pending_span_refs_.push_back({po.name, span_ref});
    diagram_.pushout_decls.emplace(po.name, std::move(po));
  }

  // Omitted mapping entries default to the like-named target member when it
  // exists; validation reports genuinely missing mappings afterwards.
  void fill_default_mappings() {
    for (auto& [_, m] : diagram_.morphisms) {
      if (!diagram_.has_spec(m.source) || !diagram_.has_spec(m.target)) continue;
      const Specification& src = diagram_.spec(m.source);
      const Specification& tgt = diagram_.spec(m.target);
      for (const auto& [n, _2] : src.members)
        if (!m.mapping.count(n) && tgt.members.count(n)) m.mapping.emplace(n, MemberExpr::single(n));
    }
  }

  void resolve_pushout_spans() {
    for (const auto& [po_name, span_name] : pending_span_refs_) {
      PushoutDecl& po = diagram_.pushout_decls.at(po_name);
      auto it = diagram_.spans.find(span_name);
      if (it == diagram_.spans.end())
        throw ValidationError({{"unknown-span", span_name,
                                "pushout '" + po_name + "' references unknown span '" + span_name + "'"}});
      po.apex = it->second.apex;
      po.left = it->second.left;
      po.right = it->second.right;
    }
  }
};

}  // namespace

Diagram parse(std::string_view text) {
  Parser parser(text);
  Diagram d = parser.run();
  std::vector<Violation> violations = validate_diagram(d);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return d;
}

bool diagram_equiv(const Diagram& a, const Diagram& b) {
  if (a.specifications != b.specifications) return false;
  if (a.morphisms != b.morphisms) return false;
  if (a.spans != b.spans) return false;
  if (a.pushout_decls != b.pushout_decls) return false;
  auto render_all = [](const Diagram& d) {
    std::vector<std::string> out;
    for (const auto& eq : d.equations) out.push_back(eq.lhs.render() + " = " + eq.rhs.render());
    std::sort(out.begin(), out.end());
    return out;
  };
  return render_all(a) == render_all(b);
}

}  // namespace dml
