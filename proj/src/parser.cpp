#include "dywa/parser.hpp"

#include <cctype>
#include <sstream>

namespace dywa {

namespace {

struct token {
  enum class type { ident, qvar, punct, end };
  type t = type::end;
  std::string text;  // ident name, qvar name (without '?'), or punct spelling
  int line = 1, col = 1;
};

// Punctuation: ( ) { } [ ] ; , : . & ! ? * @ = plus -> := ==
std::vector<token> lex(const std::string& src, const std::string& file,
                       std::vector<Diagnostic>& diags) {
  std::vector<token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  auto ident_start = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  };
  auto ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    token tok;
    tok.line = line;
    tok.col = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.t = token::type::ident;
      tok.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(tok);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok.t = token::type::ident;
      tok.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(tok);
      continue;
    }
    if (c == '?' && i + 1 < src.size() && ident_start(src[i + 1])) {
      size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.t = token::type::qvar;
      tok.text = src.substr(i + 1, j - i - 1);
      advance(j - i);
      out.push_back(tok);
      continue;
    }
    auto two = [&](const char* p) {
      return i + 1 < src.size() && src[i] == p[0] && src[i + 1] == p[1];
    };
    tok.t = token::type::punct;
    if (two("->") || two(":=") || two("==") || two(":-")) {
      tok.text = src.substr(i, 2);
      advance(2);
    } else if (std::string("(){}[];,:.&!?*@=/").find(c) != std::string::npos) {
      tok.text = std::string(1, c);
      advance(1);
    } else {
      diags.push_back({file, line, col, std::string("unexpected character '") + c + "'"});
      advance(1);
      continue;
    }
    out.push_back(tok);
  }
  token eof;
  eof.t = token::type::end;
  eof.line = line;
  eof.col = col;
  out.push_back(eof);
  return out;
}

struct model_parser {
  std::vector<token> toks;
  size_t pos = 0;
  std::string file;
  std::vector<Diagnostic>& diags;
  bool failed = false;

  const token& cur() const { return toks[pos]; }

  bool at_punct(const std::string& p) const {
    return cur().t == token::type::punct && cur().text == p;
  }
  bool at_kw(const std::string& kw) const {
    return cur().t == token::type::ident && cur().text == kw;
  }

  void fail(const std::string& message) {
    if (!failed) diags.push_back({file, cur().line, cur().col, message});
    failed = true;
  }

  bool eat_punct(const std::string& p) {
    if (at_punct(p)) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect_punct(const std::string& p, const std::string& where) {
    if (!eat_punct(p)) fail("expected '" + p + "' " + where);
  }

  std::string expect_ident(const std::string& what) {
    if (cur().t != token::type::ident) {
      fail("expected " + what);
      return "";
    }
    return toks[pos++].text;
  }

  bool eat_kw(const std::string& kw) {
    if (at_kw(kw)) {
      ++pos;
      return true;
    }
    return false;
  }

  static bool uppercase_start(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
  }

  // --- terms -------------------------------------------------------------

  TermPtr term_atom() {
    if (failed) return make_const("");
    if (cur().t == token::type::qvar) {
      return make_var(toks[pos++].text);
    }
    if (at_punct("?")) {
      ++pos;
      return make_var("");
    }
    if (at_punct("*")) {
      ++pos;
      return make_var("*");
    }
    if (eat_punct("(")) {
      TermPtr inner = term_expr();
      expect_punct(")", "after grouped term");
      return inner;
    }
    if (cur().t != token::type::ident) {
      fail("expected a term");
      return make_const("");
    }
    std::string name = toks[pos++].text;
    if (at_punct("(")) {
      if (uppercase_start(name)) {
        fail("variable '" + name + "' cannot be applied as a function");
        return make_const("");
      }
      ++pos;
      std::vector<TermPtr> args;
      if (at_punct(")")) {
        fail("application needs at least one argument");
        return make_const("");
      }
      while (true) {
        args.push_back(term_expr());
        if (eat_punct(",")) continue;
        break;
      }
      expect_punct(")", "after arguments");
      if (failed) return make_const("");
      if (name == "enc" && args.size() == 2) return make_enc(args[0], args[1]);
      return make_apply(name, args);
    }
    if (uppercase_start(name)) return make_var(name);
    return make_const(name);
  }

  TermPtr term_expr() {
    std::vector<TermPtr> parts{term_atom()};
    while (!failed && eat_punct(".")) parts.push_back(term_atom());
    if (failed) return make_const("");
    return parts.size() == 1 ? parts.front() : make_concat(parts);
  }

  // --- facts and guards ----------------------------------------------------

  FactAtom fact_from(const std::string& name) {
    FactAtom f;
    f.name = name;
    expect_punct("(", "after fact name");
    if (!failed) {
      while (true) {
        f.args.push_back(term_expr());
        if (eat_punct(",")) continue;
        break;
      }
      expect_punct(")", "after fact arguments");
    }
    return f;
  }

  Guard guard_conjunct(const std::string& entity) {
    Guard g;
    if (eat_punct("!")) {
      g.k = Guard::kind::negated_fact;
      std::string name = expect_ident("a fact name after '!'");
      if (!failed) g.fact = fact_from(name);
      return g;
    }
    // receive guards start "Agent ->"
    if (cur().t == token::type::ident && toks[pos + 1].t == token::type::punct &&
        toks[pos + 1].text == "->") {
      g.k = Guard::kind::receive;
      g.from = toks[pos].text;
      pos += 2;
      g.to = expect_ident("the receiving agent");
      expect_punct(":", "before the message pattern");
      g.pattern = term_expr();
      (void)entity;
      return g;
    }
    TermPtr lhs = term_expr();
    if (failed) return g;
    if (eat_punct("==")) {
      g.k = Guard::kind::match;
      g.subject = lhs;
      g.pattern = term_expr();
      return g;
    }
    if (lhs->kind == term_kind::apply) {
      g.k = Guard::kind::fact;
      g.fact.name = lhs->name;
      g.fact.args = lhs->parts;
      return g;
    }
    fail("expected a receive, fact, negated fact, or match guard");
    return g;
  }

  std::vector<Guard> guard_conj(const std::string& entity) {
    std::vector<Guard> out;
    out.push_back(guard_conjunct(entity));
    while (!failed && eat_punct("&")) out.push_back(guard_conjunct(entity));
    return out;
  }

  // --- statements ----------------------------------------------------------

  std::vector<Stmt> block(const std::string& entity) {
    std::vector<Stmt> out;
    expect_punct("{", "to open a block");
    while (!failed && !at_punct("}") && cur().t != token::type::end) {
      out.push_back(statement(entity));
    }
    expect_punct("}", "to close a block");
    return out;
  }

  Stmt statement(const std::string& entity) {
    Stmt s;
    s.line = cur().line;
    s.col = cur().col;
    if (at_kw("if")) {
      ++pos;
      s.k = Stmt::kind::conditional;
      s.cond = std::make_shared<Conditional>();
      expect_punct("(", "after 'if'");
      CondCase first;
      first.guard = guard_conj(entity);
      expect_punct(")", "after the guard");
      first.body = block(entity);
      s.cond->cases.push_back(std::move(first));
      while (!failed && at_kw("elseif")) {
        ++pos;
        CondCase next;
        expect_punct("(", "after 'elseif'");
        next.guard = guard_conj(entity);
        expect_punct(")", "after the guard");
        next.body = block(entity);
        s.cond->cases.push_back(std::move(next));
      }
      if (!failed && at_kw("else")) {
        ++pos;
        s.cond->has_else = true;
        s.cond->else_body = block(entity);
      }
      return s;
    }
    if (cur().t != token::type::ident) {
      fail("expected a statement");
      return s;
    }
    const std::string head = cur().text;
    const token& next = toks[pos + 1];
    if (next.t == token::type::punct && next.text == "->") {
      pos += 2;
      s.from = head;
      s.to = expect_ident("the receiving agent");
      expect_punct(":", "before the message");
      s.term = term_expr();
      expect_punct(";", "after the message");
      s.k = s.to == entity ? Stmt::kind::receive_bind : Stmt::kind::send;
      return s;
    }
    if (next.t == token::type::punct && next.text == ":=") {
      pos += 2;
      s.k = Stmt::kind::fresh;
      s.var = head;
      if (!eat_kw("fresh")) fail("expected fresh() after ':='");
      expect_punct("(", "after 'fresh'");
      expect_punct(")", "after 'fresh('");
      expect_punct(";", "after fresh()");
      return s;
    }
    if (next.t == token::type::punct && next.text == "(") {
      ++pos;
      s.k = Stmt::kind::assert_fact;
      s.fact = fact_from(head);
      expect_punct(";", "after the fact");
      return s;
    }
    fail("expected a statement");
    return s;
  }

  // --- entity branches -------------------------------------------------------

  void branch_annotations(EntityBranch& b) {
    while (!failed && at_punct("@")) {
      ++pos;
      std::string name = expect_ident("an annotation name after '@'");
      expect_punct("(", "after the annotation name");
      if (name == "id") {
        b.id = expect_ident("a branch id");
        b.explicit_id = true;
      } else if (name == "tag") {
        b.tag = expect_ident("a tag name");
      } else if (name == "keys") {
        while (true) {
          std::string binder = expect_ident("a binder name");
          expect_punct("=", "between binder and key");
          std::string key = expect_ident("an abstract key");
          if (failed) break;
          b.keys.emplace_back(binder, key);
          if (eat_punct(",")) continue;
          break;
        }
      } else {
        fail("unknown annotation '@" + name + "'");
      }
      expect_punct(")", "after the annotation");
    }
  }

  EntityBranch parse_branch(const std::string& entity, bool first) {
    EntityBranch b;
    b.line = cur().line;
    b.col = cur().col;
    if (first) {
      if (!eat_kw("if")) fail("entity body must start with 'if'");
    } else {
      if (!eat_kw("elseif")) fail("expected 'elseif' or '}'");
    }
    expect_punct("(", "after the branch keyword");
    b.guard = guard_conj(entity);
    expect_punct(")", "after the branch guard");
    branch_annotations(b);
    b.body = block(entity);
    if (!b.explicit_id) {
      for (const auto& g : b.guard) {
        if (g.k != Guard::kind::receive || !g.pattern) continue;
        const TermPtr& p = g.pattern;
        if (p->kind == term_kind::constant) {
          b.id = p->name;
        } else if (p->kind == term_kind::concat) {
          for (const auto& part : p->parts) {
            if (part->kind == term_kind::constant) {
              b.id = part->name;
              break;
            }
          }
        }
        break;
      }
    }
    return b;
  }

  // --- goals -----------------------------------------------------------------

  GoalSpec parse_goal() {
    GoalSpec g;
    g.label = expect_ident("a goal label");
    expect_punct(":", "after the goal label");
    expect_punct("[", "in the goal formula");
    expect_punct("]", "in the goal formula");
    expect_punct("(", "in the goal formula");
    expect_punct("!", "in the goal formula");
    bool wrapped = eat_punct("(");
    std::string name = expect_ident("iknowledge or a fact name");
    if (!failed) {
      if (name == "iknowledge") {
        g.k = GoalSpec::kind::never_derives;
        expect_punct("(", "after iknowledge");
        g.pattern = term_expr();
        expect_punct(")", "after the pattern");
      } else {
        g.k = GoalSpec::kind::never_fact;
        g.fact = fact_from(name);
      }
    }
    if (wrapped) expect_punct(")", "closing the negation");
    expect_punct(")", "closing the goal formula");
    expect_punct(";", "after the goal");
    return g;
  }

  // --- clauses and top level ---------------------------------------------------

  HornClause parse_clause() {
    HornClause c;
    c.name = expect_ident("a clause name");
    expect_punct("(", "after the clause name");
    while (!failed) {
      c.vars.push_back(expect_ident("a clause variable"));
      if (eat_punct(",")) continue;
      break;
    }
    expect_punct(")", "after clause variables");
    expect_punct(":", "before the clause head");
    std::string head = expect_ident("the head fact");
    if (!failed) c.head = fact_from(head);
    if (eat_punct(":-")) {
      std::string premise = expect_ident("the premise fact");
      if (!failed) c.premise = fact_from(premise);
    }
    expect_punct(";", "after the clause");
    return c;
  }

  ModelSpec parse() {
    ModelSpec m;
    m.file = file;
    if (!eat_kw("model")) fail("model files start with 'model <name>;'");
    m.name = expect_ident("the model name");
    expect_punct(";", "after the model name");
    while (!failed && cur().t != token::type::end) {
      if (eat_kw("agents")) {
        while (!failed) {
          m.agents.push_back(expect_ident("an agent name"));
          if (eat_punct(",")) continue;
          break;
        }
        expect_punct(";", "after the agent list");
      } else if (eat_kw("constants")) {
        std::vector<std::string> names;
        while (!failed) {
          names.push_back(expect_ident("a constant name"));
          if (eat_punct(",")) continue;
          break;
        }
        expect_punct(":", "before the visibility");
        bool pub = eat_kw("public");
        if (!pub && !eat_kw("nonpublic")) fail("expected 'public' or 'nonpublic'");
        expect_punct(";", "after the declaration");
        auto& dest = pub ? m.public_consts : m.nonpublic_consts;
        dest.insert(dest.end(), names.begin(), names.end());
      } else if (eat_kw("functions")) {
        std::vector<std::pair<std::string, int>> fns;
        while (!failed) {
          std::string name = expect_ident("a function name");
          expect_punct("/", "after the function name");
          std::string arity = expect_ident("the arity");
          int a = 0;
          for (char ch : arity) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) {
              fail("function arity must be a number");
              break;
            }
            a = a * 10 + (ch - '0');
          }
          fns.emplace_back(name, a);
          if (eat_punct(",")) continue;
          break;
        }
        expect_punct(":", "before the visibility");
        bool pub = eat_kw("public");
        if (!pub && !eat_kw("nonpublic")) fail("expected 'public' or 'nonpublic'");
        expect_punct(";", "after the declaration");
        auto& dest = pub ? m.public_fn_decls : m.nonpublic_fn_decls;
        dest.insert(dest.end(), fns.begin(), fns.end());
      } else if (eat_kw("init")) {
        std::string name = expect_ident("a fact name");
        if (!failed) m.init_facts.push_back(fact_from(name));
        expect_punct(";", "after the fact");
      } else if (eat_kw("clause")) {
        m.clauses.push_back(parse_clause());
      } else if (eat_kw("entity")) {
        if (!m.entity.empty()) fail("only one entity block is supported");
        m.entity = expect_ident("the entity agent");
        expect_punct("{", "to open the entity body");
        bool first = true;
        while (!failed && !at_punct("}") && cur().t != token::type::end) {
          m.branches.push_back(parse_branch(m.entity, first));
          first = false;
        }
        expect_punct("}", "to close the entity body");
      } else if (eat_kw("goal")) {
        m.goals.push_back(parse_goal());
      } else {
        fail("expected a declaration, entity, or goal");
      }
    }
    // default tags in declaration order
    int n = 0;
    for (auto& b : m.branches) {
      ++n;
      if (b.tag.empty()) b.tag = "tag" + std::to_string(n);
    }
    return m;
  }
};

}  // namespace

ParseResult parse_model(const std::string& text, const std::string& filename) {
  ParseResult result;
  std::vector<Diagnostic> lex_diags;
  auto toks = lex(text, filename, lex_diags);
  if (!lex_diags.empty()) {
    result.diagnostics = lex_diags;
    return result;
  }
  model_parser p{std::move(toks), 0, filename, result.diagnostics};
  ModelSpec m = p.parse();
  if (!p.failed) result.model = std::move(m);
  return result;
}

ParseResult load_model(const std::string& text, const std::string& filename) {
  ParseResult result = parse_model(text, filename);
  if (result.model) {
    auto semantic = validate(*result.model);
    result.diagnostics.insert(result.diagnostics.end(), semantic.begin(), semantic.end());
    if (!semantic.empty()) result.model.reset();
  }
  return result;
}

}  // namespace dywa
