#include "galign/dsl.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace galign {

namespace {

enum class Tok { Ident, String, Number, LBrace, RBrace, Colon, Percent, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier name, unescaped string, or number digits
  SourceSpan span;
};

const char* describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Number: return "number";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Percent: return "'%'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<ParseError>& errors) : text_(text), errors_(errors) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= text_.size()) break;
      auto start = mark();
      char c = text_[pos_];
      if (is_ident_start(c)) {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        tokens.push_back({Tok::Ident, std::string(text_.substr(begin, pos_ - begin)), finish(start)});
      } else if (is_digit(c)) {
        tokens.push_back(lex_number(start));
      } else if (c == '"') {
        if (auto tok = lex_string(start)) tokens.push_back(std::move(*tok));
      } else {
        Tok kind;
        switch (c) {
          case '{': kind = Tok::LBrace; break;
          case '}': kind = Tok::RBrace; break;
          case ':': kind = Tok::Colon; break;
          case '%': kind = Tok::Percent; break;
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          default: {
            advance();
            auto span = finish(start);
            errors_.push_back({span, "unexpected character", std::string(1, c)});
            continue;
          }
        }
        advance();
        tokens.push_back({kind, std::string(1, c), finish(start)});
      }
    }
    tokens.push_back({Tok::End, {}, finish(mark())});
    return tokens;
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c) || c == '-'; }

  SourceSpan mark() const { return {line_, column_, 0, pos_}; }
  SourceSpan finish(SourceSpan start) const {
    start.length = static_cast<int>(pos_ - start.offset);
    return start;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token lex_number(SourceSpan start) {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && is_digit(text_[pos_ + 1])) {
      advance();
      while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    }
    return {Tok::Number, std::string(text_.substr(begin, pos_ - begin)), finish(start)};
  }

  std::optional<Token> lex_string(SourceSpan start) {
    advance();  // opening quote
    std::string value;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_];
      if (c == '\\') {
        auto escape_start = mark();
        advance();
        if (pos_ < text_.size() && (text_[pos_] == '"' || text_[pos_] == '\\')) {
          value += text_[pos_];
          advance();
        } else {
          auto span = finish(escape_start);
          errors_.push_back({span, "invalid escape sequence in string", "\\"});
        }
        continue;
      }
      value += c;
      advance();
    }
    if (pos_ >= text_.size()) {
      auto span = finish(start);
      errors_.push_back({span, "unterminated string", std::string(text_.substr(start.offset, 16))});
      return std::nullopt;
    }
    advance();  // closing quote
    return Token{Tok::String, std::move(value), finish(start)};
  }

  std::string_view text_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

const std::set<std::string, std::less<>> kItemKeywords = {
    "objective", "requirement", "softgoal", "author", "contribution", "decomposition", "trace"};

// Thrown inside a block to abandon it; the parser resynchronises afterwards.
struct SyntaxError {};

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens, std::vector<ParseError>& errors)
      : text_(text), tokens_(std::move(tokens)), errors_(errors) {}

  GraphParts run() {
    GraphParts parts;
    if (at_ident("model")) {
      next();
      if (peek().kind == Tok::String) {
        parts.name = next().text;
      } else {
        report(peek(), "expected model name string after 'model'");
      }
    } else {
      report(peek(), "expected 'model'");
    }
    while (peek().kind != Tok::End) {
      const Token& tok = peek();
      if (tok.kind == Tok::Ident && kItemKeywords.count(tok.text)) {
        std::size_t before = pos_;
        try {
          parse_item(parts);
        } catch (const SyntaxError&) {
          recover(before);
        }
      } else {
        report(tok, tok.kind == Tok::Ident ? "unknown keyword '" + tok.text + "'"
                                           : std::string("expected a model item, found ") +
                                                 describe(tok.kind));
        recover(pos_);
      }
    }
    return parts;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& tok = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return tok;
  }
  bool at_ident(std::string_view name) const {
    return peek().kind == Tok::Ident && peek().text == name;
  }

  std::string snippet(const Token& tok) const {
    if (tok.kind == Tok::End) return "";
    return std::string(text_.substr(tok.span.offset, tok.span.length));
  }

  void report(const Token& tok, std::string message) {
    errors_.push_back({tok.span, std::move(message), snippet(tok)});
  }

  [[noreturn]] void fail(const Token& tok, std::string message) {
    report(tok, std::move(message));
    throw SyntaxError{};
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      fail(peek(), std::string("expected ") + what + ", found " + describe(peek().kind));
    }
    return next();
  }

  void expect_keyword(std::string_view word) {
    if (!at_ident(word)) fail(peek(), "expected '" + std::string(word) + "'");
    next();
  }

  // Skip to the end of the broken item: through the closing brace of a block
  // the item opened, or up to the next item keyword at depth zero.
  void recover(std::size_t item_start) {
    int depth = 0;
    for (std::size_t i = item_start; i < pos_; ++i) {
      if (tokens_[i].kind == Tok::LBrace) ++depth;
      if (tokens_[i].kind == Tok::RBrace) --depth;
    }
    if (pos_ == item_start) next();
    while (peek().kind != Tok::End) {
      const Token& tok = peek();
      if (depth <= 0 && tok.kind == Tok::Ident && kItemKeywords.count(tok.text)) return;
      if (tok.kind == Tok::LBrace) ++depth;
      if (tok.kind == Tok::RBrace) {
        --depth;
        next();
        if (depth <= 0) return;
        continue;
      }
      next();
    }
  }

  // Field list helpers ------------------------------------------------------

  struct FieldSet {
    std::set<std::string> seen;
  };

  // Reads `name ':'`; returns the name and its token, or nullopt at '}'.
  std::optional<Token> field_header(FieldSet& fields) {
    if (peek().kind == Tok::RBrace) return std::nullopt;
    const Token& name = expect(Tok::Ident, "field name");
    expect(Tok::Colon, "':'");
    if (!fields.seen.insert(name.text).second) {
      report(name, "duplicate field '" + name.text + "'");
    }
    return name;
  }

  void require(const FieldSet& fields, const Token& keyword, const std::string& id,
               std::initializer_list<const char*> names) {
    for (const char* name : names) {
      if (!fields.seen.count(name)) {
        report(keyword, "missing required field '" + std::string(name) + "' in " + keyword.text +
                            " '" + id + "'");
      }
    }
  }

  std::string text_value() { return expect(Tok::String, "quoted text").text; }

  std::string text_or_id() {
    if (peek().kind == Tok::String || peek().kind == Tok::Ident) return next().text;
    fail(peek(), std::string("expected quoted text or identifier, found ") + describe(peek().kind));
  }

  std::string id_value() { return expect(Tok::Ident, "identifier").text; }

  Number number_value() {
    const Token& tok = expect(Tok::Number, "number");
    return *parse_decimal(tok.text);
  }

  bool bool_value() {
    const Token& tok = peek();
    if (at_ident("true")) {
      next();
      return true;
    }
    if (at_ident("false")) {
      next();
      return false;
    }
    fail(tok, "expected true or false");
  }

  Quantity quantity_value() {
    const Token& num = peek();
    if (num.kind != Tok::Number) fail(num, "malformed quantity: expected a number");
    next();
    Number value = *parse_decimal(num.text);
    if (peek().kind == Tok::Percent) {
      next();
      return Quantity::percent(value);
    }
    if (peek().kind == Tok::Ident && !peek().text.empty()) {
      return Quantity::absolute(value, next().text);
    }
    fail(peek(), "malformed quantity: expected '%' or a unit name after the number");
  }

  void skip_unknown_value() {
    // Consume tokens until the next `name :` pair or the closing brace.
    while (peek().kind != Tok::End && peek().kind != Tok::RBrace &&
           !(peek().kind == Tok::Ident && peek(1).kind == Tok::Colon)) {
      next();
    }
  }

  // Items --------------------------------------------------------------------

  void parse_item(GraphParts& parts) {
    const Token keyword = next();
    if (keyword.text == "objective") {
      parts.objectives.push_back(parse_objective(keyword));
    } else if (keyword.text == "requirement") {
      parts.requirements.push_back(parse_requirement(keyword));
    } else if (keyword.text == "softgoal") {
      parts.softgoals.push_back(parse_softgoal(keyword));
    } else if (keyword.text == "author") {
      parts.authors.push_back(parse_author(keyword));
    } else if (keyword.text == "contribution") {
      parts.contributions.push_back(parse_contribution(keyword));
    } else if (keyword.text == "decomposition") {
      expect_keyword("from");
      std::string parent = id_value();
      expect_keyword("to");
      std::string child = id_value();
      parts.decompositions.push_back({decomposition_id(parent, child), parent, child});
    } else {
      expect_keyword("from");
      std::string source = id_value();
      expect_keyword("to");
      std::string target = id_value();
      parts.traces.push_back({trace_id(source, target), source, target});
    }
  }

  Objective parse_objective(const Token& keyword) {
    Objective o;
    o.id = id_value();
    expect(Tok::LBrace, "'{'");
    FieldSet fields;
    while (auto name = field_header(fields)) {
      const std::string& f = name->text;
      if (f == "activity") o.activity = text_value();
      else if (f == "object") o.object = text_value();
      else if (f == "focus") o.focus = text_value();
      else if (f == "scale") o.scale = text_value();
      else if (f == "timeframe") o.timeframe = text_value();
      else if (f == "scope") o.scope = text_value();
      else if (f == "author") o.author = text_or_id();
      else if (f == "magnitude") o.magnitude = quantity_value();
      else if (f == "top_level") o.top_level = bool_value();
      else {
        fields.seen.erase(f);
        report(*name, "unknown keyword '" + f + "' in objective");
        skip_unknown_value();
      }
    }
    expect(Tok::RBrace, "'}'");
    require(fields, keyword, o.id, {"activity", "focus", "magnitude", "scale"});
    return o;
  }

  Requirement parse_requirement(const Token& keyword) {
    Requirement r;
    r.id = id_value();
    expect(Tok::LBrace, "'{'");
    FieldSet fields;
    while (auto name = field_header(fields)) {
      const std::string& f = name->text;
      if (f == "kind") {
        const Token& tok = expect(Tok::Ident, "F or NF");
        if (tok.text == "F") r.kind = RequirementKind::Functional;
        else if (tok.text == "NF") r.kind = RequirementKind::NonFunctional;
        else report(tok, "requirement kind must be F or NF");
      } else if (f == "headline") r.headline = text_value();
      else if (f == "description") r.description = text_value();
      else if (f == "rationale") r.rationale = text_value();
      else if (f == "fit_criterion") r.fit_criterion = text_value();
      else if (f == "effort_hours") r.effort_hours = number_value();
      else if (f == "included") r.included = bool_value();
      else {
        fields.seen.erase(f);
        report(*name, "unknown keyword '" + f + "' in requirement");
        skip_unknown_value();
      }
    }
    expect(Tok::RBrace, "'}'");
    require(fields, keyword, r.id, {"kind", "headline", "fit_criterion"});
    return r;
  }

  SoftGoal parse_softgoal(const Token& keyword) {
    SoftGoal s;
    s.id = id_value();
    expect(Tok::LBrace, "'{'");
    FieldSet fields;
    while (auto name = field_header(fields)) {
      const std::string& f = name->text;
      if (f == "kind") {
        const Token& tok = expect(Tok::Ident, "goal, vision or mission");
        if (tok.text == "goal") s.kind = SoftGoalKind::Goal;
        else if (tok.text == "vision") s.kind = SoftGoalKind::Vision;
        else if (tok.text == "mission") s.kind = SoftGoalKind::Mission;
        else report(tok, "softgoal kind must be goal, vision or mission");
      } else if (f == "statement") s.statement = text_value();
      else {
        fields.seen.erase(f);
        report(*name, "unknown keyword '" + f + "' in softgoal");
        skip_unknown_value();
      }
    }
    expect(Tok::RBrace, "'}'");
    require(fields, keyword, s.id, {"kind", "statement"});
    return s;
  }

  Author parse_author(const Token& keyword) {
    Author a;
    a.id = id_value();
    expect(Tok::LBrace, "'{'");
    FieldSet fields;
    while (auto name = field_header(fields)) {
      const std::string& f = name->text;
      if (f == "name") a.name = text_value();
      else if (f == "role") a.role = text_value();
      else if (f == "calibration") a.calibration = number_value();
      else {
        fields.seen.erase(f);
        report(*name, "unknown keyword '" + f + "' in author");
        skip_unknown_value();
      }
    }
    expect(Tok::RBrace, "'}'");
    require(fields, keyword, a.id, {"name"});
    return a;
  }

  ContributionLink parse_contribution(const Token& keyword) {
    ContributionLink c;
    c.id = id_value();
    expect_keyword("from");
    c.source = id_value();
    expect_keyword("to");
    c.target = id_value();
    expect(Tok::LBrace, "'{'");
    FieldSet fields;
    while (auto name = field_header(fields)) {
      const std::string& f = name->text;
      if (f == "amount") c.amount = quantity_value();
      else if (f == "activity") c.activity = text_value();
      else if (f == "confidence") c.confidence = number_value();
      else if (f == "author") c.author = id_value();
      else if (f == "combinator") {
        const Token& tok = expect(Tok::Ident, "and, or(GROUP) or independent");
        if (tok.text == "and") {
          c.combinator = Combinator::all();
        } else if (tok.text == "independent") {
          c.combinator = Combinator::independent();
        } else if (tok.text == "or") {
          expect(Tok::LParen, "'('");
          c.combinator = Combinator::any(id_value());
          expect(Tok::RParen, "')'");
        } else {
          report(tok, "combinator must be and, or(GROUP) or independent");
        }
      } else {
        fields.seen.erase(f);
        report(*name, "unknown keyword '" + f + "' in contribution");
        skip_unknown_value();
      }
    }
    expect(Tok::RBrace, "'}'");
    require(fields, keyword, c.id, {"amount", "confidence"});
    return c;
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
};

// Serialization ---------------------------------------------------------------

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string quantity_text(const Quantity& q) {
  if (q.is_percent()) return format_decimal(q.value) + "%";
  return format_decimal(q.value) + " " + q.unit_name;
}

template <class T>
std::vector<const T*> sorted_by_id(const std::vector<T>& items) {
  std::vector<const T*> out;
  for (const auto& item : items) out.push_back(&item);
  std::sort(out.begin(), out.end(), [](const T* a, const T* b) { return a->id < b->id; });
  return out;
}

}  // namespace

std::optional<GraphParts> parse_parts(std::string_view text, std::vector<ParseError>& errors) {
  std::size_t before = errors.size();
  Lexer lexer(text, errors);
  auto tokens = lexer.run();
  Parser parser(text, std::move(tokens), errors);
  GraphParts parts = parser.run();
  if (errors.size() != before) {
    std::stable_sort(errors.begin() + before, errors.end(), [](const ParseError& a, const ParseError& b) {
      return a.span.offset < b.span.offset;
    });
    return std::nullopt;
  }
  return parts;
}

ParseResult parse_model(std::string_view text) {
  ParseResult result;
  auto parts = parse_parts(text, result.errors);
  if (!parts) return result;
  auto built = build_graph(std::move(*parts));
  result.diagnostics = std::move(built.diagnostics);
  result.graph = std::move(built.graph);
  return result;
}

std::optional<Quantity> parse_quantity(std::string_view text) {
  std::vector<ParseError> errors;
  Lexer lexer(text, errors);
  auto tokens = lexer.run();
  if (!errors.empty() || tokens.size() != 3 || tokens[0].kind != Tok::Number) return std::nullopt;
  Number value = *parse_decimal(tokens[0].text);
  if (tokens[1].kind == Tok::Percent) return Quantity::percent(value);
  if (tokens[1].kind == Tok::Ident) return Quantity::absolute(value, tokens[1].text);
  return std::nullopt;
}

std::string serialize_model(const GoalGraph& graph) {
  std::ostringstream out;
  out << "model " << quote(graph.name()) << "\n";

  for (const auto* a : sorted_by_id(graph.authors())) {
    out << "\nauthor " << a->id << " {\n";
    out << "  name: " << quote(a->name) << "\n";
    if (!a->role.empty()) out << "  role: " << quote(a->role) << "\n";
    if (a->calibration != 1) out << "  calibration: " << format_decimal(a->calibration) << "\n";
    out << "}\n";
  }
  for (const auto* s : sorted_by_id(graph.softgoals())) {
    out << "\nsoftgoal " << s->id << " {\n";
    out << "  kind: " << to_string(s->kind) << "\n";
    out << "  statement: " << quote(s->statement) << "\n";
    out << "}\n";
  }
  for (const auto* o : sorted_by_id(graph.objectives())) {
    out << "\nobjective " << o->id << " {\n";
    out << "  activity: " << quote(o->activity) << "\n";
    if (!o->object.empty()) out << "  object: " << quote(o->object) << "\n";
    out << "  focus: " << quote(o->focus) << "\n";
    out << "  magnitude: " << quantity_text(o->magnitude) << "\n";
    out << "  scale: " << quote(o->scale) << "\n";
    if (!o->timeframe.empty()) out << "  timeframe: " << quote(o->timeframe) << "\n";
    if (!o->scope.empty()) out << "  scope: " << quote(o->scope) << "\n";
    if (!o->author.empty()) out << "  author: " << quote(o->author) << "\n";
    if (o->top_level) out << "  top_level: true\n";
    out << "}\n";
  }
  for (const auto* r : sorted_by_id(graph.requirements())) {
    out << "\nrequirement " << r->id << " {\n";
    out << "  kind: " << to_string(r->kind) << "\n";
    out << "  headline: " << quote(r->headline) << "\n";
    if (!r->description.empty()) out << "  description: " << quote(r->description) << "\n";
    if (!r->rationale.empty()) out << "  rationale: " << quote(r->rationale) << "\n";
    out << "  fit_criterion: " << quote(r->fit_criterion) << "\n";
    if (r->effort_hours) out << "  effort_hours: " << format_decimal(*r->effort_hours) << "\n";
    if (!r->included) out << "  included: false\n";
    out << "}\n";
  }
  for (const auto* c : sorted_by_id(graph.contributions())) {
    out << "\ncontribution " << c->id << " from " << c->source << " to " << c->target << " {\n";
    out << "  amount: " << quantity_text(c->amount) << "\n";
    if (!c->activity.empty()) out << "  activity: " << quote(c->activity) << "\n";
    out << "  confidence: " << format_decimal(c->confidence) << "\n";
    switch (c->combinator.kind) {
      case Combinator::Kind::Independent: break;
      case Combinator::Kind::And: out << "  combinator: and\n"; break;
      case Combinator::Kind::Or: out << "  combinator: or(" << c->combinator.group << ")\n"; break;
    }
    if (!c->author.empty()) out << "  author: " << c->author << "\n";
    out << "}\n";
  }
  auto decompositions = sorted_by_id(graph.decompositions());
  if (!decompositions.empty()) out << "\n";
  for (const auto* d : decompositions) {
    out << "decomposition from " << d->parent << " to " << d->child << "\n";
  }
  auto traces = sorted_by_id(graph.traces());
  if (!traces.empty()) out << "\n";
  for (const auto* t : traces) out << "trace from " << t->source << " to " << t->target << "\n";
  return out.str();
}

std::string format_parse_error(std::string_view file, const ParseError& error) {
  std::ostringstream out;
  out << file << ":" << error.span.line << ":" << error.span.column << ": error: " << error.message;
  if (!error.snippet.empty()) out << " (at '" << error.snippet << "')";
  return out.str();
}

}  // namespace galign
