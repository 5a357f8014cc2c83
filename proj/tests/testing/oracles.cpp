#include "testing/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace galign::testing {

namespace {

const ContributionLink* find_link(const GraphParts& parts, const std::string& id) {
  for (const auto& c : parts.contributions) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Objective* find_objective(const GraphParts& parts, const std::string& id) {
  for (const auto& o : parts.objectives) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

Number kappa(const GraphParts& parts, const ContributionLink& link, const EvalOptions& options) {
  if (!options.use_confidence) return 1;
  Number k = link.confidence;
  if (options.use_calibration) {
    for (const auto& a : parts.authors) {
      if (a.id == link.author) k *= a.calibration;
    }
  }
  return k;
}

struct Evaluator {
  const GraphParts& parts;
  const EvalOptions& options;
  OracleEvaluation result;
  std::set<std::string> unresolved_groups;

  Number satisfaction(const std::string& node) {
    for (const auto& r : parts.requirements) {
      if (r.id == node) return r.included ? 1 : 0;
    }
    const OracleOutcome& o = outcome(node);
    Number fraction = o.raw_sum / find_objective(parts, node)->magnitude.value;
    return fraction > 1 ? Number(1) : fraction;
  }

  bool counted(const ContributionLink& link) {
    if (link.combinator.kind != Combinator::Kind::Or) return true;
    auto it = result.or_choices.find(link.combinator.group);
    return it != result.or_choices.end() && it->second == link.id;
  }

  void resolve_group(const std::string& group) {
    if (result.or_choices.count(group) || unresolved_groups.count(group)) return;
    if (auto it = options.or_selection.find(group); it != options.or_selection.end()) {
      result.or_choices[group] = it->second;
      return;
    }
    if (options.or_policy != OrPolicy::BestAdjusted) {
      unresolved_groups.insert(group);
      return;
    }
    std::vector<const ContributionLink*> members;
    for (const auto& c : parts.contributions) {
      if (c.combinator.kind == Combinator::Kind::Or && c.combinator.group == group) members.push_back(&c);
    }
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->id < b->id; });
    const ContributionLink* best = nullptr;
    Number best_value;
    for (const auto* m : members) {
      Number value = m->amount.value * kappa(parts, *m, options) * satisfaction(m->source);
      if (!best || value > best_value) {
        best = m;
        best_value = value;
      }
    }
    result.or_choices[group] = best->id;
  }

  const OracleOutcome& outcome(const std::string& id) {
    if (auto it = result.outcomes.find(id); it != result.outcomes.end()) return it->second;
    OracleOutcome o;
    bool unresolved = false;
    bool gate_open = true;
    for (const auto& link : parts.contributions) {
      if (link.target != id) continue;
      if (link.combinator.kind == Combinator::Kind::Or) {
        resolve_group(link.combinator.group);
        if (unresolved_groups.count(link.combinator.group)) unresolved = true;
      }
      if (!counted(link)) continue;
      Number s = satisfaction(link.source);
      o.raw_sum += link.amount.value * s;
      o.adjusted_sum += link.amount.value * kappa(parts, link, options) * s;
      if (link.combinator.kind == Combinator::Kind::And) {
        bool source_unsatisfied = find_objective(parts, link.source) &&
                                  outcome(link.source).status == Status::Unsatisfied;
        if (s == 0 || source_unsatisfied) gate_open = false;
      }
    }
    const Number& magnitude = find_objective(parts, id)->magnitude.value;
    if (unresolved) {
      o.status = Status::Undetermined;
    } else if (!gate_open || o.raw_sum < magnitude) {
      o.status = Status::Unsatisfied;
    } else if (o.adjusted_sum < magnitude) {
      o.status = Status::InDoubt;
    } else {
      o.status = Status::Satisfied;
    }
    return result.outcomes.emplace(id, o).first->second;
  }
};

}  // namespace

OracleEvaluation oracle_evaluate(const GraphParts& parts, const EvalOptions& options) {
  Evaluator e{parts, options, {}, {}};
  for (const auto& o : parts.objectives) e.outcome(o.id);
  return std::move(e.result);
}

std::vector<std::vector<std::string>> oracle_paths(const GraphParts& parts, const std::string& from,
                                                   const std::string& to) {
  std::vector<std::vector<std::string>> out;
  if (from == to) return out;
  std::vector<std::string> path;
  std::vector<std::string> visited{from};
  std::function<void(const std::string&)> dfs = [&](const std::string& at) {
    std::vector<std::pair<std::string, std::string>> steps;
    for (const auto& c : parts.contributions) {
      if (c.source == at) steps.emplace_back(c.id, c.target);
    }
    for (const auto& d : parts.decompositions) {
      if (d.parent == at) steps.emplace_back(d.id, d.child);
    }
    for (const auto& [link, next] : steps) {
      if (std::find(visited.begin(), visited.end(), next) != visited.end()) continue;
      path.push_back(link);
      if (next == to) {
        out.push_back(path);
      } else {
        visited.push_back(next);
        dfs(next);
        visited.pop_back();
      }
      path.pop_back();
    }
  };
  dfs(from);
  std::sort(out.begin(), out.end());
  return out;
}

OracleAttribution oracle_attribute(const GraphParts& parts, const std::vector<std::vector<std::string>>& paths,
                                   const EvalOptions& options) {
  OracleEvaluation eval = oracle_evaluate(parts, options);
  OracleAttribution out;
  for (const auto& path : paths) {
    Number delivered = 1;
    Number confidence = 1;
    bool usable = true;
    std::vector<const ContributionLink*> links;
    for (const auto& id : path) {
      const ContributionLink* c = find_link(parts, id);
      if (!c) continue;  // decomposition step: credit flows unchanged
      if (c->combinator.kind == Combinator::Kind::Or) {
        auto it = eval.or_choices.find(c->combinator.group);
        if (it == eval.or_choices.end() || it->second != c->id) usable = false;
      }
      links.push_back(c);
    }
    if (!usable || links.empty()) continue;
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (i + 1 < links.size()) {
        delivered *= links[i]->amount.value / find_objective(parts, links[i]->target)->magnitude.value;
      } else {
        delivered *= links[i]->amount.value;
      }
      confidence *= kappa(parts, *links[i], options);
    }
    out.raw_amount += delivered;
    out.adjusted_amount += delivered * confidence;
    ++out.paths;
  }
  return out;
}

// ---------------------------------------------------------------------------
// DOT grammar
// ---------------------------------------------------------------------------

namespace {

struct DotToken {
  enum Kind { Id, Punct, Edge, End } kind;
  std::string text;
};

class DotChecker {
 public:
  explicit DotChecker(const std::string& text) : text_(text) {}

  std::optional<std::string> check() {
    try {
      tokenize();
      graph();
      if (peek().kind != DotToken::End) fail("trailing input after graph");
    } catch (const std::string& message) {
      return message;
    }
    return std::nullopt;
  }

 private:
  [[noreturn]] void fail(const std::string& message) { throw message + " (token " + std::to_string(pos_) + ")"; }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '/' && i + 1 < text_.size() && text_[i + 1] == '/') {
        while (i < text_.size() && text_[i] != '\n') ++i;
      } else if (c == '/' && i + 1 < text_.size() && text_[i + 1] == '*') {
        auto end = text_.find("*/", i + 2);
        if (end == std::string::npos) fail("unterminated comment");
        i = end + 2;
      } else if (c == '#' && (i == 0 || text_[i - 1] == '\n')) {
        while (i < text_.size() && text_[i] != '\n') ++i;
      } else if (c == '"') {
        std::string value;
        ++i;
        for (;;) {
          if (i >= text_.size()) fail("unterminated string");
          if (text_[i] == '\\' && i + 1 < text_.size()) {
            value += text_[i + 1];
            i += 2;
          } else if (text_[i] == '"') {
            ++i;
            break;
          } else {
            value += text_[i++];
          }
        }
        tokens_.push_back({DotToken::Id, value});
      } else if (c == '<') {
        int depth = 0;
        std::size_t start = i;
        do {
          if (i >= text_.size()) fail("unterminated HTML id");
          if (text_[i] == '<') ++depth;
          if (text_[i] == '>') --depth;
          ++i;
        } while (depth > 0);
        tokens_.push_back({DotToken::Id, text_.substr(start, i - start)});
      } else if (c == '-' && i + 1 < text_.size() && (text_[i + 1] == '>' || text_[i + 1] == '-')) {
        tokens_.push_back({DotToken::Edge, text_.substr(i, 2)});
        i += 2;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
        std::size_t start = i;
        while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_' ||
                                    static_cast<unsigned char>(text_[i]) >= 0x80)) {
          ++i;
        }
        tokens_.push_back({DotToken::Id, text_.substr(start, i - start)});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
        std::size_t start = i++;
        while (i < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i])) || text_[i] == '.')) ++i;
        tokens_.push_back({DotToken::Id, text_.substr(start, i - start)});
      } else if (std::string("{}[]=;,:").find(c) != std::string::npos) {
        tokens_.push_back({DotToken::Punct, std::string(1, c)});
        ++i;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    tokens_.push_back({DotToken::End, ""});
  }

  const DotToken& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).kind == DotToken::Punct && peek(ahead).text == p;
  }
  bool keyword(const char* word) const {
    if (peek().kind != DotToken::Id) return false;
    std::string lower;
    for (char ch : peek().text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return lower == word;
  }
  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "', got '" + peek().text + "'");
    ++pos_;
  }
  std::string id() {
    if (peek().kind != DotToken::Id) fail("expected an id, got '" + peek().text + "'");
    return tokens_[pos_++].text;
  }

  void graph() {
    if (keyword("strict")) ++pos_;
    if (keyword("digraph")) {
      directed_ = true;
    } else if (!keyword("graph")) {
      fail("expected 'graph' or 'digraph'");
    }
    ++pos_;
    if (peek().kind == DotToken::Id) ++pos_;
    expect("{");
    stmt_list();
    expect("}");
  }

  void stmt_list() {
    while (!is_punct("}") && peek().kind != DotToken::End) {
      stmt();
      if (is_punct(";")) ++pos_;
    }
  }

  void attr_list() {
    while (is_punct("[")) {
      ++pos_;
      while (!is_punct("]")) {
        id();
        if (is_punct("=")) {
          ++pos_;
          id();
        }
        if (is_punct(";") || is_punct(",")) ++pos_;
      }
      ++pos_;
    }
  }

  void node_id() {
    id();
    if (is_punct(":")) {
      ++pos_;
      id();
      if (is_punct(":")) {
        ++pos_;
        id();
      }
    }
  }

  void subgraph() {
    if (keyword("subgraph")) {
      ++pos_;
      if (peek().kind == DotToken::Id) ++pos_;
    }
    expect("{");
    stmt_list();
    expect("}");
  }

  void stmt() {
    if (keyword("graph") || keyword("node") || keyword("edge")) {
      ++pos_;
      if (!is_punct("[")) fail("expected attribute list");
      attr_list();
      return;
    }
    if (peek().kind == DotToken::Id && is_punct("=", 1)) {
      pos_ += 2;
      id();
      return;
    }
    if (keyword("subgraph") || is_punct("{")) {
      subgraph();
    } else {
      node_id();
    }
    while (peek().kind == DotToken::Edge) {
      if ((peek().text == "->") != directed_) fail("edge operator '" + peek().text + "' in the wrong graph type");
      ++pos_;
      if (keyword("subgraph") || is_punct("{")) {
        subgraph();
      } else {
        node_id();
      }
    }
    attr_list();
  }

  const std::string& text_;
  std::vector<DotToken> tokens_;
  std::size_t pos_ = 0;
  bool directed_ = false;
};

}  // namespace

std::optional<std::string> dot_syntax_error(const std::string& text) { return DotChecker(text).check(); }

}  // namespace galign::testing
