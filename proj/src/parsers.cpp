#include "ratiosynth/parsers.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ratiosynth {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

// Splits into lines of whitespace-separated tokens; '#' starts a comment.
std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t pos = 0, number = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Line l{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) l.tokens.push_back({line.substr(start, i - start), start + 1});
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

[[noreturn]] void fail(const Line& l, const Token& t, const std::string& msg) {
  throw ParseError(l.number, t.column, msg);
}

[[noreturn]] void fail(const Line& l, const std::string& msg) {
  throw ParseError(l.number, l.tokens.empty() ? 1 : l.tokens.front().column, msg);
}

double parse_number(const Line& l, const Token& t) {
  double v = 0.0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(l, t, "expected a decimal number, got '" + std::string(t.text) + "'");
  return v;
}

std::size_t parse_index(const Line& l, const Token& t) {
  std::size_t v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(l, t, "expected a nonnegative integer");
  return v;
}

class NameTable {
 public:
  std::vector<std::string> names;

  bool add(std::string_view name) {
    auto [it, inserted] = index_.try_emplace(std::string(name), names.size());
    if (inserted) names.emplace_back(name);
    return inserted;
  }
  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  void reset(const std::vector<std::string>& from) {
    names.clear();
    index_.clear();
    for (const auto& n : from) add(n);
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

struct UtilityLine {
  Line line;
  bool reward;
};

void apply_utilities(const std::vector<UtilityLine>& lines, const Mdp& m,
                     std::optional<UtilityFn>& reward, std::optional<UtilityFn>& cost) {
  NameTable states, actions;
  states.reset(m.state_names);
  actions.reset(m.action_names);
  std::vector<std::vector<char>> seen_r(m.num_states()), seen_c(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    seen_r[s].assign(m.choices[s].size(), 0);
    seen_c[s].assign(m.choices[s].size(), 0);
  }
  bool any_r = false, any_c = false;
  UtilityFn r{UtilityKind::Reward, {}}, c{UtilityKind::Cost, {}};
  for (StateId s = 0; s < m.num_states(); ++s) {
    r.value.emplace_back(m.choices[s].size(), 0.0);
    c.value.emplace_back(m.choices[s].size(), 0.0);
  }
  for (const auto& [l, is_reward] : lines) {
    if (l.tokens.size() != 4) fail(l, "expected: reward|cost <state> <action> <value>");
    const Token& st = l.tokens[1];
    const Token& ac = l.tokens[2];
    const double v = parse_number(l, l.tokens[3]);
    auto& table = is_reward ? r : c;
    auto& seen = is_reward ? seen_r : seen_c;
    (is_reward ? any_r : any_c) = true;
    std::vector<StateId> ss;
    if (st.text == "*") {
      for (StateId s = 0; s < m.num_states(); ++s) ss.push_back(s);
    } else {
      auto s = states.find(st.text);
      if (!s) fail(l, st, "unknown state '" + std::string(st.text) + "'");
      ss.push_back(*s);
    }
    std::optional<ActionId> a;
    if (ac.text != "*") {
      a = actions.find(ac.text);
      if (!a) fail(l, ac, "unknown action '" + std::string(ac.text) + "'");
    }
    for (StateId s : ss) {
      if (a) {
        auto k = m.choice_index(s, *a);
        if (!k) {
          if (st.text == "*") continue;
          fail(l, ac, "action '" + std::string(ac.text) + "' is not available at state '" +
                          m.state_names[s] + "'");
        }
        table.value[s][*k] = v;
        seen[s][*k] = 1;
      } else {
        for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
          table.value[s][k] = v;
          seen[s][k] = 1;
        }
      }
    }
  }
  auto finish = [&](bool any, UtilityFn& table, const std::vector<std::vector<char>>& seen,
                    std::optional<UtilityFn>& out, const char* what) {
    if (!any) return;
    for (StateId s = 0; s < m.num_states(); ++s)
      for (std::size_t k = 0; k < m.choices[s].size(); ++k)
        if (!seen[s][k])
          throw Error(ErrorKind::Validation,
                      std::string("missing ") + what + " for state '" + m.state_names[s] +
                          "' action '" + m.action_names[m.choices[s][k].action] + "'");
    validate_utility(m, table);
    out = std::move(table);
  };
  finish(any_r, r, seen_r, reward, "reward");
  finish(any_c, c, seen_c, cost, "cost");
}

}  // namespace

ParsedModel parse_mdp(std::string_view text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty model");
  NameTable states, actions, props;
  std::optional<StateId> initial;
  std::vector<LabelSet> labels;
  struct Trans {
    StateId s;
    ActionId a;
    StateId t;
    double p;
  };
  std::vector<Trans> trans;
  std::set<std::tuple<StateId, ActionId, StateId>> seen_trans;
  std::vector<UtilityLine> util;
  bool saw_states = false;

  auto state_of = [&](const Line& l, const Token& t) {
    auto s = states.find(t.text);
    if (!s) fail(l, t, "unknown state '" + std::string(t.text) + "'");
    return *s;
  };

  for (const auto& l : lines) {
    const std::string_view kw = l.tokens[0].text;
    if (kw == "states") {
      saw_states = true;
      for (std::size_t i = 1; i < l.tokens.size(); ++i) {
        if (l.tokens[i].text == "*") fail(l, l.tokens[i], "'*' is reserved");
        if (!states.add(l.tokens[i].text))
          fail(l, l.tokens[i], "duplicate state '" + std::string(l.tokens[i].text) + "'");
        labels.push_back(0);
      }
    } else if (kw == "actions") {
      for (std::size_t i = 1; i < l.tokens.size(); ++i) {
        if (l.tokens[i].text == "*") fail(l, l.tokens[i], "'*' is reserved");
        if (!actions.add(l.tokens[i].text))
          fail(l, l.tokens[i], "duplicate action '" + std::string(l.tokens[i].text) + "'");
      }
    } else if (kw == "ap") {
      for (std::size_t i = 1; i < l.tokens.size(); ++i) {
        if (!props.add(l.tokens[i].text))
          fail(l, l.tokens[i], "duplicate proposition '" + std::string(l.tokens[i].text) + "'");
        if (props.names.size() > kMaxProps) fail(l, l.tokens[i], "too many propositions");
      }
    } else if (kw == "initial") {
      if (l.tokens.size() != 2) fail(l, "expected: initial <state>");
      if (initial) fail(l, "initial state declared twice");
      initial = state_of(l, l.tokens[1]);
    } else if (kw == "label") {
      if (l.tokens.size() < 2) fail(l, "expected: label <state> <prop>...");
      StateId s = state_of(l, l.tokens[1]);
      for (std::size_t i = 2; i < l.tokens.size(); ++i) {
        auto q = props.find(l.tokens[i].text);
        if (!q) fail(l, l.tokens[i], "unknown proposition '" + std::string(l.tokens[i].text) + "'");
        labels[s] |= LabelSet{1} << *q;
      }
    } else if (kw == "trans") {
      if (l.tokens.size() != 5) fail(l, "expected: trans <state> <action> <state> <probability>");
      StateId s = state_of(l, l.tokens[1]);
      auto a = actions.find(l.tokens[2].text);
      if (!a) fail(l, l.tokens[2], "unknown action '" + std::string(l.tokens[2].text) + "'");
      StateId t = state_of(l, l.tokens[3]);
      double p = parse_number(l, l.tokens[4]);
      if (!seen_trans.insert({s, *a, t}).second) fail(l, "duplicate transition");
      trans.push_back({s, *a, t, p});
    } else if (kw == "reward" || kw == "cost") {
      util.push_back({l, kw == "reward"});
    } else {
      fail(l, l.tokens[0], "unknown keyword '" + std::string(kw) + "'");
    }
  }
  if (!saw_states || states.names.empty()) throw ParseError(1, 1, "no states declared");
  if (!initial) throw ParseError(lines.back().number, 1, "missing initial state");

  ParsedModel out;
  Mdp& m = out.mdp;
  m.state_names = states.names;
  m.action_names = actions.names;
  m.prop_names = props.names;
  m.initial = *initial;
  m.labels = labels;
  m.choices.resize(m.state_names.size());
  std::stable_sort(trans.begin(), trans.end(), [](const Trans& x, const Trans& y) {
    return std::tie(x.s, x.a) < std::tie(y.s, y.a);
  });
  for (const auto& tr : trans) {
    auto& cs = m.choices[tr.s];
    if (cs.empty() || cs.back().action != tr.a) cs.push_back({tr.a, {}});
    cs.back().successors.push_back({tr.t, tr.p});
  }
  require_valid(m);
  apply_utilities(util, m, out.reward, out.cost);
  return out;
}

UtilityTables parse_utilities(std::string_view text, const Mdp& m) {
  std::vector<UtilityLine> util;
  for (auto& l : tokenize(text)) {
    const auto kw = l.tokens[0].text;
    if (kw != "reward" && kw != "cost") fail(l, l.tokens[0], "expected 'reward' or 'cost'");
    const bool is_reward = kw == "reward";
    util.push_back({std::move(l), is_reward});
  }
  UtilityTables out;
  apply_utilities(util, m, out.reward, out.cost);
  return out;
}

namespace {

// Character cursor over one line of an automaton file.
class Cursor {
 public:
  Cursor(std::string_view s, std::size_t line, std::size_t col0) : s_(s), line_(line), col0_(col0) {}

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool done() {
    skip();
    return i_ >= s_.size();
  }
  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  void expect(char c) {
    if (!eat(c)) error(std::string("expected '") + c + "'");
  }
  bool eat_word(std::string_view w) {
    skip();
    if (s_.substr(i_, w.size()) != w) return false;
    i_ += w.size();
    return true;
  }
  std::size_t number() {
    skip();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + i_, s_.data() + s_.size(), v);
    if (ec != std::errc()) error("expected an integer");
    i_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  std::string quoted() {
    skip();
    if (i_ >= s_.size() || s_[i_] != '"') error("expected a quoted string");
    std::size_t end = s_.find('"', i_ + 1);
    if (end == std::string_view::npos) error("unterminated string");
    std::string out(s_.substr(i_ + 1, end - i_ - 1));
    i_ = end + 1;
    return out;
  }
  std::string_view rest() {
    skip();
    return s_.substr(i_);
  }
  [[noreturn]] void error(const std::string& msg) const {
    throw ParseError(line_, col0_ + i_, msg);
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_;
  std::size_t col0_;
};

using SymbolSet = std::vector<char>;

SymbolSet guard_expr(Cursor& c, std::size_t nap);

SymbolSet guard_factor(Cursor& c, std::size_t nap) {
  const std::size_t n = std::size_t{1} << nap;
  if (c.eat('!')) {
    SymbolSet s = guard_factor(c, nap);
    for (auto& x : s) x = !x;
    return s;
  }
  if (c.eat('(')) {
    SymbolSet s = guard_expr(c, nap);
    c.expect(')');
    return s;
  }
  if (c.eat('t')) return SymbolSet(n, 1);
  if (c.eat('f')) return SymbolSet(n, 0);
  std::size_t ap = c.number();
  if (ap >= nap) c.error("proposition index out of range");
  SymbolSet s(n, 0);
  for (std::size_t sym = 0; sym < n; ++sym) s[sym] = (sym >> ap) & 1U;
  return s;
}

SymbolSet guard_term(Cursor& c, std::size_t nap) {
  SymbolSet s = guard_factor(c, nap);
  while (c.eat('&')) {
    SymbolSet r = guard_factor(c, nap);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = s[i] && r[i];
  }
  return s;
}

SymbolSet guard_expr(Cursor& c, std::size_t nap) {
  SymbolSet s = guard_term(c, nap);
  while (c.eat('|')) {
    SymbolSet r = guard_term(c, nap);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = s[i] || r[i];
  }
  return s;
}

// One disjunct: Fin(x) & Inf(y) in either order, or a lone Inf(y).
std::pair<std::optional<std::size_t>, std::size_t> acceptance_pair(Cursor& c) {
  bool paren = c.eat('(');
  std::optional<std::size_t> fin, inf;
  do {
    if (c.eat_word("Fin")) {
      if (fin) c.error("two Fin terms in one Rabin pair");
      c.expect('(');
      fin = c.number();
      c.expect(')');
    } else if (c.eat_word("Inf")) {
      if (inf) c.error("two Inf terms in one Rabin pair");
      c.expect('(');
      inf = c.number();
      c.expect(')');
    } else {
      c.error("expected Fin(..) or Inf(..)");
    }
  } while (c.eat('&'));
  if (paren) c.expect(')');
  if (!inf) c.error("Rabin pair without an Inf term");
  return {fin, *inf};
}

}  // namespace

Dra parse_dra(std::string_view text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty automaton");
  // Re-slice raw line text for character-level parsing.
  std::vector<std::string_view> raw;
  {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      raw.push_back(line);
      if (end == text.size()) break;
      pos = end + 1;
    }
  }
  auto cursor_after = [&](const Line& l, std::size_t tok) {
    const Token& t = l.tokens[tok];
    std::string_view r = raw[l.number - 1];
    std::size_t off = t.column - 1 + t.text.size();
    return Cursor(r.substr(off), l.number, off + 1);
  };

  Dra d;
  std::optional<std::size_t> nstates, start, nsets;
  std::vector<std::pair<std::optional<std::size_t>, std::size_t>> pairs;
  bool have_ap = false;
  std::size_t i = 0;
  if (lines[0].tokens[0].text != "HOA:") fail(lines[0], "expected 'HOA: v1'");
  for (; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const auto kw = l.tokens[0].text;
    if (kw == "--BODY--") break;
    if (kw == "HOA:") {
      if (l.tokens.size() != 2 || l.tokens[1].text != "v1") fail(l, "expected 'HOA: v1'");
    } else if (kw == "States:") {
      if (l.tokens.size() != 2) fail(l, "expected 'States: <n>'");
      nstates = parse_index(l, l.tokens[1]);
    } else if (kw == "Start:") {
      if (l.tokens.size() != 2) fail(l, "expected a single start state");
      if (start) fail(l, "multiple Start lines");
      start = parse_index(l, l.tokens[1]);
    } else if (kw == "AP:") {
      Cursor c = cursor_after(l, 0);
      std::size_t n = c.number();
      if (n > kMaxProps) c.error("too many propositions");
      for (std::size_t k = 0; k < n; ++k) d.ap.push_back(c.quoted());
      if (!c.done()) c.error("trailing text after AP list");
      have_ap = true;
    } else if (kw == "Acceptance:") {
      Cursor c = cursor_after(l, 0);
      nsets = c.number();
      do {
        pairs.push_back(acceptance_pair(c));
      } while (c.eat('|'));
      if (!c.done()) c.error("unsupported acceptance condition");
      for (const auto& [fin, inf] : pairs)
        if (inf >= *nsets || (fin && *fin >= *nsets)) c.error("acceptance set out of range");
    } else if (kw == "acc-name:" || kw == "name:" || kw == "tool:" || kw == "properties:") {
      continue;
    } else {
      fail(l, l.tokens[0], "unsupported header item '" + std::string(kw) + "'");
    }
  }
  if (i == lines.size()) fail(lines.back(), "missing --BODY--");
  if (!nstates || *nstates == 0) fail(lines[i], "missing or zero 'States:'");
  if (!start) fail(lines[i], "missing 'Start:'");
  if (*start >= *nstates) fail(lines[i], "start state out of range");
  if (!have_ap) fail(lines[i], "missing 'AP:'");
  if (pairs.empty()) fail(lines[i], "missing 'Acceptance:'");

  d.num_states = *nstates;
  d.initial = *start;
  const std::size_t nsym = d.alphabet_size();
  d.delta.assign(d.num_states, std::vector<std::optional<AutStateId>>(nsym));
  std::vector<std::vector<char>> marks(d.num_states, std::vector<char>(*nsets, 0));
  std::vector<char> declared(d.num_states, 0);
  std::optional<AutStateId> current;
  bool ended = false;
  for (++i; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const auto kw = l.tokens[0].text;
    if (ended) fail(l, "text after --END--");
    if (kw == "--END--") {
      ended = true;
      continue;
    }
    if (kw == "State:") {
      Cursor c = cursor_after(l, 0);
      std::size_t q = c.number();
      if (q >= d.num_states) c.error("state out of range");
      if (declared[q]) c.error("state declared twice");
      declared[q] = 1;
      current = q;
      if (c.peek() == '"') c.quoted();
      if (c.eat('{')) {
        while (!c.eat('}')) {
          std::size_t set = c.number();
          if (set >= *nsets) c.error("acceptance set out of range");
          marks[q][set] = 1;
        }
      }
      if (!c.done()) c.error("unexpected text after state declaration");
      continue;
    }
    if (!current) fail(l, "edge before any State:");
    std::string_view r = raw[l.number - 1];
    Cursor c(r, l.number, 1);
    c.expect('[');
    SymbolSet guard = guard_expr(c, d.ap.size());
    c.expect(']');
    std::size_t dst = c.number();
    if (dst >= d.num_states) c.error("target state out of range");
    if (!c.done()) c.error("transition-based acceptance marks are not supported");
    for (std::size_t sym = 0; sym < nsym; ++sym) {
      if (!guard[sym]) continue;
      if (d.delta[*current][sym])
        throw Error(ErrorKind::Nondeterminism,
                    "line " + std::to_string(l.number) + ": state " + std::to_string(*current) +
                        " has two edges on symbol " + std::to_string(sym));
      d.delta[*current][sym] = dst;
    }
  }
  if (!ended) throw ParseError(lines.back().number, 1, "missing --END--");
  for (AutStateId q = 0; q < d.num_states; ++q)
    for (std::size_t sym = 0; sym < nsym; ++sym)
      if (!d.delta[q][sym])
        throw Error(ErrorKind::Incompleteness,
                    "state " + std::to_string(q) + " has no edge on symbol " + std::to_string(sym));
  for (const auto& [fin, inf] : pairs) {
    RabinPair p;
    for (AutStateId q = 0; q < d.num_states; ++q) {
      if (fin && marks[q][*fin]) p.fin.push_back(q);
      if (marks[q][inf]) p.inf.push_back(q);
    }
    d.pairs.push_back(std::move(p));
  }
  return d;
}

StationaryPolicy parse_policy(std::string_view text, const Mdp& m,
                              std::map<std::string, std::string>* meta) {
  NameTable states, actions;
  states.reset(m.state_names);
  actions.reset(m.action_names);
  StationaryPolicy p;
  p.rule.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) p.rule[s].assign(m.choices[s].size(), 0.0);
  std::set<std::pair<StateId, std::size_t>> seen;
  for (const auto& l : tokenize(text)) {
    const auto kw = l.tokens[0].text;
    if (kw == "meta") {
      if (l.tokens.size() < 2) fail(l, "expected: meta <key> <value>");
      if (meta) {
        std::string value;
        for (std::size_t k = 2; k < l.tokens.size(); ++k) {
          if (k > 2) value += ' ';
          value += l.tokens[k].text;
        }
        (*meta)[std::string(l.tokens[1].text)] = value;
      }
      continue;
    }
    if (kw != "policy") fail(l, l.tokens[0], "expected 'policy' or 'meta'");
    if (l.tokens.size() != 4) fail(l, "expected: policy <state> <action> <probability>");
    auto s = states.find(l.tokens[1].text);
    if (!s)
      throw Error(ErrorKind::PolicyMismatch,
                  "policy names unknown state '" + std::string(l.tokens[1].text) + "'");
    auto a = actions.find(l.tokens[2].text);
    std::optional<std::size_t> k;
    if (a) k = m.choice_index(*s, *a);
    if (!k)
      throw Error(ErrorKind::PolicyMismatch, "action '" + std::string(l.tokens[2].text) +
                                                 "' is not available at state '" +
                                                 m.state_names[*s] + "'");
    if (!seen.insert({*s, *k}).second) fail(l, "duplicate policy entry");
    p.rule[*s][*k] = parse_number(l, l.tokens[3]);
  }
  validate_policy(m, p);
  return p;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string write_utilities(const Mdp& m, const UtilityFn* reward, const UtilityFn* cost) {
  std::ostringstream os;
  auto emit = [&](const UtilityFn* u, const char* kw) {
    if (!u) return;
    for (StateId s = 0; s < m.num_states(); ++s)
      for (std::size_t k = 0; k < m.choices[s].size(); ++k)
        os << kw << ' ' << m.state_names[s] << ' ' << m.action_names[m.choices[s][k].action]
           << ' ' << format_double(u->value[s][k]) << '\n';
  };
  emit(reward, "reward");
  emit(cost, "cost");
  return os.str();
}

std::string write_mdp(const Mdp& m, const UtilityFn* reward, const UtilityFn* cost) {
  std::ostringstream os;
  os << "states";
  for (const auto& s : m.state_names) os << ' ' << s;
  os << "\ninitial " << m.state_names[m.initial] << "\nactions";
  for (const auto& a : m.action_names) os << ' ' << a;
  os << "\nap";
  for (const auto& p : m.prop_names) os << ' ' << p;
  os << '\n';
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.labels[s] == 0) continue;
    os << "label " << m.state_names[s];
    for (std::size_t q = 0; q < m.prop_names.size(); ++q)
      if ((m.labels[s] >> q) & 1U) os << ' ' << m.prop_names[q];
    os << '\n';
  }
  for (StateId s = 0; s < m.num_states(); ++s)
    for (const auto& c : m.choices[s])
      for (const auto& succ : c.successors)
        os << "trans " << m.state_names[s] << ' ' << m.action_names[c.action] << ' '
           << m.state_names[succ.target] << ' ' << format_double(succ.prob) << '\n';
  os << write_utilities(m, reward, cost);
  return os.str();
}

std::string write_dra(const Dra& d) {
  std::ostringstream os;
  os << "HOA: v1\nStates: " << d.num_states << "\nStart: " << d.initial << "\nAP: " << d.ap.size();
  for (const auto& a : d.ap) os << " \"" << a << '"';
  os << "\nacc-name: Rabin " << d.pairs.size() << "\nAcceptance: " << 2 * d.pairs.size() << ' ';
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    if (i) os << " | ";
    os << "(Fin(" << 2 * i << ") & Inf(" << 2 * i + 1 << "))";
  }
  os << "\n--BODY--\n";
  for (AutStateId q = 0; q < d.num_states; ++q) {
    os << "State: " << q;
    std::vector<std::size_t> sets;
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
      const auto& p = d.pairs[i];
      if (std::find(p.fin.begin(), p.fin.end(), q) != p.fin.end()) sets.push_back(2 * i);
      if (std::find(p.inf.begin(), p.inf.end(), q) != p.inf.end()) sets.push_back(2 * i + 1);
    }
    if (!sets.empty()) {
      os << " {";
      for (std::size_t k = 0; k < sets.size(); ++k) os << (k ? " " : "") << sets[k];
      os << '}';
    }
    os << '\n';
    // Group symbols by target; one minterm disjunction per target.
    std::map<AutStateId, std::vector<std::size_t>> by_target;
    for (std::size_t sym = 0; sym < d.alphabet_size(); ++sym)
      by_target[*d.delta[q][sym]].push_back(sym);
    for (const auto& [dst, syms] : by_target) {
      os << '[';
      if (syms.size() == d.alphabet_size()) {
        os << 't';
      } else {
        for (std::size_t k = 0; k < syms.size(); ++k) {
          if (k) os << " | ";
          for (std::size_t a = 0; a < d.ap.size(); ++a) {
            if (a) os << '&';
            os << (((syms[k] >> a) & 1U) ? "" : "!") << a;
          }
        }
      }
      os << "] " << dst << '\n';
    }
  }
  os << "--END--\n";
  return os.str();
}

std::string write_policy(const Mdp& m, const StationaryPolicy& p,
                         const std::map<std::string, std::string>& meta) {
  validate_policy(m, p);
  std::ostringstream os;
  for (const auto& [k, v] : meta) os << "meta " << k << ' ' << v << '\n';
  std::vector<std::string> lines;
  for (StateId s = 0; s < m.num_states(); ++s)
    for (std::size_t k = 0; k < m.choices[s].size(); ++k)
      if (p.rule[s][k] != 0.0)
        lines.push_back("policy " + m.state_names[s] + ' ' +
                        m.action_names[m.choices[s][k].action] + ' ' + format_12(p.rule[s][k]));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << '\n';
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Param, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Param, "cannot write '" + path + "'");
  out << text;
}

}  // namespace ratiosynth
