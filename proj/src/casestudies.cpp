#include "ratiosynth/casestudies.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "ratiosynth/chain.hpp"
#include "ratiosynth/graph.hpp"
#include "ratiosynth/lp.hpp"

namespace ratiosynth {

namespace {

const std::vector<std::string> kDirections = {"up", "down", "left", "right"};

Cell step(Cell c, const std::string& dir) {
  if (dir == "up") return {c.row - 1, c.col};
  if (dir == "down") return {c.row + 1, c.col};
  if (dir == "left") return {c.row, c.col - 1};
  return {c.row, c.col + 1};
}

bool on_grid(int rows, int cols, Cell c) {
  return c.row >= 1 && c.row <= rows && c.col >= 1 && c.col <= cols;
}

void param_error(const std::string& msg) { throw Error(ErrorKind::Param, msg); }

std::vector<std::vector<double>> filled(int rows, int cols, double v) {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(rows),
                                          std::vector<double>(static_cast<std::size_t>(cols), v));
}

double at(const std::vector<std::vector<double>>& f, Cell c) {
  return f[static_cast<std::size_t>(c.row - 1)][static_cast<std::size_t>(c.col - 1)];
}

// delta over 2^ap from a symbol -> state function.
template <typename F>
Dra make_dra(std::size_t n, std::vector<std::string> ap, F next, std::vector<RabinPair> pairs) {
  Dra d;
  d.num_states = n;
  d.initial = 0;
  d.ap = std::move(ap);
  d.pairs = std::move(pairs);
  d.delta.assign(n, std::vector<std::optional<AutStateId>>(d.alphabet_size()));
  for (AutStateId q = 0; q < n; ++q)
    for (std::size_t sym = 0; sym < d.alphabet_size(); ++sym)
      d.delta[q][sym] = next(q, static_cast<LabelSet>(sym));
  return d;
}

}  // namespace

std::vector<std::vector<double>> distance_field(int rows, int cols, const std::vector<Cell>& origins,
                                                double p_max, double exponent, double row_tilt) {
  auto f = filled(rows, cols, 0.0);
  if (origins.empty()) return f;
  double d_max = 0.0;
  for (int r = 1; r <= rows; ++r)
    for (int c = 1; c <= cols; ++c) {
      int d = std::numeric_limits<int>::max();
      for (Cell o : origins) d = std::min(d, std::abs(r - o.row) + std::abs(c - o.col));
      f[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)] = d;
      d_max = std::max(d_max, static_cast<double>(d));
    }
  for (int r = 1; r <= rows; ++r) {
    const double tilt = rows > 1 ? 1.0 - row_tilt * (rows - r) / (rows - 1.0) : 1.0;
    for (double& x : f[static_cast<std::size_t>(r - 1)])
      x = d_max > 0.0 ? p_max * std::pow(x / d_max, exponent) * tilt : 0.0;
  }
  return f;
}

Case1Params Case1Params::defaults() {
  Case1Params p;
  for (int r : {2, 3})
    for (int c : {2, 3}) p.obstacles.push_back({r, c});
  for (int r : {7, 8})
    for (int c : {3, 4}) p.obstacles.push_back({r, c});
  for (int r : {4, 5})
    for (int c : {7, 8}) p.obstacles.push_back({r, c});
  p.destinations = {{{9, 1}, 2.0}, {{1, 9}, 1.0}};
  p.item_prob = distance_field(p.rows, p.cols, {Cell{9, 1}, Cell{1, 9}}, 0.9, 1.0, 0.3);
  p.cost_table = {3.2, 3.0, 2.7, 2.5, 1.5, 1.0, 1.0, 1.0, 1.0};
  return p;
}

void Case1Params::validate() const {
  if (rows < 1 || cols < 1) param_error("grid must be nonempty");
  auto inside = [&](Cell c, const char* what) {
    if (!on_grid(rows, cols, c)) param_error(std::string(what) + " lies outside the grid");
  };
  inside(start, "start");
  inside(charging, "charging cell");
  for (auto c : obstacles) inside(c, "obstacle");
  if (destinations.empty()) param_error("at least one destination required");
  for (const auto& d : destinations) {
    inside(d.cell, "destination");
    if (!std::isfinite(d.reward)) param_error("destination reward must be finite");
  }
  auto blocked = [&](Cell c) { return std::find(obstacles.begin(), obstacles.end(), c) != obstacles.end(); };
  if (blocked(start) || blocked(charging)) param_error("start and charging cells must be free");
  for (const auto& d : destinations)
    if (blocked(d.cell)) param_error("destinations must be free");
  if (item_prob.size() != static_cast<std::size_t>(rows)) param_error("probability field has wrong shape");
  for (const auto& row : item_prob) {
    if (row.size() != static_cast<std::size_t>(cols)) param_error("probability field has wrong shape");
    for (double x : row)
      if (!(x >= 0.0 && x <= 1.0)) param_error("item probabilities must lie in [0, 1]");
  }
  if (cost_table.empty()) param_error("cost table is empty");
  for (double x : cost_table)
    if (!(x > 0.0) || !std::isfinite(x)) param_error("costs must be strictly positive");
  for (int r = 1; r <= rows; ++r)
    for (int c = 1; c <= cols; ++c)
      if (manhattan_to_destinations(*this, {r, c}) >= static_cast<int>(cost_table.size()))
        param_error("cost table does not cover every distance on the grid");
}

int manhattan_to_destinations(const Case1Params& p, Cell c) {
  int best = std::numeric_limits<int>::max();
  for (const auto& d : p.destinations)
    best = std::min(best, std::abs(c.row - d.cell.row) + std::abs(c.col - d.cell.col));
  return best;
}

double case1_cost(const Case1Params& p, Cell c) {
  return p.cost_table.at(static_cast<std::size_t>(manhattan_to_destinations(p, c)));
}

std::string case1_state_name(Cell c, int carrying) {
  return "r" + std::to_string(c.row) + "c" + std::to_string(c.col) + "_" + std::to_string(carrying);
}

std::optional<Cell> case1_move(const Case1Params& p, Cell c, const std::string& action) {
  Cell next = step(c, action);
  if (!on_grid(p.rows, p.cols, next)) return std::nullopt;
  if (std::find(p.obstacles.begin(), p.obstacles.end(), next) != p.obstacles.end())
    return std::nullopt;
  return next;
}

Case1Model gen_case1(const Case1Params& p) {
  p.validate();
  auto is_obstacle = [&](Cell c) {
    return std::find(p.obstacles.begin(), p.obstacles.end(), c) != p.obstacles.end();
  };
  auto destination = [&](Cell c) -> const Destination* {
    for (const auto& d : p.destinations)
      if (d.cell == c) return &d;
    return nullptr;
  };

  Case1Model out;
  Mdp& m = out.mdp;
  m.action_names = kDirections;
  m.prop_names = {"d", "b", "c"};
  std::vector<Cell> cells;
  for (int r = 1; r <= p.rows; ++r)
    for (int c = 1; c <= p.cols; ++c)
      if (!is_obstacle({r, c})) cells.push_back({r, c});
  auto index = [&](Cell c, int bit) {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    return static_cast<StateId>(2 * (it - cells.begin()) + bit);
  };
  for (Cell c : cells) {
    for (int bit : {0, 1}) {
      m.state_names.push_back(case1_state_name(c, bit));
      LabelSet label = 0;
      if (bit == 1 && destination(c)) label |= 1U << 0;
      if (c == p.charging) label |= 1U << 2;
      m.labels.push_back(label);
    }
  }
  m.initial = index(p.start, 0);
  m.choices.resize(m.state_names.size());
  out.reward = {UtilityKind::Reward, std::vector<std::vector<double>>(m.choices.size())};
  out.cost = {UtilityKind::Cost, std::vector<std::vector<double>>(m.choices.size())};

  for (Cell c : cells) {
    for (int bit : {0, 1}) {
      const StateId s = index(c, bit);
      const bool in_d = bit == 1 && destination(c) != nullptr;
      for (ActionId a = 0; a < kDirections.size(); ++a) {
        auto next = case1_move(p, c, kDirections[a]);
        if (!next) continue;
        const double pf = at(p.item_prob, *next);
        Choice ch{a, {}};
        if (bit == 1 && !in_d) {
          ch.successors.push_back({index(*next, 1), 1.0});
        } else {
          if (1.0 - pf > 0.0) ch.successors.push_back({index(*next, 0), 1.0 - pf});
          if (pf > 0.0) ch.successors.push_back({index(*next, 1), pf});
        }
        m.choices[s].push_back(std::move(ch));
        out.reward.value[s].push_back(in_d ? destination(c)->reward : 0.0);
        out.cost.value[s].push_back(case1_cost(p, c));
      }
    }
  }
  require_valid(m);

  constexpr LabelSet kD = 1U << 0, kB = 1U << 1, kC = 1U << 2;
  out.phi1 = make_dra(
      3, {"d", "b"},
      [](AutStateId q, LabelSet sym) -> AutStateId {
        if (q == 2 || (sym & kB)) return 2;
        return (sym & kD) ? 1 : 0;
      },
      {RabinPair{{2}, {1}}});
  out.phi2 = make_dra(
      5, {"d", "b", "c"},
      [](AutStateId q, LabelSet sym) -> AutStateId {
        const bool d = sym & kD, c = sym & kC;
        if (q == 4 || (sym & kB)) return 4;
        if (q == 1) return c ? 3 : 1;
        if (q == 2) return d ? 3 : 2;
        if (d && c) return 3;
        if (d) return 1;
        if (c) return 2;
        return 0;
      },
      {RabinPair{{4}, {3}}});
  return out;
}

Case2Params Case2Params::defaults() {
  Case2Params p;
  p.reward = filled(p.size, p.size, 0.0);
  p.cost = filled(p.size, p.size, 5.0);
  const double ring_reward[] = {4.6, 5.5, 1.0};
  for (int r = 1; r <= p.size; ++r)
    for (int c = 1; c <= p.size; ++c) {
      int ring = case2_ring(p, {r, c});
      if (ring >= 1 && ring <= 3)
        p.reward[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)] =
            ring_reward[ring - 1];
    }
  return p;
}

int case2_ring(const Case2Params& p, Cell c) {
  return std::min({c.row, c.col, p.size + 1 - c.row, p.size + 1 - c.col});
}

void Case2Params::validate() const {
  if (size < 5 || size % 2 == 0) param_error("grid size must be odd and at least 5");
  const int mid = (size + 1) / 2;
  if (!(blocked == Cell{mid, mid})) param_error("the blocked cell must be the centre");
  for (Cell c : {start, command, material})
    if (!on_grid(size, size, c) || c == blocked) param_error("cells must be free grid cells");
  if (reward.size() != static_cast<std::size_t>(size) || cost.size() != static_cast<std::size_t>(size))
    param_error("reward and cost fields must match the grid");
  for (int r = 0; r < size; ++r) {
    if (reward[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(size) ||
        cost[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(size))
      param_error("reward and cost fields must match the grid");
    for (int c = 0; c < size; ++c) {
      if (!std::isfinite(reward[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]))
        param_error("rewards must be finite");
      if (!(cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] > 0.0))
        param_error("costs must be strictly positive");
    }
  }
  if (!std::isfinite(bonus)) param_error("bonus must be finite");
}

Case2Model gen_case2(const Case2Params& p) {
  p.validate();
  const int mid = (p.size + 1) / 2;
  Case2Model out;
  Mdp& m = out.mdp;
  m.action_names = {"cw", "in", "out"};
  m.prop_names = {"g", "r"};
  std::vector<Cell> cells;
  for (int r = 1; r <= p.size; ++r)
    for (int c = 1; c <= p.size; ++c)
      if (!(Cell{r, c} == p.blocked)) cells.push_back({r, c});
  auto index = [&](Cell c, int perm) {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    return static_cast<StateId>(2 * (it - cells.begin()) + perm);
  };
  for (Cell c : cells)
    for (int perm : {0, 1}) {
      m.state_names.push_back("r" + std::to_string(c.row) + "c" + std::to_string(c.col) + "_" +
                              std::to_string(perm));
      LabelSet label = 0;
      if (c == p.command) label |= 1U;
      if (c == p.material) label |= 2U;
      m.labels.push_back(label);
    }
  m.initial = index(p.start, 0);
  m.choices.resize(m.state_names.size());
  out.reward = {UtilityKind::Reward, std::vector<std::vector<double>>(m.choices.size())};
  out.cost = {UtilityKind::Cost, std::vector<std::vector<double>>(m.choices.size())};

  auto clockwise = [&](Cell c) -> Cell {
    const int lo = case2_ring(p, c), hi = p.size + 1 - lo;
    if (c.col == lo && c.row > lo) return {c.row - 1, c.col};
    if (c.row == lo && c.col < hi) return {c.row, c.col + 1};
    if (c.col == hi && c.row < hi) return {c.row + 1, c.col};
    return {c.row, c.col - 1};
  };
  for (Cell c : cells) {
    std::vector<std::pair<ActionId, Cell>> moves{{0, clockwise(c)}};
    if (c.row == mid && c.col < mid - 1) moves.push_back({1, {c.row, c.col + 1}});
    if (c.row == mid && c.col > 1 && c.col < mid) moves.push_back({2, {c.row, c.col - 1}});
    for (int perm : {0, 1}) {
      const StateId s = index(c, perm);
      for (const auto& [a, next] : moves) {
        int next_perm = perm;
        double reward = at(p.reward, next);
        if (next == p.command) next_perm = 1;
        if (next == p.material && perm == 1) {
          reward += p.bonus;
          next_perm = next == p.command ? 1 : 0;
        }
        m.choices[s].push_back({a, {{index(next, next_perm), 1.0}}});
        out.reward.value[s].push_back(reward);
        out.cost.value[s].push_back(at(p.cost, next));
      }
    }
  }
  require_valid(m);

  out.phi = make_dra(
      3, {"g", "r"},
      [](AutStateId q, LabelSet sym) -> AutStateId {
        const bool g = sym & 1U, r = sym & 2U;
        if (q == 1) return r ? 2 : 1;
        if (g && r) return 2;
        return g ? 1 : 0;
      },
      {RabinPair{{}, {2}}});
  return out;
}

namespace {

struct ParamLine {
  std::string key;
  std::vector<std::string> args;
  std::size_t number;
};

std::vector<ParamLine> param_lines(std::string_view text) {
  std::vector<ParamLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    ParamLine pl{"", {}, number};
    if (!(ls >> pl.key)) continue;
    for (std::string tok; ls >> tok;) pl.args.push_back(tok);
    out.push_back(std::move(pl));
  }
  return out;
}

double num(const ParamLine& l, std::size_t i) {
  if (i >= l.args.size())
    param_error("line " + std::to_string(l.number) + ": too few arguments for '" + l.key + "'");
  double v = 0.0;
  const std::string& s = l.args[i];
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    param_error("line " + std::to_string(l.number) + ": bad number '" + s + "'");
  return v;
}

int integer(const ParamLine& l, std::size_t i) {
  double v = num(l, i);
  if (v != std::floor(v))
    param_error("line " + std::to_string(l.number) + ": expected an integer");
  return static_cast<int>(v);
}

void arity(const ParamLine& l, std::size_t n) {
  if (l.args.size() != n)
    param_error("line " + std::to_string(l.number) + ": '" + l.key + "' takes " +
                std::to_string(n) + " arguments");
}

}  // namespace

Case1Params parse_case1_params(std::string_view text) {
  Case1Params p = Case1Params::defaults();
  bool obstacles_reset = false, destinations_reset = false;
  std::optional<std::array<double, 3>> field;
  std::vector<std::pair<Cell, double>> overrides;
  for (const auto& l : param_lines(text)) {
    if (l.key == "grid") {
      arity(l, 2);
      p.rows = integer(l, 0);
      p.cols = integer(l, 1);
    } else if (l.key == "start") {
      arity(l, 2);
      p.start = {integer(l, 0), integer(l, 1)};
    } else if (l.key == "charging") {
      arity(l, 2);
      p.charging = {integer(l, 0), integer(l, 1)};
    } else if (l.key == "obstacle") {
      arity(l, 2);
      if (!obstacles_reset) p.obstacles.clear();
      obstacles_reset = true;
      p.obstacles.push_back({integer(l, 0), integer(l, 1)});
    } else if (l.key == "no_obstacles") {
      arity(l, 0);
      p.obstacles.clear();
      obstacles_reset = true;
    } else if (l.key == "destination") {
      arity(l, 3);
      if (!destinations_reset) p.destinations.clear();
      destinations_reset = true;
      p.destinations.push_back({{integer(l, 0), integer(l, 1)}, num(l, 2)});
    } else if (l.key == "prob_field") {
      if (l.args.size() != 2 && l.args.size() != 3)
        param_error("line " + std::to_string(l.number) + ": 'prob_field' takes 2 or 3 arguments");
      field = {num(l, 0), num(l, 1), l.args.size() == 3 ? num(l, 2) : 0.0};
    } else if (l.key == "prob") {
      arity(l, 3);
      overrides.push_back({{integer(l, 0), integer(l, 1)}, num(l, 2)});
    } else if (l.key == "cost_table") {
      if (l.args.empty()) param_error("cost_table needs values");
      p.cost_table.clear();
      for (std::size_t i = 0; i < l.args.size(); ++i) p.cost_table.push_back(num(l, i));
    } else {
      param_error("line " + std::to_string(l.number) + ": unknown key '" + l.key + "'");
    }
  }
  if (p.rows < 1 || p.cols < 1) param_error("grid must be nonempty");
  if (field || destinations_reset || p.item_prob.size() != static_cast<std::size_t>(p.rows) ||
      p.item_prob.front().size() != static_cast<std::size_t>(p.cols)) {
    auto [pmax, expo, tilt] = field.value_or(std::array{0.9, 1.0, 0.3});
    std::vector<Cell> origins;
    for (const auto& d : p.destinations) origins.push_back(d.cell);
    p.item_prob = distance_field(p.rows, p.cols, origins, pmax, expo, tilt);
  }
  for (const auto& [c, v] : overrides) {
    if (!on_grid(p.rows, p.cols, c)) param_error("prob cell lies outside the grid");
    p.item_prob[static_cast<std::size_t>(c.row - 1)][static_cast<std::size_t>(c.col - 1)] = v;
  }
  p.validate();
  return p;
}

Case2Params parse_case2_params(std::string_view text) {
  Case2Params p = Case2Params::defaults();
  std::vector<ParamLine> field_lines;
  for (const auto& l : param_lines(text)) {
    if (l.key == "size") {
      arity(l, 1);
      p.size = integer(l, 0);
      const int mid = (p.size + 1) / 2;
      p.blocked = {mid, mid};
    } else if (l.key == "start" || l.key == "command" || l.key == "material") {
      arity(l, 2);
      Cell c{integer(l, 0), integer(l, 1)};
      (l.key == "start" ? p.start : l.key == "command" ? p.command : p.material) = c;
    } else if (l.key == "bonus") {
      arity(l, 1);
      p.bonus = num(l, 0);
    } else if (l.key == "reward" || l.key == "cost" || l.key == "ring_reward" ||
               l.key == "ring_cost") {
      field_lines.push_back(l);
    } else {
      param_error("line " + std::to_string(l.number) + ": unknown key '" + l.key + "'");
    }
  }
  if (p.size < 5 || p.size % 2 == 0) param_error("grid size must be odd and at least 5");
  if (p.reward.size() != static_cast<std::size_t>(p.size)) {
    p.reward = filled(p.size, p.size, 0.0);
    p.cost = filled(p.size, p.size, 5.0);
  }
  for (const auto& l : field_lines) {
    const bool is_reward = l.key == "reward" || l.key == "ring_reward";
    auto& f = is_reward ? p.reward : p.cost;
    if (l.key == "reward" || l.key == "cost") {
      arity(l, 3);
      Cell c{integer(l, 0), integer(l, 1)};
      if (!on_grid(p.size, p.size, c)) param_error("field cell lies outside the grid");
      f[static_cast<std::size_t>(c.row - 1)][static_cast<std::size_t>(c.col - 1)] = num(l, 2);
    } else {
      arity(l, 2);
      const int ring = integer(l, 0);
      for (int r = 1; r <= p.size; ++r)
        for (int c = 1; c <= p.size; ++c)
          if (case2_ring(p, {r, c}) == ring)
            f[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)] = num(l, 1);
    }
  }
  p.validate();
  return p;
}

double label_limit_probability(const Mdp& m, const StationaryPolicy& p, const std::string& prop) {
  auto it = std::find(m.prop_names.begin(), m.prop_names.end(), prop);
  if (it == m.prop_names.end()) throw Error(ErrorKind::Param, "unknown proposition '" + prop + "'");
  const auto bit = static_cast<PropId>(it - m.prop_names.begin());
  auto ca = analyze(induce_chain(m, p));
  double total = 0.0;
  for (StateId s = 0; s < m.num_states(); ++s)
    if ((m.labels[s] >> bit) & 1U)
      total += ca.limit(static_cast<Eigen::Index>(m.initial), static_cast<Eigen::Index>(s));
  return total;
}

std::vector<DeltaRow> delta_table(const ProductMdp& pm, const UtilityFn& r, const UtilityFn& c,
                                  const std::vector<double>& epsilons, const std::string& prop,
                                  const SynthesisOptions& base) {
  std::vector<DeltaRow> rows;
  for (double eps : epsilons) {
    DeltaRow row;
    row.epsilon = eps;
    SynthesisOptions opt = base;
    opt.method = DeltaMethod::Estimated;
    auto es = synth_general(pm, r, c, eps, opt);
    opt.method = DeltaMethod::Exact;
    auto ex = synth_general(pm, r, c, eps, opt);
    row.value = es.value;
    row.delta_es = es.delta;
    row.delta_ex = ex.delta;
    row.achieved_es = es.achieved;
    row.achieved_ex = ex.achieved;
    row.limit_es = label_limit_probability(pm.mdp, es.policy, prop);
    row.limit_ex = label_limit_probability(pm.mdp, ex.policy, prop);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> case2_sweep(const Case2Params& base, const std::vector<double>& bonuses,
                                  double epsilon) {
  std::vector<SweepRow> out;
  for (double bonus : bonuses) {
    Case2Params p = base;
    p.bonus = bonus;
    auto model = gen_case2(p);
    SweepRow row;
    row.bonus = bonus;
    // Unconstrained optimum: the same synthesis against a task every run meets.
    Dra any = make_dra(1, {}, [](AutStateId, LabelSet) -> AutStateId { return 0; },
                       {RabinPair{{}, {0}}});
    auto free_pm = build_product(model.mdp, any);
    auto free = synth_general(free_pm, lift_utility(free_pm, model.mdp, model.reward),
                              lift_utility(free_pm, model.mdp, model.cost), epsilon);
    row.optimum = free.value;
    auto ca = analyze(induce_chain(free_pm.mdp, free.policy));
    const auto reach = ca.reachable_classes(free_pm.mdp.initial);
    row.accepting_cycle = !reach.empty();
    for (std::size_t k : reach) {
      bool g = false, r = false;
      for (StateId s : ca.recurrent_classes[k]) {
        g = g || (free_pm.mdp.labels[s] & 1U);
        r = r || (free_pm.mdp.labels[s] & 2U);
      }
      row.accepting_cycle = row.accepting_cycle && g && r;
    }
    auto pm = build_product(model.mdp, model.phi);
    row.constrained = synth_general(pm, lift_utility(pm, model.mdp, model.reward),
                                    lift_utility(pm, model.mdp, model.cost), epsilon)
                          .value;
    out.push_back(row);
  }
  return out;
}

}  // namespace ratiosynth
