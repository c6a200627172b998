#include "ratiosynth/sim.hpp"

#include <cmath>
#include <random>

namespace ratiosynth {

namespace {

// Cumulative tables so each step costs two short linear scans.
struct Sampler {
  std::vector<std::vector<double>> action_cdf;
  std::vector<std::vector<std::vector<double>>> succ_cdf;

  Sampler(const Mdp& m, const StationaryPolicy& p) {
    validate_policy(m, p);
    const std::size_t n = m.num_states();
    action_cdf.resize(n);
    succ_cdf.resize(n);
    for (StateId s = 0; s < n; ++s) {
      double acc = 0.0;
      for (double w : p.rule[s]) action_cdf[s].push_back(acc += w);
      for (const auto& c : m.choices[s]) {
        std::vector<double> cdf;
        double tot = 0.0;
        for (const auto& succ : c.successors) cdf.push_back(tot += succ.prob);
        succ_cdf[s].push_back(std::move(cdf));
      }
    }
  }

  static std::size_t pick(const std::vector<double>& cdf, double u) {
    u *= cdf.back();
    for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
      if (u < cdf[i]) return i;
    return cdf.size() - 1;
  }
};

// One independent stream per (seed, rollout).
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t rollout) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rollout),
                    static_cast<std::uint32_t>(rollout >> 32)};
  return std::mt19937_64(seq);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_config(const RolloutConfig& cfg) {
  if (cfg.steps == 0 || cfg.rollouts == 0)
    throw Error(ErrorKind::Param, "steps and rollouts must be positive");
}

template <typename Visit>
void run(const Mdp& m, const Sampler& sm, std::mt19937_64& rng, std::uint64_t steps,
         Visit&& visit) {
  StateId s = m.initial;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const std::size_t k = Sampler::pick(sm.action_cdf[s], unit(rng));
    const std::size_t j = Sampler::pick(sm.succ_cdf[s][k], unit(rng));
    visit(t, s, k);
    s = m.choices[s][k].successors[j].target;
  }
}

}  // namespace

RolloutStats simulate(const Mdp& m, const StationaryPolicy& p, const UtilityFn& r,
                      const UtilityFn& c, const RolloutConfig& cfg) {
  check_config(cfg);
  Sampler sm(m, p);
  const std::size_t n = m.num_states();
  RolloutStats st;
  st.visit_freq.assign(n, 0.0);
  st.label_freq.assign(m.prop_names.size(), 0.0);
  std::vector<std::uint64_t> visits(n);
  for (std::uint64_t roll = 0; roll < cfg.rollouts; ++roll) {
    auto rng = stream(cfg.seed, roll);
    std::fill(visits.begin(), visits.end(), 0);
    double reward = 0.0, cost = 0.0;
    run(m, sm, rng, cfg.steps, [&](std::uint64_t, StateId s, std::size_t k) {
      reward += r.value[s][k];
      cost += c.value[s][k];
      ++visits[s];
    });
    st.ratios.push_back(reward / cost);
    const double horizon = static_cast<double>(cfg.steps);
    for (StateId s = 0; s < n; ++s) {
      const double f = static_cast<double>(visits[s]) / horizon;
      st.visit_freq[s] += f;
      for (std::size_t q = 0; q < m.prop_names.size(); ++q)
        if ((m.labels[s] >> q) & 1U) st.label_freq[q] += f;
    }
  }
  const double nr = static_cast<double>(cfg.rollouts);
  for (double& f : st.visit_freq) f /= nr;
  for (double& f : st.label_freq) f /= nr;
  double sum = 0.0;
  for (double x : st.ratios) sum += x;
  st.mean_ratio = sum / nr;
  if (cfg.rollouts > 1) {
    double ss = 0.0;
    for (double x : st.ratios) ss += (x - st.mean_ratio) * (x - st.mean_ratio);
    st.stderr_ratio = std::sqrt(ss / (nr - 1.0) / nr);
  }
  return st;
}

std::vector<PairVisits> acceptance_visits(const ProductMdp& pm, const StationaryPolicy& p,
                                          const RolloutConfig& cfg) {
  check_config(cfg);
  Sampler sm(pm.mdp, p);
  std::vector<PairVisits> out(pm.pairs.size());
  const std::uint64_t half = cfg.steps / 2;
  for (std::uint64_t roll = 0; roll < cfg.rollouts; ++roll) {
    auto rng = stream(cfg.seed, roll);
    run(pm.mdp, sm, rng, cfg.steps, [&](std::uint64_t t, StateId s, std::size_t) {
      for (std::size_t i = 0; i < pm.pairs.size(); ++i) {
        if (pm.pairs[i].good[s]) {
          ++out[i].good;
          if (t >= half) ++out[i].good_late;
        }
        if (pm.pairs[i].bad[s]) {
          ++out[i].bad;
          if (t >= half) ++out[i].bad_late;
        }
      }
    });
  }
  return out;
}

}  // namespace ratiosynth
