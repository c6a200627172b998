#include "ratiosynth/chain.hpp"

#include <algorithm>
#include <cmath>

#include "ratiosynth/graph.hpp"

namespace ratiosynth {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void check_residual(double residual, double scale, const char* what) {
  if (!(residual <= 1e-9 * std::max(1.0, scale)))
    throw Error(ErrorKind::SingularSystem,
                std::string(what) + " solve failed, residual " + std::to_string(residual));
}

}  // namespace

std::vector<std::size_t> ChainAnalysis::reachable_classes(StateId from) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < recurrent_classes.size(); ++k)
    if (absorb(idx(from), idx(k)) > kSupportTol) out.push_back(k);
  return out;
}

ChainAnalysis analyze(const Mc& chain) {
  const std::size_t n = chain.num_states();
  const Eigen::MatrixXd& P = chain.transition;
  ChainAnalysis ca;
  ca.chain = chain;

  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (P(idx(i), idx(j)) > kSupportTol) adj[i].push_back(j);
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(adj, &ncomp);
  std::vector<char> bottom(ncomp, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : adj[i])
      if (comp[j] != comp[i]) bottom[comp[i]] = 0;

  std::vector<std::size_t> class_slot(ncomp, SubMdp::npos);
  ca.class_of.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!bottom[comp[i]]) {
      ca.transient.push_back(i);
      continue;
    }
    auto& slot = class_slot[comp[i]];
    if (slot == SubMdp::npos) {
      slot = ca.recurrent_classes.size();
      ca.recurrent_classes.emplace_back();
    }
    ca.recurrent_classes[slot].push_back(i);
    ca.class_of[i] = static_cast<int>(slot);
  }
  const std::size_t k = ca.recurrent_classes.size();

  for (const auto& cls : ca.recurrent_classes) {
    const std::size_t m = cls.size();
    Eigen::MatrixXd A(idx(m), idx(m));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        A(idx(b), idx(a)) = P(idx(cls[a]), idx(cls[b])) - (a == b ? 1.0 : 0.0);
    A.row(idx(m - 1)).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(idx(m));
    rhs(idx(m - 1)) = 1.0;
    Eigen::VectorXd pi = A.partialPivLu().solve(rhs);
    check_residual((A * pi - rhs).lpNorm<Eigen::Infinity>(), 1.0, "stationary distribution");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(idx(n));
    for (std::size_t a = 0; a < m; ++a) full(idx(cls[a])) = pi(idx(a));
    ca.stationary.push_back(std::move(full));
  }

  ca.absorb = Eigen::MatrixXd::Zero(idx(n), idx(k));
  for (std::size_t i = 0; i < n; ++i)
    if (ca.class_of[i] >= 0) ca.absorb(idx(i), ca.class_of[i]) = 1.0;
  const std::size_t t = ca.transient.size();
  if (t > 0 && k > 0) {
    Eigen::MatrixXd M(idx(t), idx(t));
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(idx(t), idx(k));
    for (std::size_t a = 0; a < t; ++a) {
      const std::size_t s = ca.transient[a];
      for (std::size_t b = 0; b < t; ++b)
        M(idx(a), idx(b)) = (a == b ? 1.0 : 0.0) - P(idx(s), idx(ca.transient[b]));
      for (std::size_t j = 0; j < n; ++j)
        if (ca.class_of[j] >= 0) B(idx(a), ca.class_of[j]) += P(idx(s), idx(j));
    }
    Eigen::MatrixXd X = M.partialPivLu().solve(B);
    check_residual((M * X - B).lpNorm<Eigen::Infinity>(), 1.0, "absorption probability");
    for (std::size_t a = 0; a < t; ++a) ca.absorb.row(idx(ca.transient[a])) = X.row(idx(a));
  }

  ca.limit = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (std::size_t c = 0; c < k; ++c)
    ca.limit.noalias() += ca.absorb.col(idx(c)) * ca.stationary[c].transpose();
  return ca;
}

double average_utility(const ChainAnalysis& ca, const Eigen::VectorXd& v, StateId from) {
  return ca.limit.row(idx(from)).dot(v);
}

double average_utility(const ChainAnalysis& ca, const UtilityFn& u, const StationaryPolicy& p,
                       StateId from) {
  return average_utility(ca, utility_vector(p, u), from);
}

std::vector<double> class_ratios(const ChainAnalysis& ca, const Eigen::VectorXd& reward,
                                 const Eigen::VectorXd& cost) {
  std::vector<double> out;
  for (const auto& pi : ca.stationary) out.push_back(pi.dot(reward) / pi.dot(cost));
  return out;
}

double efficiency(const ChainAnalysis& ca, const Eigen::VectorXd& reward,
                  const Eigen::VectorXd& cost, StateId from) {
  auto ratios = class_ratios(ca, reward, cost);
  double total = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) total += ca.absorb(idx(from), idx(k)) * ratios[k];
  return total;
}

double efficiency(const ChainAnalysis& ca, const UtilityFn& r, const UtilityFn& c,
                  const StationaryPolicy& p, StateId from) {
  return efficiency(ca, utility_vector(p, r), utility_vector(p, c), from);
}

double policy_efficiency(const Mdp& m, const StationaryPolicy& p, const UtilityFn& r,
                         const UtilityFn& c) {
  return efficiency(analyze(induce_chain(m, p)), r, c, p, m.initial);
}

PotentialVector potential_vector(const ChainAnalysis& ca, const Eigen::VectorXd& v) {
  const Index n = ca.chain.transition.rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - ca.chain.transition + ca.limit;
  PotentialVector out;
  out.g = M.partialPivLu().solve(v);
  out.residual = (M * out.g - v).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0);
  if (!(out.residual <= 1e-8 * scale))
    throw Error(ErrorKind::SingularSystem,
                "potential vector residual " + std::to_string(out.residual));
  return out;
}

PotentialVector potential_vector(const ChainAnalysis& ca, const UtilityFn& u,
                                 const StationaryPolicy& p) {
  return potential_vector(ca, utility_vector(p, u));
}

Eigen::VectorXd deviation_vector(const Mdp& m, const StationaryPolicy& mu,
                                 const StationaryPolicy& mu_prime, const UtilityFn& u) {
  Mc base = induce_chain(m, mu);
  Mc other = induce_chain(m, mu_prime);
  auto g = potential_vector(analyze(base), u, mu).g;
  return (utility_vector(mu_prime, u) - utility_vector(mu, u)) +
         (other.transition - base.transition) * g;
}

IdentityCheck ratio_perturbation_identity_check(const Mdp& m, const StationaryPolicy& mu,
                                                const StationaryPolicy& mu_prime,
                                                const UtilityFn& r, const UtilityFn& c,
                                                double delta) {
  auto ca = analyze(induce_chain(m, mu));
  if (!ca.unichain())
    throw Error(ErrorKind::NotUnichain, "the unperturbed policy has " +
                                            std::to_string(ca.recurrent_classes.size()) +
                                            " recurrent classes");
  StationaryPolicy mixed = mix(mu, mu_prime, delta);
  auto cd = analyze(induce_chain(m, mixed));
  const double j = efficiency(ca, r, c, mu, m.initial);
  const double jd = efficiency(cd, r, c, mixed, m.initial);
  Eigen::VectorXd pi = cd.limit.row(idx(m.initial)).transpose();
  Eigen::VectorXd dr = deviation_vector(m, mu, mu_prime, r);
  Eigen::VectorXd dc = deviation_vector(m, mu, mu_prime, c);
  IdentityCheck out;
  out.lhs = jd - j;
  out.rhs = delta / pi.dot(utility_vector(mixed, c)) * pi.dot(dr - j * dc);
  return out;
}

IdentityCheck average_perturbation_identity_check(const Mdp& m, const StationaryPolicy& mu,
                                                  const StationaryPolicy& mu_prime,
                                                  const UtilityFn& u, double delta) {
  auto ca = analyze(induce_chain(m, mu));
  if (!ca.unichain())
    throw Error(ErrorKind::NotUnichain, "the unperturbed policy is not unichain");
  StationaryPolicy mixed = mix(mu, mu_prime, delta);
  auto cd = analyze(induce_chain(m, mixed));
  Eigen::VectorXd pi = cd.limit.row(idx(m.initial)).transpose();
  IdentityCheck out;
  out.lhs = average_utility(cd, u, mixed, m.initial) - average_utility(ca, u, mu, m.initial);
  out.rhs = delta * pi.dot(deviation_vector(m, mu, mu_prime, u));
  return out;
}

}  // namespace ratiosynth
