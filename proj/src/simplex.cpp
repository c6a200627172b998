#include <algorithm>
#include <cmath>
#include <limits>

#include "ratiosynth/lp.hpp"

namespace ratiosynth {

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::Index;

// Columns: n structural, m artificial, then the right-hand side. Rows 0..m-1 are
// constraints; row m holds reduced costs (negative means improving for
// maximization). Artificials are never priced in phase 2; in redundant rows
// they stay basic at zero.
class Simplex {
 public:
  Simplex(Tableau orig, std::size_t structural, const SimplexOptions& opt,
          std::size_t* iterations)
      : orig_(std::move(orig)),
        n_(static_cast<Index>(structural)),
        m_(orig_.rows()),
        opt_(opt),
        iterations_(iterations) {
    t_ = Tableau::Zero(m_ + 1, orig_.cols());
    t_.topRows(m_) = orig_;
    for (Index i = 0; i < m_; ++i) basis_.push_back(n_ + i);
    interval_ = opt_.refactor_interval ? static_cast<Index>(opt_.refactor_interval)
                                       : std::max<Index>(100, m_);
  }

  void set_cost(Eigen::VectorXd cost, Index priced) {
    cost_ = std::move(cost);
    priced_ = priced;
    set_objective();
  }

  // Returns false if unbounded.
  bool run() {
    lex_ = basis_;
    std::size_t degenerate = 0;
    Index since_refactor = 0;
    std::vector<Index> nz;
    while (true) {
      if (++*iterations_ > opt_.max_iterations)
        throw Error(ErrorKind::NumericalFailure, "simplex iteration limit reached");
      if (since_refactor >= interval_) {
        reinvert();
        since_refactor = 0;
      }
      const bool bland = opt_.pricing == Pricing::Bland || degenerate >= opt_.degenerate_run;
      const Index q = entering(bland);
      if (q < 0) {
        if (since_refactor == 0) return true;
        // Confirm optimality on a fresh tableau.
        reinvert();
        since_refactor = 0;
        continue;
      }
      const Index r = leaving(q);
      if (r < 0) return false;
      const double step = t_(r, rhs()) / t_(r, q);
      degenerate = step * std::abs(t_(obj(), q)) <= opt_.feasibility_tol ? degenerate + 1 : 0;
      pivot(r, q, nz);
      ++since_refactor;
    }
  }

  void pivot(Index r, Index q, std::vector<Index>& nz) {
    const double piv = t_(r, q);
    if (std::abs(piv) < 1e-14) throw Error(ErrorKind::NumericalFailure, "pivot breakdown");
    t_.row(r) /= piv;
    t_(r, q) = 1.0;
    nz.clear();
    const Index cols = t_.cols();
    for (Index j = 0; j < cols; ++j)
      if (t_(r, j) != 0.0) nz.push_back(j);
    const bool sparse = static_cast<double>(nz.size()) < 0.3 * static_cast<double>(cols);
    const double* pr = t_.row(r).data();
    for (Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, q);
      if (f == 0.0) continue;
      double* row = t_.row(i).data();
      if (sparse) {
        for (Index j : nz) row[j] -= f * pr[j];
      } else {
        for (Index j = 0; j < cols; ++j) row[j] -= f * pr[j];
      }
      row[q] = 0.0;
      if (i != m_ && row[rhs()] < 0.0 && row[rhs()] > -opt_.feasibility_tol) row[rhs()] = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = q;
  }

  // Rebuilds the tableau as B^-1 times the original rows.
  void reinvert() {
    Eigen::MatrixXd B(m_, m_);
    for (Index b = 0; b < m_; ++b) B.col(b) = orig_.col(basis_[static_cast<std::size_t>(b)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Eigen::MatrixXd T = lu.solve(Eigen::MatrixXd(orig_));
    if (!T.allFinite()) throw Error(ErrorKind::NumericalFailure, "singular basis");
    t_.topRows(m_) = T;
    for (Index i = 0; i < m_; ++i) {
      for (Index j = 0; j < t_.cols(); ++j)
        if (std::abs(t_(i, j)) < 1e-13) t_(i, j) = 0.0;
      t_(i, basis_[static_cast<std::size_t>(i)]) = 1.0;
      if (t_(i, rhs()) < 0.0 && t_(i, rhs()) > -opt_.feasibility_tol) t_(i, rhs()) = 0.0;
    }
    set_objective();
  }

  Tableau& tableau() { return t_; }
  std::vector<Index>& basis() { return basis_; }
  Index rhs() const { return t_.cols() - 1; }
  Index obj() const { return m_; }

 private:
  void set_objective() {
    t_.row(m_).setZero();
    for (Index j = 0; j < cost_.size(); ++j) t_(m_, j) = -cost_(j);
    for (Index i = 0; i < m_; ++i) {
      const Index b = basis_[static_cast<std::size_t>(i)];
      const double cb = b < cost_.size() ? cost_(b) : 0.0;
      if (cb != 0.0) t_.row(m_) += cb * t_.row(i);
    }
    for (Index b : basis_) t_(m_, b) = 0.0;
  }

  Index entering(bool bland) const {
    Index best = -1;
    double best_val = -opt_.optimality_tol;
    const double* d = t_.row(obj()).data();
    for (Index j = 0; j < priced_; ++j) {
      if (d[j] < best_val) {
        best = j;
        if (bland) return j;
        best_val = d[j];
      }
    }
    return best;
  }

  // Minimum ratio; ties are broken lexicographically on the columns of the
  // basis the run started from (B^-1 B0, the identity at the start), which
  // rules out cycling whatever the entering rule.
  Index leaving(Index q) const {
    double col_max = 0.0;
    for (Index i = 0; i < m_; ++i) col_max = std::max(col_max, t_(i, q));
    // Entries this far below the column's largest are treated as round-off.
    const double tol = std::max(opt_.pivot_tol, 1e-7 * col_max);
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m_; ++i) {
      const double a = t_(i, q);
      if (a > tol) best_ratio = std::min(best_ratio, std::max(0.0, t_(i, rhs())) / a);
    }
    if (!std::isfinite(best_ratio)) return -1;
    const double tie = 1e-11 * std::max(1.0, best_ratio);
    std::vector<Index> cand;
    for (Index i = 0; i < m_; ++i) {
      const double a = t_(i, q);
      if (a > tol && std::max(0.0, t_(i, rhs())) / a <= best_ratio + tie) cand.push_back(i);
    }
    for (std::size_t c = 0; c < lex_.size() && cand.size() > 1; ++c) {
      const Index k = lex_[c];
      double lo = std::numeric_limits<double>::infinity();
      for (Index i : cand) lo = std::min(lo, t_(i, k) / t_(i, q));
      std::vector<Index> keep;
      for (Index i : cand)
        if (t_(i, k) / t_(i, q) <= lo + 1e-11 * std::max(1.0, std::abs(lo))) keep.push_back(i);
      cand.swap(keep);
    }
    // Any survivors are numerically indistinguishable; prefer the largest pivot.
    Index best = cand.front();
    for (Index i : cand)
      if (t_(i, q) > t_(best, q)) best = i;
    return best;
  }

  Tableau orig_;
  Index n_;
  Index m_;
  Eigen::VectorXd cost_;
  Index priced_ = 0;
  Tableau t_;
  std::vector<Index> basis_;
  std::vector<Index> lex_;
  const SimplexOptions& opt_;
  std::size_t* iterations_;
  Index interval_ = 100;
};

}  // namespace

LpResult solve_lp(const LpProblem& p, const SimplexOptions& opt) {
  const Index m = p.eq_matrix.rows();
  const Index n = p.eq_matrix.cols();
  if (p.objective.size() != n || p.eq_rhs.size() != m)
    throw Error(ErrorKind::Param, "inconsistent LP dimensions");
  if (!p.eq_rhs.allFinite() || !p.eq_matrix.allFinite() || !p.objective.allFinite())
    throw Error(ErrorKind::Param, "non-finite LP data");

  LpResult result;
  const double scale = std::max(1.0, m ? p.eq_rhs.lpNorm<Eigen::Infinity>() : 0.0);

  Tableau orig = Tableau::Zero(m, n + m + 1);
  for (Index i = 0; i < m; ++i) {
    const double sign = p.eq_rhs(i) < 0.0 ? -1.0 : 1.0;
    orig.row(i).head(n) = sign * p.eq_matrix.row(i);
    orig(i, n + i) = 1.0;
    orig(i, n + m) = sign * p.eq_rhs(i);
  }
  Simplex sx(std::move(orig), static_cast<std::size_t>(n), opt, &result.iterations);

  // Phase 1: maximize minus the sum of artificials.
  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setConstant(-1.0);
  sx.set_cost(phase1_cost, n);
  sx.run();
  Tableau& t = sx.tableau();
  if (t(m, n + m) < -opt.feasibility_tol * scale * std::max<Index>(1, m)) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Pivot zero-level artificials out where a usable structural entry exists.
  std::vector<Index> nz;
  for (Index i = 0; i < m; ++i) {
    if (sx.basis()[static_cast<std::size_t>(i)] < n) continue;
    Index best = -1;
    double best_abs = 1e-7;
    for (Index j = 0; j < n; ++j) {
      const double a = std::abs(t(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best >= 0) sx.pivot(i, best, nz);
  }
  sx.reinvert();

  // Phase 2.
  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
  phase2_cost.head(n) = p.objective;
  sx.set_cost(phase2_cost, n);
  if (!sx.run()) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  result.x = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < m; ++i) {
    const Index b = sx.basis()[static_cast<std::size_t>(i)];
    if (b >= n) continue;
    result.x(b) = std::max(0.0, t(i, n + m));
    result.basis.push_back(static_cast<std::size_t>(b));
  }
  const double residual = m ? (p.eq_matrix * result.x - p.eq_rhs).lpNorm<Eigen::Infinity>() : 0.0;
  if (residual > opt.feasibility_tol * scale)
    throw Error(ErrorKind::NumericalFailure,
                "simplex solution violates constraints by " + std::to_string(residual));
  result.value = p.objective.dot(result.x);
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace ratiosynth
