// Copyright 2026 The Fairer NMF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairnmf/fairer_am.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "fairnmf/metrics.hpp"
#include "fairnmf/nnls.hpp"

namespace fairnmf {

void FairerOptions::validate() const {
  if (rank < 1) throw std::invalid_argument("FairerOptions: rank must be >= 1");
  if (max_outer_iters < 1) {
    throw std::invalid_argument("FairerOptions: max_outer_iters must be >= 1");
  }
  if (!(rel_tol > 0.0)) throw std::invalid_argument("FairerOptions: rel_tol must be > 0");
  if (!(solver_tol > 0.0)) {
    throw std::invalid_argument("FairerOptions: solver_tol must be > 0");
  }
  if (max_inner_iters < 1) {
    throw std::invalid_argument("FairerOptions: max_inner_iters must be >= 1");
  }
  if (!(epsilon_guard > 0.0)) {
    throw std::invalid_argument("FairerOptions: epsilon_guard must be > 0");
  }
}

double objective_f(const GroupedMatrix& x, const FactorPair& f,
                   const GroupBaselines& baselines) {
  const std::vector<double> errors = group_errors(x, f.W, f.H);
  return max_loss(group_losses(x, errors, baselines.values));
}

MinMaxSubproblem MinMaxSubproblem::from(const GroupedMatrix& x, const Matrix& w,
                                        const GroupBaselines& baselines,
                                        const FairerOptions& opts) {
  MinMaxSubproblem sub;
  for (std::size_t l = 0; l < x.num_groups(); ++l) {
    sub.x_blocks.push_back(x.block(l));
    sub.w_blocks.push_back(x.gather(w, l));
    sub.norms.push_back(x.norm(l));
  }
  sub.baselines = baselines.values;
  sub.solver_tol = opts.solver_tol;
  sub.max_inner_iters = opts.max_inner_iters;
  return sub;
}

void MinMaxSubproblem::validate() const {
  const std::size_t groups = x_blocks.size();
  if (groups == 0) throw DimensionError("MinMaxSubproblem: no groups");
  if (w_blocks.size() != groups || baselines.size() != groups ||
      norms.size() != groups) {
    throw DimensionError("MinMaxSubproblem: per-group inputs differ in length");
  }
  const Index n = x_blocks[0].cols();
  const Index r = w_blocks[0].cols();
  for (std::size_t l = 0; l < groups; ++l) {
    if (x_blocks[l].cols() != n || w_blocks[l].cols() != r ||
        w_blocks[l].rows() != x_blocks[l].rows() || x_blocks[l].rows() == 0) {
      throw DimensionError("MinMaxSubproblem: group " + std::to_string(l) +
                           " has X " + shape_string(x_blocks[l]) + " and W " +
                           shape_string(w_blocks[l]));
    }
    if (!(norms[l] > 0.0)) {
      throw DegenerateGroupError("MinMaxSubproblem: group " + std::to_string(l) +
                                 " has zero norm");
    }
    if (!std::isfinite(baselines[l])) {
      throw std::invalid_argument("MinMaxSubproblem: non-finite baseline");
    }
  }
  if (!(solver_tol > 0.0) || max_inner_iters < 1 || !(barrier_growth > 1.0)) {
    throw std::invalid_argument("MinMaxSubproblem: invalid solver settings");
  }
}

namespace {

double block_objective(const MinMaxSubproblem& sub, const Matrix& h) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < sub.x_blocks.size(); ++l) {
    const double err = (sub.x_blocks[l] - sub.w_blocks[l] * h).norm();
    best = std::max(best, loss_from_error(err, sub.baselines[l], sub.norms[l]));
  }
  return best;
}

double dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

// Group l scaled by 1/||X_l||, with W_l = Q R. Only the columns of R that
// belong to constrained rows of H are kept.
struct CompressedGroup {
  Matrix r;          // k x p
  Matrix y;          // k x n, leading rows of Q^T X_l
  Matrix gram;       // p x p, R^T R
  double outside_sq; // squared norm of X_l outside range(Q)
  double baseline;   // E_l / ||X_l||
};

// Barrier objective
//   tau t - sum_l log((t + e_l)^2 - q_l(H)) - sum_ij log H_ij
// with q_l(H) = ||Y_l - R_l H||^2 + outside_sq_l, the squared normalized
// residual of group l.
class Barrier {
 public:
  Barrier(std::vector<CompressedGroup> groups, Index p, Index n)
      : groups_(std::move(groups)), p_(p), n_(n) {}

  double nu() const {
    return 2.0 * static_cast<double>(groups_.size()) + static_cast<double>(p_ * n_);
  }

  struct State {
    double t = 0.0;
    Matrix h;
    std::vector<double> u, q, s;
    std::vector<Matrix> grad_q_half;  // G_l H - R_l^T Y_l
    bool feasible = false;
  };

  State evaluate(double t, Matrix h) const {
    State st;
    st.t = t;
    st.h = std::move(h);
    st.feasible = (st.h.array() > 0.0).all();
    if (!st.feasible) return st;
    for (const CompressedGroup& g : groups_) {
      const Matrix res = g.y - g.r * st.h;
      const double q = res.squaredNorm() + g.outside_sq;
      const double u = t + g.baseline;
      const double s = (u - std::sqrt(q)) * (u + std::sqrt(q));
      if (!(u > 0.0) || !(s > 0.0)) {
        st.feasible = false;
        return st;
      }
      st.u.push_back(u);
      st.q.push_back(q);
      st.s.push_back(s);
      st.grad_q_half.push_back(-(g.r.transpose() * res));
    }
    return st;
  }

  // Change in the barrier objective between two feasible states, computed
  // from log ratios so that large tau t terms do not swamp the difference.
  double delta(const State& from, const State& to, double tau) const {
    double d = tau * (to.t - from.t);
    for (std::size_t l = 0; l < groups_.size(); ++l) d -= std::log(to.s[l] / from.s[l]);
    d -= (to.h.array() / from.h.array()).log().sum();
    return d;
  }

  struct Step {
    double dt = 0.0;
    Matrix dh;
    double decrement_sq = 0.0;
    bool ok = false;
  };

  Step newton_step(const State& st, double tau) const {
    const std::size_t groups = groups_.size();
    Step step;

    double grad_t = tau;
    Matrix grad_h = -st.h.cwiseInverse();
    for (std::size_t l = 0; l < groups; ++l) {
      grad_t -= 2.0 * st.u[l] / st.s[l];
      grad_h += (2.0 / st.s[l]) * st.grad_q_half[l];
    }

    // Hessian = [a  b^T; b  K],  K = M + sum_l z_l z_l^T / s_l^2 where M is
    // block diagonal over the columns of H and z_l = -2 (G_l H - R_l^T Y_l).
    double a = 0.0;
    Matrix b = Matrix::Zero(p_, n_);
    std::vector<Matrix> z(groups);
    Matrix m_shared = Matrix::Zero(p_, p_);
    for (std::size_t l = 0; l < groups; ++l) {
      const double s2 = st.s[l] * st.s[l];
      a += 2.0 * (st.u[l] * st.u[l] + st.q[l]) / s2;
      z[l] = -2.0 * st.grad_q_half[l];
      b += (2.0 * st.u[l] / s2) * z[l];
      m_shared += (2.0 / st.s[l]) * groups_[l].gram;
    }
    const Matrix inv_h2 = st.h.cwiseProduct(st.h).cwiseInverse();
    std::vector<Eigen::LLT<Eigen::MatrixXd>> blocks;
    blocks.reserve(static_cast<std::size_t>(n_));
    for (Index j = 0; j < n_; ++j) {
      Eigen::MatrixXd mj = m_shared;
      mj.diagonal() += inv_h2.col(j);
      blocks.emplace_back(mj);
      if (blocks.back().info() != Eigen::Success) return step;
    }
    auto m_solve = [&](Matrix v) {
      for (Index j = 0; j < n_; ++j) v.col(j) = blocks[j].solve(Vector(v.col(j)));
      return v;
    };

    // Woodbury for K^{-1}.
    std::vector<Matrix> mz(groups);
    for (std::size_t l = 0; l < groups; ++l) mz[l] = m_solve(z[l]);
    Eigen::MatrixXd cap(groups, groups);
    for (std::size_t i = 0; i < groups; ++i) {
      for (std::size_t j = 0; j < groups; ++j) cap(i, j) = dot(z[i], mz[j]);
      cap(i, i) += st.s[i] * st.s[i];
    }
    const Eigen::LDLT<Eigen::MatrixXd> cap_ldlt(cap);
    auto k_solve = [&](const Matrix& v) {
      Matrix mv = m_solve(v);
      Vector proj(groups);
      for (std::size_t l = 0; l < groups; ++l) proj(l) = dot(z[l], mv);
      const Vector coef = cap_ldlt.solve(proj);
      for (std::size_t l = 0; l < groups; ++l) mv -= coef(l) * mz[l];
      return mv;
    };
    auto hess_mul = [&](double vt, const Matrix& vh, double& out_t, Matrix& out_h) {
      out_t = a * vt + dot(b, vh);
      out_h = b * vt + m_shared * vh + inv_h2.cwiseProduct(vh);
      for (std::size_t l = 0; l < groups; ++l) {
        out_h += (dot(z[l], vh) / (st.s[l] * st.s[l])) * z[l];
      }
    };
    // Schur complement on t.
    const Matrix kb = k_solve(b);
    const double schur = a - dot(b, kb);
    if (!(schur > 0.0)) return step;
    auto solve = [&](double rt, const Matrix& rh, double& vt, Matrix& vh) {
      const Matrix kr = k_solve(rh);
      vt = (rt - dot(b, kr)) / schur;
      vh = kr - kb * vt;
    };

    solve(-grad_t, -grad_h, step.dt, step.dh);
    // One round of iterative refinement against the exact Hessian.
    double ht = 0.0;
    Matrix hh;
    hess_mul(step.dt, step.dh, ht, hh);
    double ct = 0.0;
    Matrix ch;
    solve(-grad_t - ht, -grad_h - hh, ct, ch);
    step.dt += ct;
    step.dh += ch;

    step.decrement_sq = -(grad_t * step.dt + dot(grad_h, step.dh));
    step.ok = std::isfinite(step.decrement_sq) && step.dh.allFinite();
    return step;
  }

 private:
  std::vector<CompressedGroup> groups_;
  Index p_;
  Index n_;
};

}  // namespace

MinMaxSolution solve_h_minmax(const MinMaxSubproblem& sub, const Matrix& warm_start) {
  sub.validate();
  const std::size_t groups = sub.x_blocks.size();
  const Index n = sub.x_blocks[0].cols();
  const Index r = sub.w_blocks[0].cols();
  require_shape(warm_start, r, n, "solve_h_minmax warm start");

  // Rows of H whose W column is zero in every group are unconstrained.
  std::vector<Index> used;
  for (Index k = 0; k < r; ++k) {
    bool any = false;
    for (const Matrix& w : sub.w_blocks) any = any || (w.col(k).array() != 0.0).any();
    if (any) used.push_back(k);
  }
  const Index p = static_cast<Index>(used.size());

  Matrix h_full = warm_start.cwiseMax(0.0);
  const double mean = h_full.size() > 0 ? h_full.mean() : 0.0;
  const double floor = std::max(1e-6 * mean, 1e-12);
  h_full = h_full.cwiseMax(floor);

  MinMaxSolution out;
  if (p == 0) {
    out.H = h_full;
    out.epigraph_value = block_objective(sub, out.H);
    return out;
  }

  std::vector<CompressedGroup> compressed;
  for (std::size_t l = 0; l < groups; ++l) {
    const double inv = 1.0 / sub.norms[l];
    const Eigen::MatrixXd w = sub.w_blocks[l] * inv;
    const Eigen::MatrixXd x = sub.x_blocks[l] * inv;
    const Index k = std::min(w.rows(), r);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    const Eigen::MatrixXd qtx = qr.householderQ().transpose() * x;
    const Eigen::MatrixXd r_full =
        qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    CompressedGroup g;
    g.r.resize(k, p);
    for (Index c = 0; c < p; ++c) g.r.col(c) = r_full.col(used[c]);
    g.y = qtx.topRows(k);
    g.outside_sq = qtx.bottomRows(qtx.rows() - k).squaredNorm();
    g.gram = g.r.transpose() * g.r;
    g.baseline = sub.baselines[l] * inv;
    compressed.push_back(std::move(g));
  }

  Matrix h0(p, n);
  for (Index c = 0; c < p; ++c) h0.row(c) = h_full.row(used[c]);

  double start_obj = -std::numeric_limits<double>::infinity();
  for (const CompressedGroup& g : compressed) {
    const double q = (g.y - g.r * h0).squaredNorm() + g.outside_sq;
    start_obj = std::max(start_obj, std::sqrt(q) - g.baseline);
  }
  const double margin = std::max(0.05 * std::abs(start_obj), 1e-2);

  const Barrier barrier(std::move(compressed), p, n);
  const double nu = barrier.nu();
  const double target_gap = 0.1 * sub.solver_tol;
  double tau = nu / margin;

  Barrier::State st = barrier.evaluate(start_obj + margin, std::move(h0));
  if (!st.feasible) {
    throw std::logic_error("solve_h_minmax: infeasible starting point");
  }

  auto finish = [&](const Barrier::State& state) {
    MinMaxSolution sol;
    sol.H = h_full;
    for (Index c = 0; c < p; ++c) sol.H.row(used[c]) = state.h.row(c);
    sol.epigraph_value = block_objective(sub, sol.H);
    return sol;
  };

  int steps = 0;
  constexpr double kCenteringTol = 1e-9;
  for (;;) {
    // Centering by damped Newton.
    for (;;) {
      if (steps >= sub.max_inner_iters) {
        MinMaxSolution best = finish(st);
        best.newton_steps = steps;
        throw SolverFailure("solve_h_minmax: Newton budget of " +
                                std::to_string(sub.max_inner_iters) +
                                " steps exhausted at duality gap " +
                                std::to_string(nu / tau),
                            std::move(best));
      }
      const Barrier::Step step = barrier.newton_step(st, tau);
      ++steps;
      if (!step.ok) break;
      if (step.decrement_sq * 0.5 <= kCenteringTol) break;

      double alpha = 1.0;
      for (Index i = 0; i < step.dh.size(); ++i) {
        const double d = step.dh.data()[i];
        if (d < 0.0) alpha = std::min(alpha, -0.99 * st.h.data()[i] / d);
      }
      bool moved = false;
      while (alpha > 1e-14) {
        Barrier::State trial =
            barrier.evaluate(st.t + alpha * step.dt, st.h + alpha * step.dh);
        if (trial.feasible &&
            barrier.delta(st, trial, tau) <= -0.25 * alpha * step.decrement_sq) {
          st = std::move(trial);
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      // No descent possible, or the predicted decrease is at rounding level
      // of the log-ratio evaluation: as centered as working precision allows.
      if (!moved || alpha * step.decrement_sq < 1e-12) break;
    }
    if (nu / tau <= target_gap) break;
    tau *= sub.barrier_growth;
  }

  out = finish(st);
  out.newton_steps = steps;
  return out;
}

Matrix nnls_w_step(const GroupedMatrix& x, const Matrix& h) {
  require_shape(h, h.rows(), x.cols(), "nnls_w_step H");
  const Matrix gram = h * h.transpose();
  const Matrix rhs = h * x.matrix().transpose();
  return nnls_gram(gram, rhs).transpose();
}

Matrix nnls_w_step_per_group(const GroupedMatrix& x, const Matrix& h) {
  require_shape(h, h.rows(), x.cols(), "nnls_w_step_per_group H");
  Matrix w(x.rows(), h.rows());
  const Matrix ht = h.transpose();
  for (std::size_t l = 0; l < x.num_groups(); ++l) {
    const Matrix wl = nnls(ht, x.block(l).transpose()).transpose();
    x.scatter(l, wl, w);
  }
  return w;
}

FitResult fairer_nmf_am(const GroupedMatrix& x, const GroupBaselines& baselines,
                        const FairerOptions& opts) {
  opts.validate();
  if (baselines.size() != x.num_groups()) {
    throw DimensionError("fairer_nmf_am: " + std::to_string(baselines.size()) +
                         " baselines for " + std::to_string(x.num_groups()) +
                         " groups");
  }
  if (baselines.options.rank != opts.rank) {
    throw std::invalid_argument("fairer_nmf_am: baselines were computed at rank " +
                                std::to_string(baselines.options.rank) +
                                ", fit requested at rank " +
                                std::to_string(opts.rank));
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  FitResult result;
  Matrix w = random_nonneg(x.rows(), opts.rank, opts.seed);
  Matrix h = random_nonneg(opts.rank, x.cols(), derive_seed(opts.seed, 0));
  result.factors = {w, h};
  std::vector<double> prev = group_errors(x, w, h);
  result.report.termination = Termination::kMaxIterations;

  for (int k = 1; k <= opts.max_outer_iters; ++k) {
    MinMaxSubproblem sub = MinMaxSubproblem::from(x, w, baselines, opts);
    Matrix h_next;
    try {
      h_next = solve_h_minmax(sub, h).H;
    } catch (const SolverFailure&) {
      sub.barrier_growth = 3.0;
      sub.max_inner_iters *= 4;
      try {
        h_next = solve_h_minmax(sub, h).H;
      } catch (const SolverFailure& again) {
        result.report.termination = Termination::kSolverFailure;
        result.report.message = again.what();
        break;
      }
    }
    h = std::move(h_next);
    w = nnls_w_step(x, h);
    result.factors = {w, h};

    IterationRecord rec;
    rec.iteration = k;
    rec.group_errors = group_errors(x, w, h);
    rec.group_losses = group_losses(x, rec.group_errors, baselines.values);
    rec.objective = max_loss(rec.group_losses);
    rec.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool done = converged(prev, rec.group_errors, opts.rel_tol);
    prev = rec.group_errors;
    result.report.trace.push_back(std::move(rec));
    if (done) {
      result.report.termination = Termination::kConverged;
      break;
    }
  }
  return result;
}

}  // namespace fairnmf
