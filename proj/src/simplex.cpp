#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace levelrepair {

const char* simplex_status_name(SimplexEngine::Status status) {
  switch (status) {
    case SimplexEngine::Status::kOptimal: return "optimal";
    case SimplexEngine::Status::kInfeasible: return "infeasible";
    case SimplexEngine::Status::kUnbounded: return "unbounded";
    case SimplexEngine::Status::kCutoff: return "cutoff";
    case SimplexEngine::Status::kIterationLimit: return "iteration_limit";
    case SimplexEngine::Status::kTimeLimit: return "time_limit";
    case SimplexEngine::Status::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

inline std::size_t ix(int i) { return static_cast<std::size_t>(i); }

}  // namespace

SimplexEngine::SimplexEngine(const MipProblem& problem)
    : m_(static_cast<int>(problem.num_constraints())),
      n_(static_cast<int>(problem.num_variables())),
      total_(m_ + n_),
      factor_(m_) {
  const auto& rows = problem.constraints();

  col_start_.assign(ix(n_) + 1, 0);
  row_start_.assign(ix(m_) + 1, 0);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : rows[ix(i)].terms) ++col_start_[ix(t.var.index) + 1];
    row_start_[ix(i) + 1] = row_start_[ix(i)] + static_cast<int>(rows[ix(i)].terms.size());
  }
  for (int j = 0; j < n_; ++j) col_start_[ix(j) + 1] += col_start_[ix(j)];
  col_row_.resize(ix(col_start_.back()));
  col_val_.resize(ix(col_start_.back()));
  row_col_.resize(ix(row_start_.back()));
  row_val_.resize(ix(row_start_.back()));
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    int k = row_start_[ix(i)];
    for (const auto& t : rows[ix(i)].terms) {
      row_col_[ix(k)] = t.var.index;
      row_val_[ix(k)] = t.coef;
      ++k;
      int p = fill[ix(t.var.index)]++;
      col_row_[ix(p)] = i;
      col_val_[ix(p)] = t.coef;
    }
  }

  cost_.assign(ix(total_), 0.0);
  for (const auto& t : problem.objective()) cost_[ix(t.var.index)] += t.coef;
  orig_cost_ = cost_;

  lower_.resize(ix(total_));
  upper_.resize(ix(total_));
  for (int j = 0; j < n_; ++j) {
    const auto& v = problem.variables()[ix(j)];
    lower_[ix(j)] = v.lower;
    upper_[ix(j)] = v.upper;
  }
  for (int i = 0; i < m_; ++i) {
    const auto& row = rows[ix(i)];
    double lo = -kInfinity, hi = kInfinity;
    switch (row.sense) {
      case Sense::kLessEqual: hi = row.rhs; break;
      case Sense::kGreaterEqual: lo = row.rhs; break;
      case Sense::kEqual: lo = hi = row.rhs; break;
    }
    lower_[ix(n_ + i)] = lo;
    upper_[ix(n_ + i)] = hi;
  }

  status_.assign(ix(total_), kAtLower);
  head_.assign(ix(m_), 0);
  x_.assign(ix(total_), 0.0);
  d_.assign(ix(total_), 0.0);
  dse_weight_.assign(ix(m_), 1.0);
  work_row_.assign(ix(m_), 0.0);
  work_col_.assign(ix(m_), 0.0);
  work_tau_.assign(ix(m_), 0.0);
  alpha_row_.assign(ix(total_), 0.0);
  alpha_mark_.assign(ix(total_), 0);
  work_flip_.assign(ix(m_), 0.0);
  set_slack_basis();
}

template <typename F>
void SimplexEngine::for_column(int j, F&& f) const {
  if (j < n_) {
    for (int p = col_start_[ix(j)]; p < col_start_[ix(j) + 1]; ++p) f(col_row_[ix(p)], col_val_[ix(p)]);
  } else {
    f(j - n_, -1.0);
  }
}

void SimplexEngine::place_nonbasic(int j) {
  const double lo = lower_[ix(j)], hi = upper_[ix(j)];
  auto& st = status_[ix(j)];
  if (st == kAtUpper && hi < kInfinity) {
    x_[ix(j)] = hi;
  } else if (lo > -kInfinity) {
    st = kAtLower;
    x_[ix(j)] = lo;
  } else if (hi < kInfinity) {
    st = kAtUpper;
    x_[ix(j)] = hi;
  } else {
    st = kAtZero;
    x_[ix(j)] = 0.0;
  }
}

void SimplexEngine::set_slack_basis() {
  for (int j = 0; j < n_; ++j) {
    status_[ix(j)] = kAtLower;
    place_nonbasic(j);
  }
  for (int i = 0; i < m_; ++i) {
    head_[ix(i)] = n_ + i;
    status_[ix(n_ + i)] = kBasic;
  }
  std::fill(dse_weight_.begin(), dse_weight_.end(), 1.0);
  factor_valid_ = false;
}

void SimplexEngine::set_col_bounds(int j, double lower, double upper) {
  lower_[ix(j)] = lower;
  upper_[ix(j)] = upper;
  if (status_[ix(j)] != kBasic) place_nonbasic(j);
}

SimplexEngine::Basis SimplexEngine::basis() const { return {status_, dse_weight_}; }

void SimplexEngine::set_basis(const Basis& basis) {
  status_ = basis.status;
  dse_weight_ = basis.dse_weight;
  int r = 0;
  for (int j = 0; j < total_; ++j) {
    if (status_[ix(j)] == kBasic) {
      if (r < m_) head_[ix(r)] = j;
      ++r;
    } else {
      place_nonbasic(j);
    }
  }
  if (r != m_) {
    set_slack_basis();
    return;
  }
  factor_valid_ = false;
}

bool SimplexEngine::refactor() {
  bcol_start_.assign(ix(m_) + 1, 0);
  bcol_row_.clear();
  bcol_val_.clear();
  for (int i = 0; i < m_; ++i) {
    for_column(head_[ix(i)], [&](int row, double v) {
      bcol_row_.push_back(row);
      bcol_val_.push_back(v);
    });
    bcol_start_[ix(i) + 1] = static_cast<int>(bcol_row_.size());
  }
  factor_valid_ = factor_.factorize(bcol_start_, bcol_row_, bcol_val_);
  return factor_valid_;
}

void SimplexEngine::compute_primal() {
  std::fill(work_col_.begin(), work_col_.end(), 0.0);
  for (int j = 0; j < total_; ++j) {
    if (status_[ix(j)] == kBasic) continue;
    const double v = x_[ix(j)];
    if (v == 0.0) continue;
    for_column(j, [&](int row, double a) { work_col_[ix(row)] -= a * v; });
  }
  factor_.ftran(work_col_);
  for (int i = 0; i < m_; ++i) x_[ix(head_[ix(i)])] = work_col_[ix(i)];
}

void SimplexEngine::compute_dual() {
  for (int i = 0; i < m_; ++i) work_row_[ix(i)] = cost_[ix(head_[ix(i)])];
  factor_.btran(work_row_);
  for (int j = 0; j < total_; ++j) {
    if (status_[ix(j)] == kBasic) {
      d_[ix(j)] = 0.0;
      continue;
    }
    double dj = cost_[ix(j)];
    for_column(j, [&](int row, double a) { dj -= a * work_row_[ix(row)]; });
    d_[ix(j)] = dj;
  }
}

bool SimplexEngine::is_dual_feasible(double tol) const {
  for (int j = 0; j < total_; ++j) {
    const auto st = status_[ix(j)];
    if (st == kBasic || lower_[ix(j)] == upper_[ix(j)]) continue;
    const double dj = d_[ix(j)];
    if (st == kAtLower && dj < -tol) return false;
    if (st == kAtUpper && dj > tol) return false;
    if (st == kAtZero && std::fabs(dj) > tol) return false;
  }
  return true;
}

// Flips boxed nonbasics whose reduced cost has the wrong sign. Returns false
// if some dual infeasibility cannot be removed by a flip.
bool SimplexEngine::make_dual_feasible() {
  bool flipped = false;
  const double tol = 1e-7;
  for (int j = 0; j < total_; ++j) {
    auto& st = status_[ix(j)];
    if (st == kBasic || lower_[ix(j)] == upper_[ix(j)]) continue;
    const double dj = d_[ix(j)];
    if (st == kAtLower && dj < -tol) {
      if (upper_[ix(j)] == kInfinity) return false;
      st = kAtUpper;
      x_[ix(j)] = upper_[ix(j)];
      flipped = true;
    } else if (st == kAtUpper && dj > tol) {
      if (lower_[ix(j)] == -kInfinity) return false;
      st = kAtLower;
      x_[ix(j)] = lower_[ix(j)];
      flipped = true;
    } else if (st == kAtZero && std::fabs(dj) > tol) {
      return false;
    }
  }
  if (flipped) compute_primal();
  return true;
}

void SimplexEngine::restore_costs() {
  if (!costs_shifted_) return;
  cost_ = orig_cost_;
  costs_shifted_ = false;
}

double SimplexEngine::current_objective() const {
  double obj = 0.0;
  for (int j = 0; j < total_; ++j) {
    const double c = cost_[ix(j)];
    if (c != 0.0) obj += c * x_[ix(j)];
  }
  return obj;
}

void SimplexEngine::perturb_costs(double scale) {
  for (int j = 0; j < total_; ++j) {
    const auto st = status_[ix(j)];
    if (st == kBasic || st == kAtZero || lower_[ix(j)] == upper_[ix(j)]) continue;
    // splitmix64 of the column index, so runs are reproducible
    std::uint64_t z = static_cast<std::uint64_t>(j) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    const double delta = scale * (1.0 + std::fabs(orig_cost_[ix(j)])) * (1.0 + u);
    const double signed_delta = st == kAtLower ? delta : -delta;
    cost_[ix(j)] += signed_delta;
    d_[ix(j)] += signed_delta;
  }
  costs_shifted_ = true;
}

// With shifted costs the running objective is not a bound for the real LP,
// so the cutoff only counts if the basis is dual feasible for the real costs.
bool SimplexEngine::exceeds_cutoff(const Options& opt) {
  if (opt.cutoff == kInfinity || current_objective() <= opt.cutoff) return false;
  if (!costs_shifted_) return true;
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += orig_cost_[ix(j)] * x_[ix(j)];
  if (obj <= opt.cutoff) return false;
  for (int i = 0; i < m_; ++i) work_tau_[ix(i)] = orig_cost_[ix(head_[ix(i)])];
  factor_.btran(work_tau_);
  for (int j = 0; j < total_; ++j) {
    const auto st = status_[ix(j)];
    if (st == kBasic || lower_[ix(j)] == upper_[ix(j)]) continue;
    double dj = orig_cost_[ix(j)];
    for_column(j, [&](int row, double a) { dj -= a * work_tau_[ix(row)]; });
    if (st == kAtLower && dj < -opt.dual_tol) return false;
    if (st == kAtUpper && dj > opt.dual_tol) return false;
    if (st == kAtZero && std::fabs(dj) > opt.dual_tol) return false;
  }
  return true;
}

double SimplexEngine::objective() const {
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += orig_cost_[ix(j)] * x_[ix(j)];
  return obj;
}

std::vector<double> SimplexEngine::column_values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

void SimplexEngine::pivot(int row, int entering, int leaving_status, std::vector<double>& column) {
  const int leaving = head_[ix(row)];
  status_[ix(leaving)] = static_cast<std::uint8_t>(leaving_status);
  status_[ix(entering)] = kBasic;
  head_[ix(row)] = entering;
  factor_.update(row, column);
  ++iterations_;
}

SimplexEngine::Status SimplexEngine::dual_simplex(const Options& opt) {
  const double ptol = opt.primal_tol;
  const double dtol = opt.dual_tol;
  long long local_iter = 0;
  long long next_cutoff_check = 0;

  for (;;) {
    if (local_iter >= opt.max_iterations) return Status::kIterationLimit;
    if ((local_iter & 63) == 0 && std::chrono::steady_clock::now() > opt.deadline) return Status::kTimeLimit;

    if (!factor_valid_ || factor_.num_updates() >= opt.refactor_interval) {
      if (!refactor()) return Status::kNumericalFailure;
      compute_primal();
      compute_dual();
      // Drift can leave small dual infeasibilities behind; flip or shift them away.
      bool flipped = false;
      for (int j = 0; j < total_; ++j) {
        auto& st = status_[ix(j)];
        if (st == kBasic || lower_[ix(j)] == upper_[ix(j)]) continue;
        const double dj = d_[ix(j)];
        const bool wrong = (st == kAtLower && dj < 0) || (st == kAtUpper && dj > 0) ||
                           (st == kAtZero && dj != 0);
        if (!wrong) continue;
        if (std::fabs(dj) > 10 * dtol && st == kAtLower && upper_[ix(j)] < kInfinity) {
          st = kAtUpper;
          x_[ix(j)] = upper_[ix(j)];
          flipped = true;
        } else if (std::fabs(dj) > 10 * dtol && st == kAtUpper && lower_[ix(j)] > -kInfinity) {
          st = kAtLower;
          x_[ix(j)] = lower_[ix(j)];
          flipped = true;
        } else {
          cost_[ix(j)] -= dj;
          d_[ix(j)] = 0.0;
          costs_shifted_ = true;
        }
      }
      if (flipped) compute_primal();
    }

    if (opt.cutoff < kInfinity && local_iter >= next_cutoff_check) {
      if (exceeds_cutoff(opt)) return Status::kCutoff;
      next_cutoff_check = local_iter + (costs_shifted_ ? 16 : 1);
    }

    // Leaving row: dual steepest edge pricing.
    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[ix(i)];
      const double v = x_[ix(j)];
      double infeas;
      if (v < lower_[ix(j)] - ptol) {
        infeas = lower_[ix(j)] - v;
      } else if (v > upper_[ix(j)] + ptol) {
        infeas = v - upper_[ix(j)];
      } else {
        continue;
      }
      double& w = dse_weight_[ix(i)];
      if (!(w > 1e-12 && w < kInfinity)) w = 1.0;
      const double score = infeas * infeas / w;
      if (score > best) {
        best = score;
        r = i;
      }
    }
    if (r < 0) return Status::kOptimal;

    const int p = head_[ix(r)];
    const bool to_lower = x_[ix(p)] < lower_[ix(p)];

    std::fill(work_row_.begin(), work_row_.end(), 0.0);
    work_row_[ix(r)] = 1.0;
    factor_.btran(work_row_);

    // Pivot row alpha_j = rho^T a_j, kept sparse through alpha_idx_.
    for (int j : alpha_idx_) {
      alpha_row_[ix(j)] = 0.0;
      alpha_mark_[ix(j)] = 0;
    }
    alpha_idx_.clear();
    for (int i = 0; i < m_; ++i) {
      const double rho = work_row_[ix(i)];
      if (std::fabs(rho) < 1e-14) continue;
      for (int k = row_start_[ix(i)]; k < row_start_[ix(i) + 1]; ++k) {
        const int j = row_col_[ix(k)];
        if (!alpha_mark_[ix(j)]) {
          alpha_mark_[ix(j)] = 1;
          alpha_idx_.push_back(j);
        }
        alpha_row_[ix(j)] += rho * row_val_[ix(k)];
      }
      alpha_idx_.push_back(n_ + i);
      alpha_mark_[ix(n_ + i)] = 1;
      alpha_row_[ix(n_ + i)] = -rho;
    }

    // Candidates that bound the dual step, sorted by breakpoint.
    const double sgn = to_lower ? -1.0 : 1.0;
    candidates_.clear();
    for (int j : alpha_idx_) {
      const auto st = status_[ix(j)];
      if (st == kBasic || lower_[ix(j)] == upper_[ix(j)]) continue;
      const double t = sgn * alpha_row_[ix(j)];
      const double dj = d_[ix(j)];
      double raw, relaxed;
      if (st == kAtLower && t > opt.pivot_tol) {
        raw = dj / t;
        relaxed = (dj + dtol) / t;
      } else if (st == kAtUpper && t < -opt.pivot_tol) {
        raw = dj / t;
        relaxed = (dj - dtol) / t;
      } else if (st == kAtZero && std::fabs(t) > opt.pivot_tol) {
        raw = std::fabs(dj) / std::fabs(t);
        relaxed = (std::fabs(dj) + dtol) / std::fabs(t);
      } else {
        continue;
      }
      candidates_.push_back({j, std::max(raw, 0.0), relaxed, std::fabs(t)});
    }
    if (candidates_.empty()) return Status::kInfeasible;
    std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& a, const Candidate& b) {
      return a.ratio < b.ratio || (a.ratio == b.ratio && a.var < b.var);
    });

    // Bound-flipping ratio test: pass breakpoints of boxed variables while
    // the dual objective keeps improving, Harris tolerance within each block.
    double slope = to_lower ? lower_[ix(p)] - x_[ix(p)] : x_[ix(p)] - upper_[ix(p)];
    std::size_t pos = 0;
    std::size_t flip_end = 0;
    int q = -1;
    while (pos < candidates_.size()) {
      double theta_max = kInfinity;
      for (std::size_t k = pos; k < candidates_.size() && candidates_[k].ratio <= theta_max; ++k) {
        theta_max = std::min(theta_max, candidates_[k].relaxed);
      }
      std::size_t block_end = pos;
      double block_slope = 0.0;
      bool all_boxed = true;
      std::size_t best_k = pos;
      while (block_end < candidates_.size() && candidates_[block_end].ratio <= theta_max) {
        const auto& c = candidates_[block_end];
        const double range = upper_[ix(c.var)] - lower_[ix(c.var)];
        if (range < kInfinity) {
          block_slope += c.abs_alpha * range;
        } else {
          all_boxed = false;
        }
        if (c.abs_alpha > candidates_[best_k].abs_alpha) best_k = block_end;
        ++block_end;
      }
      if (block_end == pos) {  // relaxed bound below the first breakpoint
        best_k = pos;
        block_end = pos + 1;
        all_boxed = false;
      }
      if (all_boxed && slope - block_slope > ptol && block_end < candidates_.size()) {
        slope -= block_slope;
        pos = block_end;
        flip_end = block_end;
        continue;
      }
      if (all_boxed && slope - block_slope > ptol) return Status::kInfeasible;
      q = candidates_[best_k].var;
      break;
    }
    if (q < 0) return Status::kInfeasible;

    const double alpha_q = alpha_row_[ix(q)];
    std::fill(work_col_.begin(), work_col_.end(), 0.0);
    for_column(q, [&](int row, double a) { work_col_[ix(row)] = a; });
    factor_.ftran(work_col_);
    const double alpha_rq = work_col_[ix(r)];
    const double scale = std::max(std::fabs(alpha_rq), std::fabs(alpha_q));
    if (std::fabs(alpha_rq - alpha_q) > 1e-9 + 1e-6 * scale || std::fabs(alpha_rq) < opt.pivot_tol) {
      if (factor_.num_updates() > 0) {
        factor_valid_ = false;
        continue;
      }
      if (std::fabs(alpha_rq) < 1e-11) return Status::kNumericalFailure;
    }

    double dq = d_[ix(q)];
    const double tq = sgn * alpha_q;
    if ((tq > 0 && dq < 0) || (tq < 0 && dq > 0) || status_[ix(q)] == kAtZero) {
      cost_[ix(q)] -= dq;
      d_[ix(q)] = 0.0;
      dq = 0.0;
      costs_shifted_ = true;
    }
    const double theta_d = dq / alpha_q;

    // Flip the passed boxed variables and move x_B accordingly.
    if (flip_end > 0) {
      std::fill(work_flip_.begin(), work_flip_.end(), 0.0);
      for (std::size_t k = 0; k < flip_end; ++k) {
        const int j = candidates_[k].var;
        if (j == q) continue;
        double delta;
        if (status_[ix(j)] == kAtLower) {
          status_[ix(j)] = kAtUpper;
          delta = upper_[ix(j)] - lower_[ix(j)];
          x_[ix(j)] = upper_[ix(j)];
        } else {
          status_[ix(j)] = kAtLower;
          delta = lower_[ix(j)] - upper_[ix(j)];
          x_[ix(j)] = lower_[ix(j)];
        }
        for_column(j, [&](int row, double a) { work_flip_[ix(row)] += a * delta; });
      }
      factor_.ftran(work_flip_);
      for (int i = 0; i < m_; ++i) {
        const double a = work_flip_[ix(i)];
        if (a != 0.0) x_[ix(head_[ix(i)])] -= a;
      }
    }
    const double delta = to_lower ? x_[ix(p)] - lower_[ix(p)] : x_[ix(p)] - upper_[ix(p)];

    work_tau_ = work_row_;
    factor_.ftran(work_tau_);

    if (theta_d != 0.0) {
      for (int j : alpha_idx_) {
        if (status_[ix(j)] != kBasic) d_[ix(j)] -= theta_d * alpha_row_[ix(j)];
      }
    }
    d_[ix(p)] = -theta_d;
    d_[ix(q)] = 0.0;

    const double theta_p = delta / alpha_rq;
    for (int i = 0; i < m_; ++i) {
      const double a = work_col_[ix(i)];
      if (a != 0.0) x_[ix(head_[ix(i)])] -= theta_p * a;
    }
    x_[ix(q)] += theta_p;
    x_[ix(p)] = to_lower ? lower_[ix(p)] : upper_[ix(p)];

    const double w_r = dse_weight_[ix(r)];
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double a = work_col_[ix(i)];
      if (a == 0.0) continue;
      const double ratio = a / alpha_rq;
      const double w = dse_weight_[ix(i)] - 2.0 * ratio * work_tau_[ix(i)] + ratio * ratio * w_r;
      dse_weight_[ix(i)] = std::max(w, std::max(ratio * ratio, 1e-8));
    }
    dse_weight_[ix(r)] = std::max(w_r / (alpha_rq * alpha_rq), 1e-8);

    pivot(r, q, to_lower ? kAtLower : kAtUpper, work_col_);
    ++local_iter;
  }
}

SimplexEngine::Status SimplexEngine::primal_simplex(const Options& opt) {
  const double ptol = opt.primal_tol;
  const double dtol = opt.dual_tol;
  long long local_iter = 0;
  int degenerate_streak = 0;
  bool bland = false;
  std::vector<double> phase_cost(ix(m_));

  for (;;) {
    if (local_iter >= opt.max_iterations) return Status::kIterationLimit;
    if ((local_iter & 63) == 0 && std::chrono::steady_clock::now() > opt.deadline) return Status::kTimeLimit;

    if (!factor_valid_ || factor_.num_updates() >= opt.refactor_interval) {
      if (!refactor()) return Status::kNumericalFailure;
      compute_primal();
    }

    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[ix(i)];
      const double v = x_[ix(j)];
      if (v < lower_[ix(j)] - ptol) {
        phase_cost[ix(i)] = -1.0;
        phase1 = true;
      } else if (v > upper_[ix(j)] + ptol) {
        phase_cost[ix(i)] = 1.0;
        phase1 = true;
      } else {
        phase_cost[ix(i)] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) work_row_[ix(i)] = phase1 ? phase_cost[ix(i)] : cost_[ix(head_[ix(i)])];
    factor_.btran(work_row_);

    int q = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < total_; ++j) {
      const auto st = status_[ix(j)];
      if (st == kBasic || lower_[ix(j)] == upper_[ix(j)]) continue;
      double dj = phase1 ? 0.0 : cost_[ix(j)];
      for_column(j, [&](int row, double a) { dj -= a * work_row_[ix(row)]; });
      int this_dir = 0;
      if ((st == kAtLower || st == kAtZero) && dj < -dtol) this_dir = 1;
      else if ((st == kAtUpper || st == kAtZero) && dj > dtol) this_dir = -1;
      if (this_dir == 0) continue;
      if (bland) {
        q = j;
        dir = this_dir;
        break;
      }
      if (std::fabs(dj) > best) {
        best = std::fabs(dj);
        q = j;
        dir = this_dir;
      }
    }
    if (q < 0) {
      if (phase1) return Status::kInfeasible;
      compute_dual();
      return Status::kOptimal;
    }

    std::fill(work_col_.begin(), work_col_.end(), 0.0);
    for_column(q, [&](int row, double a) { work_col_[ix(row)] = a; });
    factor_.ftran(work_col_);

    // Ratio test; in Bland mode the exact minimum with lowest-index ties.
    double theta_max = kInfinity;
    for (int i = 0; i < m_ && !bland; ++i) {
      const double g = -dir * work_col_[ix(i)];
      if (std::fabs(g) <= opt.pivot_tol) continue;
      const int b = head_[ix(i)];
      const double v = x_[ix(b)], lo = lower_[ix(b)], hi = upper_[ix(b)];
      double relaxed;
      if (g > 0) {
        if (v < lo - ptol) relaxed = (lo - v) / g;
        else if (hi < kInfinity && v <= hi + ptol) relaxed = (hi + ptol - v) / g;
        else continue;
      } else {
        if (v > hi + ptol) relaxed = (v - hi) / -g;
        else if (lo > -kInfinity && v >= lo - ptol) relaxed = (v - lo + ptol) / -g;
        else continue;
      }
      theta_max = std::min(theta_max, relaxed);
    }

    int r = -1;
    double r_ratio = kInfinity;
    double r_abs = 0.0;
    int r_status = kAtLower;
    for (int i = 0; i < m_; ++i) {
      const double g = -dir * work_col_[ix(i)];
      if (std::fabs(g) <= opt.pivot_tol) continue;
      const int b = head_[ix(i)];
      const double v = x_[ix(b)], lo = lower_[ix(b)], hi = upper_[ix(b)];
      double ratio;
      int leave;
      if (g > 0) {
        if (v < lo - ptol) {
          ratio = (lo - v) / g;
          leave = kAtLower;
        } else if (hi < kInfinity && v <= hi + ptol) {
          ratio = std::max((hi - v) / g, 0.0);
          leave = kAtUpper;
        } else {
          continue;
        }
      } else {
        if (v > hi + ptol) {
          ratio = (v - hi) / -g;
          leave = kAtUpper;
        } else if (lo > -kInfinity && v >= lo - ptol) {
          ratio = std::max((v - lo) / -g, 0.0);
          leave = kAtLower;
        } else {
          continue;
        }
      }
      bool take;
      if (bland) {
        take = ratio < r_ratio || (ratio == r_ratio && r >= 0 && b < head_[ix(r)]);
      } else {
        take = ratio <= theta_max && std::fabs(g) > r_abs;
      }
      if (take) {
        r = i;
        r_ratio = ratio;
        r_abs = std::fabs(g);
        r_status = leave;
      }
    }

    const double range = upper_[ix(q)] - lower_[ix(q)];
    if (r < 0 && !(range < kInfinity)) {
      return phase1 ? Status::kNumericalFailure : Status::kUnbounded;
    }

    double step;
    if (range < kInfinity && (r < 0 || range <= r_ratio)) {
      step = range;
      for (int i = 0; i < m_; ++i) {
        const double a = work_col_[ix(i)];
        if (a != 0.0) x_[ix(head_[ix(i)])] -= dir * step * a;
      }
      if (dir > 0) {
        status_[ix(q)] = kAtUpper;
        x_[ix(q)] = upper_[ix(q)];
      } else {
        status_[ix(q)] = kAtLower;
        x_[ix(q)] = lower_[ix(q)];
      }
      ++iterations_;
    } else {
      step = r_ratio;
      const int leaving = head_[ix(r)];
      for (int i = 0; i < m_; ++i) {
        const double a = work_col_[ix(i)];
        if (a != 0.0) x_[ix(head_[ix(i)])] -= dir * step * a;
      }
      x_[ix(q)] += dir * step;
      x_[ix(leaving)] = r_status == kAtLower ? lower_[ix(leaving)] : upper_[ix(leaving)];
      pivot(r, q, r_status, work_col_);
    }
    ++local_iter;

    if (step < 1e-12) {
      if (++degenerate_streak >= opt.bland_after) bland = true;
    } else {
      degenerate_streak = 0;
      bland = false;
    }
  }
}

SimplexEngine::Status SimplexEngine::solve(const Options& opt) {
  if (!factor_valid_ && !refactor()) {
    set_slack_basis();
    if (!refactor()) return Status::kNumericalFailure;
  }
  compute_primal();
  compute_dual();

  const bool df = make_dual_feasible();
  if (df && opt.perturbation > 0.0) perturb_costs(opt.perturbation);
  Status st = df ? dual_simplex(opt) : primal_simplex(opt);
  if (st == Status::kNumericalFailure) {
    restore_costs();
    set_slack_basis();
    if (!refactor()) return Status::kNumericalFailure;
    compute_primal();
    st = primal_simplex(opt);
  }

  // Polish: remove cost shifts, then re-verify from a fresh factorisation.
  bool verified = st != Status::kOptimal;
  for (int round = 0; round < 4 && st == Status::kOptimal; ++round) {
    restore_costs();
    if (!refactor()) {
      set_slack_basis();
      refactor();
    }
    compute_primal();
    compute_dual();
    bool primal_ok = true;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[ix(i)];
      if (x_[ix(j)] < lower_[ix(j)] - opt.primal_tol || x_[ix(j)] > upper_[ix(j)] + opt.primal_tol) {
        primal_ok = false;
        break;
      }
    }
    const bool dual_ok = is_dual_feasible(opt.dual_tol);
    if (primal_ok && dual_ok) {
      verified = true;
      break;
    }
    if (primal_ok) {
      st = primal_simplex(opt);
    } else if (make_dual_feasible()) {
      st = dual_simplex(opt);
    } else {
      st = primal_simplex(opt);
    }
  }
  if (costs_shifted_) {
    restore_costs();
    if (factor_valid_) compute_dual();
  }
  if (!verified && st == Status::kOptimal) return Status::kNumericalFailure;
  return st;
}

}  // namespace levelrepair
