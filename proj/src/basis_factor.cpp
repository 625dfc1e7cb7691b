#include "basis_factor.hpp"

#include <klu.h>

#include <cmath>

namespace levelrepair {

struct BasisFactor::Klu {
  klu_common common;
  klu_symbolic* symbolic = nullptr;
  klu_numeric* numeric = nullptr;

  Klu() {
    klu_defaults(&common);
    common.halt_if_singular = 1;
  }
  ~Klu() { release(); }

  void release() {
    if (numeric) klu_free_numeric(&numeric, &common);
    if (symbolic) klu_free_symbolic(&symbolic, &common);
    numeric = nullptr;
    symbolic = nullptr;
  }
};

BasisFactor::BasisFactor(int dim) : dim_(dim), klu_(std::make_unique<Klu>()) { eta_start_.push_back(0); }

BasisFactor::~BasisFactor() = default;

bool BasisFactor::valid() const { return klu_->numeric != nullptr; }

bool BasisFactor::factorize(std::vector<int>& col_start, std::vector<int>& row_index,
                            std::vector<double>& values) {
  klu_->release();
  eta_row_.clear();
  eta_pivot_.clear();
  eta_start_.assign(1, 0);
  eta_index_.clear();
  eta_value_.clear();
  if (dim_ == 0) return true;

  klu_->symbolic = klu_analyze(dim_, col_start.data(), row_index.data(), &klu_->common);
  if (!klu_->symbolic) return false;
  klu_->numeric = klu_factor(col_start.data(), row_index.data(), values.data(), klu_->symbolic, &klu_->common);
  if (!klu_->numeric || klu_->common.status != KLU_OK) {
    klu_->release();
    return false;
  }
  // Reject numerically near-singular bases; the simplex falls back to a
  // slack basis in that case.
  double rcond = 0.0;
  if (klu_rcond(klu_->symbolic, klu_->numeric, &klu_->common)) rcond = klu_->common.rcond;
  if (!(rcond > 1e-13)) {
    klu_->release();
    return false;
  }
  return true;
}

void BasisFactor::ftran(std::span<double> rhs) {
  if (dim_ == 0) return;
  klu_solve(klu_->symbolic, klu_->numeric, dim_, 1, rhs.data(), &klu_->common);
  const int k = num_updates();
  for (int e = 0; e < k; ++e) {
    const int r = eta_row_[static_cast<std::size_t>(e)];
    double xr = rhs[static_cast<std::size_t>(r)];
    if (xr == 0.0) continue;
    xr /= eta_pivot_[static_cast<std::size_t>(e)];
    rhs[static_cast<std::size_t>(r)] = xr;
    for (int p = eta_start_[static_cast<std::size_t>(e)]; p < eta_start_[static_cast<std::size_t>(e) + 1]; ++p) {
      rhs[static_cast<std::size_t>(eta_index_[static_cast<std::size_t>(p)])] -=
          eta_value_[static_cast<std::size_t>(p)] * xr;
    }
  }
}

void BasisFactor::btran(std::span<double> rhs) {
  if (dim_ == 0) return;
  for (int e = num_updates() - 1; e >= 0; --e) {
    const int r = eta_row_[static_cast<std::size_t>(e)];
    double z = rhs[static_cast<std::size_t>(r)];
    for (int p = eta_start_[static_cast<std::size_t>(e)]; p < eta_start_[static_cast<std::size_t>(e) + 1]; ++p) {
      z -= eta_value_[static_cast<std::size_t>(p)] * rhs[static_cast<std::size_t>(eta_index_[static_cast<std::size_t>(p)])];
    }
    rhs[static_cast<std::size_t>(r)] = z / eta_pivot_[static_cast<std::size_t>(e)];
  }
  klu_tsolve(klu_->symbolic, klu_->numeric, dim_, 1, rhs.data(), &klu_->common);
}

void BasisFactor::update(int pivot_row, std::span<const double> column) {
  eta_row_.push_back(pivot_row);
  eta_pivot_.push_back(column[static_cast<std::size_t>(pivot_row)]);
  for (int i = 0; i < dim_; ++i) {
    double v = column[static_cast<std::size_t>(i)];
    if (i == pivot_row || std::fabs(v) < 1e-13) continue;
    eta_index_.push_back(i);
    eta_value_.push_back(v);
  }
  eta_start_.push_back(static_cast<int>(eta_index_.size()));
}

}  // namespace levelrepair
