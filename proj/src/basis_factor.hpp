#pragma once

#include <memory>
#include <span>
#include <vector>

namespace levelrepair {

// LU factorisation of a simplex basis (sparse LU) with product-form eta
// updates between refactorisations.
class BasisFactor {
 public:
  explicit BasisFactor(int dim);
  ~BasisFactor();
  BasisFactor(const BasisFactor&) = delete;
  BasisFactor& operator=(const BasisFactor&) = delete;

  // Columns of B in compressed-column form. Returns false if B is singular.
  bool factorize(std::vector<int>& col_start, std::vector<int>& row_index, std::vector<double>& values);

  // Solves B x = rhs in place.
  void ftran(std::span<double> rhs);
  // Solves B^T y = rhs in place.
  void btran(std::span<double> rhs);

  // Records replacement of basis column `pivot_row` by a column whose ftran
  // image is `column`.
  void update(int pivot_row, std::span<const double> column);

  int num_updates() const { return static_cast<int>(eta_row_.size()); }
  bool valid() const;

 private:
  struct Klu;

  int dim_;
  std::unique_ptr<Klu> klu_;

  std::vector<int> eta_row_;
  std::vector<double> eta_pivot_;
  std::vector<int> eta_start_;
  std::vector<int> eta_index_;
  std::vector<double> eta_value_;
};

}  // namespace levelrepair
