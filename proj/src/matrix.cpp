#include "margame/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace margame {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

double Matrix::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Matrix::max() const { return *std::max_element(data_.begin(), data_.end()); }

}  // namespace margame
