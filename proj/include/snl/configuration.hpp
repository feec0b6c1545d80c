#pragma once

#include "snl/common.hpp"

namespace snl {

/// n points in R^k stored as the rows of an n x k matrix.
class Configuration {
 public:
  Configuration() = default;
  /// Throws InvalidInput on an empty shape or a non-finite entry.
  explicit Configuration(Matrix points);

  Index n() const { return points_.rows(); }
  Index k() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  Eigen::RowVectorXd point(Index i) const { return points_.row(i); }

  /// Same points embedded in R^k by appending zero coordinates.
  Configuration padded(Index k) const;

 private:
  Matrix points_;
};

}  // namespace snl
