#include "snl/configuration.hpp"

namespace snl {

Configuration::Configuration(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw InvalidInput("configuration needs n >= 1 and k >= 1");
  }
  if (!points_.allFinite()) {
    throw InvalidInput("configuration has non-finite entries");
  }
}

Configuration Configuration::padded(Index k) const {
  if (k < this->k()) {
    throw InvalidInput("cannot pad a configuration to fewer dimensions");
  }
  Matrix out = Matrix::Zero(n(), k);
  out.leftCols(this->k()) = points_;
  return Configuration(std::move(out));
}

}  // namespace snl
