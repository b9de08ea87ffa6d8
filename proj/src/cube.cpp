#include "hsfuse/cube.hpp"

namespace hsfuse {

std::string Dims::str() const {
  return std::to_string(bands) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

void check_dims(const Dims& dims) {
  if (dims.bands < 1 || dims.height < 1 || dims.width < 1)
    throw DimensionError("cube dimensions must be >= 1, got " + dims.str());
}

HsiCube cube_new(Index bands, Index height, Index width, double fill) {
  return HsiCube(Dims{bands, height, width}, fill);
}

double dot(const HsiCube& a, const HsiCube& b) {
  if (a.dims() != b.dims()) throw DimensionError("dot: " + a.dims().str() + " vs " + b.dims().str());
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

double squared_norm(const HsiCube& a) { return a.matrix().squaredNorm(); }

double norm(const HsiCube& a) { return a.matrix().norm(); }

Eigen::VectorXd vectorize(const HsiCube& x) {
  Eigen::VectorXd v(x.size());
  const Index bands = x.bands();
  for (Index p = 0; p < x.pixels(); ++p)
    for (Index l = 0; l < bands; ++l) v(p * bands + l) = x.matrix()(l, p);
  return v;
}

HsiCube devectorize(const Eigen::VectorXd& v, const Dims& dims) {
  if (v.size() != dims.size()) throw DimensionError("devectorize: length does not match " + dims.str());
  HsiCube::Matrix m(dims.bands, dims.pixels());
  for (Index p = 0; p < dims.pixels(); ++p)
    for (Index l = 0; l < dims.bands; ++l) m(l, p) = v(p * dims.bands + l);
  return HsiCube(dims, std::move(m));
}

}  // namespace hsfuse
