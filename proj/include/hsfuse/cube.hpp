#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <utility>

#include <Eigen/Core>

#include "hsfuse/error.hpp"

namespace hsfuse {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Shape of a band-major image cube.
struct Dims {
  Index bands = 1;
  Index height = 1;
  Index width = 1;

  Index pixels() const { return height * width; }
  Index size() const { return bands * pixels(); }
  bool operator==(const Dims&) const = default;
  std::string str() const;
};

void check_dims(const Dims& dims);

/// Row-major plane type used for per-band 2D grids (height x width).
template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * A bands x height x width image stored band-major: band, then row, then column.
 *
 * The storage is a row-major B x N matrix (N = height * width), which is exactly the
 * matricized form X used by the fusion model: row l holds band l, column p holds the
 * spectrum of pixel p = row * width + col.
 */
template <typename Scalar>
class Cube {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using PlaneMap = Eigen::Map<Plane<Scalar>>;
  using ConstPlaneMap = Eigen::Map<const Plane<Scalar>>;

  Cube() : Cube(Dims{}, Scalar(0)) {}

  Cube(const Dims& dims, Scalar fill) : dims_(dims) {
    check_dims(dims);
    if (!is_finite(fill)) throw ValidationError("cube fill value must be finite");
    data_ = Matrix::Constant(dims.bands, dims.pixels(), fill);
  }

  /// Takes a B x N matrix; throws if the shape disagrees or any entry is non-finite.
  Cube(const Dims& dims, Matrix data) : dims_(dims), data_(std::move(data)) {
    check_dims(dims);
    if (data_.rows() != dims.bands || data_.cols() != dims.pixels())
      throw DimensionError("matrix shape does not match cube dims " + dims.str());
    if (!data_.allFinite()) throw ValidationError("cube contains non-finite values");
  }

  const Dims& dims() const { return dims_; }
  Index bands() const { return dims_.bands; }
  Index height() const { return dims_.height; }
  Index width() const { return dims_.width; }
  Index pixels() const { return dims_.pixels(); }
  Index size() const { return dims_.size(); }

  /// Matricized B x N view.
  const Matrix& matrix() const { return data_; }
  Matrix& matrix() { return data_; }

  const Scalar* data() const { return data_.data(); }
  Scalar* data() { return data_.data(); }

  Scalar operator()(Index band, Index row, Index col) const {
    return data_(band, row * dims_.width + col);
  }
  Scalar& operator()(Index band, Index row, Index col) {
    return data_(band, row * dims_.width + col);
  }

  ConstPlaneMap plane(Index band) const {
    return ConstPlaneMap(data_.data() + band * pixels(), dims_.height, dims_.width);
  }
  PlaneMap plane(Index band) {
    return PlaneMap(data_.data() + band * pixels(), dims_.height, dims_.width);
  }

 private:
  static bool is_finite(const Scalar& v) {
    if constexpr (std::is_floating_point_v<Scalar>) {
      return std::isfinite(v);
    } else {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    }
  }

  Dims dims_;
  Matrix data_;
};

using HsiCube = Cube<double>;
using FreqCube = Cube<Complex>;

HsiCube cube_new(Index bands, Index height, Index width, double fill);

template <typename Scalar>
Cube<Scalar> operator+(const Cube<Scalar>& a, const Cube<Scalar>& b) {
  if (a.dims() != b.dims()) throw DimensionError("cube sum: " + a.dims().str() + " vs " + b.dims().str());
  return Cube<Scalar>(a.dims(), a.matrix() + b.matrix());
}

template <typename Scalar>
Cube<Scalar> operator-(const Cube<Scalar>& a, const Cube<Scalar>& b) {
  if (a.dims() != b.dims()) throw DimensionError("cube difference: " + a.dims().str() + " vs " + b.dims().str());
  return Cube<Scalar>(a.dims(), a.matrix() - b.matrix());
}

template <typename Scalar>
Cube<Scalar> operator*(double alpha, const Cube<Scalar>& a) {
  return Cube<Scalar>(a.dims(), alpha * a.matrix());
}

/// Frobenius inner product of two real cubes of equal shape.
double dot(const HsiCube& a, const HsiCube& b);
double squared_norm(const HsiCube& a);
double norm(const HsiCube& a);

/// Column-stacked vector x of the matricized cube: pixel-major, band fastest.
Eigen::VectorXd vectorize(const HsiCube& x);
HsiCube devectorize(const Eigen::VectorXd& v, const Dims& dims);

}  // namespace hsfuse
