#pragma once

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "tsrlab/errors.hpp"

namespace tsrlab::nn {

/// Dense row-major tensor of doubles. 64-bit throughout: the runtime exists
/// for exactness checks, not speed.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(numel_of(shape), 0.0) {}

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<int> s, double v) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }
  static Tensor scalar(double v) {
    Tensor t({1});
    t.data[0] = v;
    return t;
  }

  static std::int64_t numel_of(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  // [rows, cols]
  double& at2(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  double at2(int i, int j) const { return data[static_cast<std::size_t>(i) * shape[1] + j]; }

  // [channels, h, w]
  double& at3(int c, int i, int j) {
    return data[(static_cast<std::size_t>(c) * shape[1] + i) * shape[2] + j];
  }
  double at3(int c, int i, int j) const {
    return data[(static_cast<std::size_t>(c) * shape[1] + i) * shape[2] + j];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline void require_shape(const Tensor& t, std::initializer_list<int> s, const char* what) {
  if (t.shape != std::vector<int>(s)) fail(Errc::shape_mismatch, what);
}

}  // namespace tsrlab::nn
