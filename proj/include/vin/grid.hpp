#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vin/error.hpp"

namespace vin {

/// Planar field over (x, y).
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  double& operator()(int x, int y) { return values_[index(x, y)]; }
  double operator()(int x, int y) const { return values_[index(x, y)]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  std::vector<double>& storage() { return values_; }
  const std::vector<double>& storage() const { return values_; }

  bool same_shape(const Grid2& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Scalar field over the (x, y, orientation) state space. Orientation is the
/// fastest-varying axis.
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int width, int height, int orientations, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int orientations() const { return orientations_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int x, int y, int theta) const {
    return (static_cast<std::size_t>(y) * width_ + x) * orientations_ + theta;
  }
  double& operator()(int x, int y, int theta) { return values_[index(x, y, theta)]; }
  double operator()(int x, int y, int theta) const {
    return values_[index(x, y, theta)];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  std::vector<double>& storage() { return values_; }
  const std::vector<double>& storage() const { return values_; }

  bool same_shape(const Grid3& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           orientations_ == other.orientations_;
  }
  /// Non-negative entries summing to one within `tol`.
  bool is_distribution(double tol = 1e-9) const;
  /// Lowest linear index holding the maximum.
  std::size_t argmax() const;

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int orientations_ = 0;
  std::vector<double> values_;
};

/// Grid3 extended by an action axis. The action axis belongs to a single
/// planning volume; it is not a batch dimension.
class Grid4 {
 public:
  Grid4() = default;
  Grid4(int width, int height, int orientations, int actions, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int orientations() const { return orientations_; }
  int actions() const { return actions_; }
  std::size_t size() const { return values_.size(); }
  std::size_t state_count() const {
    return static_cast<std::size_t>(width_) * height_ * orientations_;
  }

  std::size_t index(std::size_t state, int action) const {
    return state * actions_ + action;
  }
  std::size_t index(int x, int y, int theta, int action) const {
    return index((static_cast<std::size_t>(y) * width_ + x) * orientations_ + theta,
                 action);
  }
  double& operator()(int x, int y, int theta, int a) {
    return values_[index(x, y, theta, a)];
  }
  double operator()(int x, int y, int theta, int a) const {
    return values_[index(x, y, theta, a)];
  }
  double& at(std::size_t state, int action) { return values_[index(state, action)]; }
  double at(std::size_t state, int action) const {
    return values_[index(state, action)];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  std::vector<double>& storage() { return values_; }
  const std::vector<double>& storage() const { return values_; }

  bool matches(const Grid3& g) const {
    return width_ == g.width() && height_ == g.height() &&
           orientations_ == g.orientations();
  }
  friend bool operator==(const Grid4&, const Grid4&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int orientations_ = 0;
  int actions_ = 0;
  std::vector<double> values_;
};

}  // namespace vin
