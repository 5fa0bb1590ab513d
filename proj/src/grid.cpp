#include "vin/grid.hpp"

#include <algorithm>
#include <cmath>

namespace vin {

namespace {

void require_positive(int value, const char* what) {
  if (value <= 0) {
    throw ConfigurationError(std::string("grid ") + what + " must be positive, got " +
                             std::to_string(value));
  }
}

}  // namespace

Grid2::Grid2(int width, int height, double fill) : width_(width), height_(height) {
  require_positive(width, "width");
  require_positive(height, "height");
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Grid3::Grid3(int width, int height, int orientations, double fill)
    : width_(width), height_(height), orientations_(orientations) {
  require_positive(width, "width");
  require_positive(height, "height");
  require_positive(orientations, "orientation count");
  values_.assign(static_cast<std::size_t>(width) * height * orientations, fill);
}

bool Grid3::is_distribution(double tol) const {
  double total = 0.0;
  for (double v : values_) {
    if (v < 0.0 || !std::isfinite(v)) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= tol;
}

std::size_t Grid3::argmax() const {
  return static_cast<std::size_t>(
      std::distance(values_.begin(), std::max_element(values_.begin(), values_.end())));
}

Grid4::Grid4(int width, int height, int orientations, int actions, double fill)
    : width_(width), height_(height), orientations_(orientations), actions_(actions) {
  require_positive(width, "width");
  require_positive(height, "height");
  require_positive(orientations, "orientation count");
  require_positive(actions, "action count");
  values_.assign(static_cast<std::size_t>(width) * height * orientations * actions, fill);
}

}  // namespace vin
