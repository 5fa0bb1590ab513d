#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vin/executor.hpp"
#include "vin/grid.hpp"

namespace vin {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// T + 1 fully saturated colors with hues evenly spaced from blue (t = 0) to
/// red (t = T).
std::vector<Rgb> time_colormap(int horizon);

/// Occupancy below this weight is not drawn.
inline constexpr double kDisplayThreshold = 0.01;

/// One robot's trajectory over the map. Each cell shows the latest timestep
/// the robot occupies it, blended over white by the occupancy weight.
struct RenderedFrame {
  int columns = 0;
  int rows = 0;
  int cell_px = 0;
  /// Per cell: latest drawn timestep, or -1.
  std::vector<int> latest;
  /// Per cell: occupancy weight at `latest`.
  std::vector<double> alpha;
  /// Row-major RGB triples, (columns * cell_px) x (rows * cell_px).
  std::vector<std::uint8_t> pixels;

  /// Binary portable pixmap: "P6\n<w> <h>\n255\n" followed by RGB bytes.
  std::string ppm() const;
  /// '#' obstacle, '.' free, otherwise the timestep in base 36 ('*' beyond).
  std::string ascii(const std::vector<std::string>& map) const;
};

RenderedFrame render(const Trajectory& trajectory, const std::vector<std::string>& map,
                     int horizon, int cell_px = 16);

/// Same from per-timestep planar occupancies (t = 0..horizon).
RenderedFrame render_occupancy(const std::vector<Grid2>& occupancy,
                               const std::vector<std::string>& map, int horizon,
                               int cell_px = 16);

}  // namespace vin
