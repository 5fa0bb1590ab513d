#include "vin/render.hpp"

#include <algorithm>
#include <cmath>

namespace vin {

namespace {

std::uint8_t channel(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Rgb hsv_to_rgb(double hue_degrees) {
  // Saturation and value are 1.
  const double h = hue_degrees / 60.0;
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h) % 6) {
    case 0: r = 1; g = x; break;
    case 1: r = x; g = 1; break;
    case 2: g = 1; b = x; break;
    case 3: g = x; b = 1; break;
    case 4: r = x; b = 1; break;
    default: r = 1; b = x; break;
  }
  return {channel(r), channel(g), channel(b)};
}

}  // namespace

std::vector<Rgb> time_colormap(int horizon) {
  std::vector<Rgb> out;
  for (int t = 0; t <= horizon; ++t) {
    const double frac = horizon == 0 ? 0.0 : static_cast<double>(t) / horizon;
    out.push_back(hsv_to_rgb(240.0 * (1.0 - frac)));
  }
  return out;
}

RenderedFrame render_occupancy(const std::vector<Grid2>& occupancy,
                               const std::vector<std::string>& map, int horizon, int cell_px) {
  if (map.empty()) throw ConfigurationError("cannot render an empty map");
  if (static_cast<int>(occupancy.size()) != horizon + 1) {
    throw ConfigurationError("occupancy sequence does not cover the horizon");
  }
  if (cell_px < 1) throw ConfigurationError("cell size must be positive");
  RenderedFrame f;
  f.columns = static_cast<int>(map.front().size());
  f.rows = static_cast<int>(map.size());
  f.cell_px = cell_px;
  f.latest.assign(static_cast<std::size_t>(f.columns) * f.rows, -1);
  f.alpha.assign(f.latest.size(), 0.0);
  for (int t = 0; t <= horizon; ++t) {
    const Grid2& occ = occupancy[t];
    if (occ.width() != f.columns || occ.height() != f.rows) {
      throw ConfigurationError("occupancy grid does not match the map");
    }
    for (std::size_t c = 0; c < occ.size(); ++c) {
      if (occ[c] > kDisplayThreshold) {
        f.latest[c] = t;
        f.alpha[c] = std::min(occ[c], 1.0);
      }
    }
  }

  const auto colors = time_colormap(horizon);
  const int width_px = f.columns * cell_px;
  f.pixels.resize(static_cast<std::size_t>(width_px) * f.rows * cell_px * 3);
  for (int y = 0; y < f.rows; ++y) {
    for (int x = 0; x < f.columns; ++x) {
      const std::size_t c = static_cast<std::size_t>(y) * f.columns + x;
      Rgb px{255, 255, 255};
      if (map[y][x] == '#') {
        px = {0, 0, 0};
      } else if (f.latest[c] >= 0) {
        const Rgb base = colors[f.latest[c]];
        const double a = f.alpha[c];
        auto blend = [a](std::uint8_t v) {
          return static_cast<std::uint8_t>(std::lround(a * v + (1.0 - a) * 255.0));
        };
        px = {blend(base.r), blend(base.g), blend(base.b)};
      }
      for (int dy = 0; dy < cell_px; ++dy) {
        for (int dx = 0; dx < cell_px; ++dx) {
          const std::size_t p =
              (static_cast<std::size_t>(y * cell_px + dy) * width_px + x * cell_px + dx) * 3;
          f.pixels[p] = px.r;
          f.pixels[p + 1] = px.g;
          f.pixels[p + 2] = px.b;
        }
      }
    }
  }
  return f;
}

RenderedFrame render(const Trajectory& trajectory, const std::vector<std::string>& map,
                     int horizon, int cell_px) {
  std::vector<Grid2> occupancy;
  for (int t = 0; t <= horizon; ++t) occupancy.push_back(soft_occupancy(trajectory, t));
  return render_occupancy(occupancy, map, horizon, cell_px);
}

std::string RenderedFrame::ppm() const {
  std::string out = "P6\n" + std::to_string(columns * cell_px) + " " +
                    std::to_string(rows * cell_px) + "\n255\n";
  out.append(pixels.begin(), pixels.end());
  return out;
}

std::string RenderedFrame::ascii(const std::vector<std::string>& map) const {
  static constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < columns; ++x) {
      const int t = latest[static_cast<std::size_t>(y) * columns + x];
      if (map[y][x] == '#') {
        out += '#';
      } else if (t < 0) {
        out += '.';
      } else {
        out += t < 36 ? kDigits[t] : '*';
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace vin
