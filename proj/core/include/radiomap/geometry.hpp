#pragma once

#include <cmath>
#include <cstdint>

namespace radiomap {

// Planar position in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline bool is_finite(const Position& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

inline double squared_distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Position& a, const Position& b) {
  return std::sqrt(squared_distance(a, b));
}

// Bit-exact coincidence; used to detect repeated expansion centers.
inline bool same_position(const Position& a, const Position& b) {
  return a.x == b.x && a.y == b.y;
}

// Axis-aligned rectangle (meters), closed on all sides.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }

  bool contains(const Position& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }

  Position clamp(const Position& p) const {
    return {std::fmin(std::fmax(p.x, xmin), xmax),
            std::fmin(std::fmax(p.y, ymin), ymax)};
  }

  bool degenerate() const { return !(xmax > xmin) || !(ymax > ymin); }
};

// A timestamped noisy path loss sample reported by a mobile user.
// path_loss_db >= 0; time_index strictly increasing within a stream.
struct Measurement {
  Position position;
  double path_loss_db = 0.0;
  std::int64_t time_index = 0;
};

}  // namespace radiomap
