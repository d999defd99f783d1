#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>

namespace swarm {

/// Integer grid coordinate. +x is east, +y is north; azimuths are measured
/// counterclockwise from +x.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
  friend constexpr auto operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
  constexpr Cell operator+(const Cell& o) const { return {x + o.x, y + o.y}; }
  constexpr Cell operator-(const Cell& o) const { return {x - o.x, y - o.y}; }
};

constexpr int chebyshev(Cell a, Cell b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

inline double euclidean(Cell a, Cell b) {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

enum class Side { Left, Right };

constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

/// Map any angle onto [0, 360).
inline double normalize_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

/// Smallest absolute angular difference, in [0, 180].
inline double angular_distance(double a, double b) {
  const double d = normalize_degrees(a - b);
  return d > 180.0 ? 360.0 - d : d;
}

/// One of the eight grid headings, stored as an octant index (heading = 45° × octant).
class Heading {
 public:
  constexpr Heading() = default;
  constexpr explicit Heading(int octant) : octant_(((octant % 8) + 8) % 8) {}

  static constexpr Heading from_degrees_exact(int deg) { return Heading(deg / 45); }

  constexpr int octant() const { return octant_; }
  constexpr int degrees() const { return octant_ * 45; }
  constexpr bool cardinal() const { return octant_ % 2 == 0; }

  constexpr Cell step() const { return kSteps[static_cast<std::size_t>(octant_)]; }

  // Rotate by a multiple of 45°, counterclockwise positive.
  constexpr Heading rotated(int octants) const { return Heading(octant_ + octants); }

  // Unit offset to the given side, perpendicular to the heading.
  constexpr Cell side_step(Side s) const { return rotated(s == Side::Left ? 2 : -2).step(); }

  friend constexpr bool operator==(const Heading&, const Heading&) = default;

 private:
  static constexpr std::array<Cell, 8> kSteps{{
      {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  int octant_ = 0;
};

/// Nearest of the eight headings; exact half-way angles round up (counterclockwise).
inline Heading quantize(double deg) {
  const double n = normalize_degrees(deg);
  return Heading(static_cast<int>(std::floor(n / 45.0 + 0.5)));
}

struct Pose {
  Cell cell;
  Heading heading;

  friend constexpr bool operator==(const Pose&, const Pose&) = default;
};

}  // namespace swarm

template <>
struct std::hash<swarm::Cell> {
  std::size_t operator()(const swarm::Cell& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                                      static_cast<std::uint32_t>(c.y));
  }
};
