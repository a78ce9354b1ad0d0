#pragma once

// Locating the fidelity maximum and the F > ½ windows of a periodic curve.
// The fidelity peak is only ~χ⁻¹Θ wide in scaled time (~10⁻³ rad for the
// reference mirror), so a uniform grid alone misses it: grids get extra
// points packed geometrically towards both ends, and extrema and crossings
// are refined on the bracketing samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mirrorport {

/// Uniform grid on [start, stop] plus `edge_points` points on each side at
/// geometrically shrinking distance from the ends (down to 1e-9·span).
template <typename T>
std::vector<T> sweep_grid(T start, T stop, std::size_t points, std::size_t edge_points = 0) {
  using std::pow;
  if (points < 2) throw std::invalid_argument("sweep grid needs at least 2 points");
  if (!(stop > start)) throw std::invalid_argument("sweep grid needs stop > start");
  std::vector<T> grid;
  grid.reserve(points + 2 * edge_points);
  const T span = stop - start;
  for (std::size_t i = 0; i < points; ++i) grid.push_back(start + span * T(i) / T(points - 1));
  for (std::size_t i = 0; i < edge_points; ++i) {
    // distance from 1e-9·span to 0.01·span
    const T frac = edge_points > 1 ? T(i) / T(edge_points - 1) : T(0);
    const T d = span * pow(T(10), T(-9) + T(7) * frac);
    grid.push_back(start + d);
    grid.push_back(stop - d);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

template <typename T>
struct CurveSummary {
  T max_value{0};
  T argmax{0};
  T window_measure{0};   // measure of {x : f(x) > threshold}
  std::size_t window_count{0};
};

/// Golden-section search for a maximum inside [lo, hi].
template <typename T>
std::pair<T, T> golden_max(const std::function<T(T)>& f, T lo, T hi, int iterations = 120) {
  using std::sqrt;
  const T r = (sqrt(T(5)) - T(1)) / T(2);
  T a = lo, b = hi;
  T x1 = b - r * (b - a), x2 = a + r * (b - a);
  T f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations && b - a > T(0); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Root of g on [lo, hi] with g(lo) and g(hi) of opposite sign.
template <typename T>
T bisect(const std::function<T(T)>& g, T lo, T hi, int iterations = 200) {
  bool lo_positive = g(lo) > T(0);
  for (int i = 0; i < iterations; ++i) {
    const T mid = lo + (hi - lo) / T(2);
    if (mid <= lo || mid >= hi) break;
    if ((g(mid) > T(0)) == lo_positive)
      lo = mid;
    else
      hi = mid;
  }
  return lo + (hi - lo) / T(2);
}

/// Maximum and threshold windows of f from its samples on `grid` (ascending),
/// refined with golden-section and bisection on the bracketing intervals.
template <typename T>
CurveSummary<T> analyze_curve(const std::function<T(T)>& f, const std::vector<T>& grid,
                              const std::vector<T>& values, T threshold) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("analyze_curve: need matching grid and values");
  CurveSummary<T> s;
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  s.max_value = values[best];
  s.argmax = grid[best];
  const T lo = grid[best == 0 ? 0 : best - 1];
  const T hi = grid[std::min(best + 1, grid.size() - 1)];
  if (hi > lo) {
    const auto [x, v] = golden_max(f, lo, hi);
    if (v > s.max_value) {
      s.max_value = v;
      s.argmax = x;
    }
  }

  const auto g = [&](T x) { return f(x) - threshold; };
  bool inside = values.front() > threshold;
  T entered = grid.front();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool now = values[i] > threshold;
    if (now == inside) continue;
    const T cross = bisect<T>(g, grid[i - 1], grid[i]);
    if (now) {
      entered = cross;
    } else {
      s.window_measure += cross - entered;
      ++s.window_count;
    }
    inside = now;
  }
  if (inside) {
    s.window_measure += grid.back() - entered;
    ++s.window_count;
  }
  return s;
}

}  // namespace mirrorport
