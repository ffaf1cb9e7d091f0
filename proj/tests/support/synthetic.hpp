#pragma once

// Synthetic straight-line trajectory corpus: eight compass headings realized
// as valid 2D-nav action sequences (diagonals alternate their two cardinal
// moves). Used as VAE training oracles.

#include <stdexcept>
#include <vector>

#include "sectar/rng.hpp"
#include "sectar/trajectory.hpp"

namespace synthetic {

using sectar::Rng;
using sectar::Tensor;
using sectar::Trajectory;

// direction 0..7 = E, NE, N, NW, W, SW, S, SE; starts at (x0, y0), never
// clipped (callers must keep the whole line inside the arena).
inline Trajectory line_trajectory(int direction, int steps, double delta,
                                  double x0, double y0) {
  if (direction < 0 || direction > 7) throw std::invalid_argument("bad direction");
  Trajectory t;
  t.states = Tensor({steps + 1, 2});
  t.actions = Tensor({steps, 1});
  double x = x0, y = y0;
  t.states.at(0, 0) = x;
  t.states.at(0, 1) = y;
  for (int k = 0; k < steps; ++k) {
    int a = 0;
    switch (direction) {
      case 0: a = 0; break;
      case 1: a = (k % 2 == 0) ? 0 : 1; break;
      case 2: a = 1; break;
      case 3: a = (k % 2 == 0) ? 2 : 1; break;
      case 4: a = 2; break;
      case 5: a = (k % 2 == 0) ? 2 : 3; break;
      case 6: a = 3; break;
      case 7: a = (k % 2 == 0) ? 0 : 3; break;
    }
    switch (a) {
      case 0: x += delta; break;
      case 1: y += delta; break;
      case 2: x -= delta; break;
      case 3: y -= delta; break;
    }
    t.actions.at(k, 0) = a;
    t.states.at(k + 1, 0) = x;
    t.states.at(k + 1, 1) = y;
  }
  return t;
}

// per_direction lines per heading with uniformly sampled starts, each line
// shifted so it stays inside [-1, 1]^2 with a small margin.
inline std::vector<Trajectory> line_dataset(int per_direction, int steps,
                                            double delta, Rng& rng) {
  std::vector<Trajectory> out;
  for (int d = 0; d < 8; ++d) {
    Trajectory probe = line_trajectory(d, steps, delta, 0.0, 0.0);
    double mnx = 0, mxx = 0, mny = 0, mxy = 0;
    for (int t = 0; t <= steps; ++t) {
      mnx = std::min(mnx, probe.states.at(t, 0));
      mxx = std::max(mxx, probe.states.at(t, 0));
      mny = std::min(mny, probe.states.at(t, 1));
      mxy = std::max(mxy, probe.states.at(t, 1));
    }
    const double m = 0.02;
    for (int i = 0; i < per_direction; ++i) {
      double x0 = rng.uniform(-1.0 + m - mnx, 1.0 - m - mxx);
      double y0 = rng.uniform(-1.0 + m - mny, 1.0 - m - mxy);
      out.push_back(line_trajectory(d, steps, delta, x0, y0));
    }
  }
  return out;
}

}  // namespace synthetic
