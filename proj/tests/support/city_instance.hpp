// A 12-point instance with hand-placed known structure: four tight groups
// whose first-level tree weights are {1}, {3,4,5,7}, {2}, {1,2} and whose
// group centers sit 30 and 16 apart, so every compactness, dispersion, and
// HCI value is known in closed form. Points are interleaved so the raw order
// does not coincide with the organized order.

#pragma once

#include <vector>

#include "bfc/data.hpp"

namespace testdata {

struct CityInstance {
  bfc::DataMatrix points;
  // Cluster ids at level 1 in the interleaved input order.
  std::vector<std::uint32_t> level1_assignment;
};

inline CityInstance make_city_instance() {
  // Group A: pair at distance 1, centered on (0, 0).
  // Group B: five-point zigzag with tree weights 7,4,3,5, centered on (0, 30).
  // Group C: pair at distance 2, centered on (100, 0).
  // Group D: three-point line with gaps 2,1, centered on (100, 16).
  const double b[5][2] = {{-6.8, 33.4}, {0.2, 33.4}, {0.2, 29.4}, {3.2, 29.4}, {3.2, 24.4}};
  const double a[2][2] = {{-0.5, 0.0}, {0.5, 0.0}};
  const double c[2][2] = {{99.0, 0.0}, {101.0, 0.0}};
  const double d[3][2] = {{295.0 / 3.0, 16.0}, {301.0 / 3.0, 16.0}, {304.0 / 3.0, 16.0}};

  CityInstance inst;
  // Interleaved: b0 a0 d0 c0 b1 a1 d1 c1 b2 b3 d2 b4
  const double* rows[12] = {b[0], a[0], d[0], c[0], b[1], a[1],
                            d[1], c[1], b[2], b[3], d[2], b[4]};
  for (const double* r : rows) inst.points.append_row({r, 2});
  inst.level1_assignment = {0, 1, 2, 3, 0, 1, 2, 3, 0, 0, 2, 0};
  return inst;
}

}  // namespace testdata
