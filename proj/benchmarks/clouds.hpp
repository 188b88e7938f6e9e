#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "demoedit/geometry.hpp"

namespace bench {

inline std::vector<demoedit::Vec3> blob(int n) {
  std::vector<demoedit::Vec3> pts;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    const demoedit::Vec3 u(r * std::cos(golden * i), r * std::sin(golden * i), z);
    const double radius = 0.05 * (1.0 + 0.25 * u.x() * u.y() + 0.3 * std::max(0.0, u.x()) * u.z());
    pts.push_back(radius * demoedit::Vec3(1.6 * u.x(), u.y(), 0.6 * u.z()));
  }
  return pts;
}

inline std::vector<demoedit::Vec3> uniform_cloud(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<demoedit::Vec3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return pts;
}

}  // namespace bench
