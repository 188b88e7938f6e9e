#include "demoedit/compositor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <tuple>

#include "demoedit/error.hpp"

namespace demoedit {

std::string_view to_string(EditMode mode) {
  switch (mode) {
    case EditMode::InpaintFmm: return "inpaint_fmm";
    case EditMode::MaskOnly: return "mask_only";
    case EditMode::NoEdit: return "no_edit";
  }
  return "unknown";
}

EditMode parse_edit_mode(std::string_view text) {
  if (text == "inpaint_fmm") return EditMode::InpaintFmm;
  if (text == "mask_only") return EditMode::MaskOnly;
  if (text == "no_edit") return EditMode::NoEdit;
  throw Error(ErrorCode::InvalidArgument, "unknown edit mode '" + std::string(text) + "'");
}

Vec3 light_direction() { return Vec3(0.3, -0.6, -0.75).normalized(); }

Color shade(const Color& base, const Vec3& n) {
  const double nn = n.norm();
  const double lambert = nn > 0.0 ? std::abs(n.dot(light_direction())) / nn : 0.0;
  const double intensity = 0.35 + 0.65 * lambert;
  Color c;
  for (std::size_t i = 0; i < 3; ++i) {
    c[i] = static_cast<std::uint8_t>(std::clamp(std::lround(base[i] * intensity), 0L, 255L));
  }
  return c;
}

namespace {

constexpr double kNearPlane = 0.01;

struct ScreenVertex {
  double x;
  double y;
  double inv_z;
};

inline double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Antisymmetric tie rule: exactly one of two triangles sharing an edge owns
// samples lying on it.
inline bool owns_edge(const ScreenVertex& a, const ScreenVertex& b) {
  const double dy = b.y - a.y;
  const double dx = b.x - a.x;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

void draw_triangle(RenderLayer& layer, ScreenVertex v0, ScreenVertex v1, ScreenVertex v2, const Color& color) {
  double area = edge(v0, v1, v2.x, v2.y);
  if (!(area != 0.0) || !std::isfinite(area)) return;
  if (area < 0.0) {
    std::swap(v1, v2);
    area = -area;
  }
  const int w = layer.rgb.width();
  const int h = layer.rgb.height();
  const double min_x = std::min({v0.x, v1.x, v2.x});
  const double max_x = std::max({v0.x, v1.x, v2.x});
  const double min_y = std::min({v0.y, v1.y, v2.y});
  const double max_y = std::max({v0.y, v1.y, v2.y});
  if (max_x < 0.0 || max_y < 0.0 || min_x > w - 1 || min_y > h - 1) return;
  const int x0 = std::max(0, static_cast<int>(std::ceil(min_x)));
  const int x1 = std::min(w - 1, static_cast<int>(std::floor(max_x)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
  const int y1 = std::min(h - 1, static_cast<int>(std::floor(max_y)));
  const bool own0 = owns_edge(v1, v2);
  const bool own1 = owns_edge(v2, v0);
  const bool own2 = owns_edge(v0, v1);

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double w0 = edge(v1, v2, x, y);
      const double w1 = edge(v2, v0, x, y);
      const double w2 = edge(v0, v1, x, y);
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      if ((w0 == 0.0 && !own0) || (w1 == 0.0 && !own1) || (w2 == 0.0 && !own2)) continue;
      const double inv_z = (w0 * v0.inv_z + w1 * v1.inv_z + w2 * v2.inv_z) / area;
      const double depth = 1.0 / inv_z;
      double& zbuf = layer.depth.at(x, y);
      if (depth < zbuf) {
        zbuf = depth;
        for (int c = 0; c < 3; ++c) layer.rgb.at(x, y, c) = color[static_cast<std::size_t>(c)];
        layer.coverage.at(x, y) = 255;
      }
    }
  }
}

// Clips a camera-frame triangle against z >= near; returns 0, 3 or 4 vertices.
int clip_near(const std::array<Vec3, 3>& tri, std::array<Vec3, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = tri[static_cast<std::size_t>(i)];
    const Vec3& b = tri[static_cast<std::size_t>((i + 1) % 3)];
    const bool a_in = a.z() >= kNearPlane;
    const bool b_in = b.z() >= kNearPlane;
    if (a_in) out[static_cast<std::size_t>(n++)] = a;
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      Vec3 p = a + t * (b - a);
      p.z() = kNearPlane;
      out[static_cast<std::size_t>(n++)] = p;
    }
  }
  return n;
}

}  // namespace

RenderLayer rasterize(std::span<const MeshInstance> instances, const Intrinsics& k) {
  k.validate();
  RenderLayer layer(k.width, k.height);
  for (const auto& inst : instances) {
    if (inst.mesh == nullptr) continue;
    const TriangleMesh& mesh = *inst.mesh;
    std::vector<Vec3> cam(mesh.vertices.size());
    for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = apply(inst.mesh_to_camera, mesh.vertices[i]);
    for (const auto& t : mesh.triangles) {
      const std::array<Vec3, 3> tri{cam[static_cast<std::size_t>(t[0])], cam[static_cast<std::size_t>(t[1])],
                                    cam[static_cast<std::size_t>(t[2])]};
      const Vec3 normal = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
      if (normal.squaredNorm() == 0.0) continue;
      const Color color = shade(mesh.color, normal);
      std::array<Vec3, 4> poly;
      const int n = clip_near(tri, poly);
      if (n < 3) continue;
      std::array<ScreenVertex, 4> sv;
      for (int i = 0; i < n; ++i) {
        const Vec3& p = poly[static_cast<std::size_t>(i)];
        sv[static_cast<std::size_t>(i)] = {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy, 1.0 / p.z()};
      }
      for (int i = 1; i + 1 < n; ++i) {
        draw_triangle(layer, sv[0], sv[static_cast<std::size_t>(i)], sv[static_cast<std::size_t>(i + 1)], color);
      }
    }
  }
  return layer;
}

std::vector<MeshInstance> robot_instances(const KinematicChain& chain, const JointConfig& q, double g,
                                          const Extrinsics& e) {
  const FkResult fk = forward_kinematics(chain, q);
  const RigidTransform robot_to_camera = invert(e.camera_to_robot);
  std::vector<MeshInstance> out;
  if (chain.base_mesh) out.push_back({&*chain.base_mesh, robot_to_camera});
  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    if (chain.joints[i].mesh) out.push_back({&*chain.joints[i].mesh, robot_to_camera * fk.link_poses[i]});
  }
  const RigidTransform ee = robot_to_camera * fk.ee_pose;
  if (chain.gripper.hand_mesh) out.push_back({&*chain.gripper.hand_mesh, ee});
  if (chain.gripper.finger_mesh) {
    const double d = gripper_joint_from_width(chain, g);
    const RigidTransform plus_y = RigidTransform::from_translation(Vec3(0.0, d, 0.0));
    const RigidTransform flip = RigidTransform::from_rotation(axis_angle(Vec3::UnitZ(), M_PI));
    out.push_back({&*chain.gripper.finger_mesh, ee * plus_y});
    out.push_back({&*chain.gripper.finger_mesh, ee * flip * plus_y});
  }
  return out;
}

RenderLayer render_robot(const KinematicChain& chain, const JointConfig& q, double g, const Intrinsics& k,
                         const Extrinsics& e) {
  const auto instances = robot_instances(chain, q, g, e);
  return rasterize(instances, k);
}

RgbImage composite(const RgbImage& scene_rgb, const DepthImage& scene_depth, const RenderLayer& layer, double eps) {
  if (!scene_rgb.same_size(scene_depth) || !scene_rgb.same_size(layer.rgb) || !scene_rgb.same_size(layer.depth) ||
      !scene_rgb.same_size(layer.coverage)) {
    throw Error(ErrorCode::DimensionMismatch, "composite inputs differ in size");
  }
  RgbImage out = scene_rgb;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (layer.coverage.at(x, y) == 0) continue;
      const std::uint16_t sd = scene_depth.at(x, y);
      if (sd == 0 || layer.depth.at(x, y) < depth_to_meters(sd) + eps) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = layer.rgb.at(x, y, c);
      }
    }
  }
  return out;
}

namespace {

enum : std::uint8_t { kKnown = 0, kBand = 1, kInside = 2 };
constexpr double kUnknownDistance = 1e6;

}  // namespace

RgbImage inpaint_fmm(const RgbImage& rgb, const Mask& mask, int radius) {
  if (!rgb.same_size(mask)) throw Error(ErrorCode::DimensionMismatch, "inpaint mask size differs from image");
  radius = std::max(radius, 1);
  const int W = rgb.width();
  const int H = rgb.height();
  const auto at = [W](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(W) + static_cast<std::size_t>(x); };

  std::vector<std::uint8_t> flag(rgb.pixel_count(), kKnown);
  std::vector<double> dist(rgb.pixel_count(), 0.0);
  std::vector<double> value(rgb.data().begin(), rgb.data().end());
  bool any = false;
  for (std::size_t i = 0; i < flag.size(); ++i) {
    if (mask.data()[i] != 0) {
      flag[i] = kInside;
      dist[i] = kUnknownDistance;
      any = true;
    }
  }
  if (!any) return rgb;

  using Entry = std::tuple<double, std::uint64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::uint64_t seq = 0;
  constexpr int kDx[4] = {-1, 1, 0, 0};
  constexpr int kDy[4] = {0, 0, -1, 1};
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (flag[at(x, y)] != kKnown) continue;
      for (int n = 0; n < 4; ++n) {
        const int nx = x + kDx[n], ny = y + kDy[n];
        if (nx >= 0 && ny >= 0 && nx < W && ny < H && flag[at(nx, ny)] == kInside) {
          flag[at(x, y)] = kBand;
          heap.emplace(0.0, seq++, at(x, y));
          break;
        }
      }
    }
  }

  const auto usable = [&](int x, int y) { return x >= 0 && y >= 0 && x < W && y < H && flag[at(x, y)] != kInside; };
  // Upwind eikonal update from one horizontal and one vertical neighbor.
  const auto solve = [&](int x1, int y1, int x2, int y2) {
    const bool k1 = usable(x1, y1);
    const bool k2 = usable(x2, y2);
    if (k1 && k2) {
      const double t1 = dist[at(x1, y1)];
      const double t2 = dist[at(x2, y2)];
      const double d = t1 - t2;
      if (std::abs(d) < std::sqrt(2.0)) {
        const double r = std::sqrt(2.0 - d * d);
        const double s = 0.5 * (t1 + t2 + r);
        if (s >= t1 && s >= t2) return s;
      }
      return 1.0 + std::min(t1, t2);
    }
    if (k1) return 1.0 + dist[at(x1, y1)];
    if (k2) return 1.0 + dist[at(x2, y2)];
    return kUnknownDistance;
  };
  std::vector<std::size_t> order;
  while (!heap.empty()) {
    const std::size_t idx = std::get<2>(heap.top());
    heap.pop();
    flag[idx] = kKnown;
    const int x = static_cast<int>(idx % static_cast<std::size_t>(W));
    const int y = static_cast<int>(idx / static_cast<std::size_t>(W));
    for (int n = 0; n < 4; ++n) {
      const int nx = x + kDx[n], ny = y + kDy[n];
      if (nx < 0 || ny < 0 || nx >= W || ny >= H || flag[at(nx, ny)] != kInside) continue;
      const double d = std::min({solve(nx - 1, ny, nx, ny - 1), solve(nx + 1, ny, nx, ny - 1),
                                 solve(nx - 1, ny, nx, ny + 1), solve(nx + 1, ny, nx, ny + 1)});
      dist[at(nx, ny)] = d;
      flag[at(nx, ny)] = kBand;
      order.push_back(at(nx, ny));
      heap.emplace(d, seq++, at(nx, ny));
    }
  }

  // Fill by increasing distance; a pixel only sees neighbors strictly nearer the boundary.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });
  const auto reached = [&](int x, int y) { return x >= 0 && y >= 0 && x < W && y < H && dist[at(x, y)] < kUnknownDistance; };
  const auto gradient = [&](int x, int y) {
    const double t = dist[at(x, y)];
    const auto axis = [&](int ax, int ay, int bx, int by) {
      const bool a = reached(ax, ay);
      const bool b = reached(bx, by);
      if (a && b) return 0.5 * (dist[at(bx, by)] - dist[at(ax, ay)]);
      if (b) return dist[at(bx, by)] - t;
      if (a) return t - dist[at(ax, ay)];
      return 0.0;
    };
    return Eigen::Vector2d(axis(x - 1, y, x + 1, y), axis(x, y - 1, x, y + 1));
  };
  const int r2 = radius * radius;
  for (const std::size_t p : order) {
    const int x = static_cast<int>(p % static_cast<std::size_t>(W));
    const int y = static_cast<int>(p / static_cast<std::size_t>(W));
    Eigen::Vector2d grad = gradient(x, y);
    const double gn = grad.norm();
    if (gn > 0.0) grad /= gn;
    const double tp = dist[p];
    double wsum = 0.0;
    double acc[3] = {0.0, 0.0, 0.0};
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        const int d2 = dx * dx + dy * dy;
        if (d2 == 0 || d2 > r2 || !reached(x + dx, y + dy)) continue;
        const std::size_t q = at(x + dx, y + dy);
        if (dist[q] >= tp) continue;
        const double len = std::sqrt(static_cast<double>(d2));
        // (p - q) points from the neighbor to the filled pixel.
        double dir = gn > 0.0 ? std::abs((-dx * grad.x() - dy * grad.y()) / len) : 1.0;
        if (dir <= 0.01) dir = 1e-6;
        const double w = dir * (1.0 / d2) * (1.0 / (1.0 + std::abs(dist[q] - tp)));
        wsum += w;
        for (int c = 0; c < 3; ++c) acc[c] += w * value[q * 3 + static_cast<std::size_t>(c)];
      }
    }
    if (wsum > 0.0) {
      for (int c = 0; c < 3; ++c) value[p * 3 + static_cast<std::size_t>(c)] = acc[c] / wsum;
    }
  }

  RgbImage out = rgb;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    if (mask.data()[i] == 0) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      out.data()[i * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::lround(value[i * 3 + c]), 0L, 255L));
    }
  }
  return out;
}

RgbImage mask_out(const RgbImage& rgb, const Mask& mask) {
  if (!rgb.same_size(mask)) throw Error(ErrorCode::DimensionMismatch, "mask size differs from image");
  RgbImage out = rgb;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    if (mask.data()[i] != 0) {
      for (std::size_t c = 0; c < 3; ++c) out.data()[i * 3 + c] = 0;
    }
  }
  return out;
}

Mask dilate_mask(const Mask& mask, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "dilation radius must be non-negative");
  const int W = mask.width();
  const int H = mask.height();
  Mask rows(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      std::uint8_t v = 0;
      for (int dx = std::max(0, x - k); dx <= std::min(W - 1, x + k) && v == 0; ++dx) v = mask.at(dx, y) ? 255 : 0;
      rows.at(x, y) = v;
    }
  }
  Mask out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      std::uint8_t v = 0;
      for (int dy = std::max(0, y - k); dy <= std::min(H - 1, y + k) && v == 0; ++dy) v = rows.at(x, dy);
      out.at(x, y) = v;
    }
  }
  return out;
}

}  // namespace demoedit
