#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "demoedit/camera.hpp"
#include "demoedit/image.hpp"
#include "demoedit/mesh.hpp"
#include "demoedit/robot.hpp"

namespace demoedit {

/// Per-pixel depth in meters; +inf where nothing was drawn.
using DepthLayer = Image<double, 1>;

struct RenderLayer {
  RgbImage rgb;
  DepthLayer depth;
  Mask coverage;  // set exactly where depth is finite

  RenderLayer() = default;
  RenderLayer(int width, int height)
      : rgb(width, height), depth(width, height, std::numeric_limits<double>::infinity()), coverage(width, height) {}
};

enum class EditMode { InpaintFmm, MaskOnly, NoEdit };

std::string_view to_string(EditMode mode);
/// Accepts "inpaint_fmm", "mask_only", "no_edit". Throws InvalidArgument.
EditMode parse_edit_mode(std::string_view text);

/// A mesh placed in the camera frame.
struct MeshInstance {
  const TriangleMesh* mesh = nullptr;
  RigidTransform mesh_to_camera;
};

/// Unit vector from the surface toward the fixed directional light, camera frame.
Vec3 light_direction();
/// Flat Lambertian shade of one face with camera-frame normal `n`.
Color shade(const Color& base, const Vec3& n);

/// Z-buffered rasterization of the instances into a fresh layer. Pixel (x, y)
/// samples image coordinate (x, y); coverage follows the top-left fill rule.
/// Triangles are clipped against the z = 1 cm near plane.
RenderLayer rasterize(std::span<const MeshInstance> instances, const Intrinsics& k);

/// Places every robot mesh (base, links, hand, fingers at opening g).
/// Instances point into `chain`, which must outlive them.
std::vector<MeshInstance> robot_instances(const KinematicChain& chain, const JointConfig& q, double g,
                                          const Extrinsics& e);

RenderLayer render_robot(const KinematicChain& chain, const JointConfig& q, double g, const Intrinsics& k,
                         const Extrinsics& e);

/// Draws a covered robot pixel when the scene depth is missing (0) or the
/// robot is in front: robot_depth < scene_depth + eps. Throws DimensionMismatch.
RgbImage composite(const RgbImage& scene_rgb, const DepthImage& scene_depth, const RenderLayer& layer, double eps);

/// Fast-marching inpainting. Masked pixels are filled in order of increasing
/// distance from the mask boundary, each as a normalized weighted average of
/// already-known pixels within `radius`. Throws DimensionMismatch.
RgbImage inpaint_fmm(const RgbImage& rgb, const Mask& mask, int radius);

RgbImage mask_out(const RgbImage& rgb, const Mask& mask);

/// Dilation with a (2k+1) x (2k+1) square structuring element.
Mask dilate_mask(const Mask& mask, int k);

}  // namespace demoedit
