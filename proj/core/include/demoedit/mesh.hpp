#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "demoedit/geometry.hpp"

namespace demoedit {

using Color = std::array<std::uint8_t, 3>;

/// Indexed triangle mesh with one flat color.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  Color color{200, 200, 200};

  /// Throws InvalidArgument on out-of-range indices or non-finite vertices.
  void validate() const;
};

/// Loads binary STL or OBJ, chosen by file extension. Polygonal OBJ faces are
/// fan-triangulated.
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_stl(const std::filesystem::path& path, const TriangleMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& T);
void append(TriangleMesh& into, const TriangleMesh& other);

/// Axis-aligned box centered at the origin.
TriangleMesh make_box(const Vec3& size);
/// Cylinder along +z from z0 to z1.
TriangleMesh make_cylinder(double radius, double z0, double z1, int segments = 16);

}  // namespace demoedit
