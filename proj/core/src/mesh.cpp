#include "demoedit/mesh.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "demoedit/error.hpp"

namespace demoedit {

void TriangleMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& t : triangles) {
    for (int i : t) {
      if (i < 0 || i >= n) throw Error(ErrorCode::InvalidArgument, "triangle index out of range");
    }
  }
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw Error(ErrorCode::InvalidArgument, "mesh vertex is not finite");
  }
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

TriangleMesh read_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  char header[80];
  std::uint32_t count = 0;
  in.read(header, 80);
  in.read(reinterpret_cast<char*>(&count), 4);
  if (!in) throw Error(ErrorCode::SchemaError, path.string() + ": truncated STL header");
  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(count) * 3);
  mesh.triangles.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    float rec[12];
    std::uint16_t attr = 0;
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    in.read(reinterpret_cast<char*>(&attr), 2);
    if (!in) throw Error(ErrorCode::SchemaError, path.string() + ": truncated STL facet " + std::to_string(t));
    const int base = static_cast<int>(mesh.vertices.size());
    for (int v = 0; v < 3; ++v) mesh.vertices.emplace_back(rec[3 + 3 * v], rec[4 + 3 * v], rec[5 + 3 * v]);
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  return mesh;
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  TriangleMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x = 0, y = 0, z = 0;
      if (!(ss >> x >> y >> z)) throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no));
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ss >> tok) {
        const int idx = std::stoi(tok.substr(0, tok.find('/')));
        face.push_back(idx < 0 ? static_cast<int>(mesh.vertices.size()) + idx : idx - 1);
      }
      if (face.size() < 3) throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no));
      for (std::size_t i = 1; i + 1 < face.size(); ++i) mesh.triangles.push_back({face[0], face[i], face[i + 1]});
    }
  }
  mesh.validate();
  return mesh;
}

}  // namespace

TriangleMesh read_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".stl") return read_stl(path);
  if (ext == ".obj") return read_obj(path);
  throw Error(ErrorCode::SchemaError, "unsupported mesh format: " + path.string());
}

void write_stl(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  char header[80] = {};
  std::strncpy(header, "demoedit binary STL", sizeof(header) - 1);
  out.write(header, 80);
  const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(t[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(t[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(t[2])];
    Vec3 n = (b - a).cross(c - a);
    if (n.norm() > 0.0) n.normalize();
    float rec[12];
    const Vec3* src[4] = {&n, &a, &b, &c};
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 3; ++i) rec[3 * k + i] = static_cast<float>((*src[k])(i));
    }
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(9);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& T) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = apply(T, v);
  return out;
}

void append(TriangleMesh& into, const TriangleMesh& other) {
  const int base = static_cast<int>(into.vertices.size());
  into.vertices.insert(into.vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& t : other.triangles) into.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

TriangleMesh make_box(const Vec3& size) {
  TriangleMesh m;
  const Vec3 h = 0.5 * size;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

TriangleMesh make_cylinder(double radius, double z0, double z1, int segments) {
  TriangleMesh m;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z0);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z1);
  }
  const int bottom = static_cast<int>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, z0);
  m.vertices.emplace_back(0.0, 0.0, z1);
  const int top = bottom + 1;
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
    m.triangles.push_back({bottom, b1, b0});
    m.triangles.push_back({top, t0, t1});
  }
  return m;
}

}  // namespace demoedit
