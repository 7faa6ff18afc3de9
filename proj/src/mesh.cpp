#include "hopf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "hopf/error.hpp"

namespace hopf::surfaces {

namespace {

std::string edge_name(int a, int b) {
  return "(" + std::to_string(std::min(a, b)) + ", " + std::to_string(std::max(a, b)) + ")";
}

double corner_angle(const Eigen::Vector3d& at, const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  const Eigen::Vector3d a = p - at;
  const Eigen::Vector3d b = q - at;
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

double signed_volume(const TriMesh& m) {
  double vol = 0.0;
  for (const auto& f : m.faces) {
    vol += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
  }
  return vol;
}

TriMesh validate_mesh(TriMesh mesh) {
  const int nv = mesh.vertex_count();
  if (mesh.faces.empty()) throw MeshIngestError("mesh has no faces");
  std::vector<char> used(nv, 0);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      if (f[k] < 0 || f[k] >= nv) throw MeshIngestError("face references missing vertex " + std::to_string(f[k]));
      used[f[k]] = 1;
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) throw MeshIngestError("degenerate face with repeated vertex");
  }
  for (int v = 0; v < nv; ++v) {
    if (!used[v]) throw MeshIngestError("vertex " + std::to_string(v) + " is not referenced by any face");
  }
  struct EdgeUse {
    int faces = 0;
    int forward = 0;  // traversals from the smaller to the larger index
  };
  std::map<std::pair<int, int>, EdgeUse> edges;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      auto& e = edges[{std::min(a, b), std::max(a, b)}];
      ++e.faces;
      if (a < b) ++e.forward;
    }
  }
  for (const auto& [key, use] : edges) {
    const auto name = edge_name(key.first, key.second);
    if (use.faces == 1) throw MeshIngestError("open mesh: boundary edge " + name);
    if (use.faces > 2) throw MeshIngestError("non-manifold edge " + name + " borne by " + std::to_string(use.faces) + " faces");
    if (use.forward != 1) throw MeshIngestError("inconsistent orientation at edge " + name);
  }
  mesh.edge_count = static_cast<int>(edges.size());
  if (signed_volume(mesh) < 0.0) {
    for (auto& f : mesh.faces) std::swap(f[1], f[2]);
  }
  mesh.angle_defects.assign(nv, 2.0 * std::numbers::pi);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const int v = f[k];
      mesh.angle_defects[v] -=
          corner_angle(mesh.vertices[v], mesh.vertices[f[(k + 1) % 3]], mesh.vertices[f[(k + 2) % 3]]);
    }
  }
  return mesh;
}

double angle_defect(const TriMesh& m, int vertex) {
  if (vertex < 0 || vertex >= m.vertex_count()) throw InputError("vertex index out of range");
  if (static_cast<int>(m.angle_defects.size()) == m.vertex_count()) return m.angle_defects[vertex];
  double sum = 0.0;
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) {
      if (f[k] == vertex) {
        sum += corner_angle(m.vertices[vertex], m.vertices[f[(k + 1) % 3]], m.vertices[f[(k + 2) % 3]]);
      }
    }
  }
  return 2.0 * std::numbers::pi - sum;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<std::string> significant_lines(std::string_view payload) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(payload)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

TriMesh parse_off(const std::vector<std::string>& lines) {
  std::istringstream all;
  std::string joined;
  for (const auto& l : lines) joined += l + "\n";
  all.str(joined);
  std::string header;
  all >> header;
  if (header != "OFF") throw MeshIngestError("OFF payload must start with 'OFF'");
  long nv = -1;
  long nf = -1;
  long ne = -1;
  if (!(all >> nv >> nf >> ne) || nv < 0 || nf < 0) throw MeshIngestError("OFF: malformed count line");
  TriMesh mesh;
  mesh.vertices.resize(nv);
  for (long i = 0; i < nv; ++i) {
    auto& v = mesh.vertices[i];
    if (!(all >> v.x() >> v.y() >> v.z())) throw MeshIngestError("OFF: truncated vertex list");
  }
  mesh.faces.resize(nf);
  for (long i = 0; i < nf; ++i) {
    int k = 0;
    if (!(all >> k)) throw MeshIngestError("OFF: truncated face list");
    if (k != 3) throw MeshIngestError("OFF: only triangular faces are supported");
    auto& f = mesh.faces[i];
    if (!(all >> f[0] >> f[1] >> f[2])) throw MeshIngestError("OFF: truncated face");
    // Optional per-face colour values run to end of line; skip them.
    std::string rest;
    std::getline(all, rest);
  }
  return mesh;
}

int obj_index(const std::string& token, int vertex_count) {
  const auto slash = token.find('/');
  const int raw = std::stoi(token.substr(0, slash));
  if (raw > 0) return raw - 1;
  if (raw < 0) return vertex_count + raw;
  throw MeshIngestError("OBJ: face index 0 is invalid");
}

TriMesh parse_obj(const std::vector<std::string>& lines) {
  TriMesh mesh;
  for (const auto& line : lines) {
    std::istringstream in(line);
    std::string tag;
    in >> tag;
    if (tag == "v") {
      Eigen::Vector3d v;
      if (!(in >> v.x() >> v.y() >> v.z())) throw MeshIngestError("OBJ: malformed vertex record");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (in >> tok) tokens.push_back(tok);
      if (tokens.size() != 3) throw MeshIngestError("OBJ: only triangular faces are supported");
      const int nv = mesh.vertex_count();
      mesh.faces.push_back({obj_index(tokens[0], nv), obj_index(tokens[1], nv), obj_index(tokens[2], nv)});
    }
  }
  return mesh;
}

}  // namespace

TriMesh ingest_mesh(std::string_view payload) {
  const auto lines = significant_lines(payload);
  if (lines.empty()) throw MeshIngestError("empty mesh payload");
  std::istringstream first(lines.front());
  std::string tag;
  first >> tag;
  try {
    return validate_mesh(tag.rfind("OFF", 0) == 0 ? parse_off(lines) : parse_obj(lines));
  } catch (const std::invalid_argument&) {
    throw MeshIngestError("malformed numeric token in mesh payload");
  } catch (const std::out_of_range&) {
    throw MeshIngestError("numeric token out of range in mesh payload");
  }
}

TriMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ingest_mesh(buffer.str());
}

std::string to_off(const TriMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << ' ' << mesh.edge_count << '\n';
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Generators

TriMesh regular_tetrahedron() {
  TriMesh m;
  m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return validate_mesh(std::move(m));
}

TriMesh icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const int id = m.vertex_count() - 1;
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : m.faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return validate_mesh(std::move(m));
}

TriMesh grid_torus(int rings, int segments, double major, double minor) {
  TriMesh m;
  for (int i = 0; i < rings; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / segments;
      m.vertices.emplace_back((major + minor * std::cos(theta)) * std::cos(phi),
                              (major + minor * std::cos(theta)) * std::sin(phi), minor * std::sin(theta));
    }
  }
  auto id = [&](int i, int j) { return (i % rings) * segments + (j % segments); };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return validate_mesh(std::move(m));
}

TriMesh marching_tetrahedra(const ImplicitSurface& s, int cells) {
  if (s.ambient_dim() != 3) throw InputError("marching tetrahedra needs a level set in R^3");
  const Eigen::Vector3d lo = s.box_lo().head<3>();
  const Eigen::Vector3d hi = s.box_hi().head<3>();
  const Eigen::Vector3d extent = hi - lo;
  const double h = extent.maxCoeff() / cells;
  std::array<int, 3> count{};
  for (int a = 0; a < 3; ++a) count[a] = std::max(1, static_cast<int>(std::ceil(extent[a] / h)));
  const int nx = count[0] + 1;
  const int ny = count[1] + 1;
  const int nz = count[2] + 1;
  auto node_id = [&](int i, int j, int k) { return (static_cast<long>(k) * ny + j) * nx + i; };
  auto node_pos = [&](long id) {
    const long i = id % nx;
    const long j = (id / nx) % ny;
    const long k = id / (static_cast<long>(nx) * ny);
    return Eigen::Vector3d(lo.x() + i * h, lo.y() + j * h, lo.z() + k * h);
  };
  std::vector<double> values(static_cast<std::size_t>(nx) * ny * nz);
  double scale = 0.0;
  for (long id = 0; id < static_cast<long>(values.size()); ++id) {
    values[id] = s.value(Vec(node_pos(id)));
    scale = std::max(scale, std::abs(values[id]));
  }
  // Nodes exactly on the level set would give coincident vertices; nudge them
  // to the positive side.
  const double nudge = 1e-12 * (scale > 0.0 ? scale : 1.0);
  for (double& v : values) {
    if (std::abs(v) < nudge) v = nudge;
  }

  TriMesh mesh;
  std::unordered_map<long long, int> edge_vertex;
  const long long stride = static_cast<long long>(values.size());
  auto vertex_on_edge = [&](long a, long b) {
    if (a > b) std::swap(a, b);
    const long long key = a * stride + b;
    if (auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;
    const double va = values[a];
    const double vb = values[b];
    const double t = va / (va - vb);
    mesh.vertices.push_back(node_pos(a) + t * (node_pos(b) - node_pos(a)));
    const int idx = mesh.vertex_count() - 1;
    edge_vertex.emplace(key, idx);
    return idx;
  };
  auto midpoint = [&](long a, long b) -> Eigen::Vector3d { return 0.5 * (node_pos(a) + node_pos(b)); };
  // Orientation is decided on edge midpoints: moving a vertex along its edge
  // never changes the triangle's orientation relative to the tet nodes.
  using Edge = std::array<long, 2>;
  auto emit = [&](const Edge& e0, const Edge& e1, const Edge& e2, const Eigen::Vector3d& outward) {
    const Eigen::Vector3d m0 = midpoint(e0[0], e0[1]);
    const Eigen::Vector3d n = (midpoint(e1[0], e1[1]) - m0).cross(midpoint(e2[0], e2[1]) - m0);
    const int p = vertex_on_edge(e0[0], e0[1]);
    const int q = vertex_on_edge(e1[0], e1[1]);
    const int r = vertex_on_edge(e2[0], e2[1]);
    if (n.dot(outward) >= 0.0) {
      mesh.faces.push_back({p, q, r});
    } else {
      mesh.faces.push_back({p, r, q});
    }
  };

  // Freudenthal split: tets {0, e_a, e_a + e_b, 7} over axis permutations.
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < count[2]; ++k) {
    for (int j = 0; j < count[1]; ++j) {
      for (int i = 0; i < count[0]; ++i) {
        for (const auto& perm : kPerms) {
          std::array<int, 3> c{i, j, k};
          std::array<long, 4> tet{};
          tet[0] = node_id(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[perm[step]];
            tet[step + 1] = node_id(c[0], c[1], c[2]);
          }
          std::vector<long> pos;
          std::vector<long> neg;
          for (long id : tet) (values[id] >= 0.0 ? pos : neg).push_back(id);
          if (pos.empty() || neg.empty()) continue;
          Eigen::Vector3d pc = Eigen::Vector3d::Zero();
          Eigen::Vector3d nc = Eigen::Vector3d::Zero();
          for (long id : pos) pc += node_pos(id) / static_cast<double>(pos.size());
          for (long id : neg) nc += node_pos(id) / static_cast<double>(neg.size());
          const Eigen::Vector3d outward = pc - nc;
          if (pos.size() == 1 || neg.size() == 1) {
            const auto& lone = pos.size() == 1 ? pos : neg;
            const auto& others = pos.size() == 1 ? neg : pos;
            emit({lone[0], others[0]}, {lone[0], others[1]}, {lone[0], others[2]}, outward);
          } else {
            const Edge ac{pos[0], neg[0]}, ad{pos[0], neg[1]}, bd{pos[1], neg[1]}, bc{pos[1], neg[0]};
            emit(ac, ad, bd, outward);
            emit(ac, bd, bc, outward);
          }
        }
      }
    }
  }
  return validate_mesh(std::move(mesh));
}

TriMesh triangulate_chart(const Chart& c, int n0, int n1) {
  if (c.param_dim() != 2 || c.ambient_dim() != 3) throw InputError("triangulate_chart needs a surface chart in R^3");
  const auto& dom = c.domain();
  const std::array<int, 2> cells{n0, n1};
  std::array<int, 2> samples{};
  for (int a = 0; a < 2; ++a) samples[a] = dom.periodic[a] ? cells[a] : cells[a] + 1;

  TriMesh mesh;
  std::vector<int> grid_to_vertex(static_cast<std::size_t>(samples[0]) * samples[1]);
  // Weld coincident samples (collapsed poles) through a hash on a fine lattice.
  constexpr double kWeld = 1e-9;
  std::unordered_map<long long, std::vector<int>> buckets;
  auto bucket_key = [](long long x, long long y, long long z) { return (x * 73856093LL) ^ (y * 19349663LL) ^ (z * 83492791LL); };
  for (int i = 0; i < samples[0]; ++i) {
    for (int j = 0; j < samples[1]; ++j) {
      Param u{};
      u[0] = dom.lo[0] + dom.extent(0) * i / cells[0];
      u[1] = dom.lo[1] + dom.extent(1) * j / cells[1];
      const Vec p = c.position(u);
      const Eigen::Vector3d x(p[0], p[1], p[2]);
      const long long qx = std::llround(x.x() / (10 * kWeld));
      const long long qy = std::llround(x.y() / (10 * kWeld));
      const long long qz = std::llround(x.z() / (10 * kWeld));
      int found = -1;
      for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
        for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
          for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
            auto it = buckets.find(bucket_key(qx + dx, qy + dy, qz + dz));
            if (it == buckets.end()) continue;
            for (int v : it->second) {
              if ((mesh.vertices[v] - x).norm() < 10 * kWeld) {
                found = v;
                break;
              }
            }
          }
        }
      }
      if (found < 0) {
        mesh.vertices.push_back(x);
        found = mesh.vertex_count() - 1;
        buckets[bucket_key(qx, qy, qz)].push_back(found);
      }
      grid_to_vertex[static_cast<std::size_t>(i) * samples[1] + j] = found;
    }
  }
  auto vid = [&](int i, int j) {
    if (dom.periodic[0]) i %= samples[0];
    if (dom.periodic[1]) j %= samples[1];
    return grid_to_vertex[static_cast<std::size_t>(i) * samples[1] + j];
  };
  for (int i = 0; i < cells[0]; ++i) {
    for (int j = 0; j < cells[1]; ++j) {
      const int a = vid(i, j);
      const int b = vid(i + 1, j);
      const int cc = vid(i + 1, j + 1);
      const int d = vid(i, j + 1);
      for (const auto& f : {std::array<int, 3>{a, b, cc}, std::array<int, 3>{a, cc, d}}) {
        if (f[0] != f[1] && f[1] != f[2] && f[0] != f[2]) mesh.faces.push_back(f);
      }
    }
  }
  return validate_mesh(std::move(mesh));
}

int ray_crossings(const TriMesh& m, const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) {
  int hits = 0;
  for (const auto& f : m.faces) {
    const Eigen::Vector3d& v0 = m.vertices[f[0]];
    const Eigen::Vector3d e1 = m.vertices[f[1]] - v0;
    const Eigen::Vector3d e2 = m.vertices[f[2]] - v0;
    const Eigen::Vector3d p = direction.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-14) continue;
    const double inv = 1.0 / det;
    const Eigen::Vector3d s = origin - v0;
    const double a = s.dot(p) * inv;
    if (a < 0.0 || a > 1.0) continue;
    const Eigen::Vector3d q = s.cross(e1);
    const double b = direction.dot(q) * inv;
    if (b < 0.0 || a + b > 1.0) continue;
    if (e2.dot(q) * inv > 0.0) ++hits;
  }
  return hits;
}

}  // namespace hopf::surfaces
