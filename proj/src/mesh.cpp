#include "cloak/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "cloak/error.hpp"

namespace cloak {

const char* to_string(Region r) {
  switch (r) {
    case Region::Exterior: return "EXTERIOR";
    case Region::Cloak: return "CLOAK";
    case Region::Inhomogeneity: return "INHOMOGENEITY";
  }
  return "?";
}

const char* to_string(EdgeTag t) {
  switch (t) {
    case EdgeTag::OuterLeft: return "OUTER_LEFT";
    case EdgeTag::OuterRight: return "OUTER_RIGHT";
    case EdgeTag::OuterTop: return "OUTER_TOP";
    case EdgeTag::OuterBottom: return "OUTER_BOTTOM";
    case EdgeTag::Hole: return "HOLE";
    case EdgeTag::Cut: return "CUT";
  }
  return "?";
}

Region parse_region(const std::string& s) {
  if (s == "EXTERIOR") return Region::Exterior;
  if (s == "CLOAK") return Region::Cloak;
  if (s == "INHOMOGENEITY") return Region::Inhomogeneity;
  throw mesh_error("unknown region tag '" + s + "'");
}

EdgeTag parse_edge_tag(const std::string& s) {
  static const std::map<std::string, EdgeTag> tags = {
      {"OUTER_LEFT", EdgeTag::OuterLeft}, {"OUTER_RIGHT", EdgeTag::OuterRight},
      {"OUTER_TOP", EdgeTag::OuterTop},   {"OUTER_BOTTOM", EdgeTag::OuterBottom},
      {"HOLE", EdgeTag::Hole},            {"CUT", EdgeTag::Cut}};
  const auto it = tags.find(s);
  if (it == tags.end()) throw mesh_error("unknown boundary tag '" + s + "'");
  return it->second;
}

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double Mesh::area(int t) const {
  const auto& v = tris[t];
  return signed_area(nodes[v[0]], nodes[v[1]], nodes[v[2]]);
}

Eigen::Vector2d Mesh::centroid(int t) const {
  const auto& v = tris[t];
  return (nodes[v[0]] + nodes[v[1]] + nodes[v[2]]) / 3.0;
}

double max_diameter(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.tris) {
    for (int k = 0; k < 3; ++k) h = std::max(h, (mesh.nodes[t[k]] - mesh.nodes[t[(k + 1) % 3]]).norm());
  }
  return h;
}

std::array<double, 4> bounding_box(const Mesh& mesh) {
  std::array<double, 4> box = {mesh.nodes[0].x(), mesh.nodes[0].x(), mesh.nodes[0].y(), mesh.nodes[0].y()};
  for (const auto& p : mesh.nodes) {
    box[0] = std::min(box[0], p.x());
    box[1] = std::max(box[1], p.x());
    box[2] = std::min(box[2], p.y());
    box[3] = std::max(box[3], p.y());
  }
  return box;
}

namespace {

using EdgeCount = std::map<std::pair<int, int>, std::pair<int, int>>;  // sorted edge -> (+uses, -uses)

EdgeCount count_edges(const Mesh& mesh) {
  EdgeCount edges;
  for (const auto& t : mesh.tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      auto& c = edges[{std::min(a, b), std::max(a, b)}];
      (a < b ? c.first : c.second)++;
    }
  }
  return edges;
}

}  // namespace

std::vector<std::array<int, 2>> topological_boundary(const Mesh& mesh) {
  const EdgeCount edges = count_edges(mesh);
  std::vector<std::array<int, 2>> out;
  for (const auto& t : mesh.tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const auto& c = edges.at({std::min(a, b), std::max(a, b)});
      if (c.first + c.second == 1) out.push_back({a, b});
    }
  }
  return out;
}

void tag_boundary(Mesh& mesh, EdgeTag inner) {
  const auto box = bounding_box(mesh);
  mesh.bedges.clear();
  for (const auto& e : topological_boundary(mesh)) {
    const auto& p = mesh.nodes[e[0]];
    const auto& q = mesh.nodes[e[1]];
    EdgeTag tag = inner;
    if (p.x() == box[0] && q.x() == box[0]) tag = EdgeTag::OuterLeft;
    else if (p.x() == box[1] && q.x() == box[1]) tag = EdgeTag::OuterRight;
    else if (p.y() == box[2] && q.y() == box[2]) tag = EdgeTag::OuterBottom;
    else if (p.y() == box[3] && q.y() == box[3]) tag = EdgeTag::OuterTop;
    mesh.bedges.push_back({e[0], e[1], tag});
  }
}

ValidationReport validate(const Mesh& mesh) {
  auto fail = [](const std::string& m) { return ValidationReport{false, m}; };
  const int n = mesh.num_nodes();
  if (mesh.region.size() != mesh.tris.size()) return fail("region tags do not match triangle count");
  for (int t = 0; t < mesh.num_tris(); ++t) {
    for (int v : mesh.tris[t]) {
      if (v < 0 || v >= n) return fail("triangle " + std::to_string(t) + " references a missing node");
    }
    if (!(mesh.area(t) > 0.0)) return fail("triangle " + std::to_string(t) + " has non-positive area");
  }
  const EdgeCount edges = count_edges(mesh);
  for (const auto& [e, c] : edges) {
    if (c.first > 1 || c.second > 1) {
      return fail("non-conforming connectivity at edge (" + std::to_string(e.first) + ", " +
                  std::to_string(e.second) + ")");
    }
  }
  std::map<std::pair<int, int>, int> owner;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.tris[t][k], b = mesh.tris[t][(k + 1) % 3];
      owner[{std::min(a, b), std::max(a, b)}] = t;
    }
  }
  std::size_t tagged = 0;
  for (const auto& be : mesh.bedges) {
    const auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    const auto it = edges.find(key);
    if (it == edges.end() || it->second.first + it->second.second != 1) {
      return fail("boundary edge (" + std::to_string(be.a) + ", " + std::to_string(be.b) +
                  ") is not on the mesh boundary");
    }
    if (!is_outer(be.tag) && mesh.region[owner.at(key)] == Region::Exterior) {
      return fail("hole boundary edge touches an exterior triangle");
    }
    ++tagged;
  }
  std::size_t boundary = 0;
  for (const auto& [e, c] : edges) boundary += (c.first + c.second == 1);
  if (tagged != boundary) return fail("non-conforming connectivity: untagged boundary edges (hanging nodes)");
  return {};
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write mesh file " + path);
  out << std::setprecision(17);
  out << "cloakmesh 1\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const auto& p : mesh.nodes) out << p.x() << " " << p.y() << "\n";
  out << "tris " << mesh.tris.size() << "\n";
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const auto& v = mesh.tris[t];
    out << v[0] << " " << v[1] << " " << v[2] << " " << to_string(mesh.region[t]) << "\n";
  }
  out << "bedges " << mesh.bedges.size() << "\n";
  for (const auto& e : mesh.bedges) out << e.a << " " << e.b << " " << to_string(e.tag) << "\n";
  if (!out) throw io_error("failed writing mesh file " + path);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open mesh file " + path);
  auto expect = [&](const std::string& word) {
    std::string w;
    if (!(in >> w) || w != word) throw mesh_error("malformed mesh file: expected '" + word + "'");
  };
  auto count = [&](const std::string& word) {
    expect(word);
    long long c = -1;
    if (!(in >> c) || c < 0) throw mesh_error("malformed mesh file: bad count after '" + word + "'");
    return static_cast<std::size_t>(c);
  };
  expect("cloakmesh");
  int version = 0;
  if (!(in >> version) || version != 1) throw mesh_error("unsupported mesh file version");

  Mesh mesh;
  mesh.nodes.resize(count("nodes"));
  for (auto& p : mesh.nodes) {
    if (!(in >> p.x() >> p.y())) throw mesh_error("malformed mesh file: node coordinates");
  }
  const std::size_t nt = count("tris");
  mesh.tris.resize(nt);
  mesh.region.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    std::string tag;
    if (!(in >> mesh.tris[t][0] >> mesh.tris[t][1] >> mesh.tris[t][2] >> tag)) {
      throw mesh_error("malformed mesh file: triangle record");
    }
    mesh.region[t] = parse_region(tag);
  }
  mesh.bedges.resize(count("bedges"));
  for (auto& e : mesh.bedges) {
    std::string tag;
    if (!(in >> e.a >> e.b >> tag)) throw mesh_error("malformed mesh file: boundary edge record");
    e.tag = parse_edge_tag(tag);
  }
  const auto report = validate(mesh);
  if (!report.ok) throw mesh_error(report.message);
  mesh.h = max_diameter(mesh);
  return mesh;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  const auto box = bounding_box(mesh);
  const double n = std::max(1.0, std::sqrt(static_cast<double>(mesh.num_tris()) / 2.0));
  nx_ = ny_ = static_cast<int>(n);
  x0_ = box[0];
  y0_ = box[2];
  dx_ = std::max(box[1] - box[0], 1e-300) / nx_;
  dy_ = std::max(box[3] - box[2], 1e-300) / ny_;
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  auto cell = [&](double v, double o, double d, int m) {
    return std::clamp(static_cast<int>(std::floor((v - o) / d)), 0, m - 1);
  };
  for (int t = 0; t < mesh.num_tris(); ++t) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int v : mesh.tris[t]) {
      xmin = std::min(xmin, mesh.nodes[v].x());
      xmax = std::max(xmax, mesh.nodes[v].x());
      ymin = std::min(ymin, mesh.nodes[v].y());
      ymax = std::max(ymax, mesh.nodes[v].y());
    }
    for (int i = cell(xmin, x0_, dx_, nx_); i <= cell(xmax, x0_, dx_, nx_); ++i) {
      for (int j = cell(ymin, y0_, dy_, ny_); j <= cell(ymax, y0_, dy_, ny_); ++j) {
        cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
      }
    }
  }
}

int PointLocator::locate(const Eigen::Vector2d& p, Eigen::Vector3d& bary, double tol) const {
  const int i = std::clamp(static_cast<int>(std::floor((p.x() - x0_) / dx_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y() - y0_) / dy_)), 0, ny_ - 1);
  int best = -1;
  double best_min = -1e300;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int ci = i + di, cj = j + dj;
      if (ci < 0 || cj < 0 || ci >= nx_ || cj >= ny_) continue;
      for (int t : cells_[static_cast<std::size_t>(cj) * nx_ + ci]) {
        const auto& v = mesh_.tris[t];
        const auto& a = mesh_.nodes[v[0]];
        const auto& b = mesh_.nodes[v[1]];
        const auto& c = mesh_.nodes[v[2]];
        const double area = signed_area(a, b, c);
        const Eigen::Vector3d l(signed_area(p, b, c) / area, signed_area(a, p, c) / area,
                                signed_area(a, b, p) / area);
        const double m = l.minCoeff();
        if (m > best_min) {
          best_min = m;
          best = t;
          bary = l;
        }
      }
    }
  }
  return best_min >= -tol ? best : -1;
}

}  // namespace cloak
