#include "cloak/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "cloak/error.hpp"
#include "cloak/triangulate.hpp"

namespace cloak {
namespace {

using Vec2 = Eigen::Vector2d;
using Polyline = std::vector<Vec2>;

constexpr double kPi = std::numbers::pi;

/// n+1 points from a to b; exactly mirror-symmetric about 0 when the interval is.
std::vector<double> sym_linspace(double a, double b, int n) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<double> x(n + 1);
  for (int j = 0; j <= n; ++j) x[j] = mid + (static_cast<double>(2 * j - n) / n) * half;
  x.front() = a;
  x.back() = b;
  return x;
}

int segments_for(double length, double h) { return std::max(1, static_cast<int>(std::ceil(length / h - 1e-9))); }

/// Samples a curve on [t0, t1] with local spacing min(h, h / sqrt(curvature)), which keeps the
/// chord error below h^2 / 8. Endpoints are returned exactly as given.
Polyline sample_curve(const std::function<Vec2(double)>& f, const std::function<double(double)>& curvature,
                      double t0, double t1, double h, Vec2 p0, Vec2 p1, int min_segments = 1) {
  constexpr int kFine = 4000;
  std::vector<double> cum(kFine + 1, 0.0);
  for (int i = 0; i < kFine; ++i) {
    const double ta = t0 + (t1 - t0) * i / kFine, tb = t0 + (t1 - t0) * (i + 1) / kFine;
    const double tm = 0.5 * (ta + tb);
    const double spacing = std::min(h, h / std::sqrt(std::max(curvature(tm), 1e-300)));
    cum[i + 1] = cum[i] + (f(tb) - f(ta)).norm() / spacing;
  }
  const int n = std::max(min_segments, static_cast<int>(std::ceil(cum.back() - 1e-9)));
  Polyline out;
  out.push_back(p0);
  int i = 0;
  for (int j = 1; j < n; ++j) {
    const double target = cum.back() * j / n;
    while (cum[i + 1] < target) ++i;
    const double s = (target - cum[i]) / (cum[i + 1] - cum[i]);
    out.push_back(f(t0 + (t1 - t0) * (i + s) / kFine));
  }
  out.push_back(p1);
  return out;
}

/// Quarter of an ellipse centered at the origin, from (a, 0) to (0, b).
Polyline ellipse_quarter(double a, double b, double h) {
  auto f = [=](double t) { return Vec2(a * std::cos(t), b * std::sin(t)); };
  auto k = [=](double t) {
    const double s = std::sin(t), c = std::cos(t);
    return a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
  };
  return sample_curve(f, k, 0.0, kPi / 2, h, Vec2(a, 0.0), Vec2(0.0, b), 2);
}

/// Closed ellipse loop built from one mirrored quarter (exactly symmetric in both axes).
Polyline ellipse_loop(Vec2 c, double a, double b, double h) {
  const Polyline q = ellipse_quarter(a, b, h);
  const int n = static_cast<int>(q.size()) - 1;
  Polyline loop;
  for (int k = 0; k <= n; ++k) loop.push_back(q[k]);
  for (int k = n - 1; k >= 0; --k) loop.emplace_back(-q[k].x(), q[k].y());
  for (int k = 1; k <= n; ++k) loop.emplace_back(-q[k].x(), -q[k].y());
  for (int k = n - 1; k >= 1; --k) loop.emplace_back(q[k].x(), -q[k].y());
  for (auto& p : loop) p += c;
  return loop;
}

/// Upper half ellipse from (c.x + a, c.y) over the top to (c.x - a, c.y).
Polyline half_ellipse(Vec2 c, double a, double b, double h) {
  const Polyline q = ellipse_quarter(a, b, h);
  const int n = static_cast<int>(q.size()) - 1;
  Polyline arc;
  for (int k = 0; k <= n; ++k) arc.push_back(q[k]);
  for (int k = n - 1; k >= 0; --k) arc.emplace_back(-q[k].x(), q[k].y());
  for (auto& p : arc) p += c;
  return arc;
}

Polyline circle_loop(Vec2 c, double r, double h) {
  const double spacing = std::min(h, h * std::sqrt(r));
  const int n = std::max(12, segments_for(2 * kPi * r, spacing));
  Polyline loop;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * kPi * k / n;
    loop.push_back(c + r * Vec2(std::cos(t), std::sin(t)));
  }
  return loop;
}

Polyline rotated_rect_loop(Vec2 c, double w, double hgt, double angle_deg, double h) {
  const double th = angle_deg * kPi / 180.0;
  const Eigen::Matrix2d rot = (Eigen::Matrix2d() << std::cos(th), -std::sin(th), std::sin(th), std::cos(th)).finished();
  const std::array<Vec2, 4> corners = {Vec2(-w / 2, -hgt / 2), Vec2(w / 2, -hgt / 2), Vec2(w / 2, hgt / 2),
                                       Vec2(-w / 2, hgt / 2)};
  Polyline loop;
  for (int k = 0; k < 4; ++k) {
    const Vec2& a = corners[k];
    const Vec2& b = corners[(k + 1) % 4];
    const int n = segments_for((b - a).norm(), h);
    for (int j = 0; j < n; ++j) loop.push_back(c + rot * (a + (b - a) * (static_cast<double>(j) / n)));
  }
  return loop;
}

bool inside_polygon(const Polyline& poly, const Vec2& p) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

/// Planar straight-line graph accumulated from polylines, with exact point de-duplication.
class Pslg {
 public:
  int add_point(const Vec2& p) {
    const auto key = std::make_pair(p.x(), p.y());
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    points_.push_back(p);
    const int i = static_cast<int>(points_.size()) - 1;
    index_.emplace(key, i);
    return i;
  }

  void add_polyline(const Polyline& line, bool closed, int label) {
    std::vector<int> ids;
    for (const auto& p : line) ids.push_back(add_point(p));
    const int n = static_cast<int>(ids.size());
    for (int k = 0; k + 1 < n; ++k) segments_.push_back({ids[k], ids[k + 1], label});
    if (closed) segments_.push_back({ids[n - 1], ids[0], label});
  }

  /// Adds a triangular lattice of spacing h, dropping points closer than `gap` to any segment.
  void add_lattice(double xmin, double xmax, double ymin, double ymax, double cx, double h, double gap) {
    const double cell = std::max(h, gap);
    const int nx = std::max(1, static_cast<int>((xmax - xmin) / cell) + 1);
    const int ny = std::max(1, static_cast<int>((ymax - ymin) / cell) + 1);
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(nx) * ny);
    auto cx_of = [&](double x) { return std::clamp(static_cast<int>((x - xmin) / cell), 0, nx - 1); };
    auto cy_of = [&](double y) { return std::clamp(static_cast<int>((y - ymin) / cell), 0, ny - 1); };
    for (int s = 0; s < static_cast<int>(segments_.size()); ++s) {
      const Vec2& a = points_[segments_[s].a];
      const Vec2& b = points_[segments_[s].b];
      for (int i = cx_of(std::min(a.x(), b.x()) - gap); i <= cx_of(std::max(a.x(), b.x()) + gap); ++i) {
        for (int j = cy_of(std::min(a.y(), b.y()) - gap); j <= cy_of(std::max(a.y(), b.y()) + gap); ++j) {
          grid[static_cast<std::size_t>(j) * nx + i].push_back(s);
        }
      }
    }
    const double dy = h * std::sqrt(3.0) / 2.0;
    const double cy = 0.5 * (ymin + ymax);
    const int rows = static_cast<int>(std::floor((ymax - cy) / dy));
    const int cols = static_cast<int>(std::floor((xmax - xmin) / h)) + 2;
    for (int r = -rows; r <= rows; ++r) {
      const double y = cy + r * dy;
      const double shift = (std::abs(r) % 2 == 1) ? 0.5 * h : 0.0;
      for (int i = -cols; i <= cols; ++i) {
        double x;
        if (shift == 0.0) x = cx + i * h;
        else x = cx + (i >= 0 ? (i + 0.5) * h : -((-i - 1) + 0.5) * h);
        if (x <= xmin || x >= xmax || y <= ymin || y >= ymax) continue;
        const Vec2 p(x, y);
        bool keep = true;
        for (int s : grid[static_cast<std::size_t>(cy_of(y)) * nx + cx_of(x)]) {
          if (segment_distance(p, points_[segments_[s].a], points_[segments_[s].b]) < gap) {
            keep = false;
            break;
          }
        }
        if (keep) add_point(p);
      }
    }
  }

  geom::Triangulation triangulate(bool mirror, double axis) const {
    return geom::conforming_delaunay(points_, segments_, mirror, axis);
  }

 private:
  std::vector<Vec2> points_;
  std::vector<geom::Segment> segments_;
  std::map<std::pair<double, double>, int> index_;
};

struct Rect {
  double xmin, xmax, ymin, ymax;
};

Rect rect_of(const GeometrySpec& s) {
  return {s.center.x() - s.half_width, s.center.x() + s.half_width, s.center.y() - s.half_height,
          s.center.y() + s.half_height};
}

/// Outer rectangle; bottom edge additionally broken at the given x positions.
void add_outer(Pslg& g, const Rect& r, double h, std::vector<double> bottom_breaks = {}) {
  const int nx = segments_for(r.xmax - r.xmin, h), ny = segments_for(r.ymax - r.ymin, h);
  std::vector<double> breaks = {r.xmin};
  std::sort(bottom_breaks.begin(), bottom_breaks.end());
  for (double b : bottom_breaks) breaks.push_back(b);
  breaks.push_back(r.xmax);
  Polyline loop;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const auto xs = sym_linspace(breaks[k], breaks[k + 1], segments_for(breaks[k + 1] - breaks[k], h));
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) loop.emplace_back(xs[j], r.ymin);
  }
  const auto ys = sym_linspace(r.ymin, r.ymax, ny);
  for (int j = 0; j < ny; ++j) loop.emplace_back(r.xmax, ys[j]);
  const auto xt = sym_linspace(r.xmin, r.xmax, nx);
  for (int j = nx; j > 0; --j) loop.emplace_back(xt[j], r.ymax);
  for (int j = ny; j > 0; --j) loop.emplace_back(r.xmin, ys[j]);
  g.add_polyline(loop, true, 0);
}

enum class Fill { Hole, Cloak, Inhom };

/// Triangulates the PSLG, classifies triangles with `classify`, and splits out the physical
/// mesh (hole triangles removed) from the filled one.
Geometry finish(const GeometrySpec& spec, Pslg& g, bool mirror,
                const std::function<Region(const Vec2&, bool& hole)>& classify, EdgeTag inner) {
  const geom::Triangulation tri = g.triangulate(mirror, spec.center.x());
  Geometry out;
  out.spec = spec;
  Mesh& filled = out.filled;
  filled.nodes = tri.points;
  std::vector<Region> regions;
  std::vector<bool> holes;
  for (const auto& t : tri.triangles) {
    const Vec2 c = (tri.points[t[0]] + tri.points[t[1]] + tri.points[t[2]]) / 3.0;
    bool hole = false;
    regions.push_back(classify(c, hole));
    holes.push_back(hole);
    filled.tris.push_back(t);
    filled.region.push_back(Region::Exterior);
  }
  tag_boundary(filled, EdgeTag::Hole);
  filled.h = max_diameter(filled);

  Mesh& phys = out.physical;
  std::vector<int> new_index(filled.nodes.size(), -1);
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    if (holes[t]) continue;
    std::array<int, 3> v{};
    for (int k = 0; k < 3; ++k) {
      int& ni = new_index[tri.triangles[t][k]];
      if (ni < 0) {
        ni = static_cast<int>(phys.nodes.size());
        phys.nodes.push_back(filled.nodes[tri.triangles[t][k]]);
        out.filled_node.push_back(tri.triangles[t][k]);
      }
      v[k] = ni;
    }
    phys.tris.push_back(v);
    phys.region.push_back(regions[t]);
  }
  tag_boundary(phys, inner);
  phys.h = max_diameter(phys);
  for (const Mesh* m : {&phys, &filled}) {
    const auto report = validate(*m);
    if (!report.ok) throw mesh_error("generated mesh failed validation: " + report.message);
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw mesh_error("degenerate geometry: " + what);
}

void check_common(const GeometrySpec& s) {
  require(s.half_width > 0 && s.half_height > 0, "rectangle must have positive size");
  require(s.h > 0 && s.h < std::min(s.half_width, s.half_height), "target element size out of range");
}

bool mirror_ok(const GeometrySpec& s) { return s.symmetric && s.center.x() == 0.0; }

}  // namespace

GeometrySpec example_geometry(int example) {
  GeometrySpec s;
  switch (example) {
    case 1: s.kind = GeometryKind::EllipticHole; break;
    case 2:
      s.kind = GeometryKind::EllipticCut;
      s.center = Vec2(0.0, 2.0);
      break;
    case 3: s.kind = GeometryKind::RectInhom; break;
    case 4: s.kind = GeometryKind::RandomDisks; break;
    default: throw config_error("example must be 1, 2, 3 or 4");
  }
  return s;
}

Geometry build_plain(const GeometrySpec& spec) {
  check_common(spec);
  const Rect r = rect_of(spec);
  Pslg g;
  add_outer(g, r, spec.h);
  g.add_lattice(r.xmin, r.xmax, r.ymin, r.ymax, spec.center.x(), spec.h, 0.6 * spec.h);
  return finish(spec, g, mirror_ok(spec), [](const Vec2&, bool&) { return Region::Exterior; }, EdgeTag::Hole);
}

Geometry build_elliptic_hole(const GeometrySpec& spec) {
  check_common(spec);
  require(spec.hole_ax > 0 && spec.hole_ay > 0, "hole semi-axes must be positive");
  require(spec.cloak_ax > spec.hole_ax && spec.cloak_ay > spec.hole_ay, "cloak rim must contain the hole");
  require(spec.cloak_ax < spec.half_width && spec.cloak_ay < spec.half_height, "cloak must lie inside the body");
  const Rect r = rect_of(spec);
  const Polyline hole = ellipse_loop(spec.center, spec.hole_ax, spec.hole_ay, spec.h);
  const Polyline rim = ellipse_loop(spec.center, spec.cloak_ax, spec.cloak_ay, spec.h);
  Pslg g;
  add_outer(g, r, spec.h);
  g.add_polyline(hole, true, 1);
  g.add_polyline(rim, true, 2);
  g.add_lattice(r.xmin, r.xmax, r.ymin, r.ymax, spec.center.x(), spec.h, 0.6 * spec.h);
  auto classify = [&](const Vec2& c, bool& is_hole) {
    is_hole = inside_polygon(hole, c);
    return inside_polygon(rim, c) ? Region::Cloak : Region::Exterior;
  };
  return finish(spec, g, mirror_ok(spec), classify, EdgeTag::Hole);
}

Geometry build_elliptic_cut(const GeometrySpec& spec) {
  check_common(spec);
  require(spec.cut_major > 0 && spec.cut_minor > 0, "cut semi-axes must be positive");
  require(spec.carpet_major > spec.cut_major && spec.carpet_minor > spec.cut_minor,
          "cloak rim must contain the cut");
  require(spec.carpet_minor < spec.half_width && spec.carpet_major < 2 * spec.half_height,
          "cloak must lie inside the body");
  const Rect r = rect_of(spec);
  const Vec2 base(spec.center.x(), r.ymin);
  const Polyline cut = half_ellipse(base, spec.cut_minor, spec.cut_major, spec.h);
  const Polyline rim = half_ellipse(base, spec.carpet_minor, spec.carpet_major, spec.h);
  Pslg g;
  add_outer(g, r, spec.h,
            {base.x() - spec.carpet_minor, base.x() - spec.cut_minor, base.x() + spec.cut_minor,
             base.x() + spec.carpet_minor});
  g.add_polyline(cut, false, 1);
  g.add_polyline(rim, false, 2);
  g.add_lattice(r.xmin, r.xmax, r.ymin, r.ymax, spec.center.x(), spec.h, 0.6 * spec.h);
  auto classify = [&](const Vec2& c, bool& is_hole) {
    is_hole = inside_polygon(cut, c);
    return inside_polygon(rim, c) ? Region::Cloak : Region::Exterior;
  };
  return finish(spec, g, mirror_ok(spec), classify, EdgeTag::Cut);
}

Geometry build_rect_inhom(const GeometrySpec& spec) {
  check_common(spec);
  require(spec.inhom_width > 0 && spec.inhom_height > 0, "inhomogeneity sides must be positive");
  require(spec.cloak_thickness > 0, "cloak thickness must be positive");
  const double ow = spec.inhom_width + spec.cloak_thickness;
  const double oh = spec.inhom_height + spec.cloak_thickness;
  const Polyline inner = rotated_rect_loop(spec.center, spec.inhom_width, spec.inhom_height, spec.angle_deg, spec.h);
  const Polyline outer = rotated_rect_loop(spec.center, ow, oh, spec.angle_deg, spec.h);
  const Rect r = rect_of(spec);
  for (const auto& p : outer) {
    require(p.x() > r.xmin && p.x() < r.xmax && p.y() > r.ymin && p.y() < r.ymax, "cloak must lie inside the body");
  }
  Pslg g;
  add_outer(g, r, spec.h);
  g.add_polyline(inner, true, 1);
  g.add_polyline(outer, true, 2);
  g.add_lattice(r.xmin, r.xmax, r.ymin, r.ymax, spec.center.x(), spec.h, 0.6 * spec.h);
  auto classify = [&](const Vec2& c, bool& is_hole) {
    is_hole = false;
    if (inside_polygon(inner, c)) return Region::Inhomogeneity;
    return inside_polygon(outer, c) ? Region::Cloak : Region::Exterior;
  };
  return finish(spec, g, false, classify, EdgeTag::Hole);
}

std::vector<Disk> place_disks(const GeometrySpec& spec) {
  require(spec.disk_count >= 0, "disk count must be non-negative");
  require(spec.disk_rmin > 0 && spec.disk_rmax >= spec.disk_rmin, "disk radius range invalid");
  require(spec.disk_cloak_factor > 1, "cloak radius factor must exceed 1");
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const Rect r = rect_of(spec);
  std::vector<Disk> disks;
  int attempts = 0;
  while (static_cast<int>(disks.size()) < spec.disk_count) {
    if (++attempts > spec.max_attempts) {
      throw mesh_error("disk placement failed after " + std::to_string(spec.max_attempts) +
                       " attempts (seed " + std::to_string(spec.seed) + ")");
    }
    const double radius = spec.disk_rmin + (spec.disk_rmax - spec.disk_rmin) * uniform();
    const double outer = spec.disk_cloak_factor * radius;
    const double margin = outer + spec.disk_clearance;
    if (r.xmax - r.xmin <= 2 * margin || r.ymax - r.ymin <= 2 * margin) continue;
    const Vec2 c(r.xmin + margin + (r.xmax - r.xmin - 2 * margin) * uniform(),
                 r.ymin + margin + (r.ymax - r.ymin - 2 * margin) * uniform());
    bool ok = true;
    for (const auto& d : disks) {
      if ((d.center - c).norm() < spec.disk_cloak_factor * d.radius + outer + spec.disk_clearance) {
        ok = false;
        break;
      }
    }
    if (ok) disks.push_back({c, radius});
  }
  return disks;
}

Geometry build_random_disks(const GeometrySpec& spec) {
  check_common(spec);
  const std::vector<Disk> disks = place_disks(spec);
  const Rect r = rect_of(spec);
  std::vector<Polyline> inner, outer;
  Pslg g;
  add_outer(g, r, spec.h);
  for (std::size_t i = 0; i < disks.size(); ++i) {
    inner.push_back(circle_loop(disks[i].center, disks[i].radius, spec.h));
    outer.push_back(circle_loop(disks[i].center, spec.disk_cloak_factor * disks[i].radius, spec.h));
    g.add_polyline(inner.back(), true, static_cast<int>(2 * i + 1));
    g.add_polyline(outer.back(), true, static_cast<int>(2 * i + 2));
  }
  g.add_lattice(r.xmin, r.xmax, r.ymin, r.ymax, spec.center.x(), spec.h, 0.6 * spec.h);
  auto classify = [&](const Vec2& c, bool& is_hole) {
    is_hole = false;
    for (std::size_t i = 0; i < disks.size(); ++i) {
      if (inside_polygon(inner[i], c)) return Region::Inhomogeneity;
      if (inside_polygon(outer[i], c)) return Region::Cloak;
    }
    return Region::Exterior;
  };
  Geometry out = finish(spec, g, disks.empty() && mirror_ok(spec), classify, EdgeTag::Hole);
  out.disks = disks;
  return out;
}

Geometry build_geometry(const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::Plain: return build_plain(spec);
    case GeometryKind::EllipticHole: return build_elliptic_hole(spec);
    case GeometryKind::EllipticCut: return build_elliptic_cut(spec);
    case GeometryKind::RectInhom: return build_rect_inhom(spec);
    case GeometryKind::RandomDisks: return build_random_disks(spec);
  }
  throw config_error("unknown geometry kind");
}

Geometry geometry_from_mesh(const Mesh& mesh, double h) {
  const auto box = bounding_box(mesh);
  GeometrySpec spec;
  spec.kind = GeometryKind::Plain;
  spec.center = Vec2(0.5 * (box[0] + box[1]), 0.5 * (box[2] + box[3]));
  spec.half_width = 0.5 * (box[1] - box[0]);
  spec.half_height = 0.5 * (box[3] - box[2]);
  spec.h = h;
  spec.symmetric = false;
  Geometry out = build_plain(spec);
  out.physical = mesh;
  out.filled_node.clear();
  return out;
}

}  // namespace cloak
