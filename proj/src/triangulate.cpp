#include "cloak/triangulate.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "cloak/error.hpp"
#include "cloak/predicates.hpp"

namespace cloak::geom {
namespace {

using Vec2 = Eigen::Vector2d;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct PointHash {
  std::size_t operator()(const std::pair<double, double>& p) const noexcept {
    const auto hx = std::bit_cast<std::uint64_t>(p.first);
    const auto hy = std::bit_cast<std::uint64_t>(p.second);
    return std::hash<std::uint64_t>{}(hx * 0x9E3779B97F4A7C15ULL ^ hy);
  }
};

class Builder {
 public:
  explicit Builder(std::vector<Vec2> points) : pts_(std::move(points)) {}

  void seed_rectangle() {
    double xmin = pts_[0].x(), xmax = xmin, ymin = pts_[0].y(), ymax = ymin;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
    const std::array<Vec2, 4> corners = {Vec2(xmin, ymin), Vec2(xmax, ymin), Vec2(xmax, ymax),
                                         Vec2(xmin, ymax)};
    std::array<int, 4> idx = {-1, -1, -1, -1};
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      for (int c = 0; c < 4; ++c) {
        if (pts_[i] == corners[c] && idx[c] < 0) idx[c] = i;
      }
    }
    for (int c = 0; c < 4; ++c) {
      if (idx[c] < 0) throw mesh_error("triangulation: bounding rectangle corner missing from point set");
    }
    corner_ = idx;
    // Two triangles (0,1,2) and (0,2,3); neighbour slot k is opposite vertex k.
    tris_.push_back({{idx[0], idx[1], idx[2]}, {-1, 1, -1}, true});
    tris_.push_back({{idx[0], idx[2], idx[3]}, {-1, -1, 0}, true});
    mark_.assign(2, 0);
  }

  void insert_all() {
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      if (std::find(corner_.begin(), corner_.end(), i) != corner_.end()) continue;
      insert(i);
    }
  }

  int add_point(const Vec2& p) {
    pts_.push_back(p);
    const int i = static_cast<int>(pts_.size()) - 1;
    insert(i);
    return i;
  }

  std::unordered_set<std::uint64_t> edge_set() const {
    std::unordered_set<std::uint64_t> edges;
    edges.reserve(tris_.size() * 2);
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      for (int k = 0; k < 3; ++k) edges.insert(edge_key(t.v[k], t.v[(k + 1) % 3]));
    }
    return edges;
  }

  Triangulation finish(std::vector<Segment> segments) && {
    Triangulation out;
    out.points = std::move(pts_);
    for (const auto& t : tris_) {
      if (t.alive) out.triangles.push_back(t.v);
    }
    out.segments = std::move(segments);
    return out;
  }

  const std::vector<Vec2>& points() const { return pts_; }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;
    bool alive;
  };

  int locate(const Vec2& p) {
    int t = hint_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
      t = 0;
      while (!tris_[t].alive) ++t;
    }
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris_[t];
      rng_ ^= rng_ << 13;
      rng_ ^= rng_ >> 7;
      rng_ ^= rng_ << 17;
      const int start = static_cast<int>(rng_ % 3);
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        const int k = (start + j) % 3;
        const Vec2& a = pts_[tri.v[(k + 1) % 3]];
        const Vec2& b = pts_[tri.v[(k + 2) % 3]];
        if (orient(a, b, p) < 0) {
          next = tri.nb[k];
          if (next < 0) throw mesh_error("triangulation: point outside the bounding rectangle");
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw mesh_error("triangulation: point location did not terminate");
  }

  int allocate(const Tri& t) {
    if (!free_.empty()) {
      const int i = free_.back();
      free_.pop_back();
      tris_[i] = t;
      return i;
    }
    tris_.push_back(t);
    mark_.push_back(0);
    return static_cast<int>(tris_.size()) - 1;
  }

  void insert(int pi) {
    const Vec2 p = pts_[pi];
    const int t0 = locate(p);
    for (int k = 0; k < 3; ++k) {
      if (pts_[tris_[t0].v[k]] == p) throw mesh_error("triangulation: duplicate point");
    }

    ++stamp_;
    std::vector<int> cavity;
    std::vector<int> stack = {t0};
    mark_[t0] = stamp_;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      cavity.push_back(c);
      for (int k = 0; k < 3; ++k) {
        const int n = tris_[c].nb[k];
        if (n < 0 || mark_[n] == stamp_) continue;
        const Tri& tn = tris_[n];
        if (incircle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p) > 0) {
          mark_[n] = stamp_;
          stack.push_back(n);
        }
      }
    }

    struct Rim {
      int a, b, outer, outer_slot;
    };
    std::vector<Rim> rim;
    for (const int c : cavity) {
      const Tri& tc = tris_[c];
      for (int k = 0; k < 3; ++k) {
        const int n = tc.nb[k];
        if (n >= 0 && mark_[n] == stamp_) continue;
        const int a = tc.v[(k + 1) % 3];
        const int b = tc.v[(k + 2) % 3];
        const int o = orient(pts_[a], pts_[b], p);
        if (n < 0 && o == 0) continue;  // p splits a hull edge
        if (o <= 0) throw mesh_error("triangulation: cavity is not star-shaped");
        int slot = -1;
        if (n >= 0) {
          for (int s = 0; s < 3; ++s) {
            if (tris_[n].nb[s] == c) slot = s;
          }
        }
        rim.push_back({a, b, n, slot});
      }
    }

    for (const int c : cavity) {
      tris_[c].alive = false;
      free_.push_back(c);
    }

    std::vector<int> created;
    created.reserve(rim.size());
    for (const Rim& r : rim) {
      const int id = allocate({{r.a, r.b, pi}, {-1, -1, r.outer}, true});
      if (r.outer >= 0) tris_[r.outer].nb[r.outer_slot] = id;
      created.push_back(id);
    }
    // New triangles (a, b, p): slot 0 faces edge (b, p), slot 1 faces edge (p, a).
    for (const int i : created) {
      for (const int j : created) {
        if (i == j) continue;
        if (tris_[j].v[0] == tris_[i].v[1]) tris_[i].nb[0] = j;
        if (tris_[j].v[1] == tris_[i].v[0]) tris_[i].nb[1] = j;
      }
    }
    hint_ = created.empty() ? -1 : created.front();
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<unsigned> mark_;
  std::array<int, 4> corner_{};
  unsigned stamp_ = 0;
  int hint_ = 0;
  std::uint64_t rng_ = 0x2545F4914F6CDD1DULL;
};

}  // namespace

Triangulation conforming_delaunay(std::vector<Vec2> points, std::vector<Segment> segments, bool mirror_x,
                                  double mirror_axis) {
  if (points.size() < 4) throw mesh_error("triangulation: need at least the four rectangle corners");
  Builder builder(std::move(points));
  builder.seed_rectangle();
  builder.insert_all();

  std::unordered_map<std::pair<double, double>, int, PointHash> by_coord;
  auto index_coords = [&] {
    by_coord.clear();
    const auto& pts = builder.points();
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) by_coord[{pts[i].x(), pts[i].y()}] = i;
  };
  auto mirror_of = [&](int i) -> int {
    const Vec2& p = builder.points()[i];
    const auto it = by_coord.find({2.0 * mirror_axis - p.x(), p.y()});
    return it == by_coord.end() ? -1 : it->second;
  };

  constexpr int kMaxPasses = 64;
  for (int pass = 0;; ++pass) {
    if (pass == kMaxPasses) throw mesh_error("triangulation: constraint recovery did not converge");
    const auto edges = builder.edge_set();
    std::unordered_set<std::uint64_t> split;
    if (mirror_x) index_coords();
    for (const auto& s : segments) {
      if (edges.count(edge_key(s.a, s.b))) continue;
      split.insert(edge_key(s.a, s.b));
      if (mirror_x) {
        const int ma = mirror_of(s.a), mb = mirror_of(s.b);
        if (ma >= 0 && mb >= 0) split.insert(edge_key(ma, mb));
      }
    }
    if (split.empty()) break;
    std::vector<Segment> next;
    next.reserve(segments.size() + split.size());
    for (const auto& s : segments) {
      if (!split.count(edge_key(s.a, s.b))) {
        next.push_back(s);
        continue;
      }
      const Vec2 mid = 0.5 * (builder.points()[s.a] + builder.points()[s.b]);
      const int m = builder.add_point(mid);
      next.push_back({s.a, m, s.label});
      next.push_back({m, s.b, s.label});
    }
    segments = std::move(next);
  }
  return std::move(builder).finish(std::move(segments));
}

}  // namespace cloak::geom
