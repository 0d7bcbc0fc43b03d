#pragma once
// Pixel-boundary vectors and loop connection.
//
// Every selected pixel contributes one unit vector per exposed side (a 4-neighbor
// that is unselected or off-grid), oriented so the pixel lies to its left. Shapes
// are therefore circumscribed counterclockwise and holes clockwise. Loops are
// built by following vector endpoints; at corners where two pixels touch
// diagonally there are two outgoing candidates and the turn policy decides.

#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "raster.hpp"

namespace contourforge {

enum class Direction : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

namespace detail {
inline constexpr std::array<std::array<int, 2>, 4> kUnit{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
// Offset from a vector's origin corner to its owner pixel. Corner (cx, cy) sits
// at geometric (cx - 0.5, cy - 0.5), the lower-left corner of pixel (cx, cy).
inline constexpr std::array<std::array<int, 2>, 4> kOwnerFromCorner{{{0, 0}, {-1, 0}, {-1, -1}, {0, -1}}};
// Offset from the owner pixel to the neighbor on the vector's right.
inline constexpr std::array<std::array<int, 2>, 4> kOutward{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
}  // namespace detail

/// Oriented unit segment on a pixel boundary. The owner lies to its left.
struct ContourVector {
  Point origin;
  Point endpoint;
  PixelCoord owner;
  friend bool operator==(const ContourVector&, const ContourVector&) = default;
};

using VectorId = std::uint64_t;
using VectorLoop = std::vector<VectorId>;

/// The set of boundary vectors of a mask, stored as four bits per pixel.
/// Vector ids enumerate (row, col, direction) in ascending order.
class BoundaryVectors {
 public:
  BoundaryVectors() = default;
  BoundaryVectors(std::int32_t width, std::int32_t height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}

  std::int32_t width() const noexcept { return width_; }
  std::int32_t height() const noexcept { return height_; }
  std::size_t count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  static constexpr VectorId make_id(std::size_t pixel_index, Direction d) {
    return static_cast<VectorId>(pixel_index) * 4 + static_cast<VectorId>(d);
  }

  bool has(std::int32_t col, std::int32_t row, int dir) const noexcept {
    if (col < 0 || row < 0 || col >= width_ || row >= height_) return false;
    return (bits_[pixel_index(col, row)] >> dir) & 1u;
  }
  bool has(VectorId id) const noexcept {
    return id / 4 < bits_.size() && ((bits_[id / 4] >> (id % 4)) & 1u);
  }

  PixelCoord owner(VectorId id) const noexcept {
    const auto pix = static_cast<std::int64_t>(id / 4);
    return {static_cast<std::int32_t>(pix % width_), static_cast<std::int32_t>(pix / width_)};
  }
  static constexpr Direction direction(VectorId id) noexcept {
    return static_cast<Direction>(id % 4);
  }

  /// Integer lattice corner at which vector id starts.
  std::array<std::int32_t, 2> origin_corner(VectorId id) const noexcept {
    const PixelCoord p = owner(id);
    const auto& off = detail::kOwnerFromCorner[id % 4];
    return {p.col - off[0], p.row - off[1]};
  }

  ContourVector vector(VectorId id) const noexcept {
    const auto c = origin_corner(id);
    const auto& u = detail::kUnit[id % 4];
    const Point o{c[0] - 0.5, c[1] - 0.5};
    return {o, Point{o.x + u[0], o.y + u[1]}, owner(id)};
  }

  /// Pixel across the vector's edge from its owner (may be off-grid).
  PixelCoord outer_pixel(VectorId id) const noexcept {
    const PixelCoord p = owner(id);
    const auto& n = detail::kOutward[id % 4];
    return {p.col + n[0], p.row + n[1]};
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t pix = 0; pix < bits_.size(); ++pix) {
      const std::uint8_t b = bits_[pix];
      if (b == 0) continue;
      for (int d = 0; d < 4; ++d)
        if ((b >> d) & 1u) fn(static_cast<VectorId>(pix) * 4 + d);
    }
  }

  std::vector<ContourVector> to_list() const {
    std::vector<ContourVector> out;
    out.reserve(count_);
    for_each([&](VectorId id) { out.push_back(vector(id)); });
    return out;
  }

  /// Rebuilds a vector set from explicit segments, validating each one: unit
  /// length, axis-aligned, half-integer corners, owner on the left, no repeats.
  /// Completeness (every exposed edge present) is not required here; missing
  /// vectors surface as dangling-vector errors in connect_loops.
  static BoundaryVectors from_vectors(std::span<const ContourVector> vectors, std::int32_t width,
                                      std::int32_t height) {
    BoundaryVectors set(width, height);
    for (const auto& v : vectors) {
      const Point d = v.endpoint - v.origin;
      int dir = -1;
      for (int k = 0; k < 4; ++k)
        if (d.x == detail::kUnit[k][0] && d.y == detail::kUnit[k][1]) dir = k;
      if (dir < 0) throw Error(ErrorCode::InvalidArgument, "vector is not an axis-aligned unit step");
      const double cx = v.origin.x + 0.5, cy = v.origin.y + 0.5;
      if (cx != std::floor(cx) || cy != std::floor(cy))
        throw Error(ErrorCode::InvalidArgument, "vector origin is not a pixel corner");
      const auto& off = detail::kOwnerFromCorner[dir];
      const PixelCoord owner{static_cast<std::int32_t>(cx) + off[0],
                             static_cast<std::int32_t>(cy) + off[1]};
      if (owner != v.owner) throw Error(ErrorCode::InvalidArgument, "owner is not left of vector");
      if (owner.col < 0 || owner.row < 0 || owner.col >= width || owner.row >= height)
        throw Error(ErrorCode::InvalidArgument, "owner outside grid");
      auto& b = set.bits_[set.pixel_index(owner.col, owner.row)];
      if ((b >> dir) & 1u) throw Error(ErrorCode::InvalidArgument, "duplicate vector");
      b |= static_cast<std::uint8_t>(1u << dir);
      ++set.count_;
    }
    return set;
  }

  /// Adopts precomputed per-pixel direction bits (bit d = direction d).
  static BoundaryVectors from_bits(std::int32_t width, std::int32_t height,
                                   std::vector<std::uint8_t> bits, std::size_t count) {
    BoundaryVectors set;
    set.width_ = width;
    set.height_ = height;
    set.bits_ = std::move(bits);
    set.count_ = count;
    return set;
  }

 private:
  std::size_t pixel_index(std::int32_t col, std::int32_t row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  std::int32_t width_ = 0;
  std::int32_t height_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Per-pixel boundary vector emission. Pure per-pixel map; rows are split across
/// `workers` threads with identical output for any worker count.
template <class Mask>
BoundaryVectors emit_vectors(const Mask& mask, unsigned workers = 1) {
  const std::int32_t w = mask.width(), h = mask.height();
  std::vector<std::uint8_t> out_bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  std::atomic<std::size_t> total{0};
  std::uint8_t* bits = out_bits.data();
  const std::span<const std::uint8_t> in = mask.bits();
  const std::size_t rows = static_cast<std::size_t>(h);
  parallel_chunks(rows, std::max(1u, workers), [&](std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t r = begin; r < end; ++r) {
      const std::uint8_t* row = in.data() + r * w;
      const std::uint8_t* below = r > 0 ? row - w : nullptr;
      const std::uint8_t* above = r + 1 < rows ? row + w : nullptr;
      std::uint8_t* dst = bits + r * w;
      for (std::int32_t c = 0; c < w; ++c) {
        if (!row[c]) {
          dst[c] = 0;
          continue;
        }
        std::uint8_t b = 0;
        if (!below || !below[c]) b |= 1u;             // East along the bottom side
        if (c + 1 >= w || !row[c + 1]) b |= 2u;       // North along the right side
        if (!above || !above[c]) b |= 4u;             // West along the top side
        if (c == 0 || !row[c - 1]) b |= 8u;           // South along the left side
        dst[c] = b;
        local += static_cast<std::size_t>(std::popcount(b));
      }
    }
    total.fetch_add(local, std::memory_order_relaxed);
  });
  return BoundaryVectors::from_bits(w, h, std::move(out_bits), total.load());
}

/// Junction resolution rule used by connect_loops.
class TurnPolicy {
 public:
  enum class Kind { Left, Right, LocalGray };

  static TurnPolicy left() { return TurnPolicy(Kind::Left); }
  static TurnPolicy right() { return TurnPolicy(Kind::Right); }
  /// Left turn where the corner's interpolated value (mean of its four pixels)
  /// is above `iso`, right turn otherwise.
  static TurnPolicy local_gray(const Grid& grid, double iso) {
    TurnPolicy p(Kind::LocalGray);
    p.grid_ = &grid;
    p.iso_ = iso;
    return p;
  }

  Kind kind() const noexcept { return kind_; }
  double isovalue() const noexcept { return iso_; }

  /// Decision at integer corner (cx, cy).
  bool turn_left_at(std::int32_t cx, std::int32_t cy) const {
    switch (kind_) {
      case Kind::Left: return true;
      case Kind::Right: return false;
      case Kind::LocalGray: return corner_value(cx, cy) > iso_;
    }
    return true;
  }

  double corner_value(std::int32_t cx, std::int32_t cy) const {
    double sum = 0.0;
    int n = 0;
    for (int dy = -1; dy <= 0; ++dy)
      for (int dx = -1; dx <= 0; ++dx)
        if (grid_->contains(cx + dx, cy + dy)) {
          sum += grid_->value(cx + dx, cy + dy);
          ++n;
        }
    return n ? sum / n : 0.0;
  }

 private:
  explicit TurnPolicy(Kind k) : kind_(k) {}
  Kind kind_;
  const Grid* grid_ = nullptr;
  double iso_ = 0.0;
};

/// Connects every vector into exactly one closed loop. Loops start at the lowest
/// unused vector id, so loop order is reproducible.
inline std::vector<VectorLoop> connect_loops(const BoundaryVectors& vectors,
                                             const TurnPolicy& policy) {
  const std::int32_t w = vectors.width();
  std::vector<std::uint8_t> used(static_cast<std::size_t>(w) * vectors.height(), 0);
  auto is_used = [&](VectorId id) { return (used[id / 4] >> (id % 4)) & 1u; };
  auto mark = [&](VectorId id) { used[id / 4] |= static_cast<std::uint8_t>(1u << (id % 4)); };
  auto id_of = [&](std::int32_t col, std::int32_t row, int dir) {
    return (static_cast<VectorId>(row) * w + col) * 4 + dir;
  };

  std::vector<VectorLoop> loops;
  vectors.for_each([&](VectorId start) {
    if (is_used(start)) return;
    VectorLoop loop;
    VectorId cur = start;
    while (true) {
      mark(cur);
      loop.push_back(cur);
      const int dir = static_cast<int>(cur % 4);
      auto corner = vectors.origin_corner(cur);
      corner[0] += detail::kUnit[dir][0];
      corner[1] += detail::kUnit[dir][1];
      const int left = (dir + 1) % 4, right = (dir + 3) % 4;
      auto candidate = [&](int d, VectorId& out) {
        const auto& off = detail::kOwnerFromCorner[d];
        const std::int32_t oc = corner[0] + off[0], orow = corner[1] + off[1];
        if (!vectors.has(oc, orow, d)) return false;
        out = id_of(oc, orow, d);
        return true;
      };
      VectorId l = 0, s = 0, r = 0;
      const bool has_l = candidate(left, l), has_s = candidate(dir, s), has_r = candidate(right, r);
      VectorId next = 0;
      const int options = int(has_l) + int(has_s) + int(has_r);
      if (options == 0)
        throw Error(ErrorCode::DanglingVector,
                    "no successor for vector " + std::to_string(cur));
      if (options == 1) {
        next = has_l ? l : (has_s ? s : r);
      } else if (has_l && has_r && !has_s) {
        next = policy.turn_left_at(corner[0], corner[1]) ? l : r;
      } else {
        throw Error(ErrorCode::DanglingVector, "corner with unexpected out-degree");
      }
      if (next == start) break;
      if (is_used(next))
        throw Error(ErrorCode::DanglingVector, "vector reached twice while connecting loops");
      cur = next;
    }
    loops.push_back(std::move(loop));
  });
  return loops;
}

enum class Orientation { CounterClockwise, Clockwise };
enum class ContourKind { Dilated, PixelTrace, Iso, Region };

/// Pixel pair straddling the boundary edge a support point came from.
struct EdgeSource {
  PixelCoord inner;
  PixelCoord outer;
  bool outer_in_grid = true;
};

/// Closed polyline; the last point connects back to the first.
struct Contour {
  std::vector<Point> points;
  std::vector<EdgeSource> sources;  // parallel to points, or empty
  Orientation orientation = Orientation::CounterClockwise;
  ContourKind kind = ContourKind::Dilated;
  bool degenerate = false;

  bool is_shape() const noexcept { return orientation == Orientation::CounterClockwise; }
  bool is_hole() const noexcept { return orientation == Orientation::Clockwise; }
  double area() const { return contourforge::signed_area(points); }
  double length() const { return perimeter(points); }
};

namespace detail {

// Twice the signed area of the corner polygon traced by a loop; never zero.
inline std::int64_t loop_area2(const BoundaryVectors& v, const VectorLoop& loop) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto a = v.origin_corner(loop[i]);
    const auto b = v.origin_corner(loop[(i + 1) % loop.size()]);
    acc += static_cast<std::int64_t>(a[0]) * b[1] - static_cast<std::int64_t>(b[0]) * a[1];
  }
  return acc;
}

inline Contour contour_skeleton(const BoundaryVectors& v, const VectorLoop& loop, ContourKind kind) {
  Contour c;
  c.kind = kind;
  c.orientation = loop_area2(v, loop) > 0 ? Orientation::CounterClockwise : Orientation::Clockwise;
  c.points.reserve(loop.size());
  c.sources.reserve(loop.size());
  for (VectorId id : loop) {
    const PixelCoord outer = v.outer_pixel(id);
    const bool inside = outer.col >= 0 && outer.row >= 0 && outer.col < v.width() &&
                        outer.row < v.height();
    c.sources.push_back({v.owner(id), outer, inside});
  }
  return c;
}

}  // namespace detail

/// Dilated contours: each support point is the midpoint of its vector.
inline std::vector<Contour> dilate(const BoundaryVectors& vectors,
                                   std::span<const VectorLoop> loops) {
  std::vector<Contour> out;
  out.reserve(loops.size());
  for (const auto& loop : loops) {
    Contour c = detail::contour_skeleton(vectors, loop, ContourKind::Dilated);
    for (VectorId id : loop) {
      const ContourVector cv = vectors.vector(id);
      c.points.push_back(midpoint(cv.origin, cv.endpoint));
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Boundary-pixel tracing contours: each support point is its owner's center.
/// Repeated points are kept; zero-area results are flagged degenerate.
inline std::vector<Contour> trace_pixels(const BoundaryVectors& vectors,
                                         std::span<const VectorLoop> loops) {
  std::vector<Contour> out;
  out.reserve(loops.size());
  for (const auto& loop : loops) {
    Contour c = detail::contour_skeleton(vectors, loop, ContourKind::PixelTrace);
    for (VectorId id : loop) c.points.push_back(pixel_center(vectors.owner(id)));
    c.degenerate = c.area() == 0.0;
    out.push_back(std::move(c));
  }
  return out;
}

/// True when every point of the contour coincides (a point contour).
inline bool fully_degenerate(const Contour& c) {
  for (const Point& p : c.points)
    if (p != c.points.front()) return false;
  return !c.points.empty();
}

enum class ContourMode { Dilated, PixelTrace };

/// Convenience: emit, connect and move points in one call.
template <class Mask>
std::vector<Contour> extract_contours(const Mask& mask, const TurnPolicy& policy,
                                      ContourMode mode = ContourMode::Dilated,
                                      unsigned workers = 1) {
  const BoundaryVectors vectors = emit_vectors(mask, workers);
  const auto loops = connect_loops(vectors, policy);
  return mode == ContourMode::Dilated ? dilate(vectors, loops) : trace_pixels(vectors, loops);
}

}  // namespace contourforge
