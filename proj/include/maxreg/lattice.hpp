#pragma once

// Domains, uniform grids, the inside mask and the distance-to-complement field.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxreg/error.hpp"

namespace maxreg {

using Coord = std::array<double, 3>;
using Index3 = std::array<std::ptrdiff_t, 3>;

enum class DomainKind { interval, rectangle, disk, annulus, rect_union };

inline const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::disk: return "disk";
    case DomainKind::annulus: return "annulus";
    case DomainKind::rect_union: return "rect_union";
  }
  return "?";
}

struct AxisBox {
  Coord lo{};
  Coord hi{};
};

/// Plain description of a domain, as read from a config file.
struct DomainSpec {
  std::string kind;
  std::vector<double> lo, hi;                 // interval, rectangle
  std::vector<double> center;                 // disk, annulus
  double radius = 0.0;                        // disk radius, annulus outer radius
  double inner_radius = 0.0;                  // annulus
  std::vector<std::pair<std::vector<double>, std::vector<double>>> rects;  // rect_union
};

namespace detail {

inline double norm(const Coord& a, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

inline double dist(const Coord& a, const Coord& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct Segment {
  Coord a{}, b{};
};

inline double point_segment_distance(const Coord& p, const Segment& s) {
  const double dx = s.b[0] - s.a[0], dy = s.b[1] - s.a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p[0] - s.a[0]) * dx + (p[1] - s.a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = s.a[0] + t * dx - p[0], qy = s.a[1] + t * dy - p[1];
  return std::sqrt(qx * qx + qy * qy);
}

} // namespace detail

/// A bounded open subset of R^n drawn from a fixed catalog of shapes with an
/// exactly computable distance to the complement.
class Domain {
public:
  static Domain interval(double a, double b) {
    if (!(b > a)) throw geometry_error("degenerate geometry: interval needs lo < hi");
    Domain d(DomainKind::interval, 1);
    d.boxes_.push_back({{a, 0, 0}, {b, 0, 0}});
    return d;
  }

  static Domain rectangle(const Coord& lo, const Coord& hi, int dim) {
    if (dim < 1 || dim > 3) throw geometry_error("rectangle dimension must be 1, 2 or 3");
    for (int i = 0; i < dim; ++i)
      if (!(hi[i] > lo[i])) throw geometry_error("degenerate geometry: rectangle with zero extent");
    Domain d(DomainKind::rectangle, dim);
    d.boxes_.push_back({lo, hi});
    return d;
  }

  static Domain disk(const Coord& center, double radius, int dim) {
    if (dim < 2 || dim > 3) throw geometry_error("disk dimension must be 2 or 3");
    if (!(radius > 0)) throw geometry_error("degenerate geometry: disk radius must be positive");
    Domain d(DomainKind::disk, dim);
    d.center_ = center;
    d.outer_ = radius;
    return d;
  }

  static Domain annulus(const Coord& center, double inner, double outer, int dim) {
    if (dim < 2 || dim > 3) throw geometry_error("annulus dimension must be 2 or 3");
    if (!(inner > 0) || !(outer > inner))
      throw geometry_error("degenerate geometry: annulus needs 0 < inner radius < outer radius");
    Domain d(DomainKind::annulus, dim);
    d.center_ = center;
    d.inner_ = inner;
    d.outer_ = outer;
    return d;
  }

  /// Interior of the union of closed axis-aligned rectangles (2D only).
  static Domain rect_union(std::vector<AxisBox> rects) {
    if (rects.empty()) throw geometry_error("rect_union needs at least one rectangle");
    for (const auto& r : rects)
      if (!(r.hi[0] > r.lo[0]) || !(r.hi[1] > r.lo[1]))
        throw geometry_error("degenerate geometry: rectangle with zero extent in rect_union");
    Domain d(DomainKind::rect_union, 2);
    d.boxes_ = std::move(rects);
    d.build_union();
    return d;
  }

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  const std::vector<AxisBox>& boxes() const noexcept { return boxes_; }
  const Coord& center() const noexcept { return center_; }
  double radius() const noexcept { return outer_; }
  double inner_radius() const noexcept { return inner_; }

  /// dist(x, complement). Zero for points outside or on the boundary.
  double distance_to_complement(const Coord& x) const {
    switch (kind_) {
      case DomainKind::interval:
      case DomainKind::rectangle: {
        const auto& b = boxes_.front();
        double d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < dim_; ++i) d = std::min({d, x[i] - b.lo[i], b.hi[i] - x[i]});
        return std::max(d, 0.0);
      }
      case DomainKind::disk:
        return std::max(outer_ - detail::dist(x, center_, dim_), 0.0);
      case DomainKind::annulus: {
        const double r = detail::dist(x, center_, dim_);
        return std::max(std::min(r - inner_, outer_ - r), 0.0);
      }
      case DomainKind::rect_union: {
        bool in_closure = false;
        for (const auto& b : boxes_)
          if (x[0] >= b.lo[0] && x[0] <= b.hi[0] && x[1] >= b.lo[1] && x[1] <= b.hi[1]) {
            in_closure = true;
            break;
          }
        if (!in_closure) return 0.0;
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : boundary_) d = std::min(d, detail::point_segment_distance(x, s));
        return d;
      }
    }
    return 0.0;
  }

  bool contains(const Coord& x) const { return distance_to_complement(x) > 0.0; }

  AxisBox bounding_box() const {
    AxisBox box;
    switch (kind_) {
      case DomainKind::interval:
      case DomainKind::rectangle:
        return boxes_.front();
      case DomainKind::disk:
      case DomainKind::annulus:
        for (int i = 0; i < dim_; ++i) {
          box.lo[i] = center_[i] - outer_;
          box.hi[i] = center_[i] + outer_;
        }
        return box;
      case DomainKind::rect_union:
        box = boxes_.front();
        for (const auto& b : boxes_)
          for (int i = 0; i < 2; ++i) {
            box.lo[i] = std::min(box.lo[i], b.lo[i]);
            box.hi[i] = std::max(box.hi[i], b.hi[i]);
          }
        return box;
    }
    return box;
  }

  /// Lebesgue measure |Omega|.
  double measure() const {
    switch (kind_) {
      case DomainKind::interval:
      case DomainKind::rectangle: {
        double v = 1.0;
        for (int i = 0; i < dim_; ++i) v *= boxes_.front().hi[i] - boxes_.front().lo[i];
        return v;
      }
      case DomainKind::disk:
        return unit_ball_volume(dim_) * std::pow(outer_, dim_);
      case DomainKind::annulus:
        return unit_ball_volume(dim_) * (std::pow(outer_, dim_) - std::pow(inner_, dim_));
      case DomainKind::rect_union: {
        double v = 0.0;
        const std::size_t ny = ys_.size() - 1;
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
          for (std::size_t j = 0; j < ny; ++j)
            if (covered_[i * ny + j]) v += (xs_[i + 1] - xs_[i]) * (ys_[j + 1] - ys_[j]);
        return v;
      }
    }
    return 0.0;
  }

  /// Volume of the unit ball in R^n.
  static double unit_ball_volume(int n) {
    constexpr double pi = 3.14159265358979323846;
    switch (n) {
      case 1: return 2.0;
      case 2: return pi;
      case 3: return 4.0 * pi / 3.0;
      default: return std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
    }
  }

private:
  Domain(DomainKind kind, int dim) : kind_(kind), dim_(dim) {}

  // Compresses the rectangle corners into a cell grid, marks covered cells,
  // collects covered/uncovered cell faces as boundary segments and checks
  // that covered cells form one edge-connected component.
  void build_union() {
    for (const auto& b : boxes_) {
      xs_.push_back(b.lo[0]);
      xs_.push_back(b.hi[0]);
      ys_.push_back(b.lo[1]);
      ys_.push_back(b.hi[1]);
    }
    std::sort(xs_.begin(), xs_.end());
    xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
    std::sort(ys_.begin(), ys_.end());
    ys_.erase(std::unique(ys_.begin(), ys_.end()), ys_.end());
    const std::size_t nx = xs_.size() - 1, ny = ys_.size() - 1;
    covered_.assign(nx * ny, 0);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const double cx = 0.5 * (xs_[i] + xs_[i + 1]), cy = 0.5 * (ys_[j] + ys_[j + 1]);
        for (const auto& b : boxes_)
          if (cx > b.lo[0] && cx < b.hi[0] && cy > b.lo[1] && cy < b.hi[1]) {
            covered_[i * ny + j] = 1;
            break;
          }
      }
    auto cov = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
      if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(nx) || j >= static_cast<std::ptrdiff_t>(ny)) return false;
      return covered_[static_cast<std::size_t>(i) * ny + static_cast<std::size_t>(j)] != 0;
    };
    for (std::ptrdiff_t i = 0; i <= static_cast<std::ptrdiff_t>(nx); ++i)
      for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(ny); ++j)
        if (cov(i - 1, j) != cov(i, j))
          boundary_.push_back({{xs_[i], ys_[j], 0}, {xs_[i], ys_[j + 1], 0}});
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nx); ++i)
      for (std::ptrdiff_t j = 0; j <= static_cast<std::ptrdiff_t>(ny); ++j)
        if (cov(i, j - 1) != cov(i, j))
          boundary_.push_back({{xs_[i], ys_[j], 0}, {xs_[i + 1], ys_[j], 0}});

    // Edge connectivity of covered cells.
    std::vector<std::uint8_t> seen(covered_.size(), 0);
    std::size_t start = covered_.size();
    std::size_t total = 0;
    for (std::size_t c = 0; c < covered_.size(); ++c)
      if (covered_[c]) {
        ++total;
        if (start == covered_.size()) start = c;
      }
    std::queue<std::size_t> todo;
    todo.push(start);
    seen[start] = 1;
    std::size_t reached = 0;
    while (!todo.empty()) {
      const std::size_t c = todo.front();
      todo.pop();
      ++reached;
      const auto i = static_cast<std::ptrdiff_t>(c / ny), j = static_cast<std::ptrdiff_t>(c % ny);
      const std::ptrdiff_t nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb)
        if (cov(q[0], q[1])) {
          const std::size_t k = static_cast<std::size_t>(q[0]) * ny + static_cast<std::size_t>(q[1]);
          if (!seen[k]) {
            seen[k] = 1;
            todo.push(k);
          }
        }
    }
    if (reached != total) throw geometry_error("rect_union is not connected: rectangles must overlap or share an edge");
  }

  DomainKind kind_;
  int dim_;
  std::vector<AxisBox> boxes_;
  Coord center_{};
  double inner_ = 0.0, outer_ = 0.0;
  std::vector<double> xs_, ys_;
  std::vector<std::uint8_t> covered_;
  std::vector<detail::Segment> boundary_;
};

/// Builds and validates a domain from its plain description.
inline Domain build_domain(const DomainSpec& spec) {
  auto coord = [](const std::vector<double>& v, const char* what) {
    if (v.empty() || v.size() > 3) throw geometry_error(std::string(what) + " must have 1 to 3 components");
    Coord c{};
    std::copy(v.begin(), v.end(), c.begin());
    return c;
  };
  if (spec.kind == "interval") {
    if (spec.lo.size() != 1 || spec.hi.size() != 1) throw geometry_error("interval needs scalar lo and hi");
    return Domain::interval(spec.lo[0], spec.hi[0]);
  }
  if (spec.kind == "rectangle") {
    if (spec.lo.size() != spec.hi.size()) throw geometry_error("rectangle lo/hi dimension mismatch");
    return Domain::rectangle(coord(spec.lo, "lo"), coord(spec.hi, "hi"), static_cast<int>(spec.lo.size()));
  }
  if (spec.kind == "disk") {
    return Domain::disk(coord(spec.center, "center"), spec.radius, static_cast<int>(spec.center.size()));
  }
  if (spec.kind == "annulus") {
    return Domain::annulus(coord(spec.center, "center"), spec.inner_radius, spec.radius,
                           static_cast<int>(spec.center.size()));
  }
  if (spec.kind == "rect_union") {
    std::vector<AxisBox> boxes;
    for (const auto& [lo, hi] : spec.rects) {
      if (lo.size() != 2 || hi.size() != 2) throw geometry_error("rect_union rectangles must be 2D");
      boxes.push_back({coord(lo, "lo"), coord(hi, "hi")});
    }
    return Domain::rect_union(std::move(boxes));
  }
  throw geometry_error("unknown domain kind \"" + spec.kind + "\"");
}

/// Uniform grid; linear indices are row-major with the last axis fastest.
struct Grid {
  double h = 0.0;
  int dim = 0;
  Coord origin{};
  Index3 shape{1, 1, 1};

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(shape[0] * shape[1] * shape[2]);
  }
  Index3 strides() const noexcept { return {shape[1] * shape[2], shape[2], 1}; }

  Index3 multi_index(std::size_t linear) const noexcept {
    const auto l = static_cast<std::ptrdiff_t>(linear);
    return {l / (shape[1] * shape[2]), (l / shape[2]) % shape[1], l % shape[2]};
  }
  std::size_t linear(const Index3& idx) const noexcept {
    return static_cast<std::size_t>((idx[0] * shape[1] + idx[1]) * shape[2] + idx[2]);
  }
  bool in_bounds(const Index3& idx) const noexcept {
    for (int i = 0; i < 3; ++i)
      if (idx[i] < 0 || idx[i] >= shape[i]) return false;
    return true;
  }
  Coord point(const Index3& idx) const noexcept {
    Coord c{};
    for (int i = 0; i < dim; ++i) c[i] = origin[i] + static_cast<double>(idx[i]) * h;
    return c;
  }
  Coord point(std::size_t linear) const noexcept { return point(multi_index(linear)); }
  double cell_volume() const noexcept { return std::pow(h, dim); }
};

/// Integer offsets |o|^2 <= max_norm2 sorted by squared norm (ties in
/// lexicographic order). Every ball {|o|^2 <= s} and every shell
/// {a <= |o|^2 <= b} is a contiguous slice of this list.
class Stencil {
public:
  Stencil() = default;

  Stencil(const Grid& grid, std::int64_t max_norm2) : max_norm2_(max_norm2) {
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(std::sqrt(static_cast<double>(max_norm2)))) + 1;
    Index3 lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < grid.dim; ++i) {
      lo[i] = -reach;
      hi[i] = reach;
    }
    for (std::ptrdiff_t a = lo[0]; a <= hi[0]; ++a)
      for (std::ptrdiff_t b = lo[1]; b <= hi[1]; ++b)
        for (std::ptrdiff_t c = lo[2]; c <= hi[2]; ++c) {
          const std::int64_t s = a * a + b * b + c * c;
          if (s <= max_norm2) entries_.push_back({s, {a, b, c}});
        }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& x, const Entry& y) { return x.norm2 < y.norm2; });
    const Index3 st = grid.strides();
    deltas_.reserve(entries_.size());
    for (const auto& e : entries_)
      deltas_.push_back(e.offset[0] * st[0] + e.offset[1] * st[1] + e.offset[2] * st[2]);
    count_upto_.assign(static_cast<std::size_t>(max_norm2) + 1, 0);
    std::size_t k = 0;
    for (std::int64_t s = 0; s <= max_norm2; ++s) {
      while (k < entries_.size() && entries_[k].norm2 <= s) ++k;
      count_upto_[static_cast<std::size_t>(s)] = static_cast<std::uint32_t>(k);
    }
  }

  std::int64_t max_norm2() const noexcept { return max_norm2_; }
  std::size_t size() const noexcept { return deltas_.size(); }
  std::span<const std::ptrdiff_t> deltas() const noexcept { return deltas_; }
  const Index3& offset(std::size_t i) const noexcept { return entries_[i].offset; }
  std::int64_t norm2(std::size_t i) const noexcept { return entries_[i].norm2; }

  /// Number of offsets with |o|^2 <= s.
  std::size_t count_upto(std::int64_t s) const {
    if (s < 0) return 0;
    if (s > max_norm2_) throw argument_error("stencil radius exceeds the cached range");
    return count_upto_[static_cast<std::size_t>(s)];
  }

private:
  struct Entry {
    std::int64_t norm2;
    Index3 offset;
  };
  std::int64_t max_norm2_ = -1;
  std::vector<Entry> entries_;
  std::vector<std::ptrdiff_t> deltas_;
  std::vector<std::uint32_t> count_upto_;
};

/// A rasterized domain: grid, inside mask, exact distance field and the
/// shared stencil cache. Immutable once built.
class Lattice {
public:
  const Domain& domain() const noexcept { return domain_; }
  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim; }
  double h() const noexcept { return grid_.h; }
  std::size_t size() const noexcept { return grid_.size(); }

  bool inside(std::size_t p) const noexcept { return mask_[p] != 0; }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  const std::vector<std::size_t>& inside_points() const noexcept { return inside_; }
  std::size_t inside_count() const noexcept { return inside_.size(); }

  /// dist(point, complement of the continuum domain); 0 outside.
  double delta(std::size_t p) const noexcept { return delta_[p]; }
  std::span<const double> delta_values() const noexcept { return delta_; }
  double max_delta() const noexcept { return max_delta_; }

  const Stencil& stencil() const noexcept { return stencil_; }

  /// Neighbour of p along `axis` in direction `step` (+1/-1) if it is an inside point.
  bool neighbour(std::size_t p, int axis, int step, std::size_t& out) const noexcept {
    Index3 idx = grid_.multi_index(p);
    idx[axis] += step;
    if (!grid_.in_bounds(idx)) return false;
    out = grid_.linear(idx);
    return mask_[out] != 0;
  }

  friend std::shared_ptr<const Lattice> rasterize(const Domain& domain, double h);

private:
  explicit Lattice(Domain d) : domain_(std::move(d)) {}

  Domain domain_;
  Grid grid_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::size_t> inside_;
  std::vector<double> delta_;
  double max_delta_ = 0.0;
  Stencil stencil_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

/// Lays a grid with spacing h over the bounding box of the domain (origin at
/// its lower corner) and classifies points strictly inside as interior.
inline LatticePtr rasterize(const Domain& domain, double h) {
  if (!(h > 0) || !std::isfinite(h)) throw geometry_error("grid spacing h must be positive");
  auto lat = std::shared_ptr<Lattice>(new Lattice(domain));
  Grid& g = lat->grid_;
  g.h = h;
  g.dim = domain.dim();
  const AxisBox box = domain.bounding_box();
  for (int i = 0; i < g.dim; ++i) {
    g.origin[i] = box.lo[i];
    const double cells = (box.hi[i] - box.lo[i]) / h;
    if (cells > 1e7) throw geometry_error("grid too large");
    g.shape[i] = static_cast<std::ptrdiff_t>(std::ceil(cells - 1e-9)) + 1;
    if (g.shape[i] < 3) throw geometry_error("h too coarse: fewer than 3 grid points per axis");
  }
  const std::size_t n = g.size();
  lat->mask_.assign(n, 0);
  lat->delta_.assign(n, 0.0);
  std::array<std::vector<std::uint8_t>, 3> used;
  for (int i = 0; i < g.dim; ++i) used[i].assign(static_cast<std::size_t>(g.shape[i]), 0);
  for (std::size_t p = 0; p < n; ++p) {
    const Index3 idx = g.multi_index(p);
    const double d = domain.distance_to_complement(g.point(idx));
    if (d > 0.0) {
      lat->mask_[p] = 1;
      lat->delta_[p] = d;
      lat->inside_.push_back(p);
      lat->max_delta_ = std::max(lat->max_delta_, d);
      for (int i = 0; i < g.dim; ++i) used[i][static_cast<std::size_t>(idx[i])] = 1;
    }
  }
  for (int i = 0; i < g.dim; ++i)
    if (std::count(used[i].begin(), used[i].end(), std::uint8_t{1}) < 3)
      throw geometry_error("h too coarse: fewer than 3 interior points along an axis");
  const double reach = lat->max_delta_ / h + 1.0;
  lat->stencil_ = Stencil(g, static_cast<std::int64_t>(std::ceil(reach * reach)) + 1);
  return lat;
}

/// Values of a function on the inside points of a lattice. Storage is dense
/// over the whole grid; entries at outside points are zero and never read.
class ScalarField {
public:
  ScalarField() = default;

  ScalarField(LatticePtr lattice, std::vector<double> values) : lattice_(std::move(lattice)), values_(std::move(values)) {
    if (!lattice_) throw argument_error("field needs a lattice");
    if (values_.size() != lattice_->size()) throw argument_error("field size does not match its grid");
    for (std::size_t p = 0; p < values_.size(); ++p) {
      if (!lattice_->inside(p)) {
        values_[p] = 0.0;
      } else if (!std::isfinite(values_[p])) {
        throw argument_error("field values must be finite");
      }
    }
  }

  static ScalarField zeros(LatticePtr lattice) {
    const std::size_t n = lattice->size();
    return ScalarField(std::move(lattice), std::vector<double>(n, 0.0));
  }

  template <class F>
  static ScalarField from_function(LatticePtr lattice, F&& f) {
    std::vector<double> v(lattice->size(), 0.0);
    for (std::size_t p : lattice->inside_points()) v[p] = f(lattice->grid().point(p));
    return ScalarField(std::move(lattice), std::move(v));
  }

  const Lattice& lattice() const noexcept { return *lattice_; }
  const LatticePtr& lattice_ptr() const noexcept { return lattice_; }
  std::span<const double> values() const noexcept { return values_; }

  double operator[](std::size_t p) const noexcept { return values_[p]; }

  double at(std::size_t p) const {
    if (p >= values_.size() || !lattice_->inside(p)) throw argument_error("field query outside the domain");
    return values_[p];
  }

  template <class F>
  ScalarField map(F&& f) const {
    std::vector<double> v(values_.size(), 0.0);
    for (std::size_t p : lattice_->inside_points()) v[p] = f(values_[p]);
    return ScalarField(lattice_, std::move(v));
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (std::size_t p : lattice_->inside_points()) m = std::max(m, std::abs(values_[p]));
    return m;
  }

  bool same_lattice(const ScalarField& other) const noexcept { return lattice_ == other.lattice_; }

private:
  LatticePtr lattice_;
  std::vector<double> values_;
};

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (!a.same_lattice(b)) throw argument_error("fields live on different lattices");
  std::vector<double> v(a.values().begin(), a.values().end());
  for (std::size_t p : a.lattice().inside_points()) v[p] += b[p];
  return ScalarField(a.lattice_ptr(), std::move(v));
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (!a.same_lattice(b)) throw argument_error("fields live on different lattices");
  std::vector<double> v(a.values().begin(), a.values().end());
  for (std::size_t p : a.lattice().inside_points()) v[p] -= b[p];
  return ScalarField(a.lattice_ptr(), std::move(v));
}

inline ScalarField operator*(double s, const ScalarField& a) {
  return a.map([s](double v) { return s * v; });
}

/// Gradient-like field: one component per axis on a shared lattice.
struct VectorField {
  std::vector<ScalarField> components;
  /// Per grid point, bit l set when axis l had no inside neighbour (component 0 there).
  std::vector<std::uint8_t> missing_axes;

  ScalarField magnitude() const {
    const auto& lat = components.front().lattice_ptr();
    std::vector<double> v(lat->size(), 0.0);
    for (std::size_t p : lat->inside_points()) {
      double s = 0.0;
      for (const auto& c : components) s += c[p] * c[p];
      v[p] = std::sqrt(s);
    }
    return ScalarField(lat, std::move(v));
  }
};

/// The distance field delta(x) = dist(x, complement) on the inside points.
inline ScalarField distance_field(const LatticePtr& lattice) {
  return ScalarField(lattice, std::vector<double>(lattice->delta_values().begin(), lattice->delta_values().end()));
}

} // namespace maxreg
