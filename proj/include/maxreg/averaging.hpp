#pragma once

// Ball and sphere averages on the grid, radial profiles and the fractional
// average operator.
//
// Sums over stencils are exact: every field is converted to 64-bit fixed
// point with a per-field power-of-two scale, leaving enough headroom that no
// stencil sum can overflow, so a sum does not depend on the order in which
// terms are visited. The incremental engine and the brute-force oracle
// therefore agree to the last bit, and results are the same for every thread
// count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "maxreg/error.hpp"
#include "maxreg/lattice.hpp"
#include "maxreg/parallel.hpp"

namespace maxreg {

/// Fixed-point accumulator type.
using fixed_t = std::int64_t;

/// An ordered tuple of fields on one lattice. Slots are stored as absolute values.
class MultiField {
public:
  MultiField() = default;

  explicit MultiField(std::vector<ScalarField> slots) {
    if (slots.empty()) throw argument_error("a multi-field needs at least one slot");
    for (const auto& s : slots)
      if (!s.same_lattice(slots.front())) throw argument_error("all slots must share one lattice");
    for (auto& s : slots) slots_.push_back(s.map([](double v) { return std::abs(v); }));
  }

  std::size_t m() const noexcept { return slots_.size(); }
  const ScalarField& slot(std::size_t i) const { return slots_.at(i); }
  const std::vector<ScalarField>& slots() const noexcept { return slots_; }
  const Lattice& lattice() const { return slots_.front().lattice(); }
  const LatticePtr& lattice_ptr() const { return slots_.front().lattice_ptr(); }

  /// Copy with slot i replaced (the replacement is also stored as |g|).
  MultiField with_slot(std::size_t i, const ScalarField& g) const {
    if (i >= slots_.size()) throw argument_error("slot index out of range");
    std::vector<ScalarField> s = slots_;
    s[i] = g;
    return MultiField(std::move(s));
  }

private:
  std::vector<ScalarField> slots_;
};

/// Several fields in fixed point, interleaved by grid point.
class FixedBank {
public:
  FixedBank() = default;

  explicit FixedBank(const std::vector<const ScalarField*>& fields) : width_(fields.size()) {
    if (fields.empty()) throw argument_error("empty field bank");
    const Lattice& lat = fields.front()->lattice();
    // |value| < 2^bits and at most 2^headroom terms per sum keeps sums below 2^62.
    const int headroom = static_cast<int>(std::ceil(std::log2(static_cast<double>(lat.stencil().size()) + 1.0)));
    const int bits = 62 - headroom;
    scales_.resize(width_);
    data_.assign(lat.size() * width_, 0);
    for (std::size_t f = 0; f < width_; ++f) {
      if (&fields[f]->lattice() != &lat) throw argument_error("bank fields must share one lattice");
      const double maxabs = fields[f]->max_abs();
      const int s = maxabs > 0 ? bits - (std::ilogb(maxabs) + 1) : 0;
      scales_[f] = s;
      for (std::size_t p : lat.inside_points())
        data_[p * width_ + f] = static_cast<fixed_t>(std::nearbyint(std::ldexp((*fields[f])[p], s)));
    }
  }

  std::size_t width() const noexcept { return width_; }
  int scale(std::size_t f) const noexcept { return scales_[f]; }
  const fixed_t* row(std::size_t p) const noexcept { return data_.data() + p * width_; }

  /// Mean of `count` fixed-point terms of field f summing to `sum`.
  double average(std::size_t f, fixed_t sum, std::size_t count) const {
    if (count == 0) throw argument_error("empty stencil");
    const fixed_t c = static_cast<fixed_t>(count);
    const fixed_t quot = sum / c;
    const fixed_t rem = sum % c;
    return std::ldexp(static_cast<double>(quot) + static_cast<double>(rem) / static_cast<double>(count), -scales_[f]);
  }

private:
  std::size_t width_ = 0;
  std::vector<int> scales_;
  std::vector<fixed_t> data_;
};

/// Which radii take part in a supremum over 0 < r < delta(x).
enum class RadiusRule {
  ladder,            ///< {k h : k h < delta}
  ladder_with_edge,  ///< ladder plus one entry just below delta when it adds stencil points
};

/// Relative margin keeping every stencil point strictly inside the domain.
inline constexpr double edge_margin = 1e-12;

/// A radius and the squared-norm bound of its ball stencil {|o|^2 <= norm2}.
struct RadiusEntry {
  double radius;
  std::int64_t norm2;
};

/// Squared-norm bound of the ball of radius r, with r/h snapped to a nearby integer.
inline std::int64_t ball_norm2(double r, double h) {
  const double x = r / h;
  const double k = std::nearbyint(x);
  if (std::abs(x - k) <= 1e-9) return static_cast<std::int64_t>(k) * static_cast<std::int64_t>(k);
  return static_cast<std::int64_t>(std::floor(x * x));
}

inline std::vector<RadiusEntry> radius_entries(double delta, double h, RadiusRule rule) {
  std::vector<RadiusEntry> out;
  if (!(delta > 0) || !(h > 0)) return out;
  const double limit = delta * (1.0 - edge_margin);
  for (std::int64_t k = 1; static_cast<double>(k) * h < limit; ++k) out.push_back({static_cast<double>(k) * h, k * k});
  if (rule == RadiusRule::ladder_with_edge && !out.empty()) {
    const double x = limit / h;
    const auto s = static_cast<std::int64_t>(std::floor(x * x));
    if (s > out.back().norm2) out.push_back({limit, s});
  }
  return out;
}

/// Admissible radii {k h : k >= 1, k h < delta}.
inline std::vector<double> radius_ladder(double delta, double h) {
  if (!(delta > 0) || !(h > 0)) throw argument_error("radius_ladder needs delta > 0 and h > 0");
  std::vector<double> r;
  for (const auto& e : radius_entries(delta, h, RadiusRule::ladder)) r.push_back(e.radius);
  return r;
}

/// Largest squared norm a stencil at p may reach without leaving the domain.
inline std::int64_t edge_norm2(const Lattice& lat, std::size_t p) {
  const double x = lat.delta(p) * (1.0 - edge_margin) / lat.h();
  return static_cast<std::int64_t>(std::floor(x * x));
}

namespace detail {

template <int W>
inline void sweep_fixed(const fixed_t* base, const std::ptrdiff_t* deltas, std::size_t& i, std::size_t end,
                        fixed_t* acc) {
  fixed_t a0 = acc[0], a1 = W > 1 ? acc[1] : 0, a2 = W > 2 ? acc[2] : 0, a3 = W > 3 ? acc[3] : 0;
  for (; i < end; ++i) {
    const fixed_t* r = base + deltas[i] * W;
    a0 += r[0];
    if constexpr (W > 1) a1 += r[1];
    if constexpr (W > 2) a2 += r[2];
    if constexpr (W > 3) a3 += r[3];
  }
  acc[0] = a0;
  if constexpr (W > 1) acc[1] = a1;
  if constexpr (W > 2) acc[2] = a2;
  if constexpr (W > 3) acc[3] = a3;
}

/// Walks the sorted stencil once from the centre outwards, adding every bank
/// field; after the first ends[j] offsets calls emit(j, acc).
template <class Emit>
void sweep(const FixedBank& bank, const Stencil& st, std::size_t p, std::span<const std::size_t> ends, fixed_t* acc,
           Emit&& emit) {
  const std::size_t w = bank.width();
  std::fill(acc, acc + w, fixed_t{0});
  const auto deltas = st.deltas();
  const fixed_t* base = bank.row(p);
  std::size_t i = 0;
  for (std::size_t j = 0; j < ends.size(); ++j) {
    const std::size_t end = ends[j];
    switch (w) {
      case 1: sweep_fixed<1>(base, deltas.data(), i, end, acc); break;
      case 2: sweep_fixed<2>(base, deltas.data(), i, end, acc); break;
      case 3: sweep_fixed<3>(base, deltas.data(), i, end, acc); break;
      case 4: sweep_fixed<4>(base, deltas.data(), i, end, acc); break;
      default:
        for (; i < end; ++i) {
          const fixed_t* r = base + deltas[i] * static_cast<std::ptrdiff_t>(w);
          for (std::size_t f = 0; f < w; ++f) acc[f] += r[f];
        }
    }
    emit(j, static_cast<const fixed_t*>(acc));
  }
}

} // namespace detail

/// r^alpha times the product of slot averages; the profile value at a positive radius.
inline double profile_value(double r, double alpha, std::span<const double> averages) {
  double v = alpha == 0.0 ? 1.0 : std::pow(r, alpha);
  for (double a : averages) v *= a;
  return v;
}

/// Profile value at r = 0: the product of point values when alpha = 0, else 0.
inline double profile_value_at_zero(double alpha, std::span<const double> point_values) {
  if (alpha != 0.0) return 0.0;
  double v = 1.0;
  for (double a : point_values) v *= a;
  return v;
}

/// Ball and sphere averages of one field at arbitrary points and radii.
class Averager {
public:
  explicit Averager(const ScalarField& f) : field_(&f), bank_(std::vector<const ScalarField*>{&f}) {}

  const Lattice& lattice() const { return field_->lattice(); }

  /// Exact fixed-point sum and number of points of the ball {|o|^2 <= norm2} around p.
  std::pair<fixed_t, std::size_t> ball_sum(std::size_t p, std::int64_t norm2) const {
    check_point(p);
    if (norm2 > edge_norm2(lattice(), p)) throw argument_error("radius must be smaller than delta(x)");
    return range_sum(p, 0, lattice().stencil().count_upto(norm2));
  }

  double ball_average(std::size_t p, double r) const {
    check_radius(p, r);
    const std::int64_t s = ball_norm2(r, lattice().h());
    if (s < 1) throw argument_error("empty stencil: radius below the grid spacing");
    const auto [sum, count] = ball_sum(p, s);
    return bank_.average(0, sum, count);
  }

  /// Mean over the shell (r - h/2, r + h/2], clipped to the largest ball that stays inside.
  double sphere_average(std::size_t p, double r) const {
    check_radius(p, r);
    const double h = lattice().h();
    if (r < 2.0 * h * (1.0 - 1e-9)) throw argument_error("sphere radius must be at least 2h");
    const auto [lo, hi] = shell_range(lattice(), p, r);
    if (hi <= lo) throw argument_error("empty shell");
    const auto [sum, count] = range_sum(p, lo, hi);
    return bank_.average(0, sum, count);
  }

  /// Stencil index range [lo, hi) of the clipped shell of radius r at p.
  static std::pair<std::size_t, std::size_t> shell_range(const Lattice& lat, std::size_t p, double r) {
    const double x = r / lat.h();
    const double k = std::nearbyint(x);
    std::int64_t inner, outer;
    if (std::abs(x - k) <= 1e-9) {
      const auto ki = static_cast<std::int64_t>(k);
      inner = ki * ki - ki;
      outer = ki * ki + ki;
    } else {
      inner = static_cast<std::int64_t>(std::floor((x - 0.5) * (x - 0.5)));
      outer = static_cast<std::int64_t>(std::floor((x + 0.5) * (x + 0.5)));
    }
    outer = std::min(outer, edge_norm2(lat, p));
    const Stencil& st = lat.stencil();
    const std::size_t lo = st.count_upto(inner);
    const std::size_t hi = outer > inner ? st.count_upto(outer) : lo;
    return {lo, hi};
  }

private:
  void check_point(std::size_t p) const {
    if (p >= lattice().size() || !lattice().inside(p)) throw argument_error("average requested outside the domain");
  }
  void check_radius(std::size_t p, double r) const {
    check_point(p);
    if (!(r > 0)) throw argument_error("radius must be positive");
    if (r >= lattice().delta(p)) throw argument_error("radius must be smaller than delta(x)");
  }
  std::pair<fixed_t, std::size_t> range_sum(std::size_t p, std::size_t lo, std::size_t hi) const {
    const auto deltas = lattice().stencil().deltas();
    const fixed_t* base = bank_.row(p);
    fixed_t acc = 0;
    for (std::size_t i = lo; i < hi; ++i) acc += base[deltas[i]];
    return {acc, hi - lo};
  }

  const ScalarField* field_;
  FixedBank bank_;
};

inline double ball_average(const ScalarField& f, std::size_t p, double r) { return Averager(f).ball_average(p, r); }

inline double sphere_average(const ScalarField& f, std::size_t p, double r) {
  return Averager(f).sphere_average(p, r);
}

/// The sampled map r -> r^alpha prod A_{x,r}(|f_i|) at one point.
struct RadialProfile {
  std::size_t point = 0;
  std::vector<double> radii;
  std::vector<double> values;
  double value_at_zero = 0.0;

  double max_value() const {
    double m = value_at_zero;
    for (double v : values) m = std::max(m, v);
    return m;
  }
};

inline RadialProfile radial_profile(const MultiField& fields, std::size_t p, double alpha,
                                    RadiusRule rule = RadiusRule::ladder) {
  const Lattice& lat = fields.lattice();
  if (p >= lat.size() || !lat.inside(p)) throw argument_error("profile requested outside the domain");
  std::vector<const ScalarField*> ptrs;
  for (const auto& s : fields.slots()) ptrs.push_back(&s);
  const FixedBank bank(ptrs);
  const auto entries = radius_entries(lat.delta(p), lat.h(), rule);
  std::vector<std::size_t> ends;
  for (const auto& e : entries) ends.push_back(lat.stencil().count_upto(e.norm2));
  RadialProfile prof;
  prof.point = p;
  std::vector<double> pv(fields.m());
  for (std::size_t i = 0; i < fields.m(); ++i) pv[i] = fields.slot(i)[p];
  prof.value_at_zero = profile_value_at_zero(alpha, pv);
  std::vector<fixed_t> acc(fields.m());
  std::vector<double> avg(fields.m());
  detail::sweep(bank, lat.stencil(), p, ends, acc.data(), [&](std::size_t j, const fixed_t* sums) {
    for (std::size_t i = 0; i < fields.m(); ++i) avg[i] = bank.average(i, sums[i], ends[j]);
    prof.radii.push_back(entries[j].radius);
    prof.values.push_back(profile_value(entries[j].radius, alpha, avg));
  });
  return prof;
}

/// x -> r^alpha prod A_{x,r}(|f_i|) with r the largest ladder radius <= t delta(x).
inline ScalarField fractional_average_field(const MultiField& fields, double t, double alpha, unsigned threads = 0) {
  if (!(t > 0.0 && t < 1.0)) throw argument_error("t must lie in (0,1)");
  if (!(alpha >= 0.0)) throw argument_error("alpha must be nonnegative");
  const LatticePtr& lat = fields.lattice_ptr();
  std::vector<const ScalarField*> ptrs;
  for (const auto& s : fields.slots()) ptrs.push_back(&s);
  const FixedBank bank(ptrs);
  const std::size_t m = fields.m();
  const auto& pts = lat->inside_points();
  std::vector<double> out(lat->size(), 0.0);
  const double h = lat->h();
  parallel_for(pts.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<fixed_t> acc(m);
    std::vector<double> avg(m);
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t p = pts[i];
      const auto ladder = radius_entries(lat->delta(p), h, RadiusRule::ladder);
      const double target = t * lat->delta(p);
      std::int64_t k = 0;
      for (const auto& en : ladder)
        if (en.radius <= target * (1.0 + 1e-12)) k = static_cast<std::int64_t>(&en - ladder.data()) + 1;
      if (k == 0) {
        for (std::size_t s = 0; s < m; ++s) avg[s] = fields.slot(s)[p];
        out[p] = profile_value_at_zero(alpha, avg);
        continue;
      }
      const double r = ladder[static_cast<std::size_t>(k - 1)].radius;
      const std::size_t end = lat->stencil().count_upto(k * k);
      detail::sweep(bank, lat->stencil(), p, std::span<const std::size_t>(&end, 1), acc.data(),
                    [&](std::size_t, const fixed_t* sums) {
                      for (std::size_t s = 0; s < m; ++s) avg[s] = bank.average(s, sums[s], end);
                      out[p] = profile_value(r, alpha, avg);
                    });
    }
  });
  return ScalarField(lat, std::move(out));
}

} // namespace maxreg
