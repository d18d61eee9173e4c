#pragma once

// Local multilinear fractional maximal operators, the spherical maximal
// operator, argmax radius sets and their Hausdorff distance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "maxreg/averaging.hpp"
#include "maxreg/error.hpp"
#include "maxreg/lattice.hpp"
#include "maxreg/parallel.hpp"

namespace maxreg {

enum class Engine { oracle, fast };

/// One product r^alpha prod_{i in slots} A_{x,r}(bank[i]) to maximize.
struct ProductSpec {
  std::vector<std::size_t> slots;
  double alpha = 0.0;
  bool track_argmax = true;
};

struct MaxOptions {
  Engine engine = Engine::fast;
  double rel_tol = 1e-9;
  RadiusRule rule = RadiusRule::ladder;
  unsigned threads = 0;
  bool argmax = true;
};

struct MaxResult {
  ScalarField value;
  /// Per grid point (empty outside): radii, 0 included, within rel_tol of the maximum.
  std::vector<std::vector<double>> argmax_radii;
  double rel_tol = 0.0;
};

namespace detail {

inline void check_alpha(double alpha, std::size_t m, int n) {
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(m) * n))
    throw argument_error("alpha out of range: need 0 <= alpha < m n");
}

inline void collect_argmax(double zero_value, std::span<const double> radii, std::span<const double> values,
                           double rel_tol, double& best, std::vector<double>* set) {
  best = zero_value;
  for (double v : values) best = std::max(best, v);
  if (!set) return;
  set->clear();
  const double bar = (1.0 - rel_tol) * best;
  if (zero_value >= bar) set->push_back(0.0);
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] >= bar) set->push_back(radii[j]);
}

// Brute-force sums: enumerate the cube around p and keep offsets inside the ball.
inline void oracle_sums(const FixedBank& bank, const Lattice& lat, std::size_t p, std::int64_t norm2, fixed_t* acc,
                        std::size_t& count) {
  const std::size_t w = bank.width();
  std::fill(acc, acc + w, fixed_t{0});
  count = 0;
  const auto reach = static_cast<std::ptrdiff_t>(std::floor(std::sqrt(static_cast<double>(norm2)))) + 1;
  const Grid& g = lat.grid();
  const Index3 c = g.multi_index(p);
  Index3 lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < g.dim; ++i) {
    lo[i] = -reach;
    hi[i] = reach;
  }
  for (std::ptrdiff_t a = lo[0]; a <= hi[0]; ++a)
    for (std::ptrdiff_t b = lo[1]; b <= hi[1]; ++b)
      for (std::ptrdiff_t d = lo[2]; d <= hi[2]; ++d) {
        if (a * a + b * b + d * d > norm2) continue;
        const Index3 q{c[0] + a, c[1] + b, c[2] + d};
        const fixed_t* row = bank.row(g.linear(q));
        for (std::size_t f = 0; f < w; ++f) acc[f] += row[f];
        ++count;
      }
}

} // namespace detail

/// Maximal functions of several products of bank fields in one pass over the
/// stencils. Bank fields are taken in absolute value.
inline std::vector<MaxResult> maximal_batch(const std::vector<ScalarField>& fields,
                                            const std::vector<ProductSpec>& products, const MaxOptions& opt = {}) {
  if (fields.empty() || products.empty()) throw argument_error("maximal_batch needs fields and products");
  if (!(opt.rel_tol >= 0.0 && opt.rel_tol <= 0.1)) throw argument_error("rel_tol must lie in [0, 0.1]");
  const LatticePtr& lat = fields.front().lattice_ptr();
  const int n = lat->dim();
  for (const auto& pr : products) {
    if (pr.slots.empty()) throw argument_error("product with no slots");
    for (std::size_t s : pr.slots)
      if (s >= fields.size()) throw argument_error("product slot out of range");
    detail::check_alpha(pr.alpha, pr.slots.size(), n);
  }
  std::vector<ScalarField> absf;
  absf.reserve(fields.size());
  for (const auto& f : fields) {
    if (!f.same_lattice(fields.front())) throw argument_error("all fields must share one lattice");
    absf.push_back(f.map([](double v) { return std::abs(v); }));
  }
  std::vector<const ScalarField*> ptrs;
  for (const auto& f : absf) ptrs.push_back(&f);
  const FixedBank bank(ptrs);
  const std::size_t w = fields.size();
  const std::size_t np = products.size();
  const auto& pts = lat->inside_points();
  const double h = lat->h();

  std::vector<std::vector<double>> values(np, std::vector<double>(lat->size(), 0.0));
  std::vector<std::vector<std::vector<double>>> sets(np);
  if (opt.argmax)
    for (std::size_t k = 0; k < np; ++k)
      if (products[k].track_argmax) sets[k].resize(lat->size());

  parallel_for(pts.size(), opt.threads, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<fixed_t> acc(w);
    std::vector<double> avgs;  // entry-major: avgs[j * w + f]
    std::vector<std::size_t> ends;
    std::vector<double> radii, prof, slot_avg, point_vals;
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t p = pts[i];
      const auto entries = radius_entries(lat->delta(p), h, opt.rule);
      const std::size_t ne = entries.size();
      ends.resize(ne);
      radii.resize(ne);
      avgs.assign(ne * w, 0.0);
      for (std::size_t j = 0; j < ne; ++j) {
        ends[j] = lat->stencil().count_upto(entries[j].norm2);
        radii[j] = entries[j].radius;
      }
      if (opt.engine == Engine::fast) {
        detail::sweep(bank, lat->stencil(), p, ends, acc.data(), [&](std::size_t j, const fixed_t* sums) {
          for (std::size_t f = 0; f < w; ++f) avgs[j * w + f] = bank.average(f, sums[f], ends[j]);
        });
      } else {
        for (std::size_t j = 0; j < ne; ++j) {
          std::size_t count = 0;
          detail::oracle_sums(bank, *lat, p, entries[j].norm2, acc.data(), count);
          for (std::size_t f = 0; f < w; ++f) avgs[j * w + f] = bank.average(f, acc[f], count);
        }
      }
      for (std::size_t k = 0; k < np; ++k) {
        const auto& pr = products[k];
        slot_avg.resize(pr.slots.size());
        point_vals.resize(pr.slots.size());
        for (std::size_t s = 0; s < pr.slots.size(); ++s) point_vals[s] = absf[pr.slots[s]][p];
        const double zero = profile_value_at_zero(pr.alpha, point_vals);
        prof.resize(ne);
        for (std::size_t j = 0; j < ne; ++j) {
          for (std::size_t s = 0; s < pr.slots.size(); ++s) slot_avg[s] = avgs[j * w + pr.slots[s]];
          prof[j] = profile_value(radii[j], pr.alpha, slot_avg);
        }
        double best = 0.0;
        detail::collect_argmax(zero, radii, prof, opt.rel_tol, best, sets[k].empty() ? nullptr : &sets[k][p]);
        values[k][p] = best;
      }
    }
  });

  std::vector<MaxResult> out(np);
  for (std::size_t k = 0; k < np; ++k) {
    out[k].value = ScalarField(lat, std::move(values[k]));
    out[k].argmax_radii = std::move(sets[k]);
    out[k].rel_tol = opt.rel_tol;
  }
  return out;
}

/// The local multilinear fractional maximal function of fields (alpha = 0 gives the local maximal function).
inline MaxResult local_maximal_field(const MultiField& fields, double alpha, const MaxOptions& opt) {
  detail::check_alpha(alpha, fields.m(), fields.lattice().dim());
  ProductSpec pr;
  pr.alpha = alpha;
  for (std::size_t i = 0; i < fields.m(); ++i) pr.slots.push_back(i);
  return std::move(maximal_batch(fields.slots(), {pr}, opt).front());
}

inline MaxResult local_maximal_field(const MultiField& fields, double alpha, Engine engine = Engine::fast,
                                     double rel_tol = 1e-9) {
  MaxOptions opt;
  opt.engine = engine;
  opt.rel_tol = rel_tol;
  return local_maximal_field(fields, alpha, opt);
}

/// x -> max over radii r = k h >= 2h of r^alpha times the shell average of |f|.
/// The outermost shell is clipped to the largest ball inside the domain.
inline ScalarField spherical_maximal_field(const ScalarField& f, double alpha, unsigned threads = 0) {
  const LatticePtr& lat = f.lattice_ptr();
  if (!(alpha >= 0.0) || !(alpha < lat->dim())) throw argument_error("alpha out of range: need 0 <= alpha < n");
  const ScalarField af = f.map([](double v) { return std::abs(v); });
  const FixedBank bank(std::vector<const ScalarField*>{&af});
  const auto& pts = lat->inside_points();
  const double h = lat->h();
  const Stencil& st = lat->stencil();
  std::vector<double> out(lat->size(), 0.0);
  parallel_for(pts.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<std::size_t> ends;
    std::vector<double> radii;
    fixed_t acc = 0;
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t p = pts[i];
      const auto ladder = radius_entries(lat->delta(p), h, RadiusRule::ladder);
      if (ladder.size() < 2) continue;
      const std::int64_t cap = edge_norm2(*lat, p);
      ends.clear();
      radii.clear();
      ends.push_back(st.count_upto(2));  // shells start at k = 2: |o|^2 > k^2 - k
      for (std::size_t j = 1; j < ladder.size(); ++j) {
        const auto k = static_cast<std::int64_t>(j + 1);
        ends.push_back(st.count_upto(std::min(k * k + k, cap)));
        radii.push_back(ladder[j].radius);
      }
      double best = 0.0;
      fixed_t prev = 0;
      detail::sweep(bank, st, p, ends, &acc, [&](std::size_t j, const fixed_t* sums) {
        if (j > 0) {
          const std::size_t count = ends[j] - ends[j - 1];
          if (count > 0) {
            const double v = profile_value(radii[j - 1], alpha, std::span<const double>{})
                             * bank.average(0, sums[0] - prev, count);
            best = std::max(best, v);
          }
        }
        prev = sums[0];
      });
      out[p] = best;
    }
  });
  return ScalarField(lat, std::move(out));
}

/// Radii (0 included) whose profile value is within rel_tol of the maximum.
inline std::vector<double> argmax_radii(const RadialProfile& profile, double rel_tol) {
  if (!(rel_tol >= 0.0)) throw argument_error("rel_tol must be nonnegative");
  std::vector<double> set;
  double best = 0.0;
  detail::collect_argmax(profile.value_at_zero, profile.radii, profile.values, rel_tol, best, &set);
  return set;
}

namespace detail {

// max_{u in a} dist(u, b) for ascending a and b.
inline double directed_sorted(std::span<const double> a, std::span<const double> b) {
  std::size_t j = 0;
  double worst = 0.0;
  for (double u : a) {
    while (j + 1 < b.size() && b[j + 1] <= u) ++j;
    double d = std::abs(u - b[j]);
    if (j + 1 < b.size()) d = std::min(d, std::abs(b[j + 1] - u));
    worst = std::max(worst, d);
  }
  return worst;
}

/// Hausdorff distance of two nonempty ascending sets.
inline double hausdorff_sorted(std::span<const double> a, std::span<const double> b) {
  return std::max(directed_sorted(a, b), directed_sorted(b, a));
}

} // namespace detail

/// Hausdorff distance between two finite sets of reals.
inline double hausdorff_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw argument_error("hausdorff_distance of an empty set");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return detail::hausdorff_sorted(x, y);
}

} // namespace maxreg
