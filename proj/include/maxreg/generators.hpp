#pragma once

// Test-field generators with analytic gradients.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "maxreg/error.hpp"
#include "maxreg/lattice.hpp"

namespace maxreg {

/// Plain description of a generator, as read from a config file.
struct GeneratorSpec {
  std::string kind;  // constant | gaussian | trig | indicator | bump | sum | noise
  double value = 0.0;                 // constant
  std::vector<double> center;         // gaussian, bump, indicator
  bool random_center = false;         // gaussian, bump: draw the centre from the seed
  double width = 0.1;                 // gaussian standard width, bump radius
  double amplitude = 1.0;             // gaussian, trig, bump, noise
  double offset = 0.0;                // trig
  std::vector<double> frequencies;    // trig
  std::vector<double> phases;         // trig
  std::string region;                 // indicator: disk | rect
  double radius = 0.0;                // indicator disk
  std::vector<double> lo, hi;         // indicator rect
  std::vector<GeneratorSpec> terms;   // sum
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

} // namespace detail

/// A function on R^n with its gradient. Smooth unless built from an indicator or noise.
class Generator {
public:
  double value(const Coord& y) const {
    constexpr double pi = 3.14159265358979323846;
    switch (kind_) {
      case Kind::constant: return c_;
      case Kind::gaussian: return a_ * std::exp(-r2(y) / (2.0 * w_ * w_));
      case Kind::trig: {
        double s = a_;
        for (int i = 0; i < dim_; ++i) s *= std::sin(pi * freq_[i] * y[i] + phase_[i]);
        return off_ + s;
      }
      case Kind::indicator: return inside_region(y) ? 1.0 : 0.0;
      case Kind::bump: {
        const double t = r2(y) / (w_ * w_);
        return t < 1.0 ? a_ * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
      }
      case Kind::sum: {
        double s = 0.0;
        for (const auto& g : terms_) s += g.value(y);
        return s;
      }
      case Kind::noise: {
        std::uint64_t hsh = seed_;
        for (int i = 0; i < dim_; ++i) {
          const auto q = static_cast<std::int64_t>(std::llround(y[i] * 1e9));
          hsh = detail::splitmix64(hsh ^ static_cast<std::uint64_t>(q));
        }
        return a_ * static_cast<double>(hsh >> 11) * 0x1.0p-53;
      }
    }
    return 0.0;
  }

  Coord gradient(const Coord& y) const {
    constexpr double pi = 3.14159265358979323846;
    Coord g{};
    switch (kind_) {
      case Kind::constant:
      case Kind::indicator:
      case Kind::noise:
        return g;
      case Kind::gaussian: {
        const double v = value(y);
        for (int i = 0; i < dim_; ++i) g[i] = -v * (y[i] - center_[i]) / (w_ * w_);
        return g;
      }
      case Kind::trig: {
        for (int l = 0; l < dim_; ++l) {
          double s = a_ * pi * freq_[l] * std::cos(pi * freq_[l] * y[l] + phase_[l]);
          for (int i = 0; i < dim_; ++i)
            if (i != l) s *= std::sin(pi * freq_[i] * y[i] + phase_[i]);
          g[l] = s;
        }
        return g;
      }
      case Kind::bump: {
        const double t = r2(y) / (w_ * w_);
        if (t >= 1.0) return g;
        const double v = value(y);
        const double k = -2.0 * v / (w_ * w_ * (1.0 - t) * (1.0 - t));
        for (int i = 0; i < dim_; ++i) g[i] = k * (y[i] - center_[i]);
        return g;
      }
      case Kind::sum:
        for (const auto& t : terms_) {
          const Coord d = t.gradient(y);
          for (int i = 0; i < dim_; ++i) g[i] += d[i];
        }
        return g;
    }
    return g;
  }

  bool smooth() const {
    if (kind_ == Kind::indicator || kind_ == Kind::noise) return false;
    for (const auto& t : terms_)
      if (!t.smooth()) return false;
    return true;
  }

  int dim() const noexcept { return dim_; }
  const Coord& center() const noexcept { return center_; }

  friend Generator make_generator(const GeneratorSpec& spec, const Domain& domain, std::uint64_t seed);

private:
  enum class Kind { constant, gaussian, trig, indicator, bump, sum, noise };

  double r2(const Coord& y) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += (y[i] - center_[i]) * (y[i] - center_[i]);
    return s;
  }
  bool inside_region(const Coord& y) const {
    if (disk_region_) return r2(y) <= rad_ * rad_;
    for (int i = 0; i < dim_; ++i)
      if (y[i] < lo_[i] || y[i] > hi_[i]) return false;
    return true;
  }

  Kind kind_ = Kind::constant;
  int dim_ = 0;
  double c_ = 0.0, a_ = 1.0, w_ = 1.0, off_ = 0.0, rad_ = 0.0;
  Coord center_{}, lo_{}, hi_{}, freq_{}, phase_{};
  bool disk_region_ = false;
  std::uint64_t seed_ = 0;
  std::vector<Generator> terms_;
};

inline Generator make_generator(const GeneratorSpec& spec, const Domain& domain, std::uint64_t seed) {
  const int n = domain.dim();
  auto vec = [n](const std::vector<double>& v, const char* what) {
    if (v.size() != static_cast<std::size_t>(n))
      throw argument_error(std::string("generator ") + what + " must have " + std::to_string(n) + " components");
    Coord c{};
    std::copy(v.begin(), v.end(), c.begin());
    return c;
  };
  auto centre = [&](Generator& g) {
    if (spec.random_center) {
      const AxisBox box = domain.bounding_box();
      std::mt19937_64 rng(seed);
      for (int i = 0; i < n; ++i) {
        const double span = box.hi[i] - box.lo[i];
        std::uniform_real_distribution<double> u(box.lo[i] + 0.25 * span, box.hi[i] - 0.25 * span);
        g.center_[i] = u(rng);
      }
    } else {
      g.center_ = vec(spec.center, "center");
    }
  };
  Generator g;
  g.dim_ = n;
  if (spec.kind == "constant") {
    g.kind_ = Generator::Kind::constant;
    g.c_ = spec.value;
  } else if (spec.kind == "gaussian") {
    g.kind_ = Generator::Kind::gaussian;
    if (!(spec.width > 0)) throw argument_error("gaussian width must be positive");
    g.a_ = spec.amplitude;
    g.w_ = spec.width;
    centre(g);
  } else if (spec.kind == "bump") {
    g.kind_ = Generator::Kind::bump;
    if (!(spec.width > 0)) throw argument_error("bump radius must be positive");
    g.a_ = spec.amplitude;
    g.w_ = spec.width;
    centre(g);
  } else if (spec.kind == "trig") {
    g.kind_ = Generator::Kind::trig;
    g.a_ = spec.amplitude;
    g.off_ = spec.offset;
    g.freq_ = vec(spec.frequencies, "frequencies");
    if (!spec.phases.empty()) g.phase_ = vec(spec.phases, "phases");
  } else if (spec.kind == "indicator") {
    g.kind_ = Generator::Kind::indicator;
    if (spec.region == "disk") {
      g.disk_region_ = true;
      g.center_ = vec(spec.center, "center");
      if (!(spec.radius > 0)) throw argument_error("indicator radius must be positive");
      g.rad_ = spec.radius;
    } else if (spec.region == "rect") {
      g.lo_ = vec(spec.lo, "lo");
      g.hi_ = vec(spec.hi, "hi");
    } else {
      throw argument_error("indicator region must be \"disk\" or \"rect\"");
    }
  } else if (spec.kind == "sum") {
    g.kind_ = Generator::Kind::sum;
    if (spec.terms.empty()) throw argument_error("sum generator needs terms");
    for (std::size_t i = 0; i < spec.terms.size(); ++i)
      g.terms_.push_back(make_generator(spec.terms[i], domain, detail::splitmix64(seed + i)));
  } else if (spec.kind == "noise") {
    g.kind_ = Generator::Kind::noise;
    g.a_ = spec.amplitude;
    g.seed_ = detail::splitmix64(seed);
  } else {
    throw argument_error("unknown generator kind \"" + spec.kind + "\"");
  }
  return g;
}

/// A generated slot: |f| on the lattice, the gradient of |f| and a smoothness flag.
struct SampledField {
  ScalarField value;
  VectorField gradient;
  bool smooth = true;

  /// sup|f| + sup|grad f|, the scale entering the additive tolerance.
  double scale() const { return value.max_abs() + gradient.magnitude().max_abs(); }
};

inline SampledField sample(const Generator& g, const LatticePtr& lattice) {
  const int n = lattice->dim();
  std::vector<double> v(lattice->size(), 0.0);
  std::vector<std::vector<double>> d(static_cast<std::size_t>(n), std::vector<double>(lattice->size(), 0.0));
  for (std::size_t p : lattice->inside_points()) {
    const Coord y = lattice->grid().point(p);
    const double f = g.value(y);
    const double s = f > 0 ? 1.0 : (f < 0 ? -1.0 : 0.0);
    const Coord gr = g.gradient(y);
    v[p] = std::abs(f);
    for (int l = 0; l < n; ++l) d[static_cast<std::size_t>(l)][p] = s * gr[l];
  }
  SampledField out;
  out.value = ScalarField(lattice, std::move(v));
  for (auto& c : d) out.gradient.components.emplace_back(lattice, std::move(c));
  out.gradient.missing_axes.assign(lattice->size(), 0);
  out.smooth = g.smooth();
  return out;
}

/// |f| for the generator described by spec, sampled on the inside points of the lattice.
inline ScalarField generate_field(const GeneratorSpec& spec, const LatticePtr& lattice, std::uint64_t seed = 0) {
  return sample(make_generator(spec, lattice->domain(), seed), lattice).value;
}

} // namespace maxreg
