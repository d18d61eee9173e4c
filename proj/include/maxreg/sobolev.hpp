#pragma once

// Discrete gradients, Lebesgue and Sobolev norms, and exponent bookkeeping.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "maxreg/error.hpp"
#include "maxreg/lattice.hpp"

namespace maxreg {

/// Pairwise sum in index order; the result depends only on the input sequence.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// Centered differences where both axis neighbours are inside, one-sided
/// where only one is, zero (and flagged in missing_axes) where neither is.
inline VectorField gradient_field(const ScalarField& f) {
  const Lattice& lat = f.lattice();
  const int n = lat.dim();
  const double h = lat.h();
  VectorField g;
  g.missing_axes.assign(lat.size(), 0);
  std::vector<std::vector<double>> comp(static_cast<std::size_t>(n), std::vector<double>(lat.size(), 0.0));
  for (std::size_t p : lat.inside_points()) {
    for (int l = 0; l < n; ++l) {
      std::size_t fw = 0, bw = 0;
      const bool has_f = lat.neighbour(p, l, +1, fw);
      const bool has_b = lat.neighbour(p, l, -1, bw);
      double d = 0.0;
      if (has_f && has_b) {
        d = (f[fw] - f[bw]) / (2.0 * h);
      } else if (has_f) {
        d = (f[fw] - f[p]) / h;
      } else if (has_b) {
        d = (f[p] - f[bw]) / h;
      } else {
        g.missing_axes[p] |= static_cast<std::uint8_t>(1u << l);
      }
      comp[static_cast<std::size_t>(l)][p] = d;
    }
  }
  for (auto& c : comp) g.components.emplace_back(f.lattice_ptr(), std::move(c));
  return g;
}

/// (sum |f|^p h^n)^(1/p) over inside points; p = infinity gives the max.
inline double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw argument_error("lp_norm needs p >= 1");
  const Lattice& lat = f.lattice();
  if (std::isinf(p)) return f.max_abs();
  std::vector<double> terms;
  terms.reserve(lat.inside_count());
  for (std::size_t x : lat.inside_points()) terms.push_back(std::pow(std::abs(f[x]), p));
  return std::pow(pairwise_sum(terms) * lat.grid().cell_volume(), 1.0 / p);
}

/// ||f||_p + || |grad f| ||_p.
inline double sobolev_norm(const ScalarField& f, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw argument_error("sobolev_norm needs 1 < p < infinity");
  return lp_norm(f, p) + lp_norm(gradient_field(f).magnitude(), p);
}

/// L^p norm of f / delta.
inline double delta_weighted_norm(const ScalarField& f, const ScalarField& delta, double p) {
  if (!f.same_lattice(delta)) throw argument_error("fields live on different lattices");
  std::vector<double> v(f.lattice().size(), 0.0);
  for (std::size_t x : f.lattice().inside_points()) {
    if (!(delta[x] > 0.0)) throw argument_error("delta must be positive on inside points");
    v[x] = f[x] / delta[x];
  }
  return lp_norm(ScalarField(f.lattice_ptr(), std::move(v)), p);
}

/// Exponents derived from (m, n, p, alpha) and the hypothesis window of each check.
struct ExponentSet {
  int m = 0;
  int n = 0;
  std::vector<double> p;
  double alpha = 0.0;

  double sum_inv_p = 0.0;
  double inv_q = 0.0;       ///< sum 1/p_j (alpha = 0) or sum 1/p_j - (alpha-1)/n
  double q = 0.0;           ///< 1/inv_q; infinity when inv_q = 0, negative when inv_q < 0
  double inv_q_star = 0.0;  ///< sum 1/p_j - alpha/n
  double q_star = 0.0;
  double inv_q_embedding = 0.0;  ///< sum 1/p_j - (alpha+m-1)/n, the embedding branch
  double q_embedding = 0.0;
  double alpha_bar = 0.0;        ///< (alpha-1)/m
  double beta = 0.0;             ///< min_j min{(n-1)/p_j, n - 2n/((n-1)p_j)}
  std::vector<double> p_tilde;   ///< 1/p~ = 1/p - 1/n (infinity when p >= n)

  bool q_admissible = false;  ///< inv_q > 0
  bool thm21 = false;
  bool thm22i = false;
  bool thm22ii = false;
  bool thm23 = false;
  bool bd1 = false;
  bool tb_i = false;
  bool tb_iprime = false;
  bool tb_ii = false;
  bool sobolev0 = false;
  bool continuity = false;

  /// q that applies to a check run at exponent a (a = 0 uses the plain sum).
  double q_for(double a) const {
    const double iq = a == 0.0 ? sum_inv_p : sum_inv_p - (a - 1.0) / n;
    return iq == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / iq;
  }
};

inline double invert_exponent(double inv) {
  return inv == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv;
}

/// Recovers sum 1/p_j from (q, alpha, n): the inverse of the q relation.
inline double sum_inv_p_from_q(double q, double alpha, int n) {
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  return alpha == 0.0 ? iq : iq + (alpha - 1.0) / n;
}

inline ExponentSet exponent_table(int m, int n, const std::vector<double>& p, double alpha) {
  if (m < 1) throw argument_error("m must be at least 1");
  if (n < 1) throw argument_error("n must be at least 1");
  if (p.size() != static_cast<std::size_t>(m)) throw argument_error("p must have m entries");
  for (std::size_t j = 0; j < p.size(); ++j)
    if (!(p[j] > 1.0) || std::isinf(p[j])) {
      std::ostringstream os;
      os << "hypothesis 1 < p_j < inf violated: p_" << j + 1 << " = " << p[j];
      throw hypothesis_error(os.str());
    }
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(m) * n))
    throw argument_error("alpha out of range: need 0 <= alpha < m n");

  ExponentSet e;
  e.m = m;
  e.n = n;
  e.p = p;
  e.alpha = alpha;
  for (double pj : p) e.sum_inv_p += 1.0 / pj;
  e.inv_q = alpha == 0.0 ? e.sum_inv_p : e.sum_inv_p - (alpha - 1.0) / n;
  e.q = invert_exponent(e.inv_q);
  e.inv_q_star = e.sum_inv_p - alpha / n;
  e.q_star = invert_exponent(e.inv_q_star);
  e.inv_q_embedding = e.sum_inv_p - (alpha + m - 1.0) / n;
  e.q_embedding = invert_exponent(e.inv_q_embedding);
  e.alpha_bar = (alpha - 1.0) / m;
  e.beta = std::numeric_limits<double>::infinity();
  for (double pj : p) {
    const double b = n > 1 ? std::min((n - 1.0) / pj, n - 2.0 * n / ((n - 1.0) * pj))
                           : -std::numeric_limits<double>::infinity();
    e.beta = std::min(e.beta, b);
    e.p_tilde.push_back(invert_exponent(std::max(0.0, 1.0 / pj - 1.0 / n)));
  }
  e.q_admissible = e.inv_q > 0.0;

  auto in_open = [](double v, double lo, double hi) { return v > lo && v < hi; };
  const double inf = std::numeric_limits<double>::infinity();
  const double q0 = invert_exponent(e.sum_inv_p);
  const double q_rel = invert_exponent(e.sum_inv_p - (alpha - 1.0) / n);
  const bool q0_ok = e.sum_inv_p < 1.0 && in_open(q0, 1.0, inf);
  const bool qrel_ok = e.sum_inv_p - (alpha - 1.0) / n > 0.0 && in_open(q_rel, 1.0, inf);
  const bool alpha_ge1 = alpha >= 1.0 && alpha < static_cast<double>(m) * n;
  bool p_lt_n = true, p_gt_crit = n > 1;
  for (double pj : p) {
    p_lt_n = p_lt_n && pj < n;
    if (n > 1) p_gt_crit = p_gt_crit && pj > n / (n - 1.0);
  }
  const bool embedding_ok =
      p_lt_n && alpha_ge1 && e.inv_q_embedding > 0.0 && in_open(e.q_embedding, 1.0 / m, inf);
  const bool spherical_ok = p_gt_crit && alpha >= 1.0 && alpha < m * e.beta + 1.0 && qrel_ok;

  e.thm21 = alpha == 0.0 && q0_ok;
  e.thm22i = alpha_ge1 && qrel_ok;
  e.thm22ii = embedding_ok;
  e.thm23 = spherical_ok;
  e.bd1 = q0_ok;
  e.tb_i = alpha_ge1 && qrel_ok;
  e.tb_iprime = embedding_ok;
  e.tb_ii = spherical_ok;
  e.sobolev0 = alpha == 0.0 ? q0_ok : (alpha_ge1 && qrel_ok);
  e.continuity = alpha == 0.0 ? q0_ok : (alpha_ge1 && qrel_ok);
  return e;
}

} // namespace maxreg
