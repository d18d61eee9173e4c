#pragma once

// CSV export of fields and profiles, JSON export of exponents, argmax sets and reports.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "maxreg/averaging.hpp"
#include "maxreg/error.hpp"
#include "maxreg/lattice.hpp"
#include "maxreg/maxops.hpp"
#include "maxreg/sobolev.hpp"
#include "maxreg/verify.hpp"

namespace maxreg {

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw argument_error("not a number: \"" + std::string(s) + "\"");
  return v;
}

/// One row per grid line along the last axis; blank cells are outside points.
inline void write_field_csv(std::ostream& os, const ScalarField& f) {
  const Lattice& lat = f.lattice();
  const auto cols = static_cast<std::size_t>(lat.grid().shape[static_cast<std::size_t>(lat.dim() - 1)]);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    if (lat.inside(p)) os << format_double(f[p]);
    os << ((p + 1) % cols == 0 ? '\n' : ',');
  }
}

inline ScalarField read_field_csv(std::istream& is, const LatticePtr& lattice) {
  const Lattice& lat = *lattice;
  const auto cols = static_cast<std::size_t>(lat.grid().shape[static_cast<std::size_t>(lat.dim() - 1)]);
  const std::size_t rows = lat.size() / cols;
  std::vector<double> v(lat.size(), 0.0);
  std::string line;
  std::size_t r = 0;
  for (; r < rows; ++r) {
    if (!std::getline(is, line)) throw argument_error("csv has fewer rows than the grid");
    std::size_t c = 0, start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
      if (c >= cols) throw argument_error("csv row " + std::to_string(r + 1) + " is too long");
      const std::size_t p = r * cols + c;
      if (cell.empty() != !lat.inside(p))
        throw argument_error("csv cell " + std::to_string(r + 1) + ":" + std::to_string(c + 1) + " disagrees with the mask");
      if (!cell.empty()) v[p] = parse_double(cell);
      ++c;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (c != cols) throw argument_error("csv row " + std::to_string(r + 1) + " is too short");
  }
  return ScalarField(lattice, std::move(v));
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw error("write failed: " + path);
}

inline void write_field_csv(const std::string& path, const ScalarField& f) {
  std::ostringstream os;
  write_field_csv(os, f);
  write_text_file(path, os.str());
}

/// Two columns r,u; the first row is the r = 0 value.
inline void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
  os << "r,u\n0," << format_double(profile.value_at_zero) << '\n';
  for (std::size_t j = 0; j < profile.radii.size(); ++j)
    os << format_double(profile.radii[j]) << ',' << format_double(profile.values[j]) << '\n';
}

inline json to_json(const ExponentSet& e) {
  json p = json::array(), pt = json::array();
  for (double x : e.p) p.push_back(detail::num(x));
  for (double x : e.p_tilde) pt.push_back(detail::num(x));
  json j;
  j["m"] = e.m;
  j["n"] = e.n;
  j["p"] = p;
  j["alpha"] = detail::num(e.alpha);
  j["sum_inv_p"] = detail::num(e.sum_inv_p);
  j["inv_q"] = detail::num(e.inv_q);
  j["q"] = detail::num(e.q);
  j["inv_q_star"] = detail::num(e.inv_q_star);
  j["q_star"] = detail::num(e.q_star);
  j["inv_q_embedding"] = detail::num(e.inv_q_embedding);
  j["q_embedding"] = detail::num(e.q_embedding);
  j["alpha_bar"] = detail::num(e.alpha_bar);
  j["beta"] = detail::num(e.beta);
  j["p_tilde"] = pt;
  j["q_admissible"] = e.q_admissible;
  j["flags"] = {{"thm21", e.thm21},   {"thm22i", e.thm22i}, {"thm22ii", e.thm22ii},     {"thm23", e.thm23},
                {"bd1", e.bd1},       {"tb_i", e.tb_i},     {"tb_iprime", e.tb_iprime}, {"tb_ii", e.tb_ii},
                {"sobolev0", e.sobolev0}, {"continuity", e.continuity}};
  return j;
}

inline json to_json(const VerificationReport& r) {
  json j;
  j["check_id"] = r.check_id;
  j["exponents"] = to_json(r.exponents);
  j["grid_h"] = detail::num(r.grid_h);
  j["points_total"] = r.points_total;
  j["points_checked"] = r.points_checked;
  j["points_excluded"] = r.points_excluded;
  j["excluded"] = {{"collar", r.excluded_collar},
                   {"discontinuity", r.excluded_discontinuity},
                   {"other", r.excluded_other}};
  j["pass_fraction"] = detail::num(r.pass_fraction);
  j["threshold"] = detail::num(r.threshold);
  j["empirical_constant"] = detail::num(r.empirical_constant);
  j["tolerance_model"] = r.tolerance_model;
  j["pass"] = r.pass;
  j["advisory_warning"] = r.advisory_warning;
  j["notes"] = r.notes;
  j["metrics"] = r.metrics;
  return j;
}

inline json to_json(const std::vector<VerificationReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) a.push_back(to_json(r));
  return a;
}

/// {"point_index": [radii]} over the inside points, in index order.
inline json argmax_json(const Lattice& lat, const MaxResult& res) {
  json j = json::object();
  if (res.argmax_radii.empty()) return j;
  for (std::size_t p : lat.inside_points()) {
    json radii = json::array();
    for (double r : res.argmax_radii[p]) radii.push_back(r);
    j[std::to_string(p)] = std::move(radii);
  }
  return j;
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

} // namespace maxreg
