#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "maxreg/io.hpp"

using namespace maxreg;

namespace {

ScalarField noisy(const LatticePtr& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<double> v(lat->size());
  for (auto& x : v) x = u(rng) * std::pow(10.0, static_cast<double>(rng() % 40) - 20.0);
  return ScalarField(lat, std::move(v));
}

} // namespace

TEST(FieldCsv, RoundTripIsExact) {
  for (const Domain& d : {Domain::rectangle({0, 0, 0}, {1, 1, 0}, 2), Domain::disk({0, 0, 0}, 1.0, 2),
                          Domain::interval(-1.0, 2.0)}) {
    const auto lat = rasterize(d, 1.0 / 16);
    const auto f = noisy(lat, 3);
    std::stringstream ss;
    write_field_csv(ss, f);
    const auto g = read_field_csv(ss, lat);
    for (std::size_t p = 0; p < lat->size(); ++p) EXPECT_EQ(f[p], g[p]);
  }
}

TEST(FieldCsv, LayoutHasBlankOutsideCells) {
  const auto lat = rasterize(Domain::rectangle({0, 0, 0}, {1, 1, 0}, 2), 0.25);
  const auto f = ScalarField::from_function(lat, [](const Coord& y) { return y[0] + 0.5 * y[1]; });
  std::ostringstream os;
  write_field_csv(os, f);
  const std::string s = os.str();
  EXPECT_EQ(s.find('\r'), std::string::npos);
  std::istringstream is(s);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(is, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], ",,,,");
  EXPECT_EQ(rows[1], ",0.375,0.5,0.625,");
  EXPECT_EQ(rows[4], ",,,,");
}

TEST(FieldCsv, MaskMismatchIsRejected) {
  const auto lat = rasterize(Domain::rectangle({0, 0, 0}, {1, 1, 0}, 2), 0.25);
  std::istringstream bad(",,,,\n1,2,3,4,\n,,,,\n,,,,\n,,,,\n");
  EXPECT_THROW(read_field_csv(bad, lat), argument_error);
  std::istringstream shortfile(",,,,\n");
  EXPECT_THROW(read_field_csv(shortfile, lat), argument_error);
  std::istringstream junk(",,,,\n,x,1,1,\n,1,1,1,\n,1,1,1,\n,,,,\n");
  EXPECT_THROW(read_field_csv(junk, lat), argument_error);
}

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("1.5x"), argument_error);
}

TEST(ProfileCsv, ZeroRowFirst) {
  RadialProfile pr;
  pr.radii = {0.1, 0.2};
  pr.values = {0.5, 0.25};
  pr.value_at_zero = 1.0;
  std::ostringstream os;
  write_profile_csv(os, pr);
  EXPECT_EQ(os.str(), "r,u\n0,1\n0.1,0.5\n0.2,0.25\n");
}

TEST(ReportJson, StableKeysAndInfinity) {
  VerificationReport r;
  r.check_id = "thm23";
  r.exponents = exponent_table(1, 2, {4}, 1.5);
  r.empirical_constant = INFINITY;
  r.pass = true;
  const json j = to_json(r);
  EXPECT_EQ(j.begin().key(), "check_id");
  EXPECT_EQ(j["empirical_constant"], "inf");
  EXPECT_EQ(j["exponents"]["q"], "inf");
  EXPECT_EQ(dump_json(j), dump_json(to_json(r)));
  EXPECT_EQ(dump_json(j).back(), '\n');
}

TEST(ArgmaxJson, KeysAreInsidePointIndices) {
  const auto lat = rasterize(Domain::rectangle({0, 0, 0}, {1, 1, 0}, 2), 0.25);
  MaxResult res;
  res.argmax_radii.resize(lat->size());
  for (std::size_t p : lat->inside_points()) res.argmax_radii[p] = {0.0, 0.25};
  const json j = argmax_json(*lat, res);
  EXPECT_EQ(j.size(), lat->inside_count());
  EXPECT_EQ(j[std::to_string(lat->inside_points().front())], json::parse("[0.0, 0.25]"));
}
