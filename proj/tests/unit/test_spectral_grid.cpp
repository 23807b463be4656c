#include <gtest/gtest.h>

#include <sstream>

#include "nudgevisc/format.hpp"
#include "nudgevisc/spectral/grid.hpp"
#include "nudgevisc/spectral/random.hpp"
#include "nudgevisc/spectral/snapshot.hpp"

using namespace nudgevisc;

TEST(GridCreate, CutoffIsFloorOfOneThird) {
  EXPECT_EQ(grid_create(8).dealias_cutoff, 2);
  EXPECT_EQ(grid_create(64).dealias_cutoff, 21);
  EXPECT_EQ(grid_create(128).dealias_cutoff, 42);
  for (int n = 8; n <= 200; n += 2) EXPECT_EQ(grid_create(n).dealias_cutoff, n / 3) << n;
}

TEST(GridCreate, RejectsOddOrSmall) {
  EXPECT_THROW(grid_create(7), invalid_grid);
  EXPECT_THROW(grid_create(6), invalid_grid);
  EXPECT_THROW(grid_create(0), invalid_grid);
  EXPECT_THROW(grid_create(-8), invalid_grid);
  EXPECT_THROW(grid_create(33), invalid_grid);
}

TEST(GridCreate, LatticeAndStorageOrder) {
  const GridSpec g = grid_create(8);
  EXPECT_DOUBLE_EQ(GridSpec::domain_length, 2.0 * std::numbers::pi);
  // {-3, ..., 4}
  EXPECT_TRUE(g.on_lattice(4, -3));
  EXPECT_FALSE(g.on_lattice(-4, 0));
  EXPECT_FALSE(g.on_lattice(0, 5));
  EXPECT_EQ(g.wavenumber(0), 0);
  EXPECT_EQ(g.wavenumber(4), 4);
  EXPECT_EQ(g.wavenumber(5), -3);
  for (int k = -3; k <= 4; ++k) EXPECT_EQ(g.wavenumber(g.index(k)), k);
  std::size_t count = 0;
  for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    EXPECT_EQ(g.flat(k1, k2), i);
    ++count;
  });
  EXPECT_EQ(count, g.size());
}

TEST(GridCreate, ProductGridAvoidsAliasingOntoKeptModes) {
  for (int n = 8; n <= 96; n += 2) {
    const GridSpec g = grid_create(n);
    const int K = g.dealias_cutoff;
    // a product mode of magnitude up to 2K must not fold into [-K, K]
    EXPECT_GT(g.product_n - 2 * K, K) << n;
    EXPECT_EQ(g.product_n % 2, 0);
    EXPECT_GE(g.product_n, n);
  }
  EXPECT_EQ(grid_create(64).product_n, 64);
  EXPECT_EQ(grid_create(12).product_n, 14);
}

TEST(SpectralField, SetModeKeepsConjugateSymmetry) {
  SpectralField v(grid_create(8));
  v.set_mode(1, 2, {1.0, 2.0}, {-0.5, 0.25});
  EXPECT_EQ(v.at(0, -1, -2), complex(1.0, -2.0));
  EXPECT_EQ(v.at(1, -1, -2), complex(-0.5, -0.25));
  EXPECT_EQ(conjugate_symmetry_defect(v), 0.0);
  EXPECT_FALSE(v.is_zero());
  EXPECT_TRUE(SpectralField(grid_create(8)).is_zero());
}

TEST(SpectralField, ArithmeticRequiresSameGrid) {
  SpectralField a(grid_create(8)), b(grid_create(10));
  EXPECT_THROW(a += b, incompatible_grids);
  EXPECT_THROW(a - b, incompatible_grids);
  EXPECT_THROW(inner_hs(a, b, 0.0), incompatible_grids);
  EXPECT_THROW(bilinear(a, b), incompatible_grids);
}

TEST(SpectralField, FiniteCheck) {
  SpectralField v(grid_create(8));
  EXPECT_TRUE(v.all_finite());
  v.at(1, 2, 1) = {std::nan(""), 0.0};
  EXPECT_FALSE(v.all_finite());
}

TEST(RandomField, SeededAndSolenoidal) {
  const GridSpec g = grid_create(32);
  const SpectralField a = random_field(g, 42, 6), b = random_field(g, 42, 6);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == random_field(g, 43, 6));
  EXPECT_LE(divergence_residual(a), 1e-15 * max_coefficient(a));
  EXPECT_EQ(conjugate_symmetry_defect(a), 0.0);
  EXPECT_EQ(a.at(0, 0, 0), complex{});
  for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    if (k1 * k1 + k2 * k2 > 36) {
      EXPECT_EQ(a.component(0)[i], complex{});
      EXPECT_EQ(a.component(1)[i], complex{});
    }
  });
}

TEST(UnitRandom, FixedStream) {
  // mt19937_64 with the default seed produces 14514284786278117030 first
  UnitRandom r(5489u);
  EXPECT_EQ(r(), static_cast<double>(14514284786278117030ULL >> 11) * 0x1.0p-53);
  UnitRandom s(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = s();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Snapshot, RoundTripIsBitExact) {
  const GridSpec g = grid_create(16);
  SpectralField v = random_field(g, 3, 5);
  v *= 1.0 / 3.0;
  v.at(0, 1, 1) = {-0.0, 0.0};  // signed zero kept
  std::stringstream ss;
  write_field(ss, v);
  const SpectralField w = read_field(ss);
  EXPECT_TRUE(w == v);
  EXPECT_TRUE(std::signbit(w.at(0, 1, 1).real()));
}

TEST(Snapshot, ListsOnlyNonzeroModes) {
  SpectralField v(grid_create(8));
  v.set_mode(0, 1, {0.0, -0.5}, {});
  const std::string s = field_to_string(v);
  EXPECT_EQ(s.substr(0, s.find('\n')), "field 8 2");
}

TEST(Snapshot, RejectsMalformedInput) {
  std::istringstream bad_header("fld 8 0\n");
  EXPECT_THROW(read_field(bad_header), error);
  std::istringstream truncated("field 8 2\n0 1 0 0 0 0\n");
  EXPECT_THROW(read_field(truncated), error);
  std::istringstream off_lattice("field 8 1\n9 0 1 0 0 0\n");
  EXPECT_THROW(read_field(off_lattice), error);
  std::istringstream bad_number("field 8 1\n1 0 x 0 0 0\n");
  EXPECT_THROW(read_field(bad_number), error);
}

TEST(Format, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0}) {
    const std::string s = format_double(x);
    auto y = parse_double(s);
    ASSERT_TRUE(y.has_value()) << s;
    EXPECT_EQ(std::signbit(*y), std::signbit(x));
    EXPECT_EQ(*y, x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_FALSE(parse_double("1.0x").has_value());
  EXPECT_FALSE(parse_double("").has_value());
  EXPECT_EQ(parse_int("42").value(), 42);
  EXPECT_FALSE(parse_int("4.2").has_value());
}
