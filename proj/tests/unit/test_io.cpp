#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace hsfuse;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hsfuse_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  static void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(IoTest, F64RoundTripIsBitExact) {
  std::mt19937_64 rng(100);
  const HsiCube x = oracle::random_cube({5, 7, 3}, rng);
  save_cube(path("a.hsrc"), x);
  EXPECT_EQ(load_cube(path("a.hsrc")).matrix(), x.matrix());
  const CubeHeader h = read_cube_header(path("a.hsrc"));
  EXPECT_EQ(h.dims, x.dims());
  EXPECT_EQ(h.dtype, Dtype::F64);
  ASSERT_TRUE(h.scale.has_value());
  EXPECT_EQ((*h.scale)[0], x.matrix().minCoeff());
}

TEST_F(IoTest, F32RoundTripAndFileSize) {
  std::mt19937_64 rng(101);
  const HsiCube x = oracle::random_cube({31, 16, 16}, rng, 0.0, 1.0);
  save_cube(path("a.hsrc"), x, Dtype::F32);
  const HsiCube back = load_cube(path("a.hsrc"));
  EXPECT_LE(((back.matrix() - x.matrix()).cwiseAbs().array() / x.matrix().cwiseAbs().array().max(1e-30)).maxCoeff(), 1e-7);
  const std::string bytes = slurp(path("a.hsrc"));
  const std::size_t header = bytes.find('\n') + 1 - 4;
  EXPECT_EQ(bytes.substr(0, 4), "HSRC");
  EXPECT_EQ(fs::file_size(path("a.hsrc")), 4 + header + 31u * 16u * 16u * 4u);
}

TEST_F(IoTest, DistinctErrors) {
  const HsiCube x = cube_new(2, 3, 3, 0.5);
  save_cube(path("a.hsrc"), x);
  const std::string good = slurp(path("a.hsrc"));

  spit(path("trunc.hsrc"), good.substr(0, good.size() - 1));
  EXPECT_THROW(load_cube(path("trunc.hsrc")), TruncatedPayloadError);

  spit(path("magic.hsrc"), "HSRX" + good.substr(4));
  EXPECT_THROW(load_cube(path("magic.hsrc")), BadMagicError);

  std::string dtype = good;
  dtype.replace(dtype.find("\"f64\""), 5, "\"f16\"");
  spit(path("dtype.hsrc"), dtype);
  EXPECT_THROW(load_cube(path("dtype.hsrc")), UnknownDtypeError);

  spit(path("trailing.hsrc"), good + "xx");
  EXPECT_THROW(load_cube(path("trailing.hsrc")), HeaderError);

  std::string header = good;
  header.insert(header.find('\n'), " junk");
  spit(path("header.hsrc"), header);
  EXPECT_THROW(load_cube(path("header.hsrc")), HeaderError);

  EXPECT_THROW(load_cube(path("nope.hsrc")), IoError);
  EXPECT_THROW(parse_dtype("int8"), UnknownDtypeError);
}

TEST_F(IoTest, ErrorMapLevels) {
  const HsiCube x = cube_new(3, 4, 5, 0.2);
  export_error_map(x, x, 1, path("zero.pgm"));
  const std::string zero = slurp(path("zero.pgm"));
  EXPECT_EQ(zero.substr(0, 2), "P5");
  const std::string pixels = zero.substr(zero.size() - 20);
  EXPECT_EQ(pixels, std::string(20, '\0'));

  // exact half level rounds up
  const HsiCube black = cube_new(3, 4, 5, 0.0);
  export_error_map(cube_new(3, 4, 5, 0.05), black, 1, path("half.pgm"));
  const std::string half = slurp(path("half.pgm"));
  for (unsigned char c : half.substr(half.size() - 20)) EXPECT_EQ(c, 128);
  EXPECT_EQ(half.substr(0, half.size() - 20), "P5\n5 4\n255\n");

  // 0.25 - 0.2 is not exactly 0.05, so either neighbour level is acceptable
  HsiCube off = x;
  off.matrix().row(1).array() += 0.05;
  export_error_map(off, x, 1, path("near.pgm"));
  const std::string near = slurp(path("near.pgm"));
  for (unsigned char c : near.substr(near.size() - 20)) EXPECT_TRUE(c == 127 || c == 128);

  off.matrix().row(1).array() += 1.0;
  export_error_map(off, x, 1, path("sat.pgm"));
  for (unsigned char c : slurp(path("sat.pgm")).substr(11)) EXPECT_EQ(c, 255);

  export_error_map(off, x, 1, path("again.pgm"));
  EXPECT_EQ(slurp(path("again.pgm")), slurp(path("sat.pgm")));
  EXPECT_THROW(export_error_map(off, x, 3, path("bad.pgm")), ValidationError);
}

TEST(Wavelength, BandLookup) {
  EXPECT_EQ(band_for_wavelength(540.0, 31), 14);
  EXPECT_EQ(band_for_wavelength(400.0, 31), 0);
  EXPECT_EQ(band_for_wavelength(700.0, 31), 30);
  EXPECT_EQ(band_for_wavelength(545.0, 31), 15);
  EXPECT_THROW(band_for_wavelength(800.0, 31), ValidationError);
}

TEST_F(IoTest, SrfCsvRoundTrip) {
  const SpectralResponse r = default_srf(31);
  save_srf_csv(path("srf.csv"), r);
  const SpectralResponse back = load_srf_csv(path("srf.csv"));
  EXPECT_LT((back.matrix() - r.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  spit(path("bad.csv"), "band,r,g\n0,1,2\n1,x,3\n");
  EXPECT_THROW(load_srf_csv(path("bad.csv")), IoError);
}
