#include "hsfuse/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace hsfuse {
namespace {

constexpr char kMagic[4] = {'H', 'S', 'R', 'C'};

static_assert(std::endian::native == std::endian::little, "cube I/O assumes a little-endian host");

size_t dtype_size(Dtype d) { return d == Dtype::F32 ? 4 : 8; }

std::string header_line(const CubeHeader& h) {
  nlohmann::ordered_json j;
  j["bands"] = h.dims.bands;
  j["height"] = h.dims.height;
  j["width"] = h.dims.width;
  j["dtype"] = to_string(h.dtype);
  j["layout"] = "band-major";
  if (h.scale) j["scale"] = {(*h.scale)[0], (*h.scale)[1]};
  return j.dump() + "\n";
}

CubeHeader parse_header(std::istream& in, const std::filesystem::path& path) {
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw BadMagicError(path.string() + ": not a cube file (bad magic)");
  std::string line;
  if (!std::getline(in, line) || in.eof()) throw HeaderError(path.string() + ": missing header line");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);  // rejects trailing garbage
  } catch (const nlohmann::json::parse_error& e) {
    throw HeaderError(path.string() + ": malformed header: " + e.what());
  }
  if (!j.is_object()) throw HeaderError(path.string() + ": header is not a JSON object");

  CubeHeader h;
  try {
    const std::string dtype = j.at("dtype").get<std::string>();
    if (dtype != "f32" && dtype != "f64") throw UnknownDtypeError(path.string() + ": unknown dtype '" + dtype + "'");
    h.dtype = parse_dtype(dtype);
    h.dims = Dims{j.at("bands").get<Index>(), j.at("height").get<Index>(), j.at("width").get<Index>()};
    if (j.contains("layout") && j["layout"] != "band-major")
      throw HeaderError(path.string() + ": unsupported layout " + j["layout"].dump());
    if (j.contains("scale")) {
      const auto& s = j["scale"];
      if (!s.is_array() || s.size() != 2) throw HeaderError(path.string() + ": scale must be [lo, hi]");
      h.scale = std::array<double, 2>{s[0].get<double>(), s[1].get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw HeaderError(path.string() + ": bad header field: " + e.what());
  }
  if (h.dims.bands < 1 || h.dims.height < 1 || h.dims.width < 1)
    throw HeaderError(path.string() + ": non-positive dimensions in header");
  return h;
}

}  // namespace

const char* to_string(Dtype d) { return d == Dtype::F32 ? "f32" : "f64"; }

Dtype parse_dtype(const std::string& s) {
  if (s == "f32") return Dtype::F32;
  if (s == "f64") return Dtype::F64;
  throw UnknownDtypeError("unknown dtype '" + s + "'");
}

void save_cube(const std::filesystem::path& path, const HsiCube& cube, Dtype dtype) {
  CubeHeader h{cube.dims(), dtype, std::array<double, 2>{cube.matrix().minCoeff(), cube.matrix().maxCoeff()}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  const std::string line = header_line(h);
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  if (dtype == Dtype::F64) {
    out.write(reinterpret_cast<const char*>(cube.data()), static_cast<std::streamsize>(cube.size() * 8));
  } else {
    std::vector<float> narrow(static_cast<size_t>(cube.size()));
    for (Index i = 0; i < cube.size(); ++i) narrow[static_cast<size_t>(i)] = static_cast<float>(cube.data()[i]);
    out.write(reinterpret_cast<const char*>(narrow.data()), static_cast<std::streamsize>(narrow.size() * 4));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

CubeHeader read_cube_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_header(in, path);
}

HsiCube load_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const CubeHeader h = parse_header(in, path);
  const size_t count = static_cast<size_t>(h.dims.size());
  const size_t bytes = count * dtype_size(h.dtype);
  std::vector<char> payload(bytes);
  in.read(payload.data(), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes)
    throw TruncatedPayloadError(path.string() + ": payload has " + std::to_string(in.gcount()) + " of " +
                                std::to_string(bytes) + " bytes");
  if (in.peek() != std::char_traits<char>::eof())
    throw HeaderError(path.string() + ": trailing bytes after payload");

  HsiCube::Matrix m(h.dims.bands, h.dims.pixels());
  if (h.dtype == Dtype::F64) {
    std::memcpy(m.data(), payload.data(), bytes);
  } else {
    for (size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, payload.data() + 4 * i, 4);
      m.data()[i] = f;
    }
  }
  return HsiCube(h.dims, std::move(m));
}

SpectralResponse load_srf_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open SRF table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty SRF table");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "band")
    throw IoError(path.string() + ": SRF header must start with 'band' followed by channel names");
  const size_t b = header.size() - 1;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    std::getline(ss, cell, ',');  // band label
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw IoError(path.string() + ": bad number '" + cell + "'");
      }
    }
    if (values.size() != b)
      throw IoError(path.string() + ": row " + std::to_string(rows.size() + 1) + " has " +
                            std::to_string(values.size()) + " values, expected " + std::to_string(b));
    rows.push_back(std::move(values));
  }
  Eigen::MatrixXd r(static_cast<Index>(b), static_cast<Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j)
    for (size_t i = 0; i < b; ++i) r(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
  return SpectralResponse(std::move(r));
}

void save_srf_csv(const std::filesystem::path& path, const SpectralResponse& srf) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "band";
  for (Index i = 0; i < srf.out_bands(); ++i) out << ",c" << i;
  out << '\n';
  out.precision(17);
  for (Index j = 0; j < srf.in_bands(); ++j) {
    out << j;
    for (Index i = 0; i < srf.out_bands(); ++i) out << ',' << srf.matrix()(i, j);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Index band_for_wavelength(double wavelength, Index bands, double wl_min, double wl_max) {
  if (bands < 1) throw ValidationError("band count must be >= 1");
  if (bands == 1) return 0;
  if (!(wl_max > wl_min)) throw ValidationError("wavelength range must be increasing");
  const double step = (wl_max - wl_min) / static_cast<double>(bands - 1);
  const double pos = std::floor((wavelength - wl_min) / step + 0.5);
  if (pos < 0.0 || pos > static_cast<double>(bands - 1))
    throw ValidationError("wavelength " + std::to_string(wavelength) + " nm is outside the band grid");
  return static_cast<Index>(pos);
}

void export_error_map(const HsiCube& x_hat, const HsiCube& x_ref, Index band, const std::filesystem::path& path,
                      double max_error) {
  if (x_hat.dims() != x_ref.dims()) throw DimensionError("error map inputs differ in shape");
  if (band < 0 || band >= x_ref.bands()) throw ValidationError("band " + std::to_string(band) + " out of range");
  if (!(max_error > 0.0)) throw ValidationError("max error must be positive");
  std::vector<unsigned char> pixels(static_cast<size_t>(x_ref.pixels()));
  for (Index p = 0; p < x_ref.pixels(); ++p) {
    const double err = std::abs(x_hat.matrix()(band, p) - x_ref.matrix()(band, p));
    const double level = std::min(255.0, std::floor(255.0 * err / max_error + 0.5));
    pixels[static_cast<size_t>(p)] = static_cast<unsigned char>(level);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << x_ref.width() << ' ' << x_ref.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace hsfuse
