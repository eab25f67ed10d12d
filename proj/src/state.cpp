#include "varprec/state.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace varprec::sw {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

Vector pack(const StateVector& s) {
  Vector x(s.eta.size() + s.u.size() + s.v.size());
  Eigen::Index off = 0;
  x.segment(off, s.eta.size()) = Eigen::Map<const Vector>(s.eta.data(), s.eta.size());
  off += s.eta.size();
  x.segment(off, s.u.size()) = Eigen::Map<const Vector>(s.u.data(), s.u.size());
  off += s.u.size();
  x.segment(off, s.v.size()) = Eigen::Map<const Vector>(s.v.data(), s.v.size());
  return x;
}

StateVector unpack(const Vector& x, const GridSpec& g) {
  if (x.size() != g.state_size())
    throw ShapeError("unpack: vector length " + std::to_string(x.size()) +
                     " does not match grid state size " +
                     std::to_string(g.state_size()));
  StateVector s = StateVector::zero(g);
  Eigen::Index off = 0;
  std::memcpy(s.eta.data(), x.data() + off, sizeof(double) * s.eta.size());
  off += s.eta.size();
  std::memcpy(s.u.data(), x.data() + off, sizeof(double) * s.u.size());
  off += s.u.size();
  std::memcpy(s.v.data(), x.data() + off, sizeof(double) * s.v.size());
  return s;
}

std::array<Matrix, 3> to_image(const StateVector& s, const ImageScaling& sc) {
  const Eigen::Index nx = s.eta.rows();
  const Eigen::Index ny = s.eta.cols();
  if (s.u.rows() != nx - 1 || s.u.cols() != ny || s.v.rows() != nx ||
      s.v.cols() != ny - 1)
    throw ShapeError("to_image: inconsistent field shapes");

  std::array<Matrix, 3> img{Matrix(nx, ny), Matrix(nx, ny), Matrix(nx, ny)};
  img[0] = sc.eta * s.eta;
  // Edge replication pads the staggered components back to nx x ny.
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      img[1](i, j) = sc.u * s.u(std::min(i, nx - 2), j);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      img[2](i, j) = sc.v * s.v(i, std::min(j, ny - 2));
  return img;
}

namespace {
constexpr char kMagic[4] = {'S', 'W', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_state(const std::string& path, const StateVector& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_state: cannot open " + path);
  const std::uint32_t nx = static_cast<std::uint32_t>(s.eta.rows());
  const std::uint32_t ny = static_cast<std::uint32_t>(s.eta.cols());
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(&kVersion), 4);
  f.write(reinterpret_cast<const char*>(&nx), 4);
  f.write(reinterpret_cast<const char*>(&ny), 4);
  const Vector x = pack(s);
  f.write(reinterpret_cast<const char*>(x.data()),
          static_cast<std::streamsize>(sizeof(double)) * x.size());
  if (!f) throw IoError("write_state: short write to " + path);
}

StateVector read_state(const std::string& path, const GridSpec& expected) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_state: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, nx = 0, ny = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&nx), 4);
  f.read(reinterpret_cast<char*>(&ny), 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw VersionError("read_state: bad magic in " + path);
  if (version != kVersion)
    throw VersionError("read_state: unsupported version " + std::to_string(version));
  if (nx != static_cast<std::uint32_t>(expected.nx) ||
      ny != static_cast<std::uint32_t>(expected.ny))
    throw ShapeError("read_state: snapshot is " + std::to_string(nx) + "x" +
                     std::to_string(ny) + ", expected " +
                     std::to_string(expected.nx) + "x" + std::to_string(expected.ny));
  Vector x(expected.state_size());
  f.read(reinterpret_cast<char*>(x.data()),
         static_cast<std::streamsize>(sizeof(double)) * x.size());
  if (!f) throw IoError("read_state: truncated payload in " + path);
  return unpack(x, expected);
}

}  // namespace varprec::sw
