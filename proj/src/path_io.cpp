#include "bsdelab/sde/path_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bsdelab {

namespace {

constexpr char kMagic[8] = {'B', 'S', 'D', 'E', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void write_paths(const std::string& file, const PathEnsemble& e) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_paths: cannot open " + file);
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(e.n_paths));
  put(os, static_cast<std::uint32_t>(e.dim));
  put(os, static_cast<std::uint32_t>(e.grid.n_steps));
  put(os, e.grid.t_start);
  put(os, e.grid.t_end);
  os.write(reinterpret_cast<const char*>(e.data.data()),
           static_cast<std::streamsize>(sizeof(double) * e.data.size()));
  if (!os) throw std::runtime_error("write_paths: short write to " + file);
}

PathEnsemble read_paths(const std::string& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("read_paths: cannot open " + file);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_paths: bad magic in " + file);
  std::uint32_t version, n_paths, dim, n_steps;
  double t_start, t_end;
  get(is, version);
  if (version != kVersion) throw std::runtime_error("read_paths: unsupported version");
  get(is, n_paths);
  get(is, dim);
  get(is, n_steps);
  get(is, t_start);
  get(is, t_end);
  if (!is || n_paths == 0 || dim == 0 || n_steps == 0)
    throw std::runtime_error("read_paths: corrupt header in " + file);
  PathEnsemble e = PathEnsemble::allocate(
      TimeGrid::uniform(t_start, t_end, static_cast<int>(n_steps)), static_cast<int>(dim),
      static_cast<int>(n_paths));
  is.read(reinterpret_cast<char*>(e.data.data()),
          static_cast<std::streamsize>(sizeof(double) * e.data.size()));
  if (!is) throw std::runtime_error("read_paths: truncated payload in " + file);
  return e;
}

}  // namespace bsdelab
