#include "scatsize/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "scatsize/errors.hpp"

namespace scatsize {

namespace {
constexpr const char* kMagic = "SCATSIZE-GRID 1";

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}
}  // namespace

void write_voxel_grid(std::ostream& out, const VoxelPotential& grid) {
  out << kMagic << "\n";
  out << "dims " << grid.dims[0] << " " << grid.dims[1] << " " << grid.dims[2] << "\n";
  out << "origin " << fmt17(grid.origin.x) << " " << fmt17(grid.origin.y) << " "
      << fmt17(grid.origin.z) << "\n";
  out << "spacing " << fmt17(grid.spacing) << "\n";
  size_t col = 0;
  for (size_t i = 0; i < grid.values.size(); ++i) {
    out << fmt17(grid.values[i]);
    if (++col == 8 || i + 1 == grid.values.size()) {
      out << "\n";
      col = 0;
    } else {
      out << " ";
    }
  }
}

void write_voxel_grid(const std::string& path, const VoxelPotential& grid) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open grid file for writing: " + path);
  write_voxel_grid(f, grid);
  if (!f) throw IoError("failed writing grid file: " + path);
}

VoxelPotential read_voxel_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw IoError("grid file missing SCATSIZE-GRID 1 magic line");

  VoxelPotential grid;
  std::string key;
  if (!(in >> key >> grid.dims[0] >> grid.dims[1] >> grid.dims[2]) || key != "dims")
    throw IoError("grid file: bad dims line");
  if (!(in >> key >> grid.origin.x >> grid.origin.y >> grid.origin.z) || key != "origin")
    throw IoError("grid file: bad origin line");
  if (!(in >> key >> grid.spacing) || key != "spacing")
    throw IoError("grid file: bad spacing line");
  if (grid.dims[0] < 1 || grid.dims[1] < 1 || grid.dims[2] < 1 || !(grid.spacing > 0.0))
    throw IoError("grid file: invalid dims or spacing");

  const size_t n = (size_t)grid.dims[0] * grid.dims[1] * grid.dims[2];
  grid.values.resize(n);
  for (size_t i = 0; i < n; ++i)
    if (!(in >> grid.values[i])) throw IoError("grid file: truncated value section");
  return grid;
}

VoxelPotential read_voxel_grid(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open grid file: " + path);
  return read_voxel_grid(f);
}

}  // namespace scatsize
