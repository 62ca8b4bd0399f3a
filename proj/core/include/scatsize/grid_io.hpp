#pragma once

#include <iosfwd>
#include <string>

#include "scatsize/potential.hpp"

namespace scatsize {

/// Text grid format with a self-describing header:
///
///   SCATSIZE-GRID 1
///   dims n1 n2 n3
///   origin x y z
///   spacing h
///   v(0,0,0) v(0,0,1) ...        # row-major, last index fastest
///
/// Values are written with 17 significant digits so a round-trip is exact.
void write_voxel_grid(std::ostream& out, const VoxelPotential& grid);
void write_voxel_grid(const std::string& path, const VoxelPotential& grid);

VoxelPotential read_voxel_grid(std::istream& in);
VoxelPotential read_voxel_grid(const std::string& path);

}  // namespace scatsize
