#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "legkit/types.hpp"

namespace legkit::sim {

/// Axis-aligned rectangle covered by a heightfield, plus its lattice spacing.
struct TerrainLayout {
  double x_min = -2.0;
  double x_max = 40.0;
  double y_min = -10.0;
  double y_max = 10.0;
  double cell = 0.1;

  void validate() const;
  /// Square of side `extent` centred on the origin.
  static TerrainLayout square(double extent, double cell);
};

/// Query outside the lattice extent.
class TerrainBoundsError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Heights on a uniform xy lattice, row-major (row = y index). Surface between
/// lattice points is the bilinear interpolant.
class TerrainField {
 public:
  TerrainField() = default;
  TerrainField(std::size_t nx, std::size_t ny, double cell, double x0, double y0,
               std::vector<double> heights);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double cell() const { return cell_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double x_max() const { return x0_ + cell_ * static_cast<double>(nx_ - 1); }
  double y_max() const { return y0_ + cell_ * static_cast<double>(ny_ - 1); }
  const std::vector<double>& heights() const { return heights_; }
  double at(std::size_t ix, std::size_t iy) const { return heights_[iy * nx_ + ix]; }

  std::uint64_t seed = 0;
  double magnitude = 0.0;
  double friction = 1.0;  // multiplies the foot friction coefficient

  bool contains(double x, double y) const;

  struct Sample {
    double height;
    double dhdx;
    double dhdy;
  };
  /// Height and gradient of the bilinear surface. Throws TerrainBoundsError.
  Sample sample(double x, double y) const;

  friend bool operator==(const TerrainField&, const TerrainField&) = default;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double cell_ = 1.0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  std::vector<double> heights_;
};

/// Flat or rough field: each vertex uniform on [-magnitude/2, magnitude/2],
/// deterministic in `seed`.
TerrainField generate_terrain(double magnitude, const TerrainLayout& layout, std::uint64_t seed);

/// Square field of side `extent` centred on the origin.
TerrainField generate_terrain(double magnitude, double extent, double cell, std::uint64_t seed);

/// Plane z = slope_x * x, for slope tests.
TerrainField generate_incline(double slope_x, const TerrainLayout& layout);

/// Bilinear height; throws TerrainBoundsError outside the extent.
double height_at(const TerrainField& field, double x, double y);

/// Plain-text grid: a header line
///   terrain 1 <nx> <ny> <cell> <x0> <y0> <seed> <magnitude> <friction>
/// followed by ny rows of nx heights.
void write_terrain(std::ostream& os, const TerrainField& field);
TerrainField read_terrain(std::istream& is);
void save_terrain(const std::string& path, const TerrainField& field);
TerrainField load_terrain(const std::string& path);

}  // namespace legkit::sim
