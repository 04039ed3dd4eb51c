#include "legkit/terrain.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace legkit::sim {

void TerrainLayout::validate() const {
  if (!(cell > 0.0)) throw ConfigError("terrain cell size must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("terrain extent must be positive");
}

TerrainLayout TerrainLayout::square(double extent, double cell) {
  return {-extent / 2, extent / 2, -extent / 2, extent / 2, cell};
}

TerrainField::TerrainField(std::size_t nx, std::size_t ny, double cell, double x0, double y0,
                           std::vector<double> heights)
    : nx_(nx), ny_(ny), cell_(cell), x0_(x0), y0_(y0), heights_(std::move(heights)) {
  if (nx_ < 2 || ny_ < 2) throw ConfigError("terrain needs at least 2x2 lattice points");
  if (!(cell_ > 0.0)) throw ConfigError("terrain cell size must be positive");
  if (heights_.size() != nx_ * ny_) throw ConfigError("terrain height count mismatch");
  for (double h : heights_) {
    if (!std::isfinite(h)) throw ConfigError("terrain heights must be finite");
  }
}

bool TerrainField::contains(double x, double y) const {
  return x >= x0_ && x <= x_max() && y >= y0_ && y <= y_max();
}

TerrainField::Sample TerrainField::sample(double x, double y) const {
  if (!contains(x, y)) {
    std::ostringstream os;
    os << "terrain query (" << x << ", " << y << ") outside field";
    throw TerrainBoundsError(os.str());
  }
  const double fx = (x - x0_) / cell_;
  const double fy = (y - y0_) / cell_;
  auto ix = static_cast<std::size_t>(fx);
  auto iy = static_cast<std::size_t>(fy);
  if (ix >= nx_ - 1) ix = nx_ - 2;
  if (iy >= ny_ - 1) iy = ny_ - 2;
  const double u = fx - static_cast<double>(ix);
  const double v = fy - static_cast<double>(iy);
  const double h00 = at(ix, iy);
  const double h10 = at(ix + 1, iy);
  const double h01 = at(ix, iy + 1);
  const double h11 = at(ix + 1, iy + 1);
  const double h = (1 - u) * (1 - v) * h00 + u * (1 - v) * h10 + (1 - u) * v * h01 + u * v * h11;
  const double dhdu = (1 - v) * (h10 - h00) + v * (h11 - h01);
  const double dhdv = (1 - u) * (h01 - h00) + u * (h11 - h10);
  return {h, dhdu / cell_, dhdv / cell_};
}

TerrainField generate_terrain(double magnitude, const TerrainLayout& layout, std::uint64_t seed) {
  layout.validate();
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw ConfigError("terrain magnitude must be non-negative");
  }
  const auto nx = static_cast<std::size_t>(std::floor((layout.x_max - layout.x_min) / layout.cell)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor((layout.y_max - layout.y_min) / layout.cell)) + 1;
  std::vector<double> heights(nx * ny, 0.0);
  if (magnitude > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-magnitude / 2, magnitude / 2);
    for (double& h : heights) h = dist(rng);
  }
  TerrainField field(nx, ny, layout.cell, layout.x_min, layout.y_min, std::move(heights));
  field.seed = seed;
  field.magnitude = magnitude;
  return field;
}

TerrainField generate_terrain(double magnitude, double extent, double cell, std::uint64_t seed) {
  if (!(extent > 0.0)) throw ConfigError("terrain extent must be positive");
  return generate_terrain(magnitude, TerrainLayout::square(extent, cell), seed);
}

TerrainField generate_incline(double slope_x, const TerrainLayout& layout) {
  TerrainField flat = generate_terrain(0.0, layout, 0);
  std::vector<double> heights(flat.heights().size());
  for (std::size_t iy = 0; iy < flat.ny(); ++iy) {
    for (std::size_t ix = 0; ix < flat.nx(); ++ix) {
      heights[iy * flat.nx() + ix] = slope_x * (flat.x0() + flat.cell() * static_cast<double>(ix));
    }
  }
  return TerrainField(flat.nx(), flat.ny(), flat.cell(), flat.x0(), flat.y0(), std::move(heights));
}

double height_at(const TerrainField& field, double x, double y) { return field.sample(x, y).height; }

void write_terrain(std::ostream& os, const TerrainField& f) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "terrain 1 " << f.nx() << ' ' << f.ny() << ' ' << f.cell() << ' ' << f.x0() << ' '
     << f.y0() << ' ' << f.seed << ' ' << f.magnitude << ' ' << f.friction << '\n';
  for (std::size_t iy = 0; iy < f.ny(); ++iy) {
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
      if (ix) os << ' ';
      os << f.at(ix, iy);
    }
    os << '\n';
  }
}

TerrainField read_terrain(std::istream& is) {
  std::string tag;
  int version = 0;
  std::size_t nx = 0, ny = 0;
  double cell = 0, x0 = 0, y0 = 0, magnitude = 0, friction = 1;
  std::uint64_t seed = 0;
  if (!(is >> tag >> version) || tag != "terrain") throw IoError("not a terrain file");
  if (version != 1) throw IoError("unsupported terrain format version");
  if (!(is >> nx >> ny >> cell >> x0 >> y0 >> seed >> magnitude >> friction)) {
    throw IoError("malformed terrain header");
  }
  std::vector<double> heights(nx * ny);
  for (double& h : heights) {
    if (!(is >> h)) throw IoError("truncated terrain body");
  }
  TerrainField field(nx, ny, cell, x0, y0, std::move(heights));
  field.seed = seed;
  field.magnitude = magnitude;
  field.friction = friction;
  return field;
}

void save_terrain(const std::string& path, const TerrainField& field) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_terrain(os, field);
  if (!os) throw IoError("failed writing " + path);
}

TerrainField load_terrain(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_terrain(is);
}

}  // namespace legkit::sim
