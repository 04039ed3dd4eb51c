#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace legkit {

using Vec3 = Eigen::Vector3d;

enum class Leg : std::size_t { FL = 0, FR = 1, BL = 2, BR = 3 };

inline constexpr std::size_t kNumLegs = 4;
inline constexpr std::array<Leg, kNumLegs> kAllLegs = {Leg::FL, Leg::FR, Leg::BL, Leg::BR};

constexpr std::size_t index(Leg leg) { return static_cast<std::size_t>(leg); }

constexpr std::string_view leg_name(Leg leg) {
  switch (leg) {
    case Leg::FL: return "FL";
    case Leg::FR: return "FR";
    case Leg::BL: return "BL";
    case Leg::BR: return "BR";
  }
  return "??";
}

constexpr bool is_left(Leg leg) { return leg == Leg::FL || leg == Leg::BL; }
constexpr bool is_front(Leg leg) { return leg == Leg::FL || leg == Leg::FR; }

template <typename T>
using PerLeg = std::array<T, kNumLegs>;

// Error hierarchy. Every error the library raises derives from Error so the
// CLI can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace legkit
