#pragma once

#include <numbers>

namespace optomech {

// CODATA 2018 exact / recommended values, SI units.
struct PhysicalConstants {
    double e = 1.602176634e-19;        // elementary charge [C]
    double epsilon0 = 8.8541878128e-12; // vacuum permittivity [F/m]
    double hbar = 1.054571817e-34;     // reduced Planck constant [J s]
    double kB = 1.380649e-23;          // Boltzmann constant [J/K]
};

inline constexpr PhysicalConstants codata2018{};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace optomech
