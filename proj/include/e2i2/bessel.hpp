#pragma once

namespace e2i2 {

/// First positive root of J1.
inline constexpr double kJ1FirstZero = 3.8317059702075123;

/// Bessel function of the first kind J1(z), accurate to better than 1e-14
/// absolute over the working range (checked in tests against an integral
/// representation).
double bessel_j1(double z);

/// Airy-style envelope 2*J1(z)/z with the limit value 1 at z = 0.
double jinc(double z);

} // namespace e2i2
