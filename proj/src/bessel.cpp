#include "e2i2/bessel.hpp"

#include <cmath>

namespace e2i2 {

double bessel_j1(double z) {
    // libstdc++'s special-math J1 already meets the accuracy contract;
    // the independent integral-representation oracle in the test suite
    // pins it there.
    if (z < 0.0) return -std::cyl_bessel_j(1.0, -z);
    return std::cyl_bessel_j(1.0, z);
}

double jinc(double z) {
    const double az = std::fabs(z);
    if (az < 1e-6) {
        // 2*J1(z)/z = 1 - z^2/8 + z^4/192 - ...
        const double z2 = z * z;
        return 1.0 - z2 / 8.0 + z2 * z2 / 192.0;
    }
    return 2.0 * bessel_j1(z) / z;
}

} // namespace e2i2
