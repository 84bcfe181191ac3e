#include "pilotgrid/random.hpp"

#include <cmath>
#include <stdexcept>

namespace pilotgrid {

std::uint64_t Rng::next_poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::invalid_argument("poisson mean must be finite and >= 0");
    std::uint64_t count = 0;
    // exp(-256) ~ 6e-112, comfortably above DBL_MIN, so chunks of 256 keep
    // the multiplicative method exact for arbitrarily large means.
    constexpr double kChunk = 256.0;
    double remaining = mean;
    while (remaining > 0.0) {
        const double lambda = remaining > kChunk ? kChunk : remaining;
        remaining -= lambda;
        const double threshold = std::exp(-lambda);
        double prod = 1.0;
        for (;;) {
            prod *= next_double_pos();
            if (prod <= threshold) break;
            ++count;
        }
    }
    return count;
}

}  // namespace pilotgrid
