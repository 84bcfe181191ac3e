#include "pilotgrid/pathloss.hpp"

#include <cmath>
#include <stdexcept>

namespace pilotgrid {

void PathlossParams::validate() const {
    if (!(street_width > 0 && h_ap > 0 && h_at > 0 && h > 0 && fc_ghz > 0))
        throw std::invalid_argument("path-loss parameters must be positive");
}

double pathloss_db(double d, const PathlossParams& p) {
    if (!(d > 0.0)) throw std::domain_error("pathloss_db: distance must be > 0");
    const double lg_hap = std::log10(p.h_ap);
    const double fixed = 161.04 - 7.1 * std::log10(p.street_width) + 7.5 * std::log10(p.h) -
                         (24.37 - 3.7 * (p.h / p.h_ap) * (p.h / p.h_ap)) * lg_hap +
                         20.0 * std::log10(p.fc_ghz) -
                         (3.2 * std::pow(std::log10(11.75 * p.h_at), 2.0) - 4.97);
    const double slope = 43.42 - 3.1 * lg_hap;
    return fixed + slope * (std::log10(d) - 3.0);
}

double gain_from_db(double db) {
    return std::pow(10.0, -db / 10.0);
}

double large_scale_gain(double d, const PathlossParams& p) {
    if (!(d > 0.0)) throw std::domain_error("large_scale_gain: distance must be > 0");
    return gain_from_db(pathloss_db(d < 1.0 ? 1.0 : d, p));
}

}  // namespace pilotgrid
