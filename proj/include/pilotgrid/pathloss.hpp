#pragma once

namespace pilotgrid {

// NLOS street-canyon path-loss parameters (distances in meters, f_c in GHz).
struct PathlossParams {
    double street_width = 20.0;   // W
    double h_ap = 40.0;           // access point height
    double h_at = 1.5;            // terminal height
    double h = 5.0;               // mean building height
    double fc_ghz = 0.45;         // carrier frequency

    void validate() const;
};

// Path loss in dB at distance d meters (d > 0). Monotone nondecreasing for
// d >= 1 m. Throws std::domain_error for d <= 0.
double pathloss_db(double d, const PathlossParams& params = {});

// dB attenuation -> linear power gain, 10^(-db/10).
double gain_from_db(double db);

// Large-scale gain beta(d) = 10^(-l(d)/10). Distances below 1 m are clamped
// to 1 m (the formula diverges as d -> 0).
double large_scale_gain(double d, const PathlossParams& params = {});

}  // namespace pilotgrid
