#pragma once

#include <cstdint>

#include "pilotgrid/channel.hpp"
#include "pilotgrid/geometry.hpp"
#include "pilotgrid/pathloss.hpp"

namespace pilotgrid {

// Pilot-sensing threshold used by the distributed scheme. The default maps the
// inhibition distance through the path loss: p_inh = pilot_energy * beta(r_inh),
// which makes the single-interferer decision coincide with the distance rule.
struct SensingConfig {
    double p_inh = 0.0;          // linear received-power threshold, > 0
    double pilot_energy = 0.0;   // tau_p * rho_p, linear
};

SensingConfig sensing_config_from_rinh(double r_inh, double pilot_energy,
                                       const PathlossParams& params = {});

// Inhibition-based randomized assignment: users are visited in increasing mark
// order and receive a uniformly random pilot among those not already held
// inside their contention disk of radius r_inh. A user whose disk blocks all P
// pilots stays unassigned. Marks must be present; ties break by list index.
PilotAssignment assign_rsa(const PointSet& users, int num_pilots, double r_inh,
                           std::uint64_t seed);

// Sequential per-pilot packing: pilot 1 is greedily assigned in list order
// under the r_inh constraint, then pilot 2 over the remaining users, and so on.
PilotAssignment assign_regenerative(const PointSet& users, int num_pilots, double r_inh);

// Power-threshold variant: each user, in arrival (mark) order, measures the
// aggregate large-scale power of current holders on every pilot and picks
// uniformly among pilots with power <= p_inh; unassigned if none qualifies.
PilotAssignment assign_distributed(const PointSet& users, int num_pilots,
                                   const SensingConfig& config,
                                   const PathlossParams& params,
                                   std::uint64_t seed);

// i.i.d. uniform pilot per user; never unassigned.
PilotAssignment assign_random(const PointSet& users, int num_pilots, std::uint64_t seed);

// Streaming Monte Carlo estimate of the inhibition process: points of a PPP of
// the given intensity arrive in random order over `generate`; retained-point
// counts (per pilot) are taken over `measure`. Equivalent in distribution to
// sample_ppp + assign_marks + assign_rsa, but needs no mark sort, so it scales
// to the jamming regime.
struct RsaDensityStats {
    double assigned_per_m2 = 0.0;   // all pilots together
    std::uint64_t assigned_count = 0;
    std::uint64_t total_count = 0;  // users generated
};

RsaDensityStats rsa_density_mc(double intensity, int num_pilots, double r_inh,
                               const CircularWindow& generate,
                               const CircularWindow& measure,
                               int trials, std::uint64_t seed);

// Monte Carlo frequency of the event "a user planted at the window center is
// assigned a pilot". The planted user takes a uniformly random slot in the
// arrival order, like any other arrival.
double typical_assignment_mc(double intensity, int num_pilots, double r_inh,
                             const CircularWindow& generate, int trials,
                             std::uint64_t seed);

}  // namespace pilotgrid
