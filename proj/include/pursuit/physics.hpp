#pragma once

#include <cmath>
#include <stdexcept>

namespace pursuit {

// Humid-air density from the ideal-gas mixture of dry air and water vapour.
//
//   T      = temperature [K]
//   e_s    = 6.1094 * exp(17.625 * t_c / (t_c + 243.04)) [hPa]   (Magnus form)
//   e      = relative_humidity * e_s                              (vapour partial pressure)
//   rho    = (p - e) / (R_dry * T) + e / (R_vap * T)              (pressures in Pa)
//
// with R_dry = 287.058 J/(kg K) and R_vap = 461.495 J/(kg K).
inline double humid_air_density(double temperature_c, double pressure_hpa, double relative_humidity) {
    if (pressure_hpa <= 0.0) {
        throw std::invalid_argument("air pressure must be positive");
    }
    if (relative_humidity < 0.0 || relative_humidity > 1.0) {
        throw std::invalid_argument("relative humidity must be in [0, 1]");
    }
    const double t_k = temperature_c + 273.15;
    if (t_k <= 0.0) {
        throw std::invalid_argument("temperature below absolute zero");
    }
    constexpr double r_dry = 287.058;   // J/(kg K)
    constexpr double r_vap = 461.495;   // J/(kg K)
    const double saturation_hpa = 6.1094 * std::exp(17.625 * temperature_c / (temperature_c + 243.04));
    const double vapour_pa = relative_humidity * saturation_hpa * 100.0;
    const double dry_pa = pressure_hpa * 100.0 - vapour_pa;
    return dry_pa / (r_dry * t_k) + vapour_pa / (r_vap * t_k);
}

// Ambient conditions plus gravity. Density is cached and recomputed on every
// field change.
class Environment {
  public:
    Environment() { recompute_(); }

    Environment(double temperature_c, double pressure_hpa, double relative_humidity,
                double gravity = 9.80665)
        : temperature_c_(temperature_c),
          pressure_hpa_(pressure_hpa),
          relative_humidity_(relative_humidity),
          gravity_(gravity) {
        recompute_();
    }

    double temperature_c() const { return temperature_c_; }
    double air_pressure_hpa() const { return pressure_hpa_; }
    double relative_humidity() const { return relative_humidity_; }
    double gravity() const { return gravity_; }
    double air_density() const { return air_density_; }

    void set_temperature_c(double v) { temperature_c_ = v; recompute_(); }
    void set_air_pressure_hpa(double v) { pressure_hpa_ = v; recompute_(); }
    void set_relative_humidity(double v) { relative_humidity_ = v; recompute_(); }
    void set_gravity(double v) {
        if (v <= 0.0) throw std::invalid_argument("gravity must be positive");
        gravity_ = v;
    }

  private:
    void recompute_() { air_density_ = humid_air_density(temperature_c_, pressure_hpa_, relative_humidity_); }

    double temperature_c_ = 20.0;
    double pressure_hpa_ = 1013.25;
    double relative_humidity_ = 0.50;
    double gravity_ = 9.80665;
    double air_density_ = 0.0;
};

inline double air_density(const Environment& env) { return env.air_density(); }

struct RiderParams {
    double mass_kg = 0.0;
    double cda_m2 = 0.0;             // drag coefficient times frontal area
    double available_energy_j = 0.0;

    void validate() const {
        if (mass_kg <= 0.0) throw std::invalid_argument("rider mass must be positive");
        if (cda_m2 <= 0.0) throw std::invalid_argument("rider CdA must be positive");
        if (available_energy_j <= 0.0) throw std::invalid_argument("rider available energy must be positive");
    }
};

struct BikeParams {
    double mass_kg = 8.0;

    void validate() const {
        if (mass_kg <= 0.0) throw std::invalid_argument("bicycle mass must be positive");
    }
};

struct ModelConstants {
    double mechanical_efficiency = 0.977;
    double global_friction = 0.0025;
    double draft_coeff_second = 0.7;
    double draft_coeff_third = 0.6;
    double dt_s = 0.1;               // forward-integration step

    void validate() const {
        if (mechanical_efficiency <= 0.0 || mechanical_efficiency > 1.0)
            throw std::invalid_argument("mechanical efficiency must be in (0, 1]");
        if (global_friction < 0.0) throw std::invalid_argument("global friction must be non-negative");
        if (draft_coeff_second <= 0.0 || draft_coeff_second > 1.0)
            throw std::invalid_argument("second-position draft coefficient must be in (0, 1]");
        if (draft_coeff_third <= 0.0 || draft_coeff_third > 1.0)
            throw std::invalid_argument("third-position draft coefficient must be in (0, 1]");
        if (dt_s <= 0.0) throw std::invalid_argument("integration step must be positive");
    }
};

// Kinetic-energy change of the lead rider over one integration step:
//   dKE = (P*E - CdA * 0.5*rho*v^3 - mu * v*F_N) * dt,  F_N = (m_rider + m_bike) * g
// Negative values are valid decelerations.
inline double lead_delta_ke(double power_w, double speed_ms, const RiderParams& rider,
                            const BikeParams& bike, const Environment& env,
                            const ModelConstants& k) {
    const double normal_force = (rider.mass_kg + bike.mass_kg) * env.gravity();
    const double drag = rider.cda_m2 * 0.5 * env.air_density() * speed_ms * speed_ms * speed_ms;
    const double friction = k.global_friction * speed_ms * normal_force;
    return (power_w * k.mechanical_efficiency - drag - friction) * k.dt_s;
}

// Power a drafting rider needs to match the leader's velocity change:
//   P = (CdA * C_draft * 0.5*rho*v^3 + mu * v*F_N + dKE/dt) / E
// where dKE is this rider's own kinetic-energy change over the step and F_N
// uses this rider's mass. May be negative under hard deceleration.
inline double follower_power(double delta_ke_j, double speed_ms, const RiderParams& rider,
                             const BikeParams& bike, double draft_coeff, const Environment& env,
                             const ModelConstants& k) {
    const double normal_force = (rider.mass_kg + bike.mass_kg) * env.gravity();
    const double drag = rider.cda_m2 * draft_coeff * 0.5 * env.air_density() * speed_ms * speed_ms * speed_ms;
    const double friction = k.global_friction * speed_ms * normal_force;
    return (drag + friction + delta_ke_j / k.dt_s) / k.mechanical_efficiency;
}

// v' = sqrt(max(0, v^2 + 2 dKE / m)); clamped at zero, no backward motion.
inline double step_velocity(double speed_ms, double delta_ke_j, double total_mass_kg) {
    const double v_sq = speed_ms * speed_ms + 2.0 * delta_ke_j / total_mass_kg;
    return v_sq > 0.0 ? std::sqrt(v_sq) : 0.0;
}

}  // namespace pursuit
