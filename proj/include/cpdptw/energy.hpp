#pragma once

// Per-leg energy: momentum-theory rotor power with wind for UAVs, rolling friction for ADRs.
// Power in W, energy in kJ, speeds in m/s, angles in rad.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

#include "cpdptw/common.hpp"

namespace cpdptw {

/// Rotorcraft parameters. The masses are [frame, battery, payload]; drag terms are per component.
/// Defaults describe a small desk-scale airframe so that a 6.5 kJ pack spans a few tens of km.
struct UavParams {
    std::array<double, 3> masses_kg{0.07, 0.03, 0.0};
    int n_rotors = 4;
    double disc_area_m2 = 0.01;
    double air_density = 1.225;
    std::array<double, 3> drag_coeffs{1.0, 1.0, 1.0};
    std::array<double, 3> proj_areas_m2{2e-4, 1e-4, 1e-4};
    double efficiency = 0.8;
    double gravity = 9.81;

    double total_mass() const { return masses_kg[0] + masses_kg[1] + masses_kg[2]; }
    double drag_area() const {
        return std::inner_product(drag_coeffs.begin(), drag_coeffs.end(), proj_areas_m2.begin(), 0.0);
    }
};

/// Ground robot parameters: friction-only model. Defaults scaled like UavParams.
struct AdrParams {
    double friction = 0.005;
    double mass_kg = 3.0;
    double payload_kg = 0.0;
    double efficiency = 0.8;
    double gravity = 9.81;
};

enum class WindModel : std::uint8_t { None, Constant, Turbulent };
enum class WindFormula : std::uint8_t { Verbatim, Vector };

struct WindState {
    double speed = 0.0;   // m/s, at most 12
    double course = 0.0;  // rad; direction the wind blows toward (0 = east)
    WindModel model = WindModel::None;
    std::uint64_t seed = 0;
};

inline void check_params(const UavParams& p) {
    for (double m : p.masses_kg)
        if (m < 0) throw ContractViolation("UavParams: masses must be nonnegative");
    if (!(p.total_mass() > 0) || p.n_rotors <= 0 || !(p.disc_area_m2 > 0) || !(p.air_density > 0) ||
        !(p.gravity > 0))
        throw ContractViolation("UavParams: parameters must be positive");
    if (!(p.efficiency > 0 && p.efficiency <= 1)) throw ContractViolation("UavParams: efficiency must be in (0,1]");
}

inline void check_params(const AdrParams& p) {
    if (!(p.friction > 0) || !(p.mass_kg > 0) || p.payload_kg < 0 || !(p.gravity > 0))
        throw ContractViolation("AdrParams: parameters must be positive");
    if (!(p.efficiency > 0 && p.efficiency <= 1)) throw ContractViolation("AdrParams: efficiency must be in (0,1]");
}

inline void check_wind(const WindState& w) {
    if (w.speed < 0 || w.speed > 12) throw ContractViolation("WindState: speed must be in [0, 12] m/s");
}

inline double angle_of_attack(const UavParams& p, double v_a) {
    if (v_a < 0) throw ContractViolation("angle_of_attack: airspeed must be nonnegative");
    const double drag = 0.5 * p.air_density * p.drag_area() * v_a * v_a;
    return std::atan(drag / (p.gravity * p.total_mass()));
}

/// Weight plus parasite drag.
inline double thrust(const UavParams& p, double v_a) {
    if (v_a < 0) throw ContractViolation("thrust: airspeed must be nonnegative");
    return p.gravity * p.total_mass() + 0.5 * p.air_density * p.drag_area() * v_a * v_a;
}

/// Right-hand side of the induced-velocity equation for a trial value v_i.
inline double induced_velocity_rhs(const UavParams& p, double v_a, double alpha, double v_i) {
    const double c = p.gravity * p.total_mass() / (2.0 * p.n_rotors * p.air_density * p.disc_area_m2);
    const double axial = v_a * std::sin(alpha) + v_i;
    const double edgewise = v_a * std::cos(alpha);
    return c / std::sqrt(edgewise * edgewise + axial * axial);
}

inline double hover_induced_velocity(const UavParams& p) {
    return std::sqrt(p.gravity * p.total_mass() / (2.0 * p.n_rotors * p.air_density * p.disc_area_m2));
}

/// Solves v_i = rhs(v_i). The root is unique and lies in (0, v_hover]; damped fixed-point
/// iteration is tried first, then bisection on that bracket.
inline double induced_velocity(const UavParams& p, double v_a, double alpha) {
    if (v_a < 0) throw ContractViolation("induced_velocity: airspeed must be nonnegative");
    constexpr double tol = 1e-9;
    const double v_h = hover_induced_velocity(p);
    auto residual = [&](double v) { return v - induced_velocity_rhs(p, v_a, alpha, v); };

    double v = v_h;
    for (int it = 0; it < 200; ++it) {
        const double next = 0.5 * v + 0.5 * induced_velocity_rhs(p, v_a, alpha, v);
        if (std::abs(next - v) < 1e-14 * (1.0 + v)) {
            v = next;
            break;
        }
        v = next;
    }
    if (v > 0 && std::abs(residual(v)) <= tol) return v;

    double lo = 0.0, hi = v_h;
    double r = kInf;
    for (int it = 0; it < 10000; ++it) {
        const double mid = 0.5 * (lo + hi);
        r = residual(mid);
        if (std::abs(r) <= tol && mid > 0) return mid;
        if (r < 0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 0) break;
    }
    throw NumericError("induced_velocity did not converge", r);
}

inline double uav_power(const UavParams& p, double v_a) {
    const double alpha = angle_of_attack(p, v_a);
    const double v_i = induced_velocity(p, v_a, alpha);
    return thrust(p, v_a) * (v_a * std::sin(alpha) + v_i) / p.efficiency;
}

/// Airspeed required to hold ground speed v_g on course chi under wind w.
inline double effective_airspeed(double v_g, double chi, const WindState& w,
                                 WindFormula formula = WindFormula::Vector) {
    if (v_g < 0) throw ContractViolation("effective_airspeed: ground speed must be nonnegative");
    const double v_w = w.model == WindModel::None ? 0.0 : w.speed;
    const double cross = 2.0 * v_g * v_w * std::cos(w.course - chi);
    const double radicand = formula == WindFormula::Verbatim ? 2.0 * v_g * v_g + 2.0 * v_w * v_w - cross
                                                             : v_g * v_g + v_w * v_w - cross;
    if (radicand < -1e-9 * (1.0 + v_g * v_g + v_w * v_w))
        throw NumericError("effective_airspeed: negative radicand", radicand);
    return std::sqrt(std::max(radicand, 0.0));
}

inline double adr_power(const AdrParams& p, double v) {
    if (v < 0) throw ContractViolation("adr_power: speed must be nonnegative");
    return p.friction * (p.mass_kg + p.payload_kg) * p.gravity * v / p.efficiency;
}

/// Wind actually felt on one leg: constant, or constant scaled by a seeded +/-20% perturbation
/// drawn from (wind seed, leg key).
inline WindState leg_wind(const WindState& w, std::uint64_t leg_key) {
    if (w.model != WindModel::Turbulent) return w;
    WindState out = w;
    const double u = detail::unit_from_hash(detail::hash_combine(w.seed, leg_key));
    out.speed = w.speed * (1.0 + 0.4 * (u - 0.5));
    out.model = WindModel::Constant;
    return out;
}

struct PhysicsConfig {
    UavParams uav;
    AdrParams adr;
    WindState wind;
    WindFormula wind_formula = WindFormula::Vector;
    double kg_per_unit = 0.01;        // payload mass per load unit
    double depot_speed_factor = 0.5;  // fraction of max speed on legs into a depot
};

/// Energy (kJ) for one straight segment flown at ground speed `speed` on course `course`.
inline double leg_energy(Mode mode, double distance_m, double speed, double payload_kg, const WindState& wind,
                         double course, const PhysicsConfig& phys) {
    if (distance_m < 0) throw ContractViolation("leg_energy: distance must be nonnegative");
    if (!(speed > 0)) throw ContractViolation("leg_energy: speed must be positive");
    if (distance_m == 0) return 0.0;
    const double seconds = distance_m / speed;
    if (mode == Mode::UAV) {
        UavParams p = phys.uav;
        p.masses_kg[2] = payload_kg;
        const double v_a = effective_airspeed(speed, course, wind, phys.wind_formula);
        return uav_power(p, v_a) * seconds / 1000.0;
    }
    AdrParams p = phys.adr;
    p.payload_kg = payload_kg;
    return adr_power(p, speed) * seconds / 1000.0;
}

}  // namespace cpdptw
