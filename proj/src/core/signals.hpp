// Excitation, reference, disturbance, and meal signal generators. Every
// realization is a pure function of (spec, duration, dt): the seed fully
// determines the series.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace polyinv::signals {

enum class SignalKind {
    sine_plus_noise,
    filtered_random_steps,
    multisine_with_guard,
    meal_train,
    step_disturbance,
};

std::string signal_kind_name(SignalKind kind);
SignalKind signal_kind_from_name(const std::string& name);

struct SignalSpec {
    SignalKind kind = SignalKind::sine_plus_noise;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;

    double param(const std::string& key, double fallback) const;
    bool has(const std::string& key) const { return params.count(key) != 0; }

    nlohmann::json to_json() const;
    static SignalSpec from_json(const nlohmann::json& j);
};

// Samples at t = i*dt for i = 0..round(duration/dt)-1; one row per sample,
// one column per channel. Channel count is 2 for multisine_with_guard,
// otherwise the "channels" parameter (default 1).
std::vector<std::vector<double>> generate_signal(const SignalSpec& spec, double duration,
                                                 double dt);

// Working-range override of the arm excitation law: strong proportional
// feedback replaces the open-loop input once the joint leaves the band.
// generate_signal emits the open-loop part; the closed-loop runner applies
// this per sample because it depends on the plant state.
inline double guard_override(double u_open, double z, double threshold = 1.75,
                             double gain = -20.0) {
    return std::abs(z) >= threshold ? gain * z : u_open;
}

// Meal schedule drawn by meal_train: onset times and per-meal amplitude
// multipliers, plus one negative pulse standing in for glucose-lowering
// external effects. Exposed so the insulin schedule of the design run can
// place boluses relative to the meal onsets.
struct MealSchedule {
    std::vector<double> times;       // minutes
    std::vector<double> amplitudes;  // multiplier on the raw pulse
    double negative_time = 0.0;
    double negative_amplitude = 0.0;  // multiplier, applied with a minus sign
};

MealSchedule draw_meal_schedule(const SignalSpec& spec, double duration);

std::vector<std::vector<double>> meal_series(const MealSchedule& schedule, double duration,
                                             double dt, double decay);

}  // namespace polyinv::signals
