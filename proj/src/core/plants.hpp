// Continuous-time benchmark plants (nonlinear oscillator, two-link arm,
// insulin-glucose patient) integrated with fixed-step RK4 at one tenth of the
// sampling period, behind a common stateful stepper.
#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace polyinv::plants {

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) fail(ErrorCode::diverged, std::string("rk4_step: non-finite ") + what);
    }
}
}  // namespace detail

// Classical 4th-order Runge-Kutta update. `deriv` maps a state span to the
// state derivative vector of the same length.
template <typename Deriv>
std::vector<double> rk4_step(Deriv&& deriv, std::span<const double> state, double dt) {
    if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "rk4_step: dt must be positive");
    const std::size_t n = state.size();
    auto stage = [&](const std::vector<double>& point) {
        std::vector<double> k = deriv(std::span<const double>(point));
        if (k.size() != n) fail(ErrorCode::dimension_mismatch, "rk4_step: derivative length differs from state");
        detail::require_finite(k, "derivative");
        return k;
    };
    std::vector<double> point(state.begin(), state.end());
    const std::vector<double> k1 = stage(point);
    for (std::size_t i = 0; i < n; ++i) point[i] = state[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = stage(point);
    for (std::size_t i = 0; i < n; ++i) point[i] = state[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = stage(point);
    for (std::size_t i = 0; i < n; ++i) point[i] = state[i] + dt * k3[i];
    const std::vector<double> k4 = stage(point);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        next[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return next;
}

// ---------------------------------------------------------------------------
// Plant right-hand sides

// Damped oscillator with a (hardening, double-well for alpha1 < 0) cubic
// spring: x1' = x2, x2' = -alpha1 x1 - alpha2 x1^3 - beta x2 + u, output x1.
struct DuffingParams {
    double alpha1 = -1.0;
    double alpha2 = 1.0;
    double beta = 0.2;
};

std::vector<double> duffing_deriv(std::span<const double> state, double u,
                                  const DuffingParams& p);

// Planar two-link arm with point masses at the link tips, angles measured
// from the horizontal; state (z1, z2, z1', z2'), torque inputs (u1, u2).
struct RobotParams {
    double l1 = 0.8;
    double l2 = 0.7;
    double m1 = 2.5;
    double m2 = 2.0;
    double gravity = 9.81;
    // Viscous joint friction (N*m*s/rad). Zero keeps the ideal rigid-body
    // arm; the excitation runs enable it so the working-range guard can
    // dissipate the energy the input signal pumps in.
    double damping = 0.0;
};

std::vector<double> robot_deriv(std::span<const double> state, std::span<const double> u,
                                const RobotParams& p);

// Gravity torque vector at a configuration; u = robot_gravity(...) holds the
// arm still from rest.
std::array<double, 2> robot_gravity(double z1, double z2, const RobotParams& p);

// Glucose-insulin patient: state (y, eta, I, I1, I2) with glucose dynamics in
// the first two equations and a three-compartment insulin chain in the rest.
// Time unit is minutes; u is the injected insulin rate, w the meal input.
struct PatientParams {
    double p1 = 0.031;
    double p2 = 0.012;
    double p3 = 9.56e-6;
    double v_g = 1.45;
    double v_d = 0.2;
    double v_i = 5e-3;
    double k21 = 0.0166;
    double ka = 0.0133;
    double kd = 0.0033;
    double ke = 0.3;
    double i_b = 0.0;
    double g_b = 180.0;
};

std::vector<double> patient_deriv(std::span<const double> state, double u, double w,
                                  const PatientParams& p);

// Basal equilibrium (g_b, 0, i_b, 0, 0): stationary under u = w = 0.
std::vector<double> patient_basal_state(const PatientParams& p);

// ---------------------------------------------------------------------------
// Stateful stepper

enum class PlantKind { duffing, robot, patient };

const char* plant_kind_name(PlantKind kind) noexcept;

class OdePlant {
public:
    static OdePlant duffing(double sample_period = 0.1, DuffingParams params = {});
    static OdePlant robot(double sample_period = 0.02, RobotParams params = {});
    static OdePlant patient(double sample_period = 3.0, PatientParams params = {});

    PlantKind kind() const noexcept { return kind_; }
    const char* name() const noexcept { return plant_kind_name(kind_); }
    int state_dim() const noexcept { return static_cast<int>(state_.size()); }
    int n_inputs() const noexcept;
    int n_disturbances() const noexcept;  // inputs entering the dynamics besides u
    int n_outputs() const noexcept;
    double sample_period() const noexcept { return sample_period_; }
    int substeps() const noexcept { return substeps_; }
    double time() const noexcept { return time_; }
    const std::vector<double>& state() const noexcept { return state_; }

    void reset(std::span<const double> state, double time = 0.0);

    // Advance one sampling period under zero-order-hold inputs.
    void step(std::span<const double> u, std::span<const double> w = {});

    // Noise-free output; measurement noise and output disturbances are the
    // caller's to add.
    std::vector<double> output() const;

    const DuffingParams& duffing_params() const { return duffing_; }
    const RobotParams& robot_params() const { return robot_; }
    const PatientParams& patient_params() const { return patient_; }

private:
    OdePlant(PlantKind kind, double sample_period, std::vector<double> initial_state);

    std::vector<double> deriv_at(std::span<const double> state, std::span<const double> u,
                                 std::span<const double> w) const;

    PlantKind kind_;
    double sample_period_;
    int substeps_ = 10;
    double time_ = 0.0;
    std::vector<double> state_;
    DuffingParams duffing_{};
    RobotParams robot_{};
    PatientParams patient_{};
};

}  // namespace polyinv::plants
