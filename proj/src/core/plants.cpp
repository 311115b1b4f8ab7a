#include "core/plants.hpp"

#include <cmath>
#include <cstdio>

namespace polyinv::plants {

std::vector<double> duffing_deriv(std::span<const double> state, double u,
                                  const DuffingParams& p) {
    if (state.size() != 2) fail(ErrorCode::dimension_mismatch, "duffing_deriv: state must have 2 entries");
    const double x1 = state[0];
    const double x2 = state[1];
    return {x2, -p.alpha1 * x1 - p.alpha2 * x1 * x1 * x1 - p.beta * x2 + u};
}

std::array<double, 2> robot_gravity(double z1, double z2, const RobotParams& p) {
    const double g = p.gravity;
    return {(p.m1 + p.m2) * g * p.l1 * std::cos(z1) + p.m2 * g * p.l2 * std::cos(z1 + z2),
            p.m2 * g * p.l2 * std::cos(z1 + z2)};
}

std::vector<double> robot_deriv(std::span<const double> state, std::span<const double> u,
                                const RobotParams& p) {
    if (state.size() != 4) fail(ErrorCode::dimension_mismatch, "robot_deriv: state must have 4 entries");
    if (u.size() != 2) fail(ErrorCode::dimension_mismatch, "robot_deriv: input must have 2 entries");
    const double z2 = state[1];
    const double v1 = state[2];
    const double v2 = state[3];
    const double c2 = std::cos(z2);

    // Inertia matrix, Coriolis/centrifugal terms, and gravity torques of the
    // point-mass planar arm; det M = m2 l1^2 l2^2 (m1 + m2 sin^2 z2) > 0.
    const double m11 = (p.m1 + p.m2) * p.l1 * p.l1 + p.m2 * p.l2 * p.l2 +
                       2.0 * p.m2 * p.l1 * p.l2 * c2;
    const double m12 = p.m2 * p.l2 * p.l2 + p.m2 * p.l1 * p.l2 * c2;
    const double m22 = p.m2 * p.l2 * p.l2;
    const double h = p.m2 * p.l1 * p.l2 * std::sin(z2);
    const double c_v1 = -h * v2 * v1 - h * (v1 + v2) * v2;
    const double c_v2 = h * v1 * v1;
    const auto grav = robot_gravity(state[0], z2, p);

    const double rhs1 = u[0] - c_v1 - grav[0] - p.damping * v1;
    const double rhs2 = u[1] - c_v2 - grav[1] - p.damping * v2;
    const double det = m11 * m22 - m12 * m12;
    if (!(std::abs(det) > 1e-12)) {
        fail(ErrorCode::internal, "robot_deriv: singular inertia matrix");
    }
    const double a1 = (m22 * rhs1 - m12 * rhs2) / det;
    const double a2 = (-m12 * rhs1 + m11 * rhs2) / det;
    return {v1, v2, a1, a2};
}

std::vector<double> patient_deriv(std::span<const double> state, double u, double w,
                                  const PatientParams& p) {
    if (state.size() != 5) fail(ErrorCode::dimension_mismatch, "patient_deriv: state must have 5 entries");
    const double y = state[0];
    const double eta = state[1];
    const double ins = state[2];
    const double i1 = state[3];
    const double i2 = state[4];
    return {-(p.p1 + eta) * y + p.p1 * p.g_b + w / p.v_g,
            -p.p2 * eta + p.p3 * (ins - p.i_b),
            p.ka / p.v_d * i2 - p.ke * ins,
            -p.k21 * i1 + u / p.v_i,
            p.k21 * i1 - (p.kd + p.ka) * i2};
}

std::vector<double> patient_basal_state(const PatientParams& p) {
    return {p.g_b, 0.0, p.i_b, 0.0, 0.0};
}

// ---------------------------------------------------------------------------
// OdePlant

const char* plant_kind_name(PlantKind kind) noexcept {
    switch (kind) {
        case PlantKind::duffing: return "duffing";
        case PlantKind::robot: return "robot";
        case PlantKind::patient: return "patient";
    }
    return "unknown";
}

OdePlant::OdePlant(PlantKind kind, double sample_period, std::vector<double> initial_state)
    : kind_(kind), sample_period_(sample_period), state_(std::move(initial_state)) {
    if (!(sample_period > 0.0)) {
        fail(ErrorCode::invalid_argument, "OdePlant: sample_period must be positive");
    }
}

OdePlant OdePlant::duffing(double sample_period, DuffingParams params) {
    OdePlant plant(PlantKind::duffing, sample_period, std::vector<double>(2, 0.0));
    plant.duffing_ = params;
    return plant;
}

OdePlant OdePlant::robot(double sample_period, RobotParams params) {
    OdePlant plant(PlantKind::robot, sample_period, std::vector<double>(4, 0.0));
    plant.robot_ = params;
    return plant;
}

OdePlant OdePlant::patient(double sample_period, PatientParams params) {
    OdePlant plant(PlantKind::patient, sample_period, patient_basal_state(params));
    plant.patient_ = params;
    return plant;
}

int OdePlant::n_inputs() const noexcept { return kind_ == PlantKind::robot ? 2 : 1; }

int OdePlant::n_disturbances() const noexcept { return kind_ == PlantKind::patient ? 1 : 0; }

int OdePlant::n_outputs() const noexcept { return kind_ == PlantKind::robot ? 2 : 1; }

void OdePlant::reset(std::span<const double> state, double time) {
    if (state.size() != state_.size()) {
        fail(ErrorCode::dimension_mismatch, "OdePlant::reset: state length differs from state_dim");
    }
    for (double x : state) {
        if (!std::isfinite(x)) fail(ErrorCode::invalid_argument, "OdePlant::reset: non-finite state");
    }
    state_.assign(state.begin(), state.end());
    time_ = time;
}

std::vector<double> OdePlant::deriv_at(std::span<const double> state, std::span<const double> u,
                                       std::span<const double> w) const {
    switch (kind_) {
        case PlantKind::duffing: return duffing_deriv(state, u[0], duffing_);
        case PlantKind::robot: return robot_deriv(state, u, robot_);
        case PlantKind::patient: return patient_deriv(state, u[0], w[0], patient_);
    }
    fail(ErrorCode::internal, "OdePlant: unknown kind");
}

void OdePlant::step(std::span<const double> u, std::span<const double> w) {
    if (u.size() != static_cast<std::size_t>(n_inputs())) {
        fail(ErrorCode::dimension_mismatch, "OdePlant::step: input length differs from n_inputs");
    }
    const std::vector<double> w_default(static_cast<std::size_t>(n_disturbances()), 0.0);
    std::span<const double> w_used = w.empty() ? std::span<const double>(w_default) : w;
    if (w_used.size() != static_cast<std::size_t>(n_disturbances())) {
        fail(ErrorCode::dimension_mismatch,
             "OdePlant::step: disturbance length differs from n_disturbances");
    }

    const double dt = sample_period_ / static_cast<double>(substeps_);
    auto rhs = [&](std::span<const double> x) { return deriv_at(x, u, w_used); };
    for (int k = 0; k < substeps_; ++k) {
        try {
            state_ = rk4_step(rhs, state_, dt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::diverged) throw;
            char buffer[128];
            std::snprintf(buffer, sizeof(buffer), "plant '%s' diverged at t = %.6g", name(),
                          time_ + k * dt);
            fail(ErrorCode::diverged, buffer);
        }
        for (double x : state_) {
            if (!std::isfinite(x)) {
                char buffer[128];
                std::snprintf(buffer, sizeof(buffer), "plant '%s' diverged at t = %.6g", name(),
                              time_ + (k + 1) * dt);
                fail(ErrorCode::diverged, buffer);
            }
        }
    }
    time_ += sample_period_;
}

std::vector<double> OdePlant::output() const {
    switch (kind_) {
        case PlantKind::duffing: return {state_[0]};
        case PlantKind::robot: return {state_[0], state_[1]};
        case PlantKind::patient: return {state_[0]};
    }
    fail(ErrorCode::internal, "OdePlant: unknown kind");
}

}  // namespace polyinv::plants
