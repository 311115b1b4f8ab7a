// Online model inversion: minimizes the tracking-plus-activity objective over
// a box of admissible command sequences by exact coordinate minimization, and
// applies the first command of the optimal sequence at each step.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "core/poly.hpp"
#include "core/sysid.hpp"

namespace polyinv::controller {

enum class Mode { general, affine, simo_const };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// The inversion-facing slice of a prediction model: polynomial components over
// (decision variables, context variables) plus the regressor scaling. The
// benchmark builds these directly; controllers derive them from fitted models.
struct InversionModel {
    std::vector<poly::SparsePolynomial> components;
    int n_decision = 0;  // leading variables subject to optimization
    int n_applied = 1;   // command width emitted per step (n_u)
    sysid::Standardization standardization;

    int n_vars() const noexcept {
        return components.empty() ? 0 : components.front().n_vars();
    }
    int n_context() const noexcept { return n_vars() - n_decision; }
    void validate() const;
};

InversionModel inversion_view(const sysid::PredictionModel& model);

struct ControllerConfig {
    double mu = 0.0;
    std::vector<poly::Interval> box;  // one interval per decision variable (one total in simo_const)
    int max_sweeps = 50;
    double stop_tol = 1e-9;
    bool warm_start = true;
    Mode mode = Mode::general;
    int n_restarts = 0;               // extra random starts beyond the first
    std::optional<double> j_stop;     // leave the restart loop once the objective reaches this
    std::uint64_t restart_seed = 0;

    void validate(int n_decision) const;
    nlohmann::json to_json() const;
    static ControllerConfig from_json(const nlohmann::json& j);
};

struct InversionResult {
    std::vector<double> u_star;       // optimal decision vector (scalar in simo_const)
    double objective = 0.0;
    int sweeps_used = 0;
    int starts_used = 1;
    std::vector<double> applied_command;  // first n_applied entries of the command sequence
};

// Warm-start memory carried between control steps.
struct ControllerState {
    std::optional<std::vector<double>> previous;
};

// Eq.-style objective: squared tracking error plus mu times squared command norm.
double cost(const InversionModel& model, std::span<const double> u,
            std::span<const double> r_plus, std::span<const double> q_minus, double mu);

// The objective as a univariate polynomial in decision coordinate k.
poly::UnivariatePolynomial cost_restriction(const InversionModel& model,
                                            std::span<const double> u,
                                            std::span<const double> r_plus,
                                            std::span<const double> q_minus, double mu, int k);

InversionResult invert(const InversionModel& model, std::span<const double> r_plus,
                       std::span<const double> q_minus, const ControllerConfig& config,
                       const std::optional<std::vector<double>>& u_init = std::nullopt);

// Receding-horizon step: warm start from the time-shifted previous solution,
// invert, remember the solution, and emit the first command.
InversionResult control_step(const InversionModel& model, std::span<const double> r_plus,
                             std::span<const double> q_minus, const ControllerConfig& config,
                             ControllerState& state);

// Convenience overloads on fitted models.
double cost(const sysid::PredictionModel& model, std::span<const double> u,
            std::span<const double> r_plus, std::span<const double> q_minus, double mu);
poly::UnivariatePolynomial cost_restriction(const sysid::PredictionModel& model,
                                            std::span<const double> u,
                                            std::span<const double> r_plus,
                                            std::span<const double> q_minus, double mu, int k);
InversionResult invert(const sysid::PredictionModel& model, std::span<const double> r_plus,
                       std::span<const double> q_minus, const ControllerConfig& config,
                       const std::optional<std::vector<double>>& u_init = std::nullopt);
InversionResult control_step(const sysid::PredictionModel& model, std::span<const double> r_plus,
                             std::span<const double> q_minus, const ControllerConfig& config,
                             ControllerState& state);

}  // namespace polyinv::controller
