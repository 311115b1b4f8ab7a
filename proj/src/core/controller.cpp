#include "core/controller.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace polyinv::controller {

using nlohmann::json;
using poly::Interval;
using poly::SparsePolynomial;
using poly::UnivariatePolynomial;

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::general: return "general";
        case Mode::affine: return "affine";
        case Mode::simo_const: return "simo_const";
    }
    fail(ErrorCode::internal, "mode_name: unknown mode");
}

Mode mode_from_name(const std::string& name) {
    if (name == "general") return Mode::general;
    if (name == "affine") return Mode::affine;
    if (name == "simo_const") return Mode::simo_const;
    fail(ErrorCode::parse, "unknown controller mode '" + name + "'");
}

// ---------------------------------------------------------------------------
// InversionModel

void InversionModel::validate() const {
    if (components.empty()) fail(ErrorCode::invalid_argument, "InversionModel: no components");
    const int nv = components.front().n_vars();
    for (const auto& c : components) {
        if (c.n_vars() != nv) {
            fail(ErrorCode::dimension_mismatch, "InversionModel: components disagree on n_vars");
        }
    }
    if (n_decision < 1 || n_decision > nv) {
        fail(ErrorCode::invalid_argument, "InversionModel: n_decision out of range");
    }
    if (n_applied < 1 || n_applied > n_decision) {
        fail(ErrorCode::invalid_argument, "InversionModel: n_applied out of range");
    }
    if (!standardization.identity() &&
        standardization.offset.size() != static_cast<std::size_t>(nv)) {
        fail(ErrorCode::dimension_mismatch, "InversionModel: standardization width mismatch");
    }
}

InversionModel inversion_view(const sysid::PredictionModel& model) {
    InversionModel im;
    im.components = model.components();
    im.n_decision = model.spec().n_future_u();
    im.n_applied = model.spec().input_dim;
    im.standardization = model.standardization();
    im.validate();
    return im;
}

// ---------------------------------------------------------------------------
// ControllerConfig

void ControllerConfig::validate(int n_decision) const {
    if (mu < 0.0) fail(ErrorCode::invalid_argument, "ControllerConfig: mu must be non-negative");
    if (max_sweeps < 1) fail(ErrorCode::invalid_argument, "ControllerConfig: max_sweeps must be at least 1");
    if (stop_tol < 0.0) fail(ErrorCode::invalid_argument, "ControllerConfig: stop_tol must be non-negative");
    if (n_restarts < 0) fail(ErrorCode::invalid_argument, "ControllerConfig: n_restarts must be non-negative");
    const std::size_t expected = mode == Mode::simo_const ? 1 : static_cast<std::size_t>(n_decision);
    if (box.size() != expected) {
        fail(ErrorCode::dimension_mismatch,
             "ControllerConfig: box has " + std::to_string(box.size()) + " intervals, expected " +
                 std::to_string(expected));
    }
}

json ControllerConfig::to_json() const {
    json jbox = json::array();
    for (const auto& b : box) jbox.push_back(json::array({b.lo, b.hi}));
    json j{{"mu", mu},
           {"box", std::move(jbox)},
           {"max_sweeps", max_sweeps},
           {"stop_tol", stop_tol},
           {"warm_start", warm_start},
           {"mode", mode_name(mode)},
           {"n_restarts", n_restarts},
           {"restart_seed", restart_seed}};
    j["j_stop"] = j_stop ? json(*j_stop) : json(nullptr);
    return j;
}

ControllerConfig ControllerConfig::from_json(const json& j) {
    try {
        ControllerConfig cfg;
        cfg.mu = j.at("mu").get<double>();
        for (const auto& jb : j.at("box")) {
            cfg.box.emplace_back(jb.at(0).get<double>(), jb.at(1).get<double>());
        }
        cfg.max_sweeps = j.value("max_sweeps", 50);
        cfg.stop_tol = j.value("stop_tol", 1e-9);
        cfg.warm_start = j.value("warm_start", true);
        cfg.mode = mode_from_name(j.value("mode", "general"));
        cfg.n_restarts = j.value("n_restarts", 0);
        cfg.restart_seed = j.value("restart_seed", std::uint64_t{0});
        if (j.contains("j_stop") && !j.at("j_stop").is_null()) {
            cfg.j_stop = j.at("j_stop").get<double>();
        }
        return cfg;
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("ControllerConfig JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Objective

namespace {

void check_dims(const InversionModel& model, std::span<const double> u,
                std::span<const double> r_plus, std::span<const double> q_minus) {
    if (u.size() != static_cast<std::size_t>(model.n_decision)) {
        fail(ErrorCode::dimension_mismatch, "cost: u length differs from n_decision");
    }
    if (r_plus.size() != model.components.size()) {
        fail(ErrorCode::dimension_mismatch, "cost: r_plus length differs from component count");
    }
    if (q_minus.size() != static_cast<std::size_t>(model.n_context())) {
        fail(ErrorCode::dimension_mismatch, "cost: q_minus length differs from context width");
    }
}

std::vector<double> assemble_point(std::span<const double> u, std::span<const double> q_minus) {
    std::vector<double> x;
    x.reserve(u.size() + q_minus.size());
    x.insert(x.end(), u.begin(), u.end());
    x.insert(x.end(), q_minus.begin(), q_minus.end());
    return x;
}

// Restriction of one component to the given decision coordinates (tied to a
// single scalar when several are passed), expressed in the raw command unit.
UnivariatePolynomial component_restriction(const SparsePolynomial& f,
                                           const std::vector<double>& x_raw,
                                           const sysid::Standardization& std_map,
                                           std::span<const int> coords) {
    if (std_map.identity()) {
        if (coords.size() == 1) return f.restrict_to_coordinate(x_raw, coords[0]);
        return f.restrict_to_coordinates(x_raw, coords);
    }
    std::vector<double> z;
    std_map.apply(x_raw, z);
    if (coords.size() == 1) {
        const int k = coords[0];
        const auto scaled = f.restrict_to_coordinate(z, k);
        const auto idx = static_cast<std::size_t>(k);
        return scaled.composed_affine(1.0 / std_map.scale[idx],
                                      -std_map.offset[idx] / std_map.scale[idx]);
    }
    // Tied coordinates with per-column scaling: each coordinate contributes its
    // own affine factor, so build the polynomial term by term.
    std::vector<bool> tied(z.size(), false);
    for (int c : coords) tied[static_cast<std::size_t>(c)] = true;
    UnivariatePolynomial total;
    for (const auto& term : f.terms()) {
        UnivariatePolynomial factor = UnivariatePolynomial::constant(term.coefficient);
        for (std::size_t j = 0; j < z.size(); ++j) {
            const auto e = term.exponents[j];
            if (e == 0) continue;
            if (!tied[j]) {
                factor = factor.scaled(poly::pow_int(z[j], e));
            } else {
                const UnivariatePolynomial affine(
                    {-std_map.offset[j] / std_map.scale[j], 1.0 / std_map.scale[j]});
                for (int rep = 0; rep < static_cast<int>(e); ++rep) factor = factor * affine;
            }
        }
        total = total + factor;
    }
    return total;
}

// Shared assembly of the squared-residual objective restriction; the mu term
// is added by the callers, whose command norms differ between modes.
UnivariatePolynomial residual_restriction(const InversionModel& model,
                                          const std::vector<double>& x_raw,
                                          std::span<const double> r_plus,
                                          std::span<const int> coords) {
    UnivariatePolynomial total;
    for (std::size_t j = 0; j < model.components.size(); ++j) {
        const auto fj = component_restriction(model.components[j], x_raw, model.standardization,
                                              coords);
        const auto residual = UnivariatePolynomial::constant(r_plus[j]) - fj;
        total = total + residual * residual;
    }
    return total;
}

}  // namespace

double cost(const InversionModel& model, std::span<const double> u,
            std::span<const double> r_plus, std::span<const double> q_minus, double mu) {
    model.validate();
    check_dims(model, u, r_plus, q_minus);
    const auto x = assemble_point(u, q_minus);
    std::vector<double> z;
    model.standardization.apply(x, z);
    double total = 0.0;
    for (std::size_t j = 0; j < model.components.size(); ++j) {
        const double residual = r_plus[j] - model.components[j].eval(z);
        total += residual * residual;
    }
    for (double v : u) total += mu * v * v;
    return total;
}

UnivariatePolynomial cost_restriction(const InversionModel& model, std::span<const double> u,
                                      std::span<const double> r_plus,
                                      std::span<const double> q_minus, double mu, int k) {
    model.validate();
    check_dims(model, u, r_plus, q_minus);
    if (k < 0 || k >= model.n_decision) {
        fail(ErrorCode::invalid_argument, "cost_restriction: coordinate index out of range");
    }
    const auto x = assemble_point(u, q_minus);
    const int coords[1] = {k};
    auto total = residual_restriction(model, x, r_plus, coords);
    if (mu != 0.0) {
        double fixed = 0.0;
        for (int i = 0; i < model.n_decision; ++i) {
            if (i != k) fixed += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
        }
        total = total + UnivariatePolynomial({mu * fixed, 0.0, mu});
    }
    return total;
}

// ---------------------------------------------------------------------------
// Inversion

namespace {

struct StartOutcome {
    std::vector<double> u;
    double objective = 0.0;
    int sweeps = 0;
};

StartOutcome run_sweeps(const InversionModel& model, std::span<const double> r_plus,
                        std::span<const double> q_minus, const ControllerConfig& config,
                        std::vector<double> u) {
    double J = cost(model, u, r_plus, q_minus, config.mu);
    if (!std::isfinite(J)) {
        fail(ErrorCode::diverged, "invert: objective is not finite at the starting point");
    }
    StartOutcome out;
    out.sweeps = 0;
    while (out.sweeps < config.max_sweeps) {
        const double sweep_start = J;
        for (int k = 0; k < model.n_decision; ++k) {
            const auto q = cost_restriction(model, u, r_plus, q_minus, config.mu, k);
            if (q.degree() < 1) continue;  // no descent available in this coordinate
            const auto res =
                poly::univariate_min_on_interval(q, config.box[static_cast<std::size_t>(k)]);
            if (res.value <= J) {
                u[static_cast<std::size_t>(k)] = res.argmin;
                J = res.value;
            }
        }
        ++out.sweeps;
        if (sweep_start - J < config.stop_tol) break;
    }
    out.objective = cost(model, u, r_plus, q_minus, config.mu);
    if (!std::isfinite(out.objective)) {
        fail(ErrorCode::diverged, "invert: objective is not finite at the solution");
    }
    out.u = std::move(u);
    return out;
}

// Total degree in the decision variables must not exceed 1 for affine mode.
void require_affine(const InversionModel& model) {
    for (const auto& comp : model.components) {
        for (const auto& term : comp.terms()) {
            int u_degree = 0;
            for (int k = 0; k < model.n_decision; ++k) {
                u_degree += term.exponents[static_cast<std::size_t>(k)];
            }
            if (u_degree > 1) {
                fail(ErrorCode::invalid_argument,
                     "invert: affine mode requires components affine in the decision variables");
            }
        }
    }
}

// For affine models the objective is a convex quadratic; when its
// unconstrained minimizer falls inside the box it is the exact solution.
// Returns true if it improved on the current outcome.
bool affine_interior_solve(const InversionModel& model, std::span<const double> r_plus,
                           std::span<const double> q_minus, const ControllerConfig& config,
                           StartOutcome& outcome) {
    const auto n = static_cast<std::size_t>(model.n_decision);
    const auto m = model.components.size();
    std::vector<double> zero(n, 0.0);
    auto eval_at = [&](std::span<const double> u, std::size_t j) {
        const auto x = assemble_point(u, q_minus);
        std::vector<double> z;
        model.standardization.apply(x, z);
        return model.components[j].eval(z);
    };
    Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
    std::vector<double> b(m);
    for (std::size_t j = 0; j < m; ++j) {
        b[j] = eval_at(zero, j);
        rhs(static_cast<Eigen::Index>(j)) = r_plus[j] - b[j];
    }
    std::vector<double> unit(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        unit[i] = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = eval_at(unit, j) - b[j];
        }
        unit[i] = 0.0;
    }
    Eigen::MatrixXd gram = A.transpose() * A;
    gram.diagonal().array() += config.mu;
    const auto ldlt = gram.ldlt();
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd u_opt = ldlt.solve(A.transpose() * rhs);
    std::vector<double> candidate(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u_opt(static_cast<Eigen::Index>(i));
        if (!std::isfinite(v) || !config.box[i].contains(v, 1e-12)) return false;
        candidate[i] = config.box[i].clamp(v);
    }
    const double J = cost(model, candidate, r_plus, q_minus, config.mu);
    if (!std::isfinite(J) || J >= outcome.objective) return false;
    outcome.u = std::move(candidate);
    outcome.objective = J;
    return true;
}

InversionResult invert_simo(const InversionModel& model, std::span<const double> r_plus,
                            std::span<const double> q_minus, const ControllerConfig& config) {
    std::vector<double> x(static_cast<std::size_t>(model.n_vars()), 0.0);
    for (std::size_t i = 0; i < q_minus.size(); ++i) {
        x[static_cast<std::size_t>(model.n_decision) + i] = q_minus[i];
    }
    std::vector<int> coords(static_cast<std::size_t>(model.n_decision));
    std::iota(coords.begin(), coords.end(), 0);
    auto objective = residual_restriction(model, x, r_plus, coords);
    if (config.mu != 0.0) {
        objective =
            objective + UnivariatePolynomial({0.0, 0.0, config.mu * model.n_decision});
    }
    const auto res = poly::univariate_min_on_interval(objective, config.box[0]);

    InversionResult result;
    result.u_star = {res.argmin};
    result.sweeps_used = 1;
    result.starts_used = 1;
    const std::vector<double> expanded(static_cast<std::size_t>(model.n_decision), res.argmin);
    result.objective = cost(model, expanded, r_plus, q_minus, config.mu);
    if (!std::isfinite(result.objective)) {
        fail(ErrorCode::diverged, "invert: objective is not finite at the solution");
    }
    result.applied_command.assign(static_cast<std::size_t>(model.n_applied), res.argmin);
    return result;
}

}  // namespace

InversionResult invert(const InversionModel& model, std::span<const double> r_plus,
                       std::span<const double> q_minus, const ControllerConfig& config,
                       const std::optional<std::vector<double>>& u_init) {
    model.validate();
    config.validate(model.n_decision);
    if (r_plus.size() != model.components.size()) {
        fail(ErrorCode::dimension_mismatch, "invert: r_plus length differs from component count");
    }
    if (q_minus.size() != static_cast<std::size_t>(model.n_context())) {
        fail(ErrorCode::dimension_mismatch, "invert: q_minus length differs from context width");
    }
    if (config.mode == Mode::simo_const) return invert_simo(model, r_plus, q_minus, config);
    if (config.mode == Mode::affine) require_affine(model);

    std::vector<double> u0;
    if (u_init) {
        if (u_init->size() != static_cast<std::size_t>(model.n_decision)) {
            fail(ErrorCode::dimension_mismatch, "invert: u_init length differs from n_decision");
        }
        for (std::size_t i = 0; i < u_init->size(); ++i) {
            if (!config.box[i].contains((*u_init)[i], 1e-12)) {
                fail(ErrorCode::invalid_argument, "invert: u_init lies outside the box");
            }
        }
        u0 = *u_init;
        for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = config.box[i].clamp(u0[i]);
    } else {
        u0.resize(static_cast<std::size_t>(model.n_decision));
        for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = config.box[i].midpoint();
    }

    auto best = run_sweeps(model, r_plus, q_minus, config, std::move(u0));
    if (config.mode == Mode::affine) affine_interior_solve(model, r_plus, q_minus, config, best);
    int starts = 1;
    if (config.n_restarts > 0 && !(config.j_stop && best.objective <= *config.j_stop)) {
        RngStream rng = RngStream::keyed(config.restart_seed, "invert-restart");
        for (int s = 0; s < config.n_restarts; ++s) {
            std::vector<double> us(static_cast<std::size_t>(model.n_decision));
            for (std::size_t i = 0; i < us.size(); ++i) {
                us[i] = rng.uniform(config.box[i].lo, config.box[i].hi);
            }
            auto outcome = run_sweeps(model, r_plus, q_minus, config, std::move(us));
            ++starts;
            if (outcome.objective < best.objective) best = std::move(outcome);
            if (config.j_stop && best.objective <= *config.j_stop) break;
        }
    }

    InversionResult result;
    result.u_star = std::move(best.u);
    result.objective = best.objective;
    result.sweeps_used = best.sweeps;
    result.starts_used = starts;
    result.applied_command.assign(result.u_star.begin(),
                                  result.u_star.begin() + model.n_applied);
    return result;
}

InversionResult control_step(const InversionModel& model, std::span<const double> r_plus,
                             std::span<const double> q_minus, const ControllerConfig& config,
                             ControllerState& state) {
    std::optional<std::vector<double>> u_init;
    if (config.warm_start && state.previous) {
        if (config.mode == Mode::simo_const) {
            u_init = *state.previous;
        } else {
            // Shift one step ahead: drop the first command, repeat the last.
            const auto& prev = *state.previous;
            std::vector<double> shifted;
            shifted.reserve(prev.size());
            shifted.insert(shifted.end(), prev.begin() + model.n_applied, prev.end());
            shifted.insert(shifted.end(), prev.end() - model.n_applied, prev.end());
            for (std::size_t i = 0; i < shifted.size(); ++i) {
                shifted[i] = config.box[i].clamp(shifted[i]);
            }
            u_init = std::move(shifted);
        }
    }
    auto result = invert(model, r_plus, q_minus, config, u_init);
    state.previous = result.u_star;
    return result;
}

// ---------------------------------------------------------------------------
// PredictionModel overloads

double cost(const sysid::PredictionModel& model, std::span<const double> u,
            std::span<const double> r_plus, std::span<const double> q_minus, double mu) {
    return cost(inversion_view(model), u, r_plus, q_minus, mu);
}

UnivariatePolynomial cost_restriction(const sysid::PredictionModel& model,
                                      std::span<const double> u, std::span<const double> r_plus,
                                      std::span<const double> q_minus, double mu, int k) {
    return cost_restriction(inversion_view(model), u, r_plus, q_minus, mu, k);
}

InversionResult invert(const sysid::PredictionModel& model, std::span<const double> r_plus,
                       std::span<const double> q_minus, const ControllerConfig& config,
                       const std::optional<std::vector<double>>& u_init) {
    return invert(inversion_view(model), r_plus, q_minus, config, u_init);
}

InversionResult control_step(const sysid::PredictionModel& model, std::span<const double> r_plus,
                             std::span<const double> q_minus, const ControllerConfig& config,
                             ControllerState& state) {
    return control_step(inversion_view(model), r_plus, q_minus, config, state);
}

}  // namespace polyinv::controller
