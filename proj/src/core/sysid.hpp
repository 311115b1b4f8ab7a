// Identification of multi-step polynomial predictors from input/output
// records by regularized least squares.
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/poly.hpp"

namespace polyinv::sysid {

// Time-indexed input/output record with a fixed sample period.
struct SystemData {
    std::vector<std::vector<double>> inputs;   // L rows of length n_u
    std::vector<std::vector<double>> outputs;  // L rows of length n_y
    double sample_period = 1.0;

    std::size_t length() const noexcept { return inputs.size(); }
    int n_u() const noexcept { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
    int n_y() const noexcept { return outputs.empty() ? 0 : static_cast<int>(outputs.front().size()); }
    void validate() const;
};

enum class Structure { general, affine_in_u, simo_const_u };

std::string structure_name(Structure s);
Structure structure_from_name(const std::string& name);

struct ModelSpec {
    int order = 1;    // regressor depth n
    int horizon = 1;  // prediction horizon tau
    int degree = 1;   // polynomial degree bound d_p
    std::optional<double> ridge;  // nullopt selects the scale-aware default
    int input_dim = 1;
    int output_dim = 1;
    Structure structure = Structure::general;
    bool standardize = false;
    std::optional<int> u_degree_cap;  // optional cap on total degree in future-command variables

    // Variable tuple layout: (u_t..u_{t+tau-1}, u_{t-1}..u_{t-n}, y_{t-1}..y_{t-n}).
    int n_future_u() const noexcept { return horizon * input_dim; }
    int n_context() const noexcept { return order * (input_dim + output_dim); }
    int n_vars() const noexcept { return n_future_u() + n_context(); }
    int n_components() const noexcept { return horizon * output_dim; }
    void validate() const;

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

struct FitReport {
    std::vector<double> residual_rms;  // per component
    std::size_t rows = 0;
    std::size_t basis_size = 0;
    double ridge_used = 0.0;
};

// Per-column affine map applied to regressors before basis evaluation.
struct Standardization {
    std::vector<double> offset;
    std::vector<double> scale;

    bool identity() const noexcept { return offset.empty(); }
    static Standardization none() { return {}; }
    void apply(std::span<const double> raw, std::vector<double>& scaled) const;
};

struct Regressors {
    std::vector<std::vector<double>> features;  // rows of length spec.n_vars()
    std::vector<std::vector<double>> targets;   // rows of length spec.n_components()
};

class PredictionModel {
public:
    PredictionModel(ModelSpec spec, std::vector<poly::SparsePolynomial> components,
                    FitReport fit_report, Standardization standardization);

    const ModelSpec& spec() const noexcept { return spec_; }
    const std::vector<poly::SparsePolynomial>& components() const noexcept { return components_; }
    const FitReport& fit_report() const noexcept { return fit_report_; }
    const Standardization& standardization() const noexcept { return standardization_; }

    // Componentwise prediction (y_t..y_{t+tau-1}) given future commands and context.
    std::vector<double> predict(std::span<const double> u_plus,
                                std::span<const double> q_minus) const;

    nlohmann::json to_json() const;
    static PredictionModel from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static PredictionModel load(const std::filesystem::path& path);

private:
    ModelSpec spec_;
    std::vector<poly::SparsePolynomial> components_;
    FitReport fit_report_;
    Standardization standardization_;
};

// Basis over the model's variable tuple after applying structural filters.
std::vector<poly::Exponents> model_basis(const ModelSpec& spec);

Regressors build_regressors(const SystemData& data, const ModelSpec& spec);

PredictionModel fit(const SystemData& data, const ModelSpec& spec);

// Fit from prebuilt rows; fit(data, spec) is build_regressors followed by this.
PredictionModel fit_regressors(const Regressors& reg, const ModelSpec& spec);

// CSV exchange; header is "t,u1..u_nu,y1..y_ny" and t must be uniformly spaced.
SystemData load_system_data(const std::filesystem::path& path);
void save_system_data(const std::filesystem::path& path, const SystemData& data);

}  // namespace polyinv::sysid
