#include "core/sysid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/jsonio.hpp"

namespace polyinv::sysid {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SystemData

void SystemData::validate() const {
    if (inputs.size() != outputs.size()) {
        fail(ErrorCode::dimension_mismatch, "SystemData: input/output lengths differ");
    }
    if (inputs.empty()) fail(ErrorCode::invalid_argument, "SystemData: empty record");
    if (!(sample_period > 0.0)) {
        fail(ErrorCode::invalid_argument, "SystemData: sample_period must be positive");
    }
    const auto nu = inputs.front().size();
    const auto ny = outputs.front().size();
    if (nu == 0 || ny == 0) fail(ErrorCode::invalid_argument, "SystemData: zero-width rows");
    for (const auto& row : inputs) {
        if (row.size() != nu) fail(ErrorCode::dimension_mismatch, "SystemData: ragged input rows");
    }
    for (const auto& row : outputs) {
        if (row.size() != ny) fail(ErrorCode::dimension_mismatch, "SystemData: ragged output rows");
    }
}

// ---------------------------------------------------------------------------
// ModelSpec

std::string structure_name(Structure s) {
    switch (s) {
        case Structure::general: return "general";
        case Structure::affine_in_u: return "affine_in_u";
        case Structure::simo_const_u: return "simo_const_u";
    }
    fail(ErrorCode::internal, "structure_name: unknown structure");
}

Structure structure_from_name(const std::string& name) {
    if (name == "general") return Structure::general;
    if (name == "affine_in_u") return Structure::affine_in_u;
    if (name == "simo_const_u") return Structure::simo_const_u;
    fail(ErrorCode::parse, "unknown model structure '" + name + "'");
}

void ModelSpec::validate() const {
    if (order < 1) fail(ErrorCode::invalid_argument, "ModelSpec: order must be at least 1");
    if (horizon < 1) fail(ErrorCode::invalid_argument, "ModelSpec: horizon must be at least 1");
    if (degree < 0) fail(ErrorCode::invalid_argument, "ModelSpec: degree must be non-negative");
    if (input_dim < 1 || output_dim < 1) {
        fail(ErrorCode::invalid_argument, "ModelSpec: input_dim and output_dim must be at least 1");
    }
    if (ridge && *ridge < 0.0) fail(ErrorCode::invalid_argument, "ModelSpec: ridge must be non-negative");
    if (structure == Structure::simo_const_u && input_dim != 1) {
        fail(ErrorCode::invalid_argument,
             "ModelSpec: simo_const_u requires a single command variable (input_dim = 1)");
    }
    if (u_degree_cap && *u_degree_cap < 0) {
        fail(ErrorCode::invalid_argument, "ModelSpec: u_degree_cap must be non-negative");
    }
}

json ModelSpec::to_json() const {
    json j{{"order", order},
           {"horizon", horizon},
           {"degree", degree},
           {"input_dim", input_dim},
           {"output_dim", output_dim},
           {"structure", structure_name(structure)},
           {"standardize", standardize}};
    j["ridge"] = ridge ? json(*ridge) : json(nullptr);
    j["u_degree_cap"] = u_degree_cap ? json(*u_degree_cap) : json(nullptr);
    return j;
}

ModelSpec ModelSpec::from_json(const json& j) {
    try {
        ModelSpec spec;
        spec.order = j.at("order").get<int>();
        spec.horizon = j.at("horizon").get<int>();
        spec.degree = j.at("degree").get<int>();
        spec.input_dim = j.at("input_dim").get<int>();
        spec.output_dim = j.at("output_dim").get<int>();
        spec.structure = structure_from_name(j.at("structure").get<std::string>());
        spec.standardize = j.value("standardize", false);
        if (j.contains("ridge") && !j.at("ridge").is_null()) spec.ridge = j.at("ridge").get<double>();
        if (j.contains("u_degree_cap") && !j.at("u_degree_cap").is_null()) {
            spec.u_degree_cap = j.at("u_degree_cap").get<int>();
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("ModelSpec JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Standardization

void Standardization::apply(std::span<const double> raw, std::vector<double>& scaled) const {
    scaled.assign(raw.begin(), raw.end());
    if (identity()) return;
    if (raw.size() != offset.size()) {
        fail(ErrorCode::dimension_mismatch, "Standardization: width mismatch");
    }
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        scaled[i] = (scaled[i] - offset[i]) / scale[i];
    }
}

// ---------------------------------------------------------------------------
// Basis construction with structural filters

std::vector<poly::Exponents> model_basis(const ModelSpec& spec) {
    spec.validate();
    auto basis = poly::enumerate_basis(spec.n_vars(), spec.degree);
    const int nfu = spec.n_future_u();
    const bool affine = spec.structure == Structure::affine_in_u;
    const bool simo = spec.structure == Structure::simo_const_u;
    const bool capped = spec.u_degree_cap.has_value();
    if (!affine && !simo && !capped) return basis;

    std::vector<poly::Exponents> filtered;
    filtered.reserve(basis.size());
    for (auto& e : basis) {
        int u_degree = 0;
        bool beyond_first = false;
        for (int k = 0; k < nfu; ++k) {
            const int ek = e[static_cast<std::size_t>(k)];
            u_degree += ek;
            if (k > 0 && ek != 0) beyond_first = true;
        }
        if (affine && u_degree > 1) continue;
        if (simo && beyond_first) continue;
        if (capped && u_degree > *spec.u_degree_cap) continue;
        filtered.push_back(std::move(e));
    }
    return filtered;
}

// ---------------------------------------------------------------------------
// Regressor assembly

Regressors build_regressors(const SystemData& data, const ModelSpec& spec) {
    data.validate();
    spec.validate();
    if (data.n_u() != spec.input_dim || data.n_y() != spec.output_dim) {
        fail(ErrorCode::dimension_mismatch, "build_regressors: data width differs from ModelSpec");
    }
    const int L = static_cast<int>(data.length());
    const int n = spec.order;
    const int tau = spec.horizon;
    if (L < n + tau) {
        fail(ErrorCode::invalid_argument,
             "build_regressors: need at least order + horizon = " + std::to_string(n + tau) +
                 " samples, got " + std::to_string(L));
    }
    Regressors out;
    const int rows = L - n - tau + 1;
    out.features.reserve(static_cast<std::size_t>(rows));
    out.targets.reserve(static_cast<std::size_t>(rows));
    for (int t = n; t + tau <= L; ++t) {
        std::vector<double> x;
        x.reserve(static_cast<std::size_t>(spec.n_vars()));
        for (int s = 0; s < tau; ++s) {
            const auto& u = data.inputs[static_cast<std::size_t>(t + s)];
            x.insert(x.end(), u.begin(), u.end());
        }
        for (int s = 1; s <= n; ++s) {
            const auto& u = data.inputs[static_cast<std::size_t>(t - s)];
            x.insert(x.end(), u.begin(), u.end());
        }
        for (int s = 1; s <= n; ++s) {
            const auto& y = data.outputs[static_cast<std::size_t>(t - s)];
            x.insert(x.end(), y.begin(), y.end());
        }
        std::vector<double> target;
        target.reserve(static_cast<std::size_t>(spec.n_components()));
        for (int s = 0; s < tau; ++s) {
            const auto& y = data.outputs[static_cast<std::size_t>(t + s)];
            target.insert(target.end(), y.begin(), y.end());
        }
        out.features.push_back(std::move(x));
        out.targets.push_back(std::move(target));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

double monomial_eval(const poly::Exponents& e, const std::vector<double>& x) {
    double prod = 1.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
        if (e[j] != 0) prod *= poly::pow_int(x[j], e[j]);
    }
    return prod;
}

}  // namespace

PredictionModel fit(const SystemData& data, const ModelSpec& spec) {
    return fit_regressors(build_regressors(data, spec), spec);
}

PredictionModel fit_regressors(const Regressors& reg, const ModelSpec& spec) {
    spec.validate();
    if (reg.features.empty()) fail(ErrorCode::invalid_argument, "fit: no regression rows");
    const auto basis = model_basis(spec);
    const auto rows = reg.features.size();
    const auto N = basis.size();

    Standardization std_map = Standardization::none();
    if (spec.standardize) {
        const auto width = static_cast<std::size_t>(spec.n_vars());
        std_map.offset.assign(width, 0.0);
        std_map.scale.assign(width, 1.0);
        for (std::size_t j = 0; j < width; ++j) {
            double mean = 0.0;
            for (const auto& row : reg.features) mean += row[j];
            mean /= static_cast<double>(rows);
            double var = 0.0;
            for (const auto& row : reg.features) var += (row[j] - mean) * (row[j] - mean);
            var /= static_cast<double>(rows);
            std_map.offset[j] = mean;
            std_map.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
        }
    }

    Eigen::MatrixXd phi(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(N));
    std::vector<double> scaled;
    for (std::size_t r = 0; r < rows; ++r) {
        std_map.apply(reg.features[r], scaled);
        for (std::size_t i = 0; i < N; ++i) {
            phi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                monomial_eval(basis[i], scaled);
        }
    }
    const auto n_comp = static_cast<std::size_t>(spec.n_components());
    Eigen::MatrixXd targets(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n_comp));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < n_comp; ++c) {
            targets(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = reg.targets[r][c];
        }
    }

    const double lambda =
        spec.ridge ? *spec.ridge : 1e-8 * phi.squaredNorm() / static_cast<double>(N);

    Eigen::MatrixXd coeffs;
    if (lambda > 0.0) {
        Eigen::MatrixXd gram = phi.transpose() * phi;
        gram.diagonal().array() += lambda;
        const auto ldlt = gram.ldlt();
        if (ldlt.info() != Eigen::Success) {
            fail(ErrorCode::singular, "fit: ridge normal equations could not be factorized");
        }
        coeffs = ldlt.solve(phi.transpose() * targets);
    } else {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
        if (static_cast<std::size_t>(qr.rank()) < N) {
            fail(ErrorCode::singular,
                 "fit: regression matrix is rank-deficient at ridge = 0; set ridge > 0");
        }
        coeffs = qr.solve(targets);
    }

    FitReport report;
    report.rows = rows;
    report.basis_size = N;
    report.ridge_used = lambda;
    const Eigen::MatrixXd residual = phi * coeffs - targets;
    report.residual_rms.resize(n_comp);
    for (std::size_t c = 0; c < n_comp; ++c) {
        report.residual_rms[c] =
            std::sqrt(residual.col(static_cast<Eigen::Index>(c)).squaredNorm() /
                      static_cast<double>(rows));
    }

    std::vector<poly::SparsePolynomial> components;
    components.reserve(n_comp);
    std::vector<double> column(N);
    for (std::size_t c = 0; c < n_comp; ++c) {
        for (std::size_t i = 0; i < N; ++i) {
            column[i] = coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        }
        components.push_back(
            poly::SparsePolynomial::from_basis(spec.n_vars(), spec.degree, basis, column));
    }
    return PredictionModel(spec, std::move(components), std::move(report), std::move(std_map));
}

// ---------------------------------------------------------------------------
// PredictionModel

PredictionModel::PredictionModel(ModelSpec spec, std::vector<poly::SparsePolynomial> components,
                                 FitReport fit_report, Standardization standardization)
    : spec_(std::move(spec)),
      components_(std::move(components)),
      fit_report_(std::move(fit_report)),
      standardization_(std::move(standardization)) {
    spec_.validate();
    if (components_.size() != static_cast<std::size_t>(spec_.n_components())) {
        fail(ErrorCode::dimension_mismatch, "PredictionModel: component count differs from spec");
    }
    for (const auto& p : components_) {
        if (p.n_vars() != spec_.n_vars()) {
            fail(ErrorCode::dimension_mismatch, "PredictionModel: component n_vars differs from spec");
        }
    }
    if (!standardization_.identity() &&
        standardization_.offset.size() != static_cast<std::size_t>(spec_.n_vars())) {
        fail(ErrorCode::dimension_mismatch, "PredictionModel: standardization width differs from spec");
    }
}

std::vector<double> PredictionModel::predict(std::span<const double> u_plus,
                                             std::span<const double> q_minus) const {
    if (u_plus.size() != static_cast<std::size_t>(spec_.n_future_u())) {
        fail(ErrorCode::dimension_mismatch, "predict: u_plus length differs from horizon*input_dim");
    }
    if (q_minus.size() != static_cast<std::size_t>(spec_.n_context())) {
        fail(ErrorCode::dimension_mismatch, "predict: q_minus length differs from order*(n_u+n_y)");
    }
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(spec_.n_vars()));
    x.insert(x.end(), u_plus.begin(), u_plus.end());
    x.insert(x.end(), q_minus.begin(), q_minus.end());
    std::vector<double> scaled;
    standardization_.apply(x, scaled);
    std::vector<double> out(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) out[c] = components_[c].eval(scaled);
    return out;
}

json PredictionModel::to_json() const {
    json comps = json::array();
    for (const auto& p : components_) comps.push_back(jsonio::poly_to_json(p));
    json report{{"residual_rms", fit_report_.residual_rms},
                {"rows", fit_report_.rows},
                {"basis_size", fit_report_.basis_size},
                {"ridge_used", fit_report_.ridge_used}};
    json std_json;
    if (standardization_.identity()) {
        std_json = nullptr;
    } else {
        std_json = json{{"offset", standardization_.offset}, {"scale", standardization_.scale}};
    }
    return json{{"format", "polyinv-model/1"},
                {"spec", spec_.to_json()},
                {"components", std::move(comps)},
                {"fit_report", std::move(report)},
                {"standardization", std::move(std_json)}};
}

PredictionModel PredictionModel::from_json(const json& j) {
    try {
        if (j.value("format", "") != "polyinv-model/1") {
            fail(ErrorCode::parse, "model JSON: unknown or missing format tag");
        }
        ModelSpec spec = ModelSpec::from_json(j.at("spec"));
        std::vector<poly::SparsePolynomial> components;
        for (const auto& jc : j.at("components")) components.push_back(jsonio::poly_from_json(jc));
        FitReport report;
        const auto& jr = j.at("fit_report");
        report.residual_rms = jr.at("residual_rms").get<std::vector<double>>();
        report.rows = jr.at("rows").get<std::size_t>();
        report.basis_size = jr.at("basis_size").get<std::size_t>();
        report.ridge_used = jr.at("ridge_used").get<double>();
        Standardization std_map = Standardization::none();
        if (j.contains("standardization") && !j.at("standardization").is_null()) {
            std_map.offset = j.at("standardization").at("offset").get<std::vector<double>>();
            std_map.scale = j.at("standardization").at("scale").get<std::vector<double>>();
        }
        return PredictionModel(std::move(spec), std::move(components), std::move(report),
                               std::move(std_map));
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("model JSON: ") + e.what());
    }
}

void PredictionModel::save(const std::filesystem::path& path) const {
    jsonio::write_json_file(path, to_json());
}

PredictionModel PredictionModel::load(const std::filesystem::path& path) {
    return from_json(jsonio::read_json_file(path));
}

// ---------------------------------------------------------------------------
// CSV exchange

SystemData load_system_data(const std::filesystem::path& path) {
    const auto table = csv::read_table(path);
    if (table.header.empty() || table.header.front() != "t") {
        fail(ErrorCode::parse, "system data CSV: first column must be 't'");
    }
    int n_u = 0;
    std::size_t col = 1;
    while (col < table.header.size() && table.header[col] == "u" + std::to_string(n_u + 1)) {
        ++n_u;
        ++col;
    }
    int n_y = 0;
    while (col < table.header.size() && table.header[col] == "y" + std::to_string(n_y + 1)) {
        ++n_y;
        ++col;
    }
    if (n_u == 0 || n_y == 0 || col != table.header.size()) {
        fail(ErrorCode::parse, "system data CSV: header must be t,u1..u_nu,y1..y_ny");
    }
    if (table.rows.size() < 2) fail(ErrorCode::parse, "system data CSV: need at least two rows");

    SystemData data;
    const double dt = table.rows[1][0] - table.rows[0][0];
    if (!(dt > 0.0)) fail(ErrorCode::parse, "system data CSV: time column must increase");
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
        const double step = table.rows[r][0] - table.rows[r - 1][0];
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            fail(ErrorCode::parse, "system data CSV: time column is not uniformly spaced");
        }
    }
    data.sample_period = dt;
    for (const auto& row : table.rows) {
        data.inputs.emplace_back(row.begin() + 1, row.begin() + 1 + n_u);
        data.outputs.emplace_back(row.begin() + 1 + n_u, row.end());
    }
    data.validate();
    return data;
}

void save_system_data(const std::filesystem::path& path, const SystemData& data) {
    data.validate();
    std::vector<std::string> header{"t"};
    for (int i = 1; i <= data.n_u(); ++i) header.push_back("u" + std::to_string(i));
    for (int i = 1; i <= data.n_y(); ++i) header.push_back("y" + std::to_string(i));
    std::vector<std::vector<double>> rows;
    rows.reserve(data.length());
    for (std::size_t r = 0; r < data.length(); ++r) {
        std::vector<double> row;
        row.reserve(header.size());
        row.push_back(static_cast<double>(r) * data.sample_period);
        row.insert(row.end(), data.inputs[r].begin(), data.inputs[r].end());
        row.insert(row.end(), data.outputs[r].begin(), data.outputs[r].end());
        rows.push_back(std::move(row));
    }
    csv::write_table(path, header, rows);
}

}  // namespace polyinv::sysid
