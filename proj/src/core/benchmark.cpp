#include "core/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/jsonio.hpp"

namespace polyinv::benchmark {

namespace {

// Coefficients this small would be indistinguishable from the canonical
// form's round-off pruning; redrawing keeps the nonzero count exact while
// perturbing the standard-normal law by a ~1e-6 probability event.
constexpr double kMinCoeffMagnitude = 1e-6;

constexpr const char* kBoxNote =
    "[-1,1]^m, matching the sampling support of the true commands";

}  // namespace

const std::map<std::pair<int, int>, int>& reference_ns_table() {
    static const std::map<std::pair<int, int>, int> table = {
        {{1, 1}, 3},   {{1, 2}, 6},   {{1, 4}, 15},  {{1, 6}, 28},
        {{2, 1}, 5},   {{2, 2}, 15},  {{2, 4}, 45},  {{2, 6}, 81},
        {{4, 1}, 9},   {{4, 2}, 45},  {{4, 4}, 116}, {{4, 6}, 197},
        {{6, 1}, 13},  {{6, 2}, 81},  {{6, 4}, 197}, {{6, 6}, 339},
        {{8, 1}, 17},  {{8, 2}, 116}, {{8, 4}, 289}, {{8, 6}, 500},
    };
    return table;
}

// ---------------------------------------------------------------------------
// BenchmarkConfig

static BenchmarkConfig full_table_config(std::uint64_t seed, int main_trials, int sub_trials) {
    BenchmarkConfig config;
    config.dims = {1, 2, 4, 6, 8};
    config.degrees = {1, 2, 4, 6};
    config.ns_table = reference_ns_table();
    config.main_trials = main_trials;
    config.sub_trials = sub_trials;
    config.seed = seed;
    config.mu = 0.0;
    return config;
}

BenchmarkConfig BenchmarkConfig::paper_protocol(std::uint64_t seed) {
    return full_table_config(seed, 50, 100);
}

BenchmarkConfig BenchmarkConfig::desk_protocol(std::uint64_t seed) {
    return full_table_config(seed, 5, 20);
}

int BenchmarkConfig::ns_for(int m, int d_p) const {
    auto it = ns_table.find({m, d_p});
    if (it == ns_table.end())
        fail(ErrorCode::invalid_argument, "benchmark: no nonzero-term count configured for (m=" +
                                              std::to_string(m) + ", d_p=" + std::to_string(d_p) +
                                              ")");
    return it->second;
}

void BenchmarkConfig::validate() const {
    if (dims.empty() || degrees.empty())
        fail(ErrorCode::invalid_argument, "benchmark: dims and degrees must be nonempty");
    for (int m : dims)
        if (m < 1) fail(ErrorCode::invalid_argument, "benchmark: dimensions must be positive");
    for (int d : degrees)
        if (d < 1) fail(ErrorCode::invalid_argument, "benchmark: degrees must be positive");
    if (main_trials < 1 || sub_trials < 1)
        fail(ErrorCode::invalid_argument, "benchmark: trial counts must be at least 1");
    for (int m : dims)
        for (int d : degrees)
            if (ns_for(m, d) < 1)
                fail(ErrorCode::invalid_argument,
                     "benchmark: nonzero-term counts must be at least 1");
}

nlohmann::json BenchmarkConfig::to_json() const {
    nlohmann::json ns = nlohmann::json::array();
    for (const auto& [key, value] : ns_table)
        ns.push_back({key.first, key.second, value});
    return {{"dims", dims},
            {"degrees", degrees},
            {"ns_table", ns},
            {"main_trials", main_trials},
            {"sub_trials", sub_trials},
            {"seed", seed},
            {"mu", mu}};
}

BenchmarkConfig BenchmarkConfig::from_json(const nlohmann::json& j) {
    BenchmarkConfig config;
    config.dims = j.at("dims").get<std::vector<int>>();
    config.degrees = j.at("degrees").get<std::vector<int>>();
    for (const auto& entry : j.at("ns_table")) {
        if (!entry.is_array() || entry.size() != 3)
            fail(ErrorCode::parse, "benchmark: ns_table entries must be [m, d_p, n_s] triples");
        config.ns_table[{entry[0].get<int>(), entry[1].get<int>()}] = entry[2].get<int>();
    }
    config.main_trials = j.at("main_trials").get<int>();
    config.sub_trials = j.at("sub_trials").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.mu = j.at("mu").get<double>();
    config.validate();
    return config;
}

void CellConfig::validate() const {
    if (m < 1) fail(ErrorCode::invalid_argument, "benchmark cell: m must be positive");
    if (d_p < 1) fail(ErrorCode::invalid_argument, "benchmark cell: d_p must be positive");
    if (n_s < 1) fail(ErrorCode::invalid_argument, "benchmark cell: n_s must be positive");
    if (main_trials < 1 || sub_trials < 1)
        fail(ErrorCode::invalid_argument, "benchmark cell: trial counts must be at least 1");
}

nlohmann::json BenchmarkCell::to_json() const {
    return {{"m", m},
            {"d_p", d_p},
            {"n_s", n_s},
            {"E2", E2},
            {"E_inf", E_inf},
            {"T_solve_mean", T_solve_mean},
            {"trials", trials},
            {"divergent", divergent}};
}

// ---------------------------------------------------------------------------
// Random polynomial targets

std::vector<poly::SparsePolynomial> random_sparse_polynomial(int m, int d_p, int n_s,
                                                             RngStream& rng) {
    if (m < 1) fail(ErrorCode::invalid_argument, "random_sparse_polynomial: m must be positive");
    if (d_p < 1)
        fail(ErrorCode::invalid_argument, "random_sparse_polynomial: degree must be positive");
    const int n_vars = 2 * m;  // decision variables u alongside the context q
    const auto basis = poly::enumerate_basis(n_vars, d_p);
    if (n_s < 1 || static_cast<std::size_t>(n_s) > basis.size())
        fail(ErrorCode::invalid_argument,
             "random_sparse_polynomial: n_s must lie in [1, basis size] (basis size " +
                 std::to_string(basis.size()) + ")");

    std::vector<poly::SparsePolynomial> components;
    components.reserve(m);
    for (int j = 0; j < m; ++j) {
        const auto positions = rng.sample_without_replacement(basis.size(), n_s);
        std::vector<poly::Monomial> terms;
        terms.reserve(n_s);
        for (std::size_t pos : positions) {
            double value = rng.normal();
            while (std::abs(value) < kMinCoeffMagnitude) value = rng.normal();
            terms.push_back({basis[pos], value});
        }
        components.emplace_back(n_vars, d_p, std::move(terms));
    }
    return components;
}

// ---------------------------------------------------------------------------
// Cells

controller::ControllerConfig default_cell_solver(int m, int d_p, double mu) {
    controller::ControllerConfig solver;
    solver.mu = mu;
    solver.box.assign(m, poly::Interval(-1.0, 1.0));
    solver.max_sweeps = 50;
    solver.stop_tol = 1e-12;
    solver.warm_start = false;  // every trial is an independent problem
    if (d_p == 1) {
        solver.mode = controller::Mode::affine;
    } else {
        solver.mode = controller::Mode::general;
        solver.n_restarts = 40;
        solver.j_stop = 0.045;
    }
    return solver;
}

BenchmarkCell run_cell(const CellConfig& cell, const controller::ControllerConfig& solver) {
    cell.validate();
    solver.validate(cell.m);

    BenchmarkCell out;
    out.m = cell.m;
    out.d_p = cell.d_p;
    out.n_s = cell.n_s;

    // Per-trial gaps, reduced in index order after the loops so the aggregate
    // cannot depend on how the trials were scheduled.
    const long n_trials = static_cast<long>(cell.main_trials) * cell.sub_trials;
    std::vector<double> gaps(static_cast<std::size_t>(n_trials),
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<double> times(static_cast<std::size_t>(n_trials), 0.0);

    for (int main = 0; main < cell.main_trials; ++main) {
        auto poly_rng = RngStream::keyed(cell.seed, "benchmark-poly",
                                         {static_cast<std::uint64_t>(cell.m),
                                          static_cast<std::uint64_t>(cell.d_p),
                                          static_cast<std::uint64_t>(main)});
        controller::InversionModel model;
        model.components = random_sparse_polynomial(cell.m, cell.d_p, cell.n_s, poly_rng);
        model.n_decision = cell.m;
        model.n_applied = cell.m;
        model.standardization = sysid::Standardization::none();

        for (int sub = 0; sub < cell.sub_trials; ++sub) {
            auto trial_rng = RngStream::keyed(
                cell.seed, "benchmark-trial",
                {static_cast<std::uint64_t>(cell.m), static_cast<std::uint64_t>(cell.d_p),
                 static_cast<std::uint64_t>(main), static_cast<std::uint64_t>(sub)});
            std::vector<double> u_true(cell.m), q(cell.m), point(2 * cell.m);
            for (int i = 0; i < cell.m; ++i) u_true[i] = trial_rng.uniform(-1.0, 1.0);
            for (int i = 0; i < cell.m; ++i) q[i] = trial_rng.uniform(-1.0, 1.0);
            std::copy(u_true.begin(), u_true.end(), point.begin());
            std::copy(q.begin(), q.end(), point.begin() + cell.m);

            std::vector<double> r(cell.m);
            for (int j = 0; j < cell.m; ++j) r[j] = model.components[j].eval(point);

            controller::ControllerConfig trial_solver = solver;
            trial_solver.restart_seed = trial_rng.next_u64();

            const std::size_t index =
                static_cast<std::size_t>(main) * cell.sub_trials + static_cast<std::size_t>(sub);
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const auto result = controller::invert(model, r, q, trial_solver);
                const auto t1 = std::chrono::steady_clock::now();
                times[index] = std::chrono::duration<double>(t1 - t0).count();
                // J(u_true) = 0 by construction, so the gap is the objective itself.
                if (!std::isfinite(result.objective)) {
                    out.divergent += 1;
                    continue;
                }
                if (result.objective < -1e-12)
                    fail(ErrorCode::internal, "benchmark: negative optimality gap");
                gaps[index] = result.objective;
            } catch (const Error&) {
                out.divergent += 1;
            }
        }
    }

    double sum = 0.0;
    double worst = 0.0;
    double time_sum = 0.0;
    long n_ok = 0;
    for (long i = 0; i < n_trials; ++i) {
        const double gap = gaps[static_cast<std::size_t>(i)];
        if (std::isnan(gap)) continue;
        sum += gap;
        worst = std::max(worst, gap);
        time_sum += times[static_cast<std::size_t>(i)];
        n_ok += 1;
    }
    out.trials = n_ok;
    out.E2 = n_ok > 0 ? sum / static_cast<double>(n_ok) : 0.0;
    out.E_inf = worst;
    out.T_solve_mean = n_ok > 0 ? time_sum / static_cast<double>(n_ok) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Full runs and reports

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    config.validate();
    BenchmarkReport report;
    report.config = config;
    for (int m : config.dims) {
        for (int d_p : config.degrees) {
            CellConfig cell;
            cell.m = m;
            cell.d_p = d_p;
            cell.n_s = config.ns_for(m, d_p);
            cell.main_trials = config.main_trials;
            cell.sub_trials = config.sub_trials;
            cell.seed = config.seed;
            cell.mu = config.mu;
            report.cells.push_back(run_cell(cell, default_cell_solver(m, d_p, config.mu)));
        }
    }
    return report;
}

nlohmann::json BenchmarkReport::to_json() const {
    nlohmann::json solver_settings;
    if (!config.dims.empty()) {
        const int m0 = config.dims.front();
        solver_settings["degree_1"] = default_cell_solver(m0, 1, config.mu).to_json();
        solver_settings["degree_ge_2"] = default_cell_solver(m0, 2, config.mu).to_json();
        solver_settings["note"] = "box entries repeat per dimension m of the cell";
    }
    nlohmann::json cell_array = nlohmann::json::array();
    for (const auto& cell : cells) cell_array.push_back(cell.to_json());
    const nlohmann::json config_json = config.to_json();
    return {{"config", config_json},
            {"config_hash", jsonio::config_hash_hex(config_json)},
            {"box", kBoxNote},
            {"solver", solver_settings},
            {"cells", cell_array}};
}

void write_report_json(const std::filesystem::path& path, const BenchmarkReport& report) {
    jsonio::write_json_file(path, report.to_json());
}

void write_report_csv(const std::filesystem::path& path, const BenchmarkReport& report) {
    std::vector<std::vector<double>> rows;
    rows.reserve(report.cells.size());
    for (const auto& cell : report.cells)
        rows.push_back({static_cast<double>(cell.m), static_cast<double>(cell.d_p),
                        static_cast<double>(cell.n_s), cell.E2, cell.E_inf, cell.T_solve_mean});
    csv::write_table(path, {"m", "d_p", "n_s", "E2", "E_inf", "T_solve"}, rows);
}

}  // namespace polyinv::benchmark
