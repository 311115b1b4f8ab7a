// Monte Carlo evaluation of the inversion solver on random sparse polynomial
// targets: for each (dimension, degree) cell, draw vector polynomials with a
// prescribed number of nonzero coefficients, generate in-range references,
// invert, and aggregate the optimality-gap and timing indexes of the
// reference table.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core/controller.hpp"
#include "core/poly.hpp"
#include "core/rng.hpp"

namespace polyinv::benchmark {

// The published cell table: (m, d_p) -> n_s nonzero coefficients per component.
const std::map<std::pair<int, int>, int>& reference_ns_table();

struct BenchmarkConfig {
    std::vector<int> dims;                          // input dimensions m
    std::vector<int> degrees;                       // polynomial degrees d_p
    std::map<std::pair<int, int>, int> ns_table;    // (m, d_p) -> nonzero terms
    int main_trials = 50;                           // polynomial redraws per cell
    int sub_trials = 100;                           // inversion problems per polynomial
    std::uint64_t seed = 0;
    double mu = 0.0;                                // command penalty (0 in the protocol)

    // Full table at published trial counts (50 x 100).
    static BenchmarkConfig paper_protocol(std::uint64_t seed);
    // Full table at reduced trial counts (5 x 20) for fast runs.
    static BenchmarkConfig desk_protocol(std::uint64_t seed);

    int ns_for(int m, int d_p) const;
    void validate() const;
    nlohmann::json to_json() const;
    static BenchmarkConfig from_json(const nlohmann::json& j);
};

// One cell of the benchmark: fixed (m, d_p, n_s) and trial counts.
struct CellConfig {
    int m = 1;
    int d_p = 1;
    int n_s = 1;
    int main_trials = 1;
    int sub_trials = 1;
    std::uint64_t seed = 0;
    double mu = 0.0;

    void validate() const;
};

struct BenchmarkCell {
    int m = 0;
    int d_p = 0;
    int n_s = 0;
    double E2 = 0.0;            // mean optimality gap J(u*) over all trials
    double E_inf = 0.0;         // worst optimality gap
    double T_solve_mean = 0.0;  // mean wall-clock seconds around the invert call
    long trials = 0;            // successful trials aggregated into E2 / E_inf
    long divergent = 0;         // trials where the solver failed; excluded above

    bool flagged() const noexcept { return divergent > 0; }
    nlohmann::json to_json() const;
};

// A vector polynomial f: R^(2m) -> R^m of total degree <= d_p whose components
// each carry exactly n_s nonzero coefficients at uniformly drawn basis
// positions with standard-normal values. Deterministic under the stream.
std::vector<poly::SparsePolynomial> random_sparse_polynomial(int m, int d_p, int n_s,
                                                             RngStream& rng);

// The solver settings used for a cell: exact interior solve for degree-1
// cells, coordinate descent with threshold-gated random restarts otherwise.
// The box is [-1,1]^m, matching the sampling support of the true commands.
controller::ControllerConfig default_cell_solver(int m, int d_p, double mu);

// Runs one cell: per sub trial draws u_true and q uniformly on [-1,1]^m, sets
// r = f(u_true, q) (so the optimum of the mu = 0 objective is exactly 0),
// inverts, and accumulates the gap J(u*). Gaps reduce in trial order, and all
// randomness comes from streams keyed by (seed, m, d_p, main, sub), so the
// result is independent of evaluation order.
BenchmarkCell run_cell(const CellConfig& cell, const controller::ControllerConfig& solver);

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<BenchmarkCell> cells;

    nlohmann::json to_json() const;
};

// Runs every configured cell with the default solver settings.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

// JSON report (config, config hash, solver settings, box note, cells) and a
// CSV table mirroring the reference-table columns.
void write_report_json(const std::filesystem::path& path, const BenchmarkReport& report);
void write_report_csv(const std::filesystem::path& path, const BenchmarkReport& report);

}  // namespace polyinv::benchmark
