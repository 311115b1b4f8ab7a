#include "doctest.h"

#include "core/benchmark.hpp"
#include "core/controller.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/jsonio.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

using namespace polyinv;
using namespace polyinv::benchmark;

namespace {

CellConfig small_cell(int m, int d_p, int n_s, int mains = 3, int subs = 5,
                      std::uint64_t seed = 11) {
    CellConfig cell;
    cell.m = m;
    cell.d_p = d_p;
    cell.n_s = n_s;
    cell.main_trials = mains;
    cell.sub_trials = subs;
    cell.seed = seed;
    cell.mu = 0.0;
    return cell;
}

}  // namespace

TEST_CASE("random_sparse_polynomial draws exactly n_s terms per component") {
    auto rng = RngStream::keyed(7, "benchmark-poly", {1, 1, 0});
    const auto f = random_sparse_polynomial(1, 1, 3, rng);
    REQUIRE(f.size() == 1);
    // Degree-1 basis over (u, q) has exactly three slots, so all are occupied.
    CHECK(f[0].n_vars() == 2);
    CHECK(f[0].terms().size() == 3);

    auto rng8 = RngStream::keyed(7, "benchmark-poly", {8, 6, 0});
    const auto g = random_sparse_polynomial(8, 6, 500, rng8);
    REQUIRE(g.size() == 8);
    for (const auto& component : g) {
        CHECK(component.n_vars() == 16);
        CHECK(component.terms().size() == 500);
        CHECK(component.degree_bound() == 6);
        for (const auto& term : component.terms()) CHECK(term.total_degree() <= 6);
    }
}

TEST_CASE("random_sparse_polynomial is deterministic under the stream key") {
    auto rng_a = RngStream::keyed(42, "benchmark-poly", {2, 2, 5});
    auto rng_b = RngStream::keyed(42, "benchmark-poly", {2, 2, 5});
    const auto fa = random_sparse_polynomial(2, 2, 15, rng_a);
    const auto fb = random_sparse_polynomial(2, 2, 15, rng_b);
    REQUIRE(fa.size() == fb.size());
    for (std::size_t j = 0; j < fa.size(); ++j) {
        REQUIRE(fa[j].terms().size() == fb[j].terms().size());
        for (std::size_t t = 0; t < fa[j].terms().size(); ++t) {
            CHECK(fa[j].terms()[t].exponents == fb[j].terms()[t].exponents);
            CHECK(fa[j].terms()[t].coefficient == fb[j].terms()[t].coefficient);
        }
    }
}

TEST_CASE("random_sparse_polynomial rejects out-of-range term counts") {
    auto rng = RngStream::keyed(1, "benchmark-poly", {1, 1, 0});
    CHECK_THROWS_AS(random_sparse_polynomial(1, 1, 0, rng), Error);
    // Two variables at degree 1 admit only three basis monomials.
    CHECK_THROWS_AS(random_sparse_polynomial(1, 1, 4, rng), Error);
}

TEST_CASE("reference table carries the published cell layout") {
    const auto& table = reference_ns_table();
    CHECK(table.size() == 20);
    CHECK(table.at({1, 1}) == 3);
    CHECK(table.at({2, 2}) == 15);
    CHECK(table.at({4, 4}) == 116);
    CHECK(table.at({6, 6}) == 339);
    CHECK(table.at({8, 6}) == 500);

    const auto paper = BenchmarkConfig::paper_protocol(0);
    CHECK(paper.main_trials == 50);
    CHECK(paper.sub_trials == 100);
    CHECK(paper.ns_table == table);
    CHECK(paper.dims == std::vector<int>{1, 2, 4, 6, 8});
    CHECK(paper.degrees == std::vector<int>{1, 2, 4, 6});

    const auto desk = BenchmarkConfig::desk_protocol(0);
    CHECK(desk.main_trials == 5);
    CHECK(desk.sub_trials == 20);
    CHECK(desk.ns_table == table);
}

TEST_CASE("run_cell matches an independent replay of its trial protocol") {
    // Re-derive every draw from the documented stream keys and solve the
    // trials in reverse order; the aggregates must match bitwise.
    const auto cell = small_cell(2, 2, 9, 2, 4, 23);
    const auto solver = default_cell_solver(cell.m, cell.d_p, cell.mu);
    const auto result = run_cell(cell, solver);

    struct Trial {
        double gap;
    };
    std::vector<double> gaps(static_cast<std::size_t>(cell.main_trials) * cell.sub_trials);
    for (int main = cell.main_trials - 1; main >= 0; --main) {
        auto poly_rng = RngStream::keyed(cell.seed, "benchmark-poly",
                                         {static_cast<std::uint64_t>(cell.m),
                                          static_cast<std::uint64_t>(cell.d_p),
                                          static_cast<std::uint64_t>(main)});
        controller::InversionModel model;
        model.components = random_sparse_polynomial(cell.m, cell.d_p, cell.n_s, poly_rng);
        model.n_decision = cell.m;
        model.n_applied = cell.m;
        model.standardization = sysid::Standardization::none();
        for (int sub = cell.sub_trials - 1; sub >= 0; --sub) {
            auto trial_rng = RngStream::keyed(
                cell.seed, "benchmark-trial",
                {static_cast<std::uint64_t>(cell.m), static_cast<std::uint64_t>(cell.d_p),
                 static_cast<std::uint64_t>(main), static_cast<std::uint64_t>(sub)});
            std::vector<double> point(2 * cell.m);
            for (int i = 0; i < 2 * cell.m; ++i) point[i] = trial_rng.uniform(-1.0, 1.0);
            std::vector<double> q(point.begin() + cell.m, point.end());
            std::vector<double> r(cell.m);
            for (int j = 0; j < cell.m; ++j) r[j] = model.components[j].eval(point);
            auto trial_solver = solver;
            trial_solver.restart_seed = trial_rng.next_u64();
            const auto inv = controller::invert(model, r, q, trial_solver);
            gaps[static_cast<std::size_t>(main) * cell.sub_trials + sub] = inv.objective;
        }
    }
    double sum = 0.0, worst = 0.0;
    for (double g : gaps) {
        sum += g;
        worst = std::max(worst, g);
    }
    CHECK(result.trials == static_cast<long>(gaps.size()));
    CHECK(result.divergent == 0);
    CHECK(result.E2 == sum / static_cast<double>(gaps.size()));
    CHECK(result.E_inf == worst);
}

TEST_CASE("degree-1 cells are solved to numerical exactness") {
    const auto cell = small_cell(1, 1, 3, 4, 10);
    const auto result = run_cell(cell, default_cell_solver(1, 1, 0.0));
    CHECK(result.E2 >= 0.0);
    CHECK(result.E2 <= 1e-10);
    CHECK(result.E_inf <= 1e-8);
    CHECK(result.divergent == 0);
}

TEST_CASE("quadratic two-input cell stays within the published worst case") {
    const auto cell = small_cell(2, 2, 15, 5, 20, 3);
    const auto result = run_cell(cell, default_cell_solver(2, 2, 0.0));
    CHECK(result.E2 >= 0.0);
    CHECK(result.E_inf >= result.E2);
    CHECK(result.E_inf <= 0.05);
    CHECK(result.divergent == 0);
}

TEST_CASE("gaps are nonnegative and the worst bounds the mean") {
    for (int d_p : {2, 4}) {
        const auto cell = small_cell(2, d_p, 12, 2, 6, 17);
        const auto result = run_cell(cell, default_cell_solver(2, d_p, 0.0));
        CHECK(result.E2 >= 0.0);
        CHECK(result.E_inf >= result.E2);
    }
}

TEST_CASE("run_cell is deterministic under the seed") {
    const auto cell = small_cell(2, 2, 10, 2, 5, 99);
    const auto solver = default_cell_solver(2, 2, 0.0);
    const auto a = run_cell(cell, solver);
    const auto b = run_cell(cell, solver);
    CHECK(a.E2 == b.E2);
    CHECK(a.E_inf == b.E_inf);
    CHECK(a.trials == b.trials);
}

TEST_CASE("config JSON round-trips and reports carry the protocol") {
    auto config = BenchmarkConfig::desk_protocol(12345);
    config.dims = {1, 2};
    config.degrees = {1, 2};
    config.main_trials = 2;
    config.sub_trials = 3;

    const auto back = BenchmarkConfig::from_json(config.to_json());
    CHECK(back.dims == config.dims);
    CHECK(back.degrees == config.degrees);
    CHECK(back.ns_table == config.ns_table);
    CHECK(back.main_trials == config.main_trials);
    CHECK(back.sub_trials == config.sub_trials);
    CHECK(back.seed == config.seed);
    CHECK(back.mu == config.mu);

    const auto report = run_benchmark(config);
    REQUIRE(report.cells.size() == 4);
    for (const auto& cell : report.cells) CHECK(cell.trials == 6);

    const auto j = report.to_json();
    CHECK(j.contains("config_hash"));
    CHECK(j.at("box").get<std::string>().find("[-1,1]^m") != std::string::npos);
    CHECK(j.at("cells").size() == 4);

    const auto dir = std::filesystem::temp_directory_path() / "polyinv_benchmark_test";
    std::filesystem::create_directories(dir);
    write_report_json(dir / "report.json", report);
    write_report_csv(dir / "report.csv", report);
    const auto loaded = jsonio::read_json_file(dir / "report.json");
    CHECK(loaded.at("config_hash") == j.at("config_hash"));
    const auto table = csv::read_table(dir / "report.csv");
    CHECK(table.header ==
          std::vector<std::string>{"m", "d_p", "n_s", "E2", "E_inf", "T_solve"});
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[0][0] == 1.0);
    CHECK(table.rows[0][1] == 1.0);
    CHECK(table.rows[0][2] == 3.0);
    std::filesystem::remove_all(dir);
}
