#include "core/poly.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace polyinv;
using namespace polyinv::poly;

namespace {

Exponents ex(std::initializer_list<int> values) {
    Exponents out;
    for (int v : values) out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

// Random sparse polynomial plus its oracle-side mirror.
struct RandomPoly {
    SparsePolynomial p;
    std::vector<oracle::Term> mirror;
};

RandomPoly random_poly(RngStream& rng, int n_vars, int degree, int n_terms) {
    auto basis = enumerate_basis(n_vars, degree);
    auto picks = rng.sample_without_replacement(basis.size(), std::min<std::size_t>(n_terms, basis.size()));
    std::vector<Monomial> terms;
    std::vector<oracle::Term> mirror;
    for (auto i : picks) {
        const double c = rng.normal();
        terms.push_back(Monomial{basis[i], c});
        std::vector<int> e(basis[i].begin(), basis[i].end());
        mirror.push_back(oracle::Term{std::move(e), c});
    }
    return RandomPoly{SparsePolynomial(n_vars, degree, std::move(terms)), std::move(mirror)};
}

std::vector<double> random_point(RngStream& rng, int n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.uniform(lo, hi);
    return x;
}

}  // namespace

TEST_CASE("basis for two variables and degree two is graded lexicographic") {
    auto basis = enumerate_basis(2, 2);
    REQUIRE(basis.size() == 6);
    CHECK(basis[0] == ex({0, 0}));
    CHECK(basis[1] == ex({1, 0}));
    CHECK(basis[2] == ex({0, 1}));
    CHECK(basis[3] == ex({2, 0}));
    CHECK(basis[4] == ex({1, 1}));
    CHECK(basis[5] == ex({0, 2}));
}

TEST_CASE("univariate basis is the full power ladder") {
    auto basis = enumerate_basis(1, 6);
    REQUIRE(basis.size() == 7);
    for (int d = 0; d <= 6; ++d) CHECK(basis[static_cast<std::size_t>(d)] == ex({d}));
}

TEST_CASE("eight variables at degree four match the independent binomial") {
    auto basis = enumerate_basis(8, 4);
    CHECK(basis.size() == oracle::binomial(12, 4));
    CHECK(basis.size() == 495);
}

TEST_CASE("basis counts equal binomial coefficients across the small grid") {
    for (int n = 1; n <= 8; ++n) {
        for (int d = 0; d <= 6; ++d) {
            auto basis = enumerate_basis(n, d);
            CHECK(basis.size() == oracle::binomial(static_cast<unsigned>(n + d), static_cast<unsigned>(d)));
            for (std::size_t i = 1; i < basis.size(); ++i) {
                CHECK(graded_lex_less(basis[i - 1], basis[i]));
            }
            std::set<Exponents> unique(basis.begin(), basis.end());
            CHECK(unique.size() == basis.size());
        }
    }
}

TEST_CASE("basis enumeration rejects infeasible sizes") {
    CHECK_THROWS_AS(enumerate_basis(30, 6), Error);
    try {
        enumerate_basis(30, 6);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::capacity);
    }
    CHECK_THROWS_AS(enumerate_basis(3, 3, 10), Error);
    CHECK_NOTHROW(enumerate_basis(3, 3, 20));
}

TEST_CASE("evaluation of a small fixed polynomial") {
    // 2*x0^2*x1 + 3 at (1,2) is 7.
    SparsePolynomial p(2, 3, {Monomial{ex({2, 1}), 2.0}, Monomial{ex({0, 0}), 3.0}});
    const std::vector<double> x{1.0, 2.0};
    CHECK(p.eval(x) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("empty polynomial evaluates to zero") {
    SparsePolynomial p(3, 4);
    const std::vector<double> x{1.5, -2.0, 0.3};
    CHECK(p.eval(x) == 0.0);
}

TEST_CASE("evaluation matches the naive oracle on random instances") {
    RngStream rng(2024, "poly-eval");
    for (int trial = 0; trial < 50; ++trial) {
        auto rp = random_poly(rng, 5, 4, 50);
        auto x = random_point(rng, 5);
        const double got = rp.p.eval(x);
        const double want = oracle::eval(rp.mirror, x);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("eval is linear in coefficients") {
    RngStream rng(7, "poly-linear");
    for (int trial = 0; trial < 100; ++trial) {
        auto rp = random_poly(rng, 4, 3, 12);
        auto rq = random_poly(rng, 4, 3, 12);
        const double a = rng.uniform(-3.0, 3.0);
        const double b = rng.uniform(-3.0, 3.0);
        auto combo = SparsePolynomial::scaled_sum(a, rp.p, b, rq.p);
        auto x = random_point(rng, 4);
        const double lhs = combo.eval(x);
        const double rhs = a * rp.p.eval(x) + b * rq.p.eval(x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("restriction to the first coordinate substitutes the rest") {
    // x0^2*x1 + x1^3 with x1 = 2 becomes 2 t^2 + 8.
    SparsePolynomial p(2, 3, {Monomial{ex({2, 1}), 1.0}, Monomial{ex({0, 3}), 1.0}});
    const std::vector<double> x{0.0, 2.0};
    auto q = p.restrict_to_coordinate(x, 0);
    CHECK(q.degree() == 2);
    CHECK(q.coefficient(0) == doctest::Approx(8.0));
    CHECK(q.coefficient(1) == doctest::Approx(0.0));
    CHECK(q.coefficient(2) == doctest::Approx(2.0));
}

TEST_CASE("restriction to the second coordinate substitutes the first") {
    // x0^2*x1 + x1^3 with x0 = 3 becomes t^3 + 9 t.
    SparsePolynomial p(2, 3, {Monomial{ex({2, 1}), 1.0}, Monomial{ex({0, 3}), 1.0}});
    const std::vector<double> x{3.0, 0.0};
    auto q = p.restrict_to_coordinate(x, 1);
    CHECK(q.degree() == 3);
    CHECK(q.coefficient(0) == doctest::Approx(0.0));
    CHECK(q.coefficient(1) == doctest::Approx(9.0));
    CHECK(q.coefficient(2) == doctest::Approx(0.0));
    CHECK(q.coefficient(3) == doctest::Approx(1.0));
}

TEST_CASE("restriction agrees with direct evaluation at twenty random arguments") {
    RngStream rng(31, "poly-restrict");
    for (int trial = 0; trial < 50; ++trial) {
        auto rp = random_poly(rng, 4, 4, 20);
        auto x = random_point(rng, 4);
        const int k = static_cast<int>(rng.uniform_int(4));
        auto q = rp.p.restrict_to_coordinate(x, k);
        for (int j = 0; j < 20; ++j) {
            const double t = rng.uniform(-2.0, 2.0);
            auto xt = x;
            xt[static_cast<std::size_t>(k)] = t;
            CHECK(q.eval(t) == doctest::Approx(rp.p.eval(xt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("restriction reproduces the original value at the base point") {
    RngStream rng(32, "poly-restrict-fuzz");
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(5));
        const int d = 1 + static_cast<int>(rng.uniform_int(4));
        auto rp = random_poly(rng, n, d, 8);
        auto x = random_point(rng, n);
        const int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        auto q = rp.p.restrict_to_coordinate(x, k);
        const double direct = rp.p.eval(x);
        const double via = q.eval(x[static_cast<std::size_t>(k)]);
        CHECK(via == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("grouped restriction ties coordinates together") {
    // p(x0,x1,x2) restricted over {0,2} at x1 fixed equals p(t, x1, t).
    RngStream rng(33, "poly-group");
    for (int trial = 0; trial < 100; ++trial) {
        auto rp = random_poly(rng, 3, 3, 15);
        auto x = random_point(rng, 3);
        const std::vector<int> coords{0, 2};
        auto q = rp.p.restrict_to_coordinates(x, coords);
        for (int j = 0; j < 5; ++j) {
            const double t = rng.uniform(-2.0, 2.0);
            const std::vector<double> xt{t, x[1], t};
            CHECK(q.eval(t) == doctest::Approx(rp.p.eval(xt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("canonical form merges duplicates and drops zeros") {
    SparsePolynomial p(2, 2,
                       {Monomial{ex({1, 0}), 2.0}, Monomial{ex({1, 0}), -2.0},
                        Monomial{ex({0, 1}), 3.0}, Monomial{ex({0, 0}), 0.0}});
    REQUIRE(p.terms().size() == 1);
    CHECK(p.terms()[0].exponents == ex({0, 1}));
    CHECK(p.terms()[0].coefficient == doctest::Approx(3.0));
}

TEST_CASE("canonical form survives arithmetic") {
    RngStream rng(44, "poly-canon");
    for (int trial = 0; trial < 100; ++trial) {
        auto rp = random_poly(rng, 3, 3, 10);
        auto cancel = SparsePolynomial::scaled_sum(1.0, rp.p, -1.0, rp.p);
        CHECK(cancel.terms().empty());
        auto rq = random_poly(rng, 3, 3, 10);
        auto combo = SparsePolynomial::scaled_sum(2.0, rp.p, 0.5, rq.p);
        std::set<Exponents> seen;
        for (const auto& t : combo.terms()) {
            CHECK(t.coefficient != 0.0);
            CHECK(seen.insert(t.exponents).second);
        }
    }
}

TEST_CASE("constructors reject malformed terms") {
    CHECK_THROWS_AS(SparsePolynomial(2, 1, {Monomial{ex({1, 1}), 1.0}}), Error);
    CHECK_THROWS_AS(SparsePolynomial(2, 3, {Monomial{ex({1}), 1.0}}), Error);
    CHECK_THROWS_AS(SparsePolynomial(0, 1), Error);
}

TEST_CASE("interval invariant") {
    CHECK_THROWS_AS(Interval(1.0, 0.0), Error);
    Interval box(-1.0, 3.0);
    CHECK(box.midpoint() == doctest::Approx(1.0));
    CHECK(box.clamp(5.0) == doctest::Approx(3.0));
    CHECK(box.clamp(-5.0) == doctest::Approx(-1.0));
    CHECK(box.contains(0.0));
    CHECK_FALSE(box.contains(3.1));
}

TEST_CASE("univariate arithmetic and composition") {
    UnivariatePolynomial q({1.0, 2.0, 3.0});  // 1 + 2t + 3t^2
    CHECK(q.degree() == 2);
    CHECK(q.eval(2.0) == doctest::Approx(17.0));
    auto d = q.derivative();
    CHECK(d.degree() == 1);
    CHECK(d.coefficient(0) == doctest::Approx(2.0));
    CHECK(d.coefficient(1) == doctest::Approx(6.0));

    RngStream rng(55, "uni-affine");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> coeffs(1 + rng.uniform_int(7));
        for (auto& c : coeffs) c = rng.normal();
        UnivariatePolynomial p(coeffs);
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        auto comp = p.composed_affine(a, b);
        const double t = rng.uniform(-2.0, 2.0);
        CHECK(comp.eval(t) == doctest::Approx(p.eval(a * t + b)).epsilon(1e-10));
    }
}

TEST_CASE("zero polynomial conventions") {
    UnivariatePolynomial z;
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);
    CHECK(z.eval(3.0) == 0.0);
    CHECK(z.derivative().is_zero());
    UnivariatePolynomial almost({1.0, 1e-20});
    CHECK(almost.degree() == 0);
}

TEST_CASE("boundary minimum of a shifted parabola") {
    // (t-3)^2 = 9 - 6t + t^2 on [0,1]: minimum at the right endpoint.
    UnivariatePolynomial q({9.0, -6.0, 1.0});
    auto res = univariate_min_on_interval(q, Interval(0.0, 1.0));
    CHECK(res.argmin == doctest::Approx(1.0));
    CHECK(res.value == doctest::Approx(4.0));
}

TEST_CASE("interior minima with deterministic tie-break") {
    // t^4 - t^2 has equal minima at +-1/sqrt(2); the smaller argmin wins.
    UnivariatePolynomial q({0.0, 0.0, -1.0, 0.0, 1.0});
    auto res = univariate_min_on_interval(q, Interval(-2.0, 2.0));
    CHECK(res.argmin == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(res.value == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("constant polynomial minimizes at the left endpoint") {
    auto res = univariate_min_on_interval(UnivariatePolynomial::constant(5.0), Interval(-1.0, 2.0));
    CHECK(res.argmin == doctest::Approx(-1.0));
    CHECK(res.value == doctest::Approx(5.0));
}

TEST_CASE("minimizer beats a dense grid on random degree-eight polynomials") {
    RngStream rng(66, "min-grid");
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> coeffs(9);
        for (auto& c : coeffs) c = rng.normal();
        UnivariatePolynomial q(coeffs);
        auto res = univariate_min_on_interval(q, Interval(-1.0, 1.0));
        auto grid = oracle::grid_min(coeffs, -1.0, 1.0, 100000);
        CHECK(res.value <= grid.value + 1e-9);
        CHECK(res.value <= q.eval(-1.0) + 1e-9);
        CHECK(res.value <= q.eval(1.0) + 1e-9);
    }
}

TEST_CASE("minimizer rejects degrees beyond the configured maximum") {
    std::vector<double> coeffs(20, 0.0);
    coeffs.back() = 1.0;
    UnivariatePolynomial q(coeffs);
    CHECK_THROWS_AS(univariate_min_on_interval(q, Interval(-1.0, 1.0)), Error);
    CHECK_NOTHROW(univariate_min_on_interval(q, Interval(-1.0, 1.0), 19));
}

TEST_CASE("real roots of a factored cubic") {
    // (t-1)(t+2)(t-0.5) = t^3 + 0.5 t^2 - 2.5 t + 1
    UnivariatePolynomial q({1.0, -2.5, 0.5, 1.0});
    auto roots = real_roots_in_interval(q, -3.0, 3.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(roots[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(roots[2] == doctest::Approx(1.0).epsilon(1e-9));

    auto clipped = real_roots_in_interval(q, 0.0, 0.75);
    REQUIRE(clipped.size() == 1);
    CHECK(clipped[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("degree bookkeeping per coordinate") {
    SparsePolynomial p(3, 5, {Monomial{ex({2, 1, 0}), 1.0}, Monomial{ex({0, 3, 1}), -2.0}});
    CHECK(p.degree_in(0) == 2);
    CHECK(p.degree_in(1) == 3);
    CHECK(p.degree_in(2) == 1);
}

TEST_CASE("string rendering names variables by index") {
    SparsePolynomial p(2, 2, {Monomial{ex({1, 1}), 2.0}});
    CHECK(p.to_string() == "2*x0*x1");
    CHECK(SparsePolynomial(2, 2).to_string() == "0");
}
