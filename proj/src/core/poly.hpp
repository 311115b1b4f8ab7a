#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace polyinv::poly {

// Closed interval [lo, hi]; the per-coordinate command constraint.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_);

    double midpoint() const noexcept { return 0.5 * (lo + hi); }
    double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
    bool contains(double x, double tol = 0.0) const noexcept {
        return x >= lo - tol && x <= hi + tol;
    }
};

using Exponents = std::vector<std::uint8_t>;

struct Monomial {
    Exponents exponents;
    double coefficient = 0.0;

    int total_degree() const noexcept;
};

// Dense-coefficient univariate polynomial, ascending powers. Carrier for
// per-coordinate restrictions of prediction components and of the inversion
// cost. The trailing coefficient is nonzero unless the polynomial is
// identically zero (empty coefficient list).
class UnivariatePolynomial {
public:
    UnivariatePolynomial() = default;
    explicit UnivariatePolynomial(std::vector<double> coefficients);

    static UnivariatePolynomial constant(double c);

    // Degree; -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
    bool is_zero() const noexcept { return coefficients_.empty(); }
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    double coefficient(int power) const noexcept;

    double eval(double t) const noexcept;
    UnivariatePolynomial derivative() const;

    UnivariatePolynomial operator+(const UnivariatePolynomial& other) const;
    UnivariatePolynomial operator-(const UnivariatePolynomial& other) const;
    UnivariatePolynomial operator*(const UnivariatePolynomial& other) const;
    UnivariatePolynomial scaled(double a) const;

    // q(a*t + b) as a polynomial in t.
    UnivariatePolynomial composed_affine(double a, double b) const;

private:
    void trim();
    std::vector<double> coefficients_;
};

// Multivariate polynomial stored as a list of monomials in canonical form:
// terms sorted in graded lexicographic order, no duplicate exponent tuples,
// no zero (or negligibly small) coefficients, every total degree within the
// declared bound.
class SparsePolynomial {
public:
    SparsePolynomial(int n_vars, int degree_bound);
    SparsePolynomial(int n_vars, int degree_bound, std::vector<Monomial> terms);

    // Assemble from a basis (as produced by enumerate_basis) and a parallel
    // coefficient vector, pruning negligible entries.
    static SparsePolynomial from_basis(int n_vars, int degree_bound,
                                       const std::vector<Exponents>& basis,
                                       std::span<const double> coefficients);

    int n_vars() const noexcept { return n_vars_; }
    int degree_bound() const noexcept { return degree_bound_; }
    const std::vector<Monomial>& terms() const noexcept { return terms_; }

    double eval(std::span<const double> x) const;

    // Univariate polynomial q with q(t) = eval(x with x[k] := t).
    UnivariatePolynomial restrict_to_coordinate(std::span<const double> x, int k) const;

    // Univariate polynomial q with q(t) = eval(x with x[c] := t for every c
    // in coords). Used when one scalar command is shared across the horizon.
    UnivariatePolynomial restrict_to_coordinates(std::span<const double> x,
                                                 std::span<const int> coords) const;

    // Largest exponent of variable k over all terms.
    int degree_in(int k) const;

    // a*p + b*q (matching n_vars required; degree bound is the max of both).
    static SparsePolynomial scaled_sum(double a, const SparsePolynomial& p,
                                       double b, const SparsePolynomial& q);

    std::string to_string() const;

private:
    void canonicalize();

    int n_vars_;
    int degree_bound_;
    std::vector<Monomial> terms_;
};

// All exponent tuples over n_vars variables with total degree <= degree, in
// graded lexicographic order. The count equals C(n_vars + degree, degree);
// a capacity error is raised when it would exceed max_count.
std::vector<Exponents> enumerate_basis(int n_vars, int degree,
                                       std::size_t max_count = 1'000'000);

// C(n, k) saturating at UINT64_MAX.
std::uint64_t binomial(unsigned n, unsigned k);

// Graded lexicographic comparison (grade first, then lexicographically
// descending tuples, so (1,0) precedes (0,1)).
bool graded_lex_less(const Exponents& a, const Exponents& b);

struct MinimizationResult {
    double argmin = 0.0;
    double value = 0.0;
};

// Global minimum of q over [box.lo, box.hi]. Candidates are the interval
// endpoints plus the real roots of q' inside the interval, extracted via
// companion-matrix eigenvalues with one Newton polish step. Ties are broken
// toward the smallest argmin.
MinimizationResult univariate_min_on_interval(const UnivariatePolynomial& q, Interval box,
                                              int max_degree = 16);

// Real roots of q inside [lo, hi] (clamped), in ascending order.
std::vector<double> real_roots_in_interval(const UnivariatePolynomial& q, double lo, double hi);

double pow_int(double x, unsigned e) noexcept;

}  // namespace polyinv::poly
