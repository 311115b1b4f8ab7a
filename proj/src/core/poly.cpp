#include "core/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace polyinv::poly {

namespace {
// Relative threshold below which coefficients are treated as round-off.
constexpr double kPruneRel = 1e-14;
}

// ---------------------------------------------------------------------------
// Interval

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo <= hi)) fail(ErrorCode::invalid_argument, "Interval: lo must not exceed hi");
}

// ---------------------------------------------------------------------------
// Monomial

int Monomial::total_degree() const noexcept {
    int d = 0;
    for (auto e : exponents) d += e;
    return d;
}

// ---------------------------------------------------------------------------
// UnivariatePolynomial

UnivariatePolynomial::UnivariatePolynomial(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
    trim();
}

UnivariatePolynomial UnivariatePolynomial::constant(double c) {
    return UnivariatePolynomial(std::vector<double>{c});
}

void UnivariatePolynomial::trim() {
    double max_abs = 0.0;
    for (double c : coefficients_) max_abs = std::max(max_abs, std::abs(c));
    const double tol = kPruneRel * max_abs;
    while (!coefficients_.empty() && std::abs(coefficients_.back()) <= tol) {
        coefficients_.pop_back();
    }
}

double UnivariatePolynomial::coefficient(int power) const noexcept {
    if (power < 0 || power >= static_cast<int>(coefficients_.size())) return 0.0;
    return coefficients_[static_cast<std::size_t>(power)];
}

double UnivariatePolynomial::eval(double t) const noexcept {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
        acc = acc * t + *it;
    }
    return acc;
}

UnivariatePolynomial UnivariatePolynomial::derivative() const {
    if (coefficients_.size() <= 1) return UnivariatePolynomial();
    std::vector<double> d(coefficients_.size() - 1);
    for (std::size_t i = 1; i < coefficients_.size(); ++i) {
        d[i - 1] = coefficients_[i] * static_cast<double>(i);
    }
    return UnivariatePolynomial(std::move(d));
}

UnivariatePolynomial UnivariatePolynomial::operator+(const UnivariatePolynomial& other) const {
    std::vector<double> out(std::max(coefficients_.size(), other.coefficients_.size()), 0.0);
    for (std::size_t i = 0; i < coefficients_.size(); ++i) out[i] += coefficients_[i];
    for (std::size_t i = 0; i < other.coefficients_.size(); ++i) out[i] += other.coefficients_[i];
    return UnivariatePolynomial(std::move(out));
}

UnivariatePolynomial UnivariatePolynomial::operator-(const UnivariatePolynomial& other) const {
    std::vector<double> out(std::max(coefficients_.size(), other.coefficients_.size()), 0.0);
    for (std::size_t i = 0; i < coefficients_.size(); ++i) out[i] += coefficients_[i];
    for (std::size_t i = 0; i < other.coefficients_.size(); ++i) out[i] -= other.coefficients_[i];
    return UnivariatePolynomial(std::move(out));
}

UnivariatePolynomial UnivariatePolynomial::operator*(const UnivariatePolynomial& other) const {
    if (is_zero() || other.is_zero()) return UnivariatePolynomial();
    std::vector<double> out(coefficients_.size() + other.coefficients_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        for (std::size_t j = 0; j < other.coefficients_.size(); ++j) {
            out[i + j] += coefficients_[i] * other.coefficients_[j];
        }
    }
    return UnivariatePolynomial(std::move(out));
}

UnivariatePolynomial UnivariatePolynomial::scaled(double a) const {
    std::vector<double> out = coefficients_;
    for (double& c : out) c *= a;
    return UnivariatePolynomial(std::move(out));
}

UnivariatePolynomial UnivariatePolynomial::composed_affine(double a, double b) const {
    // Horner on the affine argument: result = (...(c_n)*(a t + b) + c_{n-1})...
    std::vector<double> acc;  // ascending powers of t
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
        std::vector<double> next(acc.size() + 1, 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            next[i] += acc[i] * b;
            next[i + 1] += acc[i] * a;
        }
        next[0] += *it;
        acc = std::move(next);
    }
    return UnivariatePolynomial(std::move(acc));
}

// ---------------------------------------------------------------------------
// SparsePolynomial

SparsePolynomial::SparsePolynomial(int n_vars, int degree_bound)
    : n_vars_(n_vars), degree_bound_(degree_bound) {
    if (n_vars <= 0) fail(ErrorCode::invalid_argument, "SparsePolynomial: n_vars must be positive");
    if (degree_bound < 0) {
        fail(ErrorCode::invalid_argument, "SparsePolynomial: degree bound must be non-negative");
    }
}

SparsePolynomial::SparsePolynomial(int n_vars, int degree_bound, std::vector<Monomial> terms)
    : SparsePolynomial(n_vars, degree_bound) {
    terms_ = std::move(terms);
    canonicalize();
}

SparsePolynomial SparsePolynomial::from_basis(int n_vars, int degree_bound,
                                              const std::vector<Exponents>& basis,
                                              std::span<const double> coefficients) {
    if (basis.size() != coefficients.size()) {
        fail(ErrorCode::dimension_mismatch, "from_basis: basis/coefficient size mismatch");
    }
    std::vector<Monomial> terms;
    terms.reserve(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (coefficients[i] != 0.0) terms.push_back(Monomial{basis[i], coefficients[i]});
    }
    return SparsePolynomial(n_vars, degree_bound, std::move(terms));
}

void SparsePolynomial::canonicalize() {
    for (const auto& t : terms_) {
        if (static_cast<int>(t.exponents.size()) != n_vars_) {
            fail(ErrorCode::dimension_mismatch, "Monomial exponent tuple length differs from n_vars");
        }
        if (t.total_degree() > degree_bound_) {
            fail(ErrorCode::invalid_argument, "Monomial total degree exceeds the declared bound");
        }
    }
    std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
        return graded_lex_less(a.exponents, b.exponents);
    });
    // Merge duplicate exponent tuples.
    std::vector<Monomial> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().exponents == t.exponents) {
            merged.back().coefficient += t.coefficient;
        } else {
            merged.push_back(std::move(t));
        }
    }
    double max_abs = 0.0;
    for (const auto& t : merged) max_abs = std::max(max_abs, std::abs(t.coefficient));
    const double tol = kPruneRel * max_abs;
    terms_.clear();
    for (auto& t : merged) {
        if (std::abs(t.coefficient) > tol && t.coefficient != 0.0) terms_.push_back(std::move(t));
    }
}

double SparsePolynomial::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_vars_) {
        fail(ErrorCode::dimension_mismatch, "eval: point length differs from n_vars");
    }
    double acc = 0.0;
    for (const auto& term : terms_) {
        double prod = term.coefficient;
        for (int j = 0; j < n_vars_; ++j) {
            const auto e = term.exponents[static_cast<std::size_t>(j)];
            if (e != 0) prod *= pow_int(x[static_cast<std::size_t>(j)], e);
        }
        acc += prod;
    }
    return acc;
}

UnivariatePolynomial SparsePolynomial::restrict_to_coordinate(std::span<const double> x,
                                                              int k) const {
    if (static_cast<int>(x.size()) != n_vars_) {
        fail(ErrorCode::dimension_mismatch, "restrict_to_coordinate: point length differs from n_vars");
    }
    if (k < 0 || k >= n_vars_) {
        fail(ErrorCode::invalid_argument, "restrict_to_coordinate: coordinate index out of range");
    }
    std::vector<double> coeffs(static_cast<std::size_t>(degree_bound_) + 1, 0.0);
    for (const auto& term : terms_) {
        double prod = term.coefficient;
        for (int j = 0; j < n_vars_; ++j) {
            if (j == k) continue;
            const auto e = term.exponents[static_cast<std::size_t>(j)];
            if (e != 0) prod *= pow_int(x[static_cast<std::size_t>(j)], e);
        }
        coeffs[term.exponents[static_cast<std::size_t>(k)]] += prod;
    }
    return UnivariatePolynomial(std::move(coeffs));
}

UnivariatePolynomial SparsePolynomial::restrict_to_coordinates(std::span<const double> x,
                                                               std::span<const int> coords) const {
    if (static_cast<int>(x.size()) != n_vars_) {
        fail(ErrorCode::dimension_mismatch, "restrict_to_coordinates: point length differs from n_vars");
    }
    std::vector<bool> shared(static_cast<std::size_t>(n_vars_), false);
    for (int c : coords) {
        if (c < 0 || c >= n_vars_) {
            fail(ErrorCode::invalid_argument, "restrict_to_coordinates: coordinate index out of range");
        }
        shared[static_cast<std::size_t>(c)] = true;
    }
    std::vector<double> coeffs(static_cast<std::size_t>(degree_bound_) + 1, 0.0);
    for (const auto& term : terms_) {
        double prod = term.coefficient;
        int power = 0;
        for (int j = 0; j < n_vars_; ++j) {
            const auto e = term.exponents[static_cast<std::size_t>(j)];
            if (e == 0) continue;
            if (shared[static_cast<std::size_t>(j)]) {
                power += e;
            } else {
                prod *= pow_int(x[static_cast<std::size_t>(j)], e);
            }
        }
        coeffs[static_cast<std::size_t>(power)] += prod;
    }
    return UnivariatePolynomial(std::move(coeffs));
}

int SparsePolynomial::degree_in(int k) const {
    if (k < 0 || k >= n_vars_) {
        fail(ErrorCode::invalid_argument, "degree_in: coordinate index out of range");
    }
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.exponents[static_cast<std::size_t>(k)]));
    return d;
}

SparsePolynomial SparsePolynomial::scaled_sum(double a, const SparsePolynomial& p,
                                              double b, const SparsePolynomial& q) {
    if (p.n_vars() != q.n_vars()) {
        fail(ErrorCode::dimension_mismatch, "scaled_sum: operand n_vars differ");
    }
    std::vector<Monomial> terms;
    terms.reserve(p.terms().size() + q.terms().size());
    for (const auto& t : p.terms()) terms.push_back(Monomial{t.exponents, a * t.coefficient});
    for (const auto& t : q.terms()) terms.push_back(Monomial{t.exponents, b * t.coefficient});
    return SparsePolynomial(p.n_vars(), std::max(p.degree_bound(), q.degree_bound()),
                            std::move(terms));
}

std::string SparsePolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << " + ";
        first = false;
        os << t.coefficient;
        for (int j = 0; j < n_vars_; ++j) {
            const auto e = t.exponents[static_cast<std::size_t>(j)];
            if (e == 0) continue;
            os << "*x" << j;
            if (e > 1) os << "^" << static_cast<int>(e);
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Basis enumeration

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        const std::uint64_t num = n - k + i;
        if (result > UINT64_MAX / num) return UINT64_MAX;
        result = result * num / i;
    }
    return result;
}

bool graded_lex_less(const Exponents& a, const Exponents& b) {
    int da = 0, db = 0;
    for (auto e : a) da += e;
    for (auto e : b) db += e;
    if (da != db) return da < db;
    // Within a grade: lexicographically descending, so that the tuple with
    // more weight on earlier variables comes first.
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

namespace {
void enumerate_degree(int n_vars, int remaining, Exponents& prefix,
                      std::vector<Exponents>& out, std::size_t max_count) {
    if (static_cast<int>(prefix.size()) == n_vars - 1) {
        prefix.push_back(static_cast<std::uint8_t>(remaining));
        if (out.size() >= max_count) {
            fail(ErrorCode::capacity, "enumerate_basis: basis size exceeds the configured maximum");
        }
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        prefix.push_back(static_cast<std::uint8_t>(e));
        enumerate_degree(n_vars, remaining - e, prefix, out, max_count);
        prefix.pop_back();
    }
}
}  // namespace

std::vector<Exponents> enumerate_basis(int n_vars, int degree, std::size_t max_count) {
    if (n_vars <= 0) fail(ErrorCode::invalid_argument, "enumerate_basis: n_vars must be positive");
    if (degree < 0) fail(ErrorCode::invalid_argument, "enumerate_basis: degree must be non-negative");
    if (degree > 255) fail(ErrorCode::capacity, "enumerate_basis: degree exceeds exponent storage");
    const std::uint64_t count =
        binomial(static_cast<unsigned>(n_vars + degree), static_cast<unsigned>(degree));
    if (count > max_count) {
        fail(ErrorCode::capacity, "enumerate_basis: basis size " + std::to_string(count) +
                                      " exceeds the configured maximum " + std::to_string(max_count));
    }
    std::vector<Exponents> out;
    out.reserve(static_cast<std::size_t>(count));
    Exponents prefix;
    prefix.reserve(static_cast<std::size_t>(n_vars));
    for (int d = 0; d <= degree; ++d) {
        enumerate_degree(n_vars, d, prefix, out, max_count);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Univariate minimization

double pow_int(double x, unsigned e) noexcept {
    double result = 1.0;
    while (e != 0) {
        if (e & 1u) result *= x;
        x *= x;
        e >>= 1;
    }
    return result;
}

namespace {

// Drop leading coefficients that are negligible relative to the largest one.
std::vector<double> significant_coefficients(const UnivariatePolynomial& q) {
    std::vector<double> c = q.coefficients();
    double max_abs = 0.0;
    for (double v : c) max_abs = std::max(max_abs, std::abs(v));
    const double tol = kPruneRel * max_abs;
    while (!c.empty() && std::abs(c.back()) <= tol) c.pop_back();
    return c;
}

void quadratic_real_roots(double c0, double c1, double c2, std::vector<double>& out) {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    // Citardauq form for the root that would cancel.
    const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
    if (q != 0.0) {
        out.push_back(q / c2);
        out.push_back(c0 / q);
    } else {
        out.push_back(0.0);
        if (c2 != 0.0) out.push_back(-c1 / c2);
    }
}

}  // namespace

std::vector<double> real_roots_in_interval(const UnivariatePolynomial& q, double lo, double hi) {
    std::vector<double> roots;
    std::vector<double> c = significant_coefficients(q);
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) return roots;

    std::vector<double> candidates;
    if (deg == 1) {
        candidates.push_back(-c[0] / c[1]);
    } else if (deg == 2) {
        quadratic_real_roots(c[0], c[1], c[2], candidates);
    } else {
        // Companion matrix of the monic polynomial.
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 0; i < deg; ++i) {
            companion(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(deg)];
            if (i + 1 < deg) companion(i + 1, i) = 1.0;
        }
        Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
        const auto& values = solver.eigenvalues();
        const UnivariatePolynomial dq = q.derivative();
        for (int i = 0; i < values.size(); ++i) {
            const double re = values[i].real();
            const double im = values[i].imag();
            if (std::abs(im) > 1e-6 * std::max(1.0, std::abs(re))) continue;
            // One Newton polish step on the real axis.
            double t = re;
            const double slope = dq.eval(t);
            if (slope != 0.0 && std::isfinite(slope)) {
                const double step = q.eval(t) / slope;
                if (std::isfinite(step)) t -= step;
            }
            candidates.push_back(t);
        }
    }

    const double span = std::max(1.0, hi - lo);
    const double tol = 1e-10 * span;
    for (double t : candidates) {
        if (!std::isfinite(t)) continue;
        if (t < lo - tol || t > hi + tol) continue;
        roots.push_back(std::clamp(t, lo, hi));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

MinimizationResult univariate_min_on_interval(const UnivariatePolynomial& q, Interval box,
                                              int max_degree) {
    if (!(box.lo <= box.hi)) {
        fail(ErrorCode::invalid_argument, "univariate_min_on_interval: malformed interval");
    }
    if (q.degree() > max_degree) {
        fail(ErrorCode::capacity, "univariate_min_on_interval: degree " +
                                      std::to_string(q.degree()) + " exceeds the maximum " +
                                      std::to_string(max_degree));
    }

    MinimizationResult best{box.lo, q.eval(box.lo)};
    auto consider = [&](double t) {
        const double v = q.eval(t);
        const double tie_tol = 1e-12 * (1.0 + std::abs(best.value));
        if (v < best.value - tie_tol || (std::abs(v - best.value) <= tie_tol && t < best.argmin)) {
            best = {t, v};
        }
    };
    consider(box.hi);
    for (double r : real_roots_in_interval(q.derivative(), box.lo, box.hi)) consider(r);
    return best;
}

}  // namespace polyinv::poly
