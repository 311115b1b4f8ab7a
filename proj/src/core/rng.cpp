#include "core/rng.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "core/errors.hpp"

namespace polyinv {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string label) : label_(std::move(label)) {
    std::uint64_t x = seed ^ rotl(fnv1a(label_), 17);
    for (auto& s : state_) s = splitmix64(x);
}

RngStream RngStream::keyed(std::uint64_t seed, std::string_view label,
                           std::initializer_list<std::uint64_t> indices) {
    std::uint64_t x = seed;
    for (std::uint64_t idx : indices) x = splitmix64(x) ^ (idx + 0x9e3779b97f4a7c15ULL);
    return RngStream(x, std::string(label));
}

std::uint64_t RngStream::next_u64() {
    std::uint64_t* s = state_;
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double RngStream::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    if (n == 0) fail(ErrorCode::invalid_argument, "uniform_int: n must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
}

std::vector<std::size_t> RngStream::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) fail(ErrorCode::invalid_argument, "sample_without_replacement: k exceeds n");
    std::vector<std::size_t> out;
    out.reserve(k);
    std::unordered_set<std::size_t> seen;
    while (out.size() < k) {
        const auto v = static_cast<std::size_t>(uniform_int(n));
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

}  // namespace polyinv
