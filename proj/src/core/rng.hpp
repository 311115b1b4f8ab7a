#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace polyinv {

// Deterministic random stream (xoshiro256** seeded via splitmix64).
//
// Streams are derived from a (seed, label, indices) key so that independent
// parts of a pipeline draw from independent, reproducible sequences and the
// result of a run does not depend on execution order. The label is kept on
// the stream so tests can check that e.g. data-generation and test streams
// are distinct.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::string label = "");

    // Substream keyed by (seed, label, indices). Identical keys give
    // identical sequences; any difference gives an unrelated sequence.
    static RngStream keyed(std::uint64_t seed, std::string_view label,
                           std::initializer_list<std::uint64_t> indices = {});

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform01();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller (implementation-pinned for portability).
    double normal();
    double normal(double mean, double stddev);
    // Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n);

    // k distinct values drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    const std::string& label() const noexcept { return label_; }

private:
    std::uint64_t state_[4];
    std::string label_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace polyinv
