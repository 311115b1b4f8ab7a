#include "core/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

using polyinv::RngStream;

TEST_CASE("identical seed and label reproduce the sequence") {
    RngStream a(42, "train");
    RngStream b(42, "train");
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different labels decorrelate streams") {
    RngStream a(42, "train");
    RngStream b(42, "test");
    int equal = 0;
    for (int i = 0; i < 1000; ++i) {
        if (a.next_u64() == b.next_u64()) ++equal;
    }
    CHECK(equal == 0);
}

TEST_CASE("keyed substreams depend on every index") {
    RngStream a = RngStream::keyed(7, "trial", {1, 2});
    RngStream b = RngStream::keyed(7, "trial", {1, 3});
    RngStream c = RngStream::keyed(7, "trial", {2, 2});
    RngStream d = RngStream::keyed(7, "trial", {1, 2});
    CHECK(a.next_u64() != b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
    RngStream a2 = RngStream::keyed(7, "trial", {1, 2});
    CHECK(a2.next_u64() == d.next_u64());
}

TEST_CASE("uniform01 stays inside the half-open unit interval") {
    RngStream r(123);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform respects bounds and hits both halves") {
    RngStream r(5, "u");
    int below = 0;
    for (int i = 0; i < 10000; ++i) {
        const double v = r.uniform(-2.0, 3.0);
        CHECK(v >= -2.0);
        CHECK(v < 3.0);
        if (v < 0.5) ++below;
    }
    CHECK(below > 3000);
    CHECK(below < 7000);
}

TEST_CASE("normal sample moments are sane") {
    RngStream r(99, "gauss");
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("uniform_int covers the full range") {
    RngStream r(11, "int");
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = r.uniform_int(10);
        CHECK(v < 10);
        seen.insert(v);
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("sample_without_replacement returns k distinct indices") {
    RngStream r(17, "subset");
    auto idx = r.sample_without_replacement(100, 30);
    CHECK(idx.size() == 30);
    std::set<std::size_t> unique(idx.begin(), idx.end());
    CHECK(unique.size() == 30);
    for (auto i : idx) CHECK(i < 100);
}

TEST_CASE("sampling everything yields a permutation") {
    RngStream r(17, "perm");
    auto idx = r.sample_without_replacement(12, 12);
    std::set<std::size_t> unique(idx.begin(), idx.end());
    CHECK(unique.size() == 12);
}
