#include "core/jsonio.hpp"

#include <fstream>

#include "core/errors.hpp"

namespace polyinv::jsonio {

using nlohmann::json;

json poly_to_json(const poly::SparsePolynomial& p) {
    json terms = json::array();
    for (const auto& t : p.terms()) {
        json e = json::array();
        for (auto v : t.exponents) e.push_back(static_cast<int>(v));
        terms.push_back(json{{"e", std::move(e)}, {"c", t.coefficient}});
    }
    return json{{"n_vars", p.n_vars()}, {"degree", p.degree_bound()}, {"terms", std::move(terms)}};
}

poly::SparsePolynomial poly_from_json(const json& j) {
    try {
        const int n_vars = j.at("n_vars").get<int>();
        const int degree = j.at("degree").get<int>();
        std::vector<poly::Monomial> terms;
        for (const auto& jt : j.at("terms")) {
            poly::Monomial m;
            for (const auto& je : jt.at("e")) {
                const int e = je.get<int>();
                if (e < 0 || e > 255) fail(ErrorCode::parse, "polynomial JSON: exponent out of range");
                m.exponents.push_back(static_cast<std::uint8_t>(e));
            }
            m.coefficient = jt.at("c").get<double>();
            terms.push_back(std::move(m));
        }
        return poly::SparsePolynomial(n_vars, degree, std::move(terms));
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("polynomial JSON: ") + e.what());
    }
}

std::string canonical_dump(const json& j) {
    // nlohmann objects iterate in sorted key order; dump() is deterministic
    // for a given value, which is all the hashing below needs.
    return j.dump();
}

std::uint64_t config_hash(const json& j) {
    const std::string s = canonical_dump(j);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash_hex(const json& j) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash(j)));
    return std::string(buf);
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "json: cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorCode::io, "json: write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "json: cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, "json: " + path.string() + ": " + e.what());
    }
}

}  // namespace polyinv::jsonio
