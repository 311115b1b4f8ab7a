// JSON plumbing shared by model files and report files: polynomial
// (de)serialization, canonical dumps, config hashing, and file I/O.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "core/poly.hpp"

namespace polyinv::jsonio {

nlohmann::json poly_to_json(const poly::SparsePolynomial& p);
poly::SparsePolynomial poly_from_json(const nlohmann::json& j);

// Deterministic rendering (object keys sorted, stable float formatting).
std::string canonical_dump(const nlohmann::json& j);

// FNV-1a over the canonical dump; embedded in every artifact file.
std::uint64_t config_hash(const nlohmann::json& j);
std::string config_hash_hex(const nlohmann::json& j);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace polyinv::jsonio
