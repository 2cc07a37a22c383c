#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qbat/linalg.hpp"

namespace qbat {

/// Deterministic JSON dump: object keys sorted, floating-point scalars
/// rendered with 12 significant digits. Identical documents produce
/// byte-identical text, which the report emitter relies on.
std::string dump_canonical(const nlohmann::json& j, int indent = 2);

/// %.12g rendering of one double.
std::string format_sig12(double v);

nlohmann::json rho_to_json(const ComplexMatrix& m);
ComplexMatrix rho_from_json(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// FNV-1a 64-bit as a 16-hex-digit string; used to fingerprint configs.
std::string fnv1a_hex(const std::string& text);

}  // namespace qbat
