#pragma once

// Canonical JSON serialization and content addressing.
//
// The canonical form is byte-stable across platforms and key orderings:
//   - object keys sorted by UTF-8 byte order
//   - no insignificant whitespace
//   - minimal string escaping (only \" \\ and control characters)
//   - integers in plain decimal, doubles in shortest round-trip decimal
//     with ECMAScript-style fixed/exponent selection
//   - non-finite numbers rejected

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace provbench {

using Json = nlohmann::json;

// Shortest round-trip decimal rendering of a double, ECMAScript notation
// rules (fixed form for exponents in [-6, 21), else e-notation). -0 renders
// as "0". Throws Error(NonFiniteNumber) on NaN/inf.
std::string canonical_number(double value);

// Canonical byte sequence of a document value. Throws on non-finite numbers.
std::string canonicalize(const Json& doc);

// Strict parse: valid JSON, rejects duplicate object keys with
// Error(DuplicateKey). Malformed input raises Error(SchemaError).
Json parse_json_strict(const std::string& text);

// Lowercase-hex SHA-256 of a byte sequence.
std::string sha256_hex(const std::string& bytes);

// SHA-256 of the canonical bytes of a document.
std::string content_address(const Json& doc);

} // namespace provbench
