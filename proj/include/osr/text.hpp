#pragma once

// Small text helpers shared by the parsers and writers: strict finite-number
// parsing, shortest round-trip decimal formatting, comma splitting, and the
// FNV-1a digest used for split provenance metadata.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osr {

// Parses a decimal or scientific-notation floating point number. Returns
// nullopt unless the whole token parses and the value is finite ("nan",
// "inf", empty and trailing-garbage tokens are all rejected).
std::optional<double> parse_double(std::string_view token);

// Same parse with the rejection reason, so error messages can distinguish a
// syntactically broken cell from an explicit NaN/inf token.
enum class NumParse { ok, malformed, nonfinite };
NumParse parse_double_status(std::string_view token, double& out);

// Parses a decimal integer; whole token or nothing.
std::optional<long long> parse_int(std::string_view token);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Splits on `sep` without any quoting rules; empty fields are preserved.
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

// Reads all lines (LF separated; a trailing CR per line is tolerated and
// stripped). A final line without a newline still counts.
std::vector<std::string> read_lines(std::istream& in);

// FNV-1a, 64-bit, over raw bytes; hex form is 16 lowercase digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace osr
