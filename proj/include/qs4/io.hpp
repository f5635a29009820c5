#ifndef QS4_IO_HPP
#define QS4_IO_HPP

#include "qs4/grid.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace qs4 {

inline constexpr const char* kToolVersion = "1.0.0";

// Binary field file: "QS4F", u16 version, u32 n, f64 extent, u8 flag
// (0 physical, 1 spectral), then 2 n^2 f64 (re, im interleaved, row-major).
// All little-endian.
inline constexpr std::uint16_t kFieldFileVersion = 1;

using AnyField = std::variant<Field, SpectralField>;

std::vector<unsigned char> encode_field(const AnyField& f);
AnyField decode_field(const std::vector<unsigned char>& bytes);
void write_field(const AnyField& f, const std::string& path);
AnyField read_field(const std::string& path);

using Json = nlohmann::ordered_json;

enum class Format { json, csv };

// JSON output is {"config": ..., "results": ...}. CSV needs results to be an
// object of equal-length numeric arrays; keys become the header row.
struct Record {
    Json config;
    Json results;
};

std::string render(const Record& r, Format fmt);
void emit_results(const Record& r, Format fmt, const std::string& path);

// JSON text with every double printed to 17 significant digits.
std::string dump_json(const Json& j);

} // namespace qs4

#endif
