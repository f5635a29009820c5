#include "qs4/io.hpp"

#include "qs4/error.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace qs4 {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

namespace {

template <class T>
void put(std::vector<unsigned char>& out, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<unsigned char>& in, std::size_t& pos)
{
    if (in.size() - pos < sizeof(T)) throw ValidationError("field file truncated");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

constexpr std::size_t kHeaderSize = 4 + 2 + 4 + 8 + 1;

} // namespace

std::vector<unsigned char> encode_field(const AnyField& f)
{
    const bool spectral = std::holds_alternative<SpectralField>(f);
    const Grid2D& g = spectral ? std::get<SpectralField>(f).grid() : std::get<Field>(f).grid();
    const std::vector<cplx>& v = spectral ? std::get<SpectralField>(f).coeffs() : std::get<Field>(f).values();
    std::vector<unsigned char> out;
    out.reserve(kHeaderSize + 16 * v.size());
    for (char c : {'Q', 'S', '4', 'F'}) out.push_back(static_cast<unsigned char>(c));
    put<std::uint16_t>(out, kFieldFileVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
    put<double>(out, g.extent());
    put<std::uint8_t>(out, spectral ? 1 : 0);
    for (const cplx& z : v) {
        put<double>(out, z.real());
        put<double>(out, z.imag());
    }
    return out;
}

AnyField decode_field(const std::vector<unsigned char>& bytes)
{
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "QS4F", 4) != 0)
        throw ValidationError("field file: bad magic (expected \"QS4F\")");
    std::size_t pos = 4;
    const auto version = get<std::uint16_t>(bytes, pos);
    if (version != kFieldFileVersion) {
        std::ostringstream os;
        os << "field file: version mismatch (file " << version << ", expected " << kFieldFileVersion << ")";
        throw ValidationError(os.str());
    }
    const auto n = get<std::uint32_t>(bytes, pos);
    const auto extent = get<double>(bytes, pos);
    const auto flag = get<std::uint8_t>(bytes, pos);
    if (flag > 1) throw ValidationError("field file: unknown representation flag");
    const Grid2D g(static_cast<int>(n), extent);
    const std::size_t count = g.size();
    if (bytes.size() - pos != 16 * count) throw ValidationError("field file truncated: payload length does not match header");
    std::vector<cplx> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double re = get<double>(bytes, pos);
        const double im = get<double>(bytes, pos);
        v[i] = {re, im};
    }
    if (flag == 1) return SpectralField(g, std::move(v));
    return Field(g, std::move(v));
}

void write_field(const AnyField& f, const std::string& path)
{
    const std::vector<unsigned char> bytes = encode_field(f);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw ValidationError("write failed: " + path);
}

AnyField read_field(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open for reading: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_field(bytes);
}

namespace {

std::string number(double v)
{
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(const Json& j, std::string& out)
{
    switch (j.type()) {
    case Json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += Json(it.key()).dump();
            out += ':';
            write_json(it.value(), out);
        }
        out += '}';
        break;
    }
    case Json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ',';
            write_json(j[i], out);
        }
        out += ']';
        break;
    }
    case Json::value_t::number_float:
        out += number(j.get<double>());
        break;
    default:
        out += j.dump();
    }
}

std::string render_csv(const Json& results)
{
    if (!results.is_object() || results.empty())
        throw ValidationError("CSV output needs an object of equal-length columns");
    std::size_t rows = 0;
    bool first = true;
    for (auto it = results.begin(); it != results.end(); ++it) {
        if (!it.value().is_array()) throw ValidationError("CSV output: field '" + it.key() + "' is not a column");
        if (first) rows = it.value().size();
        else if (it.value().size() != rows) throw ValidationError("CSV output: ragged column '" + it.key() + "'");
        first = false;
        for (const Json& v : it.value())
            if (!v.is_number()) throw ValidationError("CSV output: non-numeric entry in '" + it.key() + "'");
    }
    std::string out;
    first = true;
    for (auto it = results.begin(); it != results.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += it.key();
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        first = true;
        for (auto it = results.begin(); it != results.end(); ++it) {
            if (!first) out += ',';
            first = false;
            const Json& v = it.value()[r];
            out += v.is_number_float() ? number(v.get<double>()) : v.dump();
        }
        out += '\n';
    }
    return out;
}

} // namespace

std::string dump_json(const Json& j)
{
    std::string out;
    write_json(j, out);
    return out;
}

std::string render(const Record& r, Format fmt)
{
    if (fmt == Format::csv) return render_csv(r.results);
    if (!r.results.is_object() && !r.results.is_array())
        throw ValidationError("JSON output: results must be an object or array, not a scalar");
    Json doc;
    doc["config"] = r.config;
    doc["results"] = r.results;
    return dump_json(doc) + "\n";
}

void emit_results(const Record& r, Format fmt, const std::string& path)
{
    const std::string text = render(r, fmt);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    os << text;
    if (!os) throw ValidationError("write failed: " + path);
}

} // namespace qs4
