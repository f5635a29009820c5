#include "qs4/error.hpp"
#include "qs4/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

using namespace qs4;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("qs4_test_" + name)).string();
}

} // namespace

TEST_CASE("field file layout")
{
    const Grid2D g(16, 2.5);
    Field f(g);
    for (int i = 0; i < 256; ++i) f.values()[i] = cplx(i + 0.5, -i);
    const std::vector<unsigned char> b = encode_field(f);
    REQUIRE(b.size() == 4 + 2 + 4 + 8 + 1 + 2 * 256 * 8);
    CHECK(std::memcmp(b.data(), "QS4F", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[5] == 0);
    CHECK(b[6] == 16);
    CHECK(b[7] == 0);
    double extent = 0.0;
    std::memcpy(&extent, b.data() + 10, 8);
    CHECK(extent == 2.5);
    CHECK(b[18] == 0);
    double re1 = 0.0, im1 = 0.0;
    std::memcpy(&re1, b.data() + 19 + 16, 8);
    std::memcpy(&im1, b.data() + 19 + 24, 8);
    CHECK(re1 == 1.5);
    CHECK(im1 == -1.0);

    SpectralField F(g);
    F(1, 2) = cplx(0.25, 7.0);
    CHECK(encode_field(F)[18] == 1);
}

TEST_CASE("field file round trip is bit-identical")
{
    const Grid2D g(32, 8.0);
    const Field f = random_band_limited(g, 4.0, 3);
    const std::string path = temp_path("rt.qs4f");
    write_field(f, path);
    const AnyField back = read_field(path);
    REQUIRE(std::holds_alternative<Field>(back));
    CHECK(std::get<Field>(back).grid() == g);
    CHECK(std::memcmp(std::get<Field>(back).values().data(), f.values().data(), 16 * f.values().size()) == 0);

    const std::string once = slurp(path);
    write_field(back, path);
    CHECK(slurp(path) == once);

    const SpectralField F = dft_forward(f);
    const AnyField bs = decode_field(encode_field(F));
    REQUIRE(std::holds_alternative<SpectralField>(bs));
    CHECK(std::get<SpectralField>(bs).coeffs() == F.coeffs());
    std::remove(path.c_str());
}

TEST_CASE("corrupt field files are rejected")
{
    const Grid2D g(16, 2.0);
    std::vector<unsigned char> b = encode_field(Field(g));

    auto bad_magic = b;
    bad_magic[0] = 'X';
    CHECK_THROWS_WITH_AS(decode_field(bad_magic), doctest::Contains("bad magic"), ValidationError);

    auto bad_version = b;
    bad_version[4] = 2;
    CHECK_THROWS_WITH_AS(decode_field(bad_version), doctest::Contains("version"), ValidationError);

    auto truncated = b;
    truncated.pop_back();
    CHECK_THROWS_WITH_AS(decode_field(truncated), doctest::Contains("truncated"), ValidationError);
    CHECK_THROWS_AS(decode_field({'Q', 'S'}), ValidationError);

    auto bad_flag = b;
    bad_flag[18] = 7;
    CHECK_THROWS_AS(decode_field(bad_flag), ValidationError);

    auto trailing = b;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_field(trailing), ValidationError);

    CHECK_THROWS_AS(read_field(temp_path("does_not_exist")), ValidationError);
}

TEST_CASE("JSON and CSV records")
{
    Record r;
    r.config = {{"tool", "qs4"}, {"n", 128}, {"t_max", 0.1}};
    r.results = {{"magnitude", {8.0, 16.0}}, {"raw_norm", {0.5, 1.0 / 3.0}}};

    const std::string js = render(r, Format::json);
    CHECK(js.find("\"config\"") < js.find("\"results\""));
    CHECK(js.find("0.10000000000000001") != std::string::npos);
    CHECK(js.find("0.33333333333333331") != std::string::npos);
    // parse back and re-emit: byte-identical
    const Json parsed = Json::parse(js);
    CHECK(render({parsed["config"], parsed["results"]}, Format::json) == js);

    const std::string csv = render(r, Format::csv);
    CHECK(csv.rfind("magnitude,raw_norm\n", 0) == 0);
    CHECK(csv.find("16,0.33333333333333331") != std::string::npos);

    Record ragged = r;
    ragged.results["raw_norm"] = {1.0};
    CHECK_THROWS_AS(render(ragged, Format::csv), ValidationError);
    Record scalar = r;
    scalar.results = 3.0;
    CHECK_THROWS_AS(render(scalar, Format::json), ValidationError);
    Record nested = r;
    nested.results["fit"] = {{"slope", 1.0}};
    CHECK_THROWS_AS(render(nested, Format::csv), ValidationError);

    const std::string path = temp_path("rec.json");
    emit_results(r, Format::json, path);
    const std::string a = slurp(path);
    emit_results(r, Format::json, path);
    CHECK(slurp(path) == a);
    CHECK(a == js);
    std::remove(path.c_str());

    CHECK_THROWS_AS(emit_results(r, Format::json, "/nonexistent_dir/x.json"), ValidationError);
}
