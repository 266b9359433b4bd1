#include "oracles.hpp"
#include "test_util.hpp"

#include "dwid/container.hpp"

#include <doctest.h>

#include <functional>
#include <json.hpp>

#include <fstream>
#include <limits>

using namespace dwid;
namespace fs = std::filesystem;

namespace {

RepetitionStack make_stack(int rows, int cols, int n, double b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1000.0f);
    RepetitionStack s;
    s.b_value = b;
    for (int k = 0; k < n; ++k) {
        Image im(rows, cols);
        for (auto& v : im.data) v = u(rng);
        s.images.push_back(std::move(im));
    }
    return s;
}

SliceSet make_slice(int rows, int cols, int n_low, int n_high, std::uint64_t seed) {
    SliceSet s;
    s.low_b = make_stack(rows, cols, n_low, 50.0, seed);
    s.high_b = make_stack(rows, cols, n_high, 800.0, seed + 1);
    std::vector<Label> labels;
    for (int k = 0; k < n_high; ++k) labels.push_back(k % 3 == 0 ? Label::corrupt : (k % 3 == 1 ? Label::clean : Label::unknown));
    s.high_b.labels = labels;
    return s;
}

std::vector<char> bytes_of(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::invalid_argument;
}

} // namespace

TEST_CASE("round trip reproduces every field bit-exactly") {
    testutil::TempDir tmp("rt");
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        SliceSet s = make_slice(3 + static_cast<int>(seed), 7, 2, 1 + static_cast<int>(seed), seed);
        if (seed % 2) s.roi = Roi{1, 2, 2, 3};
        // Values that only survive a bit-exact path.
        s.high_b.images[0].data[0] = std::numeric_limits<float>::denorm_min();
        s.high_b.images[0].data[1] = -0.0f;
        const fs::path dir = tmp / ("s" + std::to_string(seed));
        io::write_stack(s, dir);
        const SliceSet back = io::read_stack(dir);
        CHECK(back == s);
        CHECK(std::signbit(back.high_b.images[0].data[1]));
        io::write_stack(back, tmp / "again");
        CHECK(bytes_of(dir / "high" / "stack.f32") == bytes_of(tmp / "again" / "high" / "stack.f32"));
    }
}

TEST_CASE("payload is little-endian float32, repetition-major") {
    testutil::TempDir tmp("le");
    RepetitionStack s;
    s.b_value = 800;
    s.images.push_back(Image(1, 2, std::vector<float>{1.0f, 2.0f}));
    s.images.push_back(Image(1, 2, std::vector<float>{-2.0f, 0.5f}));
    io::write_stack(s, tmp / "x");
    const auto b = bytes_of(tmp / "x.f32");
    REQUIRE(b.size() == 16);
    // 1.0f = 0x3F800000, -2.0f = 0xC0000000
    CHECK(static_cast<unsigned char>(b[3]) == 0x3F);
    CHECK(static_cast<unsigned char>(b[2]) == 0x80);
    CHECK(static_cast<unsigned char>(b[11]) == 0xC0);
    const auto header = nlohmann::json::parse(std::ifstream(tmp / "x.json"));
    CHECK(header["format_version"] == 1);
    CHECK(header["n_reps"] == 2);
    CHECK(header["rows"] == 1);
    CHECK(header["cols"] == 2);
    CHECK_FALSE(header.contains("labels"));
}

TEST_CASE("full-size container with ten high-b repetitions") {
    testutil::TempDir tmp("big");
    SliceSet s;
    s.low_b = make_stack(108, 134, 4, 50, 1);
    s.high_b = make_stack(108, 134, 10, 800, 2);
    io::write_stack(s, tmp.path());
    const SliceSet back = io::read_stack(tmp.path());
    CHECK(back.high_b.size() == 10);
    CHECK(back.high_b.rows() == 108);
    CHECK(back.high_b.cols() == 134);
}

TEST_CASE("single repetition is a valid slice") {
    testutil::TempDir tmp("one");
    SliceSet s;
    s.low_b = make_stack(4, 4, 1, 50, 3);
    s.high_b = make_stack(4, 4, 1, 800, 4);
    io::write_stack(s, tmp.path());
    CHECK(io::read_stack(tmp.path()).high_b.size() == 1);
}

TEST_CASE("labels are stored verbatim as strings") {
    testutil::TempDir tmp("lab");
    SliceSet s = make_slice(2, 2, 1, 4, 9);
    s.high_b.labels = std::vector<Label>{Label::clean, Label::corrupt, Label::unknown, Label::clean};
    io::write_stack(s, tmp.path());
    const auto header = nlohmann::json::parse(std::ifstream(tmp / "high/stack.json"));
    CHECK(header["labels"] == nlohmann::json({"clean", "corrupt", "unknown", "clean"}));
    CHECK(io::read_stack(tmp.path()).high_b.labels == s.high_b.labels);
}

TEST_CASE("reader reports distinct diagnostics") {
    testutil::TempDir tmp("err");
    const SliceSet good = make_slice(3, 4, 1, 2, 5);
    const fs::path dir = tmp / "c";
    auto fresh = [&] { io::write_stack(good, dir); };
    const fs::path header = dir / "high" / "stack.json";
    const fs::path blob = dir / "high" / "stack.f32";
    auto patch_header = [&](auto&& edit) {
        auto j = nlohmann::json::parse(std::ifstream(header));
        edit(j);
        std::ofstream(header, std::ios::trunc) << j.dump();
    };

    SUBCASE("dimension mismatch") {
        fresh();
        patch_header([](auto& j) { j["n_reps"] = 3; });
        CHECK(code_of([&] { io::read_stack(dir); }) == ErrorCode::dimension_mismatch);
    }
    SUBCASE("truncated payload") {
        fresh();
        fs::resize_file(blob, fs::file_size(blob) - 4);
        CHECK(code_of([&] { io::read_stack(dir); }) == ErrorCode::dimension_mismatch);
    }
    SUBCASE("malformed header") {
        fresh();
        std::ofstream(header, std::ios::trunc) << "{ not json";
        CHECK(code_of([&] { io::read_stack(dir); }) == ErrorCode::malformed_header);
    }
    SUBCASE("missing key") {
        fresh();
        patch_header([](auto& j) { j.erase("cols"); });
        CHECK(code_of([&] { io::read_stack(dir); }) == ErrorCode::malformed_header);
    }
    SUBCASE("unknown version") {
        fresh();
        patch_header([](auto& j) { j["format_version"] = 2; });
        CHECK(code_of([&] { io::read_stack(dir); }) == ErrorCode::unsupported_version);
    }
    SUBCASE("non-finite pixel") {
        fresh();
        std::fstream f(blob, std::ios::in | std::ios::out | std::ios::binary);
        const float nan = std::numeric_limits<float>::quiet_NaN();
        f.seekp(4);
        f.write(reinterpret_cast<const char*>(&nan), 4);
        f.close();
        CHECK(code_of([&] { io::read_stack(dir); }) == ErrorCode::non_finite);
    }
    SUBCASE("missing directory") {
        CHECK(code_of([&] { io::read_stack(tmp / "nope"); }) == ErrorCode::io);
    }
}

TEST_CASE("random single-field corruption is always caught") {
    testutil::TempDir tmp("fuzz");
    std::mt19937_64 rng(77);
    const SliceSet good = make_slice(4, 5, 2, 3, 11);
    for (int trial = 0; trial < 60; ++trial) {
        const fs::path dir = tmp / ("t" + std::to_string(trial));
        io::write_stack(good, dir);
        const fs::path which = dir / (rng() % 2 ? "high" : "low");
        const fs::path header = which / "stack.json";
        auto j = nlohmann::json::parse(std::ifstream(header));
        const int kind = static_cast<int>(rng() % 7);
        switch (kind) {
        case 0: j["rows"] = j["rows"].get<int>() + 1 + static_cast<int>(rng() % 3); break;
        case 1: j["cols"] = std::max(0, j["cols"].get<int>() - 1 - static_cast<int>(rng() % 3)); break;
        case 2: j["n_reps"] = j["n_reps"].get<int>() + 1; break;
        case 3: j["format_version"] = 1 + 1 + static_cast<int>(rng() % 5); break;
        case 4: j["labels"] = nlohmann::json::array({"clean"}); break;
        case 5: j["labels"] = nlohmann::json::array({"dirty", "clean", "clean"}); break;
        case 6: {
            const fs::path blob = which / "stack.f32";
            std::fstream f(blob, std::ios::in | std::ios::out | std::ios::binary);
            const float inf = std::numeric_limits<float>::infinity();
            f.seekp(static_cast<std::streamoff>(4 * (rng() % 20)));
            f.write(reinterpret_cast<const char*>(&inf), 4);
            break;
        }
        }
        if (kind != 6) std::ofstream(header, std::ios::trunc) << j.dump();
        CHECK_THROWS_AS(io::read_stack(dir), Error);
    }
}

TEST_CASE("in-memory validation mirrors the type invariants") {
    SliceSet s = make_slice(3, 3, 1, 2, 1);
    CHECK_NOTHROW(s.validate());

    SliceSet bad = s;
    bad.high_b.images[1] = Image(3, 4);
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::dimension_mismatch);

    bad = s;
    bad.high_b.labels->push_back(Label::clean);
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::dimension_mismatch);

    bad = s;
    bad.low_b.b_value = 900;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);

    bad = s;
    bad.roi = Roi{2, 2, 2, 2};
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);

    bad = s;
    bad.high_b.images[0].data[4] = std::numeric_limits<float>::infinity();
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::non_finite);

    bad = s;
    bad.high_b.images.clear();
    bad.high_b.labels.reset();
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("writing into an unwritable location is an I/O error") {
    testutil::TempDir tmp("ro");
    std::ofstream(tmp / "file") << "x";
    const SliceSet s = make_slice(2, 2, 1, 1, 2);
    CHECK(code_of([&] { io::write_stack(s, tmp / "file" / "sub"); }) == ErrorCode::io);
    CHECK(code_of([&] { io::write_stack(s.high_b, tmp / "file" / "stack"); }) == ErrorCode::io);
}

TEST_CASE("median and percentile helpers") {
    std::vector<double> odd{11, 2, 10};
    CHECK(median_inplace(odd) == 10.0);
    std::vector<double> even{11, 2, 9, 10};
    CHECK(median_inplace(even) == 9.5);
    CHECK(percentile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 98.0) == 10.0);
    CHECK(percentile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 50.0) == 5.0);
    std::vector<double> none;
    CHECK_THROWS_AS(median_inplace(none), Error);
}

TEST_CASE("dataset listing") {
    testutil::TempDir tmp("ls");
    const SliceSet s = make_slice(2, 2, 1, 1, 3);
    io::write_stack(s, tmp / "b");
    io::write_stack(s, tmp / "a");
    fs::create_directories(tmp / "not_a_slice");
    const auto found = io::list_slices(tmp.path());
    REQUIRE(found.size() == 2);
    CHECK(found[0].filename() == "a");
    CHECK(io::list_slices(tmp / "a").size() == 1);
}
