#include "dwid/container.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace dwid::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStackName = "stack";

fs::path with_ext(const fs::path& base, const char* ext) {
    fs::path p = base;
    p += ext;
    return p;
}

std::uint32_t to_little(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    }
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + file.string() + "' for writing");
    out << text;
    if (!out) throw Error(ErrorCode::io, "failed writing '" + file.string() + "'");
}

json read_json(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + file.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::malformed_header, file.string() + ": " + e.what());
    }
}

template <typename T>
T get_field(const json& j, const char* key, const fs::path& file) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::malformed_header, file.string() + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::malformed_header, file.string() + ": key '" + key + "' has the wrong type");
    }
}

void write_blob(const fs::path& file, std::span<const float> values) {
    std::vector<std::uint32_t> raw(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        raw[i] = to_little(std::bit_cast<std::uint32_t>(values[i]));
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + file.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
    if (!out) throw Error(ErrorCode::io, "failed writing '" + file.string() + "'");
}

void write_header(const fs::path& base, int reps, int rows, int cols, double b_value,
                  const std::optional<std::vector<Label>>& labels) {
    json j;
    j["format_version"] = kFormatVersion;
    j["rows"] = rows;
    j["cols"] = cols;
    j["n_reps"] = reps;
    j["b_value"] = b_value;
    if (labels) {
        json arr = json::array();
        for (Label l : *labels) arr.push_back(to_string(l));
        j["labels"] = arr;
    }
    write_text(with_ext(base, ".json"), j.dump(2) + "\n");
}

} // namespace

void write_stack(const RepetitionStack& stack, const fs::path& base) {
    stack.validate();
    std::vector<float> flat;
    flat.reserve(static_cast<std::size_t>(stack.size()) * stack.images.front().size());
    for (const Image& im : stack.images) flat.insert(flat.end(), im.data.begin(), im.data.end());
    write_header(base, stack.size(), stack.rows(), stack.cols(), stack.b_value, stack.labels);
    write_blob(with_ext(base, ".f32"), flat);
}

RepetitionStack read_stack_file(const fs::path& base) {
    const fs::path header = with_ext(base, ".json");
    const json j = read_json(header);
    if (!j.is_object()) throw Error(ErrorCode::malformed_header, header.string() + ": not a JSON object");

    const int version = get_field<int>(j, "format_version", header);
    if (version != kFormatVersion)
        throw Error(ErrorCode::unsupported_version,
                    header.string() + ": format_version " + std::to_string(version) + " is not supported");
    const int rows = get_field<int>(j, "rows", header);
    const int cols = get_field<int>(j, "cols", header);
    const int reps = get_field<int>(j, "n_reps", header);
    const double b_value = get_field<double>(j, "b_value", header);
    if (rows <= 0 || cols <= 0 || reps <= 0)
        throw Error(ErrorCode::malformed_header, header.string() + ": rows, cols and n_reps must be positive");

    RepetitionStack stack;
    stack.b_value = b_value;
    if (j.contains("labels") && !j.at("labels").is_null()) {
        const auto names = get_field<std::vector<std::string>>(j, "labels", header);
        std::vector<Label> labels;
        labels.reserve(names.size());
        for (const auto& s : names) labels.push_back(label_from_string(s));
        if (static_cast<int>(labels.size()) != reps)
            throw Error(ErrorCode::dimension_mismatch, header.string() + ": labels length differs from n_reps");
        stack.labels = std::move(labels);
    }

    const fs::path blob = with_ext(base, ".f32");
    std::ifstream in(blob, std::ios::binary | std::ios::ate);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + blob.string() + "'");
    const auto bytes = static_cast<std::uint64_t>(in.tellg());
    const std::uint64_t per_image = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    const std::uint64_t expected = per_image * static_cast<std::uint64_t>(reps) * sizeof(float);
    if (bytes != expected)
        throw Error(ErrorCode::dimension_mismatch,
                    blob.string() + ": payload has " + std::to_string(bytes) + " bytes, header declares " +
                        std::to_string(expected));
    in.seekg(0);
    std::vector<std::uint32_t> raw(per_image * static_cast<std::uint64_t>(reps));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(expected));
    if (!in) throw Error(ErrorCode::io, "failed reading '" + blob.string() + "'");

    stack.images.reserve(static_cast<std::size_t>(reps));
    for (int n = 0; n < reps; ++n) {
        Image im(rows, cols);
        for (std::size_t i = 0; i < per_image; ++i) {
            const float v = std::bit_cast<float>(to_little(raw[n * per_image + i]));
            if (!std::isfinite(v))
                throw Error(ErrorCode::non_finite,
                            blob.string() + ": non-finite pixel in repetition " + std::to_string(n));
            im.data[i] = v;
        }
        stack.images.push_back(std::move(im));
    }
    stack.validate();
    return stack;
}

void write_stack(const SliceSet& slice, const fs::path& dir) {
    slice.validate();
    std::error_code ec;
    fs::create_directories(dir / "low", ec);
    fs::create_directories(dir / "high", ec);
    if (ec) throw Error(ErrorCode::io, "cannot create '" + dir.string() + "': " + ec.message());
    write_stack(slice.low_b, dir / "low" / kStackName);
    write_stack(slice.high_b, dir / "high" / kStackName);
    const fs::path roi_file = dir / "roi.json";
    if (slice.roi) {
        write_roi(*slice.roi, roi_file);
    } else {
        fs::remove(roi_file, ec);
    }
}

SliceSet read_stack(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::io, "'" + dir.string() + "' is not a directory");
    SliceSet s;
    s.low_b = read_stack_file(dir / "low" / kStackName);
    s.high_b = read_stack_file(dir / "high" / kStackName);
    if (fs::exists(dir / "roi.json")) s.roi = read_roi(dir / "roi.json");
    s.validate();
    return s;
}

void write_image(const Image& image, double b_value, const fs::path& base) {
    RepetitionStack stack;
    stack.b_value = b_value;
    stack.images.push_back(image);
    write_stack(stack, base);
}

void write_map(const Map& map, const fs::path& base) {
    Image im(map.rows, map.cols);
    for (std::size_t i = 0; i < map.size(); ++i) im.data[i] = static_cast<float>(map.data[i]);
    write_image(im, 0.0, base);
}

void write_volume(const Volume<double>& volume, const fs::path& base) {
    RepetitionStack stack;
    for (int n = 0; n < volume.reps; ++n) {
        Image im(volume.rows, volume.cols);
        const auto rep = volume.rep(n);
        for (std::size_t i = 0; i < rep.size(); ++i) im.data[i] = static_cast<float>(rep[i]);
        stack.images.push_back(std::move(im));
    }
    write_stack(stack, base);
}

Roi read_roi(const fs::path& file) {
    const json j = read_json(file);
    Roi roi;
    roi.row0 = get_field<int>(j, "row0", file);
    roi.col0 = get_field<int>(j, "col0", file);
    roi.height = get_field<int>(j, "height", file);
    roi.width = get_field<int>(j, "width", file);
    if (roi.height <= 0 || roi.width <= 0 || roi.row0 < 0 || roi.col0 < 0)
        throw Error(ErrorCode::malformed_header, file.string() + ": invalid ROI extent");
    return roi;
}

void write_roi(const Roi& roi, const fs::path& file) {
    json j{{"row0", roi.row0}, {"col0", roi.col0}, {"height", roi.height}, {"width", roi.width}};
    write_text(file, j.dump(2) + "\n");
}

bool is_slice_dir(const fs::path& dir) {
    return fs::exists(dir / "low" / "stack.json") && fs::exists(dir / "high" / "stack.json");
}

std::vector<fs::path> list_slices(const fs::path& root) {
    if (is_slice_dir(root)) return {root};
    if (!fs::is_directory(root)) throw Error(ErrorCode::io, "'" + root.string() + "' is not a directory");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && is_slice_dir(entry.path())) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace dwid::io
