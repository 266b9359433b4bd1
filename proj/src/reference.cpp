#include "dwid/reference.hpp"

#include "dwid/container.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace dwid {

namespace {

// Baseline scoring constants.
constexpr double kDropoutCutoff = 0.5;   // fraction of the pixel-wise median
constexpr double kSquashCenter = 0.05;   // score mapped to probability 0.5
constexpr double kSquashSlope = 60.0;

ReferenceSubset finalize(std::vector<bool> selected, SubsetOrigin origin) {
    ReferenceSubset out;
    out.origin = origin;
    if (std::none_of(selected.begin(), selected.end(), [](bool b) { return b; })) {
        std::fill(selected.begin(), selected.end(), true);
        out.fallback = true;
    }
    out.selected = std::move(selected);
    return out;
}

} // namespace

const char* to_string(SubsetOrigin origin) {
    switch (origin) {
    case SubsetOrigin::labels: return "labels";
    case SubsetOrigin::external_predictions: return "external_predictions";
    case SubsetOrigin::baseline_classifier: return "baseline_classifier";
    case SubsetOrigin::explicit_mask: return "explicit_mask";
    case SubsetOrigin::all: return "all";
    }
    return "all";
}

ReferenceSubset ReferenceSubset::all_of(int n) {
    ReferenceSubset out;
    out.selected.assign(static_cast<std::size_t>(n), true);
    out.origin = SubsetOrigin::all;
    return out;
}

int ReferenceSubset::count() const noexcept {
    return static_cast<int>(std::count(selected.begin(), selected.end(), true));
}

std::vector<int> ReferenceSubset::indices() const {
    std::vector<int> out;
    for (std::size_t n = 0; n < selected.size(); ++n)
        if (selected[n]) out.push_back(static_cast<int>(n));
    return out;
}

void PredictionRecord::validate() const {
    if (probs.empty()) throw Error(ErrorCode::invalid_argument, "prediction record has no probabilities");
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "probability outside [0, 1]");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::invalid_argument, "threshold outside [0, 1]");
}

ReferenceSubset subset_from_labels(const RepetitionStack& stack) {
    if (!stack.labels) throw Error(ErrorCode::missing_labels, "stack carries no labels");
    std::vector<bool> selected;
    selected.reserve(stack.labels->size());
    for (Label l : *stack.labels) {
        if (l == Label::unknown)
            throw Error(ErrorCode::missing_labels, "stack contains repetitions labelled 'unknown'");
        selected.push_back(l == Label::clean);
    }
    return finalize(std::move(selected), SubsetOrigin::labels);
}

ReferenceSubset subset_from_predictions(const PredictionRecord& pred) {
    pred.validate();
    std::vector<bool> selected;
    selected.reserve(pred.probs.size());
    for (double p : pred.probs) selected.push_back(p < pred.threshold);
    return finalize(std::move(selected), SubsetOrigin::external_predictions);
}

ReferenceSubset subset_from_mask(const std::vector<bool>& mask) {
    if (mask.empty()) throw Error(ErrorCode::invalid_argument, "reference mask is empty");
    return finalize(mask, SubsetOrigin::explicit_mask);
}

double otsu_threshold(const Image& image) {
    const auto [lo_it, hi_it] = std::minmax_element(image.data.begin(), image.data.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) return hi;

    constexpr int kBins = 256;
    std::array<double, kBins> hist{};
    const double width = (hi - lo) / kBins;
    for (float v : image.data) {
        const int b = std::min(kBins - 1, static_cast<int>((v - lo) / width));
        hist[b] += 1.0;
    }
    const double total = static_cast<double>(image.size());
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b) sum_all += b * hist[b];

    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_bin = 0;
    for (int b = 0; b < kBins; ++b) {
        w0 += hist[b];
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += b * hist[b];
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_bin = b;
        }
    }
    // Upper edge of the last bin assigned to the background class.
    return lo + (best_bin + 1) * width;
}

double baseline_probability(double score) {
    return 1.0 / (1.0 + std::exp(-kSquashSlope * (score - kSquashCenter)));
}

PredictionRecord baseline_classifier(const SliceSet& slice) {
    slice.validate();
    const Image low_mean = mean_image(slice.low_b);
    const double otsu = otsu_threshold(low_mean);
    std::vector<std::size_t> foreground;
    for (std::size_t i = 0; i < low_mean.size(); ++i)
        if (low_mean.data[i] > otsu) foreground.push_back(i);
    if (foreground.empty())
        throw Error(ErrorCode::degenerate_input, "low-b image has no foreground above its Otsu threshold");

    const RepetitionStack& high = slice.high_b;
    const int n_reps = high.size();
    std::vector<int> below(static_cast<std::size_t>(n_reps), 0);
    std::vector<double> column(static_cast<std::size_t>(n_reps));
    for (std::size_t i : foreground) {
        for (int n = 0; n < n_reps; ++n) column[n] = high.images[n].data[i];
        std::vector<double> sorted = column;
        const double cutoff = kDropoutCutoff * median_inplace(sorted);
        for (int n = 0; n < n_reps; ++n)
            if (column[n] < cutoff) ++below[n];
    }

    PredictionRecord out;
    out.threshold = 0.5;
    out.probs.reserve(static_cast<std::size_t>(n_reps));
    for (int n = 0; n < n_reps; ++n)
        out.probs.push_back(baseline_probability(static_cast<double>(below[n]) / static_cast<double>(foreground.size())));
    return out;
}

namespace io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + file.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::malformed_header, file.string() + ": " + e.what());
    }
}

void store(const json& j, const fs::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + file.string() + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::io, "failed writing '" + file.string() + "'");
}

void check_header(const json& j, const fs::path& file) {
    if (!j.is_object() || !j.contains("format_version") || !j.contains("n_reps"))
        throw Error(ErrorCode::malformed_header, file.string() + ": missing format_version or n_reps");
    if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kFormatVersion)
        throw Error(ErrorCode::unsupported_version, file.string() + ": unsupported format_version");
}

} // namespace

PredictionRecord read_predictions(const fs::path& file) {
    const json j = load(file);
    check_header(j, file);
    PredictionRecord pred;
    try {
        pred.probs = j.at("probs").get<std::vector<double>>();
        pred.threshold = j.at("threshold").get<double>();
        if (j.at("n_reps").get<int>() != static_cast<int>(pred.probs.size()))
            throw Error(ErrorCode::dimension_mismatch, file.string() + ": n_reps differs from the number of probs");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_header, file.string() + ": " + e.what());
    }
    pred.validate();
    return pred;
}

void write_predictions(const PredictionRecord& pred, const fs::path& file) {
    pred.validate();
    json j{{"format_version", kFormatVersion},
           {"n_reps", pred.probs.size()},
           {"probs", pred.probs},
           {"threshold", pred.threshold}};
    store(j, file);
}

std::vector<bool> read_mask(const fs::path& file) {
    const json j = load(file);
    check_header(j, file);
    std::vector<bool> mask;
    try {
        mask = j.at("selected").get<std::vector<bool>>();
        if (j.at("n_reps").get<int>() != static_cast<int>(mask.size()))
            throw Error(ErrorCode::dimension_mismatch, file.string() + ": n_reps differs from the mask length");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_header, file.string() + ": " + e.what());
    }
    return mask;
}

void write_mask(const std::vector<bool>& mask, const fs::path& file) {
    json j{{"format_version", kFormatVersion}, {"n_reps", mask.size()}, {"selected", mask}};
    store(j, file);
}

} // namespace io

} // namespace dwid
