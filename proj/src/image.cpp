#include "dwid/image.hpp"

#include <algorithm>
#include <cmath>

namespace dwid {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::malformed_header: return "malformed header";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::unsupported_version: return "unsupported format version";
    case ErrorCode::missing_labels: return "missing labels";
    case ErrorCode::empty_subset: return "empty subset";
    case ErrorCode::degenerate_input: return "degenerate input";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "I/O error";
    }
    return "unknown error";
}

const char* to_string(Label label) {
    switch (label) {
    case Label::clean: return "clean";
    case Label::corrupt: return "corrupt";
    case Label::unknown: return "unknown";
    }
    return "unknown";
}

Label label_from_string(const std::string& s) {
    if (s == "clean") return Label::clean;
    if (s == "corrupt") return Label::corrupt;
    if (s == "unknown") return Label::unknown;
    throw Error(ErrorCode::malformed_header, "unrecognised label '" + s + "'");
}

bool Roi::fits(int rows, int cols) const noexcept {
    return row0 >= 0 && col0 >= 0 && height > 0 && width > 0 &&
           row0 + height <= rows && col0 + width <= cols;
}

void RepetitionStack::validate() const {
    if (images.empty())
        throw Error(ErrorCode::invalid_argument, "repetition stack is empty");
    const int r = images.front().rows;
    const int c = images.front().cols;
    if (r <= 0 || c <= 0)
        throw Error(ErrorCode::dimension_mismatch, "image dimensions must be positive");
    for (std::size_t n = 0; n < images.size(); ++n) {
        const Image& im = images[n];
        if (!im.same_shape(r, c))
            throw Error(ErrorCode::dimension_mismatch,
                        "repetition " + std::to_string(n) + " has a different shape");
        if (im.data.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(c))
            throw Error(ErrorCode::dimension_mismatch,
                        "repetition " + std::to_string(n) + " pixel count does not match rows*cols");
        if (!std::all_of(im.data.begin(), im.data.end(), [](float v) { return std::isfinite(v); }))
            throw Error(ErrorCode::non_finite,
                        "repetition " + std::to_string(n) + " contains NaN or Inf");
    }
    if (!std::isfinite(b_value) || b_value < 0.0)
        throw Error(ErrorCode::invalid_argument, "b-value must be finite and non-negative");
    if (labels && labels->size() != images.size())
        throw Error(ErrorCode::dimension_mismatch, "label count does not match repetition count");
}

void SliceSet::validate() const {
    low_b.validate();
    high_b.validate();
    if (low_b.rows() != high_b.rows() || low_b.cols() != high_b.cols())
        throw Error(ErrorCode::dimension_mismatch, "low-b and high-b stacks differ in shape");
    if (!(low_b.b_value < high_b.b_value))
        throw Error(ErrorCode::invalid_argument, "low b-value must be smaller than high b-value");
    if (roi && !roi->fits(high_b.rows(), high_b.cols()))
        throw Error(ErrorCode::invalid_argument, "ROI lies outside the image");
}

Image mean_image(const RepetitionStack& stack) {
    stack.validate();
    const Image& first = stack.images.front();
    std::vector<double> acc(first.size(), 0.0);
    for (const Image& im : stack.images)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += im.data[i];
    Image out(first.rows, first.cols);
    const double n = static_cast<double>(stack.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = static_cast<float>(acc[i] / n);
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::invalid_argument, "percentile of an empty set");
    q = std::clamp(q, 0.0, 100.0);
    const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(values.size())));
    const std::size_t idx = rank == 0 ? 0 : rank - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
    return values[idx];
}

double median_inplace(std::span<double> values) {
    if (values.empty()) throw Error(ErrorCode::empty_subset, "median of an empty set");
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace dwid
