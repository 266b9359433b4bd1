#include "dwid/weighting.hpp"

#include <algorithm>
#include <cmath>

namespace dwid {

namespace {

// Normalisation falls back to uniform weights when the unnormalised weights
// at a pixel sum to less than this.
constexpr double kWeightSumFloor = 1e-12;

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Replicate-padded copy of one repetition, shifted by `offset` to keep the
// squared sums well conditioned.
std::vector<double> padded(std::span<const float> image, int rows, int cols, int half, double offset) {
    const int pr = rows + 2 * half;
    const int pc = cols + 2 * half;
    std::vector<double> out(static_cast<std::size_t>(pr) * pc);
    for (int r = 0; r < pr; ++r) {
        const int sr = std::clamp(r - half, 0, rows - 1);
        for (int c = 0; c < pc; ++c) {
            const int sc = std::clamp(c - half, 0, cols - 1);
            out[static_cast<std::size_t>(r) * pc + c] = static_cast<double>(image[static_cast<std::size_t>(sr) * cols + sc]) - offset;
        }
    }
    return out;
}

} // namespace

void AwaParams::validate() const {
    if (patch < 1 || patch % 2 == 0)
        throw Error(ErrorCode::invalid_argument, "patch size must be an odd positive integer");
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw Error(ErrorCode::invalid_argument, "nu must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
}

WeightMaps WeightMaps::uniform(int n, int rows, int cols) {
    WeightMaps out;
    out.w = Volume<double>(n, rows, cols, 1.0 / static_cast<double>(n));
    return out;
}

PatchStats patch_stats(const RepetitionStack& stack, int patch) {
    stack.validate();
    const int rows = stack.rows();
    const int cols = stack.cols();
    if (patch < 1 || patch % 2 == 0)
        throw Error(ErrorCode::invalid_argument, "patch size must be odd and positive");
    if (patch > std::min(rows, cols))
        throw Error(ErrorCode::invalid_argument, "patch size exceeds the image dimensions");

    const int n_reps = stack.size();
    const int half = patch / 2;
    const int pc = cols + 2 * half;
    const double area = static_cast<double>(patch) * patch;

    PatchStats out{Volume<double>(n_reps, rows, cols), Volume<double>(n_reps, rows, cols)};
    // Two passes per window; flat windows come out with zero spread.
    std::vector<double> window(static_cast<std::size_t>(patch) * patch);

    for (int n = 0; n < n_reps; ++n) {
        const Image& im = stack.images[n];
        double offset = 0.0;
        for (float v : im.data) offset += v;
        offset /= static_cast<double>(im.size());
        const std::vector<double> p = padded(im.data, rows, cols, half, offset);

        auto mu = out.mu.rep(n);
        auto sigma = out.sigma.rep(n);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                std::size_t k = 0;
                double s = 0.0;
                for (int dr = 0; dr < patch; ++dr) {
                    const double* row = p.data() + static_cast<std::size_t>(r + dr) * pc + c;
                    for (int dc = 0; dc < patch; ++dc) {
                        window[k++] = row[dc];
                        s += row[dc];
                    }
                }
                const double mean = s / area;
                double ss = 0.0;
                for (double v : window) ss += (v - mean) * (v - mean);
                const std::size_t i = static_cast<std::size_t>(r) * cols + c;
                mu[i] = mean + offset;
                sigma[i] = std::sqrt(ss / area);
            }
        }
    }
    return out;
}

ReferenceFields reference_fields(const PatchStats& stats, const ReferenceSubset& subset) {
    if (subset.size() != stats.mu.reps)
        throw Error(ErrorCode::dimension_mismatch, "reference subset length differs from repetition count");
    const std::vector<int> chosen = subset.indices();
    if (chosen.empty()) throw Error(ErrorCode::empty_subset, "reference subset selects no repetition");

    ReferenceFields out{Map(stats.mu.rows, stats.mu.cols), Map(stats.mu.rows, stats.mu.cols)};
    std::vector<double> buf(chosen.size());
    for (std::size_t i = 0; i < stats.mu.pixels(); ++i) {
        for (std::size_t k = 0; k < chosen.size(); ++k) buf[k] = stats.mu.at(chosen[k], i);
        out.m.data[i] = median_inplace(buf);
        for (std::size_t k = 0; k < chosen.size(); ++k) buf[k] = stats.sigma.at(chosen[k], i);
        out.s.data[i] = median_inplace(buf);
    }
    return out;
}

double weight_function(double d, double s, const AwaParams& params) {
    // With u = |d| / |nu s| the window is logistic(lambda (u + 1)) - logistic(lambda (u - 1)).
    // Rewritten with logistic(x) = 1 - logistic(-x) both terms are small for
    // large u, so the difference keeps its precision. Using |d| makes f even.
    const double u = std::abs(d) / std::abs(params.nu * s);
    const double lam = params.lambda;
    return logistic(lam * (1.0 - u)) - logistic(-lam * (1.0 + u));
}

double tolerance_floor(const RepetitionStack& stack) {
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(stack.size()) * stack.images.front().size());
    for (const Image& im : stack.images) pooled.insert(pooled.end(), im.data.begin(), im.data.end());
    return 1e-12 * std::abs(percentile(std::move(pooled), 98.0));
}

WeightMaps awa_weights(const RepetitionStack& stack, const ReferenceSubset& subset, const AwaParams& params) {
    params.validate();
    const PatchStats stats = patch_stats(stack, params.patch);
    const ReferenceFields ref = reference_fields(stats, subset);
    const double eps = tolerance_floor(stack);

    const int n_reps = stack.size();
    WeightMaps out;
    out.w = Volume<double>(n_reps, stack.rows(), stack.cols());
    const double uniform = 1.0 / static_cast<double>(n_reps);
    std::vector<double> f(static_cast<std::size_t>(n_reps));

    for (std::size_t i = 0; i < stats.mu.pixels(); ++i) {
        const double s = ref.s.data[i];
        double total = 0.0;
        if (s > eps) {
            for (int n = 0; n < n_reps; ++n) {
                f[n] = weight_function(stats.mu.at(n, i) - ref.m.data[i], s, params);
                total += f[n];
            }
        }
        if (s <= eps || total < kWeightSumFloor) {
            for (int n = 0; n < n_reps; ++n) out.w.at(n, i) = uniform;
            continue;
        }
        for (int n = 0; n < n_reps; ++n) out.w.at(n, i) = f[n] / total;
    }
    return out;
}

Image weighted_average(const RepetitionStack& stack, const WeightMaps& weights) {
    stack.validate();
    const Volume<double>& w = weights.w;
    if (w.reps != stack.size() || w.rows != stack.rows() || w.cols != stack.cols())
        throw Error(ErrorCode::dimension_mismatch, "weight maps do not match the repetition stack");
    Image out(stack.rows(), stack.cols());
    for (std::size_t i = 0; i < w.pixels(); ++i) {
        double acc = 0.0;
        for (int n = 0; n < w.reps; ++n) acc += w.at(n, i) * static_cast<double>(stack.images[n].data[i]);
        out.data[i] = static_cast<float>(acc);
    }
    return out;
}

} // namespace dwid
