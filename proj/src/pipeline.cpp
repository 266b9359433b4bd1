#include "dwid/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace dwid {

const char* to_string(Method method) {
    switch (method) {
    case Method::uniform: return "uniform";
    case Method::awa: return "awa";
    case Method::cd: return "cd";
    case Method::dlawa: return "dlawa";
    }
    return "uniform";
}

Method method_from_string(const std::string& s) {
    if (s == "uniform") return Method::uniform;
    if (s == "awa") return Method::awa;
    if (s == "cd") return Method::cd;
    if (s == "dlawa") return Method::dlawa;
    throw Error(ErrorCode::invalid_argument, "unknown method '" + s + "' (expected uniform, awa, cd or dlawa)");
}

ReferenceSubset resolve_reference(const SliceSet& slice, const ReferenceSource& source) {
    const int n = slice.high_b.size();
    ReferenceSubset subset;
    switch (source.origin) {
    case SubsetOrigin::labels:
        subset = subset_from_labels(slice.high_b);
        break;
    case SubsetOrigin::external_predictions:
        if (!source.predictions)
            throw Error(ErrorCode::invalid_argument, "external predictions requested but none supplied");
        if (static_cast<int>(source.predictions->probs.size()) != n)
            throw Error(ErrorCode::dimension_mismatch, "prediction count differs from the number of high-b repetitions");
        subset = subset_from_predictions(*source.predictions);
        break;
    case SubsetOrigin::baseline_classifier:
        subset = subset_from_predictions(baseline_classifier(slice));
        subset.origin = SubsetOrigin::baseline_classifier;
        break;
    case SubsetOrigin::explicit_mask:
        if (!source.mask) throw Error(ErrorCode::invalid_argument, "explicit mask requested but none supplied");
        if (static_cast<int>(source.mask->size()) != n)
            throw Error(ErrorCode::dimension_mismatch, "mask length differs from the number of high-b repetitions");
        subset = subset_from_mask(*source.mask);
        break;
    case SubsetOrigin::all:
        subset = ReferenceSubset::all_of(n);
        break;
    }
    return subset;
}

MethodResult run_method(const SliceSet& slice, const MethodSpec& spec) {
    slice.validate();
    const RepetitionStack& stack = slice.high_b;
    const int n = stack.size();
    const int rows = stack.rows();
    const int cols = stack.cols();

    MethodResult out;
    switch (spec.method) {
    case Method::uniform:
        out.subset = ReferenceSubset::all_of(n);
        out.weights = WeightMaps::uniform(n, rows, cols);
        break;
    case Method::awa:
        out.subset = ReferenceSubset::all_of(n);
        out.weights = awa_weights(stack, out.subset, spec.awa);
        break;
    case Method::dlawa:
    case Method::cd: {
        if (!spec.reference)
            throw Error(ErrorCode::invalid_argument,
                        std::string(to_string(spec.method)) + " needs a reference source (labels, predictions, baseline or mask)");
        out.subset = resolve_reference(slice, *spec.reference);
        if (spec.method == Method::dlawa) {
            out.weights = awa_weights(stack, out.subset, spec.awa);
        } else {
            out.weights.w = Volume<double>(n, rows, cols);
            const double share = 1.0 / static_cast<double>(out.subset.count());
            for (int k : out.subset.indices()) std::fill(out.weights.w.rep(k).begin(), out.weights.w.rep(k).end(), share);
        }
        break;
    }
    }
    out.image = weighted_average(stack, out.weights);
    return out;
}

Image make_ground_truth(const SliceSet& slice) {
    const RepetitionStack& high = slice.high_b;
    if (!high.labels) throw Error(ErrorCode::missing_labels, "ground truth needs labelled high-b repetitions");
    RepetitionStack clean;
    clean.b_value = high.b_value;
    for (int n = 0; n < high.size(); ++n)
        if ((*high.labels)[n] == Label::clean) clean.images.push_back(high.images[n]);
    if (clean.images.empty()) throw Error(ErrorCode::empty_subset, "no clean repetitions to build the ground truth from");
    return mean_image(clean);
}

std::vector<int> sample_indices(int n, int n0, std::uint64_t seed) {
    if (n0 < 1 || n0 > n)
        throw Error(ErrorCode::invalid_argument,
                    "subset size " + std::to_string(n0) + " outside [1, " + std::to_string(n) + "]");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates; the first n0 entries form the sample.
    std::mt19937_64 rng(seed);
    for (int k = 0; k < n0; ++k) {
        const auto span = static_cast<std::uint64_t>(n - k);
        const int j = k + static_cast<int>(rng() % span);
        std::swap(idx[k], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(n0));
    std::sort(idx.begin(), idx.end());
    return idx;
}

SliceSet make_input_subset(const SliceSet& slice, int n0, std::uint64_t seed) {
    slice.validate();
    return select_repetitions(slice, sample_indices(slice.high_b.size(), n0, seed));
}

SliceSet select_repetitions(const SliceSet& slice, const std::vector<int>& idx) {
    SliceSet out;
    out.low_b = slice.low_b;
    out.roi = slice.roi;
    out.high_b.b_value = slice.high_b.b_value;
    if (slice.high_b.labels) out.high_b.labels.emplace();
    for (int k : idx) {
        if (k < 0 || k >= slice.high_b.size()) throw Error(ErrorCode::invalid_argument, "repetition index out of range");
        out.high_b.images.push_back(slice.high_b.images[k]);
        if (slice.high_b.labels) out.high_b.labels->push_back((*slice.high_b.labels)[k]);
    }
    return out;
}

} // namespace dwid
