#pragma once

#include "dwid/reference.hpp"
#include "dwid/weighting.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace dwid {

enum class Method { uniform, awa, cd, dlawa };

const char* to_string(Method method);
Method method_from_string(const std::string& s);

/// Where the reference subset of cd/dlawa comes from. Predictions and masks
/// carry their payload; labels and the baseline classifier read the slice.
struct ReferenceSource {
    SubsetOrigin origin = SubsetOrigin::labels;
    std::optional<PredictionRecord> predictions;
    std::optional<std::vector<bool>> mask;
};

struct MethodSpec {
    Method method = Method::dlawa;
    AwaParams awa;
    std::optional<ReferenceSource> reference;
};

struct MethodResult {
    Image image;
    WeightMaps weights;
    ReferenceSubset subset; ///< subset actually used (all repetitions for uniform/awa)
};

ReferenceSubset resolve_reference(const SliceSet& slice, const ReferenceSource& source);

MethodResult run_method(const SliceSet& slice, const MethodSpec& spec);

/// Mean of the clean-labelled high-b repetitions.
Image make_ground_truth(const SliceSet& slice);

/// Seeded uniform draw of n0 high-b repetitions without replacement; the
/// chosen repetitions keep their original order and labels.
SliceSet make_input_subset(const SliceSet& slice, int n0, std::uint64_t seed);

/// Copy of the slice keeping only the listed high-b repetitions (and labels).
SliceSet select_repetitions(const SliceSet& slice, const std::vector<int>& indices);

/// Indices drawn by make_input_subset for the same arguments.
std::vector<int> sample_indices(int n, int n0, std::uint64_t seed);

} // namespace dwid
