#pragma once

#include "dwid/image.hpp"
#include "dwid/reference_subset.hpp"

namespace dwid {

/// Hyperparameters of the adaptive weighting. Defaults: 5x5 patches,
/// tolerance of one patch standard deviation, steepness 5.
struct AwaParams {
    int patch = 5;
    double nu = 1.0;
    double lambda = 5.0;

    void validate() const;
};

/// Local mean and population standard deviation of every P x P neighbourhood,
/// per repetition.
struct PatchStats {
    Volume<double> mu;
    Volume<double> sigma;
};

/// Per-pixel reference (median of patch means) and tolerance (median of
/// patch standard deviations) over the reference subset.
struct ReferenceFields {
    Map m;
    Map s;
};

/// Normalised weights; for each pixel the values over repetitions sum to 1.
struct WeightMaps {
    Volume<double> w;

    int reps() const noexcept { return w.reps; }
    static WeightMaps uniform(int n, int rows, int cols);
};

/// Patch mean/std with replicate edge padding.
PatchStats patch_stats(const RepetitionStack& stack, int patch);

ReferenceFields reference_fields(const PatchStats& stats, const ReferenceSubset& subset);

/// Smooth rectangular window f(d) = g(d; s) - g(d; -s), with
/// g(d; s) = 1 / (1 + exp(-(lambda / |nu s|) (d + nu s))). Requires s > 0.
double weight_function(double d, double s, const AwaParams& params);

/// Floor below which a tolerance is treated as zero: 1e-12 times the 98th
/// percentile intensity of the stack.
double tolerance_floor(const RepetitionStack& stack);

WeightMaps awa_weights(const RepetitionStack& stack, const ReferenceSubset& subset, const AwaParams& params);

Image weighted_average(const RepetitionStack& stack, const WeightMaps& weights);

} // namespace dwid
