#pragma once

#include "dwid/image.hpp"
#include "dwid/reference_subset.hpp"

#include <filesystem>

namespace dwid {

/// Per-repetition probability of being corrupted plus the operating threshold.
struct PredictionRecord {
    std::vector<double> probs;
    double threshold = 0.5;

    void validate() const;
};

ReferenceSubset subset_from_labels(const RepetitionStack& stack);

/// Repetitions with prob < threshold are treated as clean.
ReferenceSubset subset_from_predictions(const PredictionRecord& pred);

ReferenceSubset subset_from_mask(const std::vector<bool>& mask);

/// Otsu threshold of the pixel histogram (256 bins spanning [min, max]).
double otsu_threshold(const Image& image);

/// Statistical stand-in for the learned classifier. For each high-b
/// repetition the score is the fraction of foreground pixels (low-b mean above
/// its Otsu threshold) whose value is below half the pixel-wise median over
/// repetitions; probabilities are a logistic squash of the score.
PredictionRecord baseline_classifier(const SliceSet& slice);

/// Score-to-probability squash used by the baseline classifier.
double baseline_probability(double score);

namespace io {

PredictionRecord read_predictions(const std::filesystem::path& file);
void write_predictions(const PredictionRecord& pred, const std::filesystem::path& file);

/// `{"format_version":1, "n_reps":N, "selected":[true, false, ...]}`
std::vector<bool> read_mask(const std::filesystem::path& file);
void write_mask(const std::vector<bool>& mask, const std::filesystem::path& file);

} // namespace io

} // namespace dwid
