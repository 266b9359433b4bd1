#pragma once

#include "dwid/metrics.hpp"
#include "dwid/pipeline.hpp"
#include "dwid/quant.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace dwid {

struct SliceInput {
    std::string name;
    SliceSet slice;
    std::optional<PredictionRecord> predictions; ///< over all high-b repetitions of the slice
};

struct EvaluationOptions {
    std::vector<Method> methods{Method::uniform, Method::awa, Method::cd, Method::dlawa};
    AwaParams awa;
    SubsetOrigin reference = SubsetOrigin::labels; ///< source for cd/dlawa
    int runs = 15;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// One method applied to one random input subset of one slice.
struct RunRecord {
    std::string slice;
    int run = 0;
    int n_total = 0;      ///< high-b repetitions in the slice
    int n_input = 0;      ///< size of the input subset (= clean count of the slice)
    int clean_in_input = 0;
    double dropout_ratio = 0.0; ///< percent, of the input subset
    std::string method;
    double roi_adc = 0.0;
    double truth_adc = 0.0;     ///< ROI ADC of the ground-truth average
    double adc_bias = 0.0;      ///< (roi_adc - truth_adc) / truth_adc
    double mean_noise = 0.0;    ///< mean of the relative noise map over the image
    double roi_rmse = 0.0;      ///< image RMSE against the ground truth inside the ROI
};

struct EvaluationReport {
    std::vector<RunRecord> records;
    std::vector<std::string> skipped; ///< slices without clean repetitions
    std::vector<metrics::BinRow> adc_bins;
    std::vector<metrics::BinRow> bias_bins;
    std::vector<metrics::BinRow> noise_bins;
};

/// Region used for ROI statistics: the slice ROI, or the whole image.
Roi effective_roi(const SliceSet& slice);

/// Ground truth from the clean repetitions, input = random subset of the same
/// size per run (run seeds derive from options.seed), every method on the
/// same input.
std::vector<RunRecord> evaluate_slice(const SliceInput& input, const EvaluationOptions& options);

/// evaluate_slice over all inputs (optionally in parallel) plus binned tables.
EvaluationReport evaluate(const std::vector<SliceInput>& inputs, const EvaluationOptions& options);

std::string records_to_csv(const std::vector<RunRecord>& records);

struct SweepEntry {
    double lambda = 0.0;
    MethodResult result;
    AdcMap adc;
    Map noise;
    double mean_noise = 0.0;
    double roi_adc = 0.0;
    std::optional<double> truth_adc;
    std::optional<double> adc_bias; ///< relative; present when labels allow a ground truth
};

/// DLAWA over the whole slice for each lambda, other parameters fixed.
std::vector<SweepEntry> sweep_lambda(const SliceSet& slice, const std::vector<double>& lambdas, const AwaParams& base,
                                     const ReferenceSource& source);

double roi_rmse(const Image& a, const Image& b, const Roi& roi);

} // namespace dwid
