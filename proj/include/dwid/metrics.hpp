#pragma once

#include "dwid/image.hpp"

#include <optional>
#include <string>

namespace dwid::metrics {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0; ///< predict corrupt when prob >= threshold; +inf for the origin
};

struct RocCurve {
    std::vector<RocPoint> points; ///< from (0,0) to (1,1), thresholds decreasing
    int positives = 0;
    int negatives = 0;
};

/// ROC over all distinct probabilities; positive class is `corrupt`.
RocCurve roc_curve(const std::vector<double>& probs, const std::vector<Label>& labels);

/// Trapezoidal area under the curve. Throws when either class is absent.
double auc(const RocCurve& roc);

/// Threshold maximising TPR - FPR over the finite thresholds; ties go to the
/// higher threshold.
double select_threshold(const RocCurve& roc);

struct ClassificationScores {
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
};

ClassificationScores classification_scores(const std::vector<bool>& predicted_corrupt, const std::vector<Label>& labels);

struct Record {
    double dropout_ratio = 0.0; ///< percent
    std::string method;
    double value = 0.0;
};

struct BinRow {
    double bin_low = 0.0;
    double bin_high = 0.0;
    std::string method;
    double mean = 0.0;
    double std = 0.0; ///< population standard deviation
    int n = 0;
};

/// 10 %-wide bins, left-closed, the last bin [90, 100] closed. Rows are
/// ordered by bin, then by first appearance of the method.
std::vector<BinRow> binned_analysis(const std::vector<Record>& records);

int bin_index(double ratio_percent);

std::string bins_to_csv(const std::vector<BinRow>& rows);
std::string roc_to_csv(const RocCurve& roc);

} // namespace dwid::metrics
