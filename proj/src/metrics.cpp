#include "dwid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace dwid::metrics {

RocCurve roc_curve(const std::vector<double>& probs, const std::vector<Label>& labels) {
    if (probs.empty()) throw Error(ErrorCode::invalid_argument, "ROC of an empty set");
    if (probs.size() != labels.size()) throw Error(ErrorCode::dimension_mismatch, "probs and labels differ in length");

    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "probabilities must lie in [0, 1]");

    RocCurve roc;
    for (Label l : labels) {
        if (l == Label::unknown) throw Error(ErrorCode::missing_labels, "ROC needs clean/corrupt labels only");
        (l == Label::corrupt ? roc.positives : roc.negatives) += 1;
    }

    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    const double pos = roc.positives > 0 ? roc.positives : 1;
    const double neg = roc.negatives > 0 ? roc.negatives : 1;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    int tp = 0, fp = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double t = probs[order[k]];
        while (k < order.size() && probs[order[k]] == t) {
            (labels[order[k]] == Label::corrupt ? tp : fp) += 1;
            ++k;
        }
        roc.points.push_back({fp / neg, tp / pos, t});
    }
    return roc;
}

double auc(const RocCurve& roc) {
    if (roc.positives == 0 || roc.negatives == 0)
        throw Error(ErrorCode::degenerate_input, "AUC is undefined when only one class is present");
    double area = 0.0;
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
        const auto& a = roc.points[k - 1];
        const auto& b = roc.points[k];
        area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    return area;
}

double select_threshold(const RocCurve& roc) {
    double best = -std::numeric_limits<double>::infinity();
    double threshold = std::numeric_limits<double>::quiet_NaN();
    // Thresholds decrease along the curve, so a strict improvement keeps the
    // higher threshold on ties.
    for (const auto& p : roc.points) {
        if (!std::isfinite(p.threshold)) continue;
        const double j = p.tpr - p.fpr;
        if (j > best) {
            best = j;
            threshold = p.threshold;
        }
    }
    if (std::isnan(threshold)) throw Error(ErrorCode::invalid_argument, "ROC curve has no finite threshold");
    return threshold;
}

ClassificationScores classification_scores(const std::vector<bool>& predicted_corrupt, const std::vector<Label>& labels) {
    if (predicted_corrupt.size() != labels.size())
        throw Error(ErrorCode::dimension_mismatch, "predictions and labels differ in length");
    if (labels.empty()) throw Error(ErrorCode::invalid_argument, "no samples to score");
    int tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == Label::unknown) throw Error(ErrorCode::missing_labels, "scores need clean/corrupt labels only");
        const bool truth = labels[k] == Label::corrupt;
        if (predicted_corrupt[k]) {
            (truth ? tp : fp) += 1;
        } else {
            (truth ? fn : tn) += 1;
        }
    }
    const auto ratio = [](int num, int den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / den;
    };
    ClassificationScores s;
    s.accuracy = static_cast<double>(tp + tn) / static_cast<double>(labels.size());
    s.sensitivity = ratio(tp, tp + fn);
    s.specificity = ratio(tn, tn + fp);
    s.precision = ratio(tp, tp + fp);
    return s;
}

int bin_index(double ratio_percent) {
    if (!(ratio_percent >= 0.0 && ratio_percent <= 100.0))
        throw Error(ErrorCode::invalid_argument, "dropout ratio outside [0, 100]");
    return std::min(9, static_cast<int>(std::floor(ratio_percent / 10.0)));
}

std::vector<BinRow> binned_analysis(const std::vector<Record>& records) {
    std::vector<std::string> methods;
    for (const auto& r : records)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);

    // (bin, method order) -> values
    std::map<std::pair<int, std::size_t>, std::vector<double>> groups;
    for (const auto& r : records) {
        const auto m = static_cast<std::size_t>(std::find(methods.begin(), methods.end(), r.method) - methods.begin());
        groups[{bin_index(r.dropout_ratio), m}].push_back(r.value);
    }

    std::vector<BinRow> rows;
    for (const auto& [key, values] : groups) {
        BinRow row;
        row.bin_low = 10.0 * key.first;
        row.bin_high = row.bin_low + 10.0;
        row.method = methods[key.second];
        row.n = static_cast<int>(values.size());
        row.mean = std::accumulate(values.begin(), values.end(), 0.0) / row.n;
        double ss = 0.0;
        for (double v : values) ss += (v - row.mean) * (v - row.mean);
        row.std = std::sqrt(ss / row.n);
        rows.push_back(row);
    }
    return rows;
}

std::string bins_to_csv(const std::vector<BinRow>& rows) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "bin_low,bin_high,method,mean,std,n\n";
    for (const auto& r : rows)
        os << r.bin_low << ',' << r.bin_high << ',' << r.method << ',' << r.mean << ',' << r.std << ',' << r.n << '\n';
    return os.str();
}

std::string roc_to_csv(const RocCurve& roc) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "fpr,tpr,threshold\n";
    for (const auto& p : roc.points) {
        os << p.fpr << ',' << p.tpr << ',';
        if (std::isfinite(p.threshold)) {
            os << p.threshold;
        } else {
            os << "inf";
        }
        os << '\n';
    }
    return os.str();
}

} // namespace dwid::metrics
