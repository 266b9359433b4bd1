#include "dwid/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

namespace dwid {

namespace {

std::uint64_t run_seed(std::uint64_t seed, int run) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(run + 1));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

int clean_count(const RepetitionStack& stack) {
    int n = 0;
    for (Label l : *stack.labels) n += l == Label::clean ? 1 : 0;
    return n;
}

ReferenceSource source_for(SubsetOrigin origin, const std::optional<PredictionRecord>& predictions,
                           const std::vector<int>& indices) {
    ReferenceSource src;
    src.origin = origin;
    if (origin == SubsetOrigin::external_predictions) {
        if (!predictions) throw Error(ErrorCode::invalid_argument, "prediction-based reference needs predictions for every slice");
        PredictionRecord sub;
        sub.threshold = predictions->threshold;
        for (int k : indices) sub.probs.push_back(predictions->probs.at(static_cast<std::size_t>(k)));
        src.predictions = std::move(sub);
    }
    return src;
}

} // namespace

Roi effective_roi(const SliceSet& slice) {
    if (slice.roi) return *slice.roi;
    return Roi{0, 0, slice.high_b.rows(), slice.high_b.cols()};
}

double roi_rmse(const Image& a, const Image& b, const Roi& roi) {
    if (!a.same_shape(b)) throw Error(ErrorCode::dimension_mismatch, "images differ in shape");
    if (!roi.fits(a.rows, a.cols)) throw Error(ErrorCode::invalid_argument, "ROI lies outside the image");
    double ss = 0.0;
    for (int r = roi.row0; r < roi.row0 + roi.height; ++r)
        for (int c = roi.col0; c < roi.col0 + roi.width; ++c) {
            const double d = static_cast<double>(a(r, c)) - static_cast<double>(b(r, c));
            ss += d * d;
        }
    return std::sqrt(ss / (static_cast<double>(roi.height) * roi.width));
}

std::vector<RunRecord> evaluate_slice(const SliceInput& input, const EvaluationOptions& options) {
    const SliceSet& slice = input.slice;
    slice.validate();
    if (!slice.high_b.labels) throw Error(ErrorCode::missing_labels, "slice '" + input.name + "' is unlabelled");
    if (input.predictions && static_cast<int>(input.predictions->probs.size()) != slice.high_b.size())
        throw Error(ErrorCode::dimension_mismatch, "slice '" + input.name + "': prediction count differs from repetitions");

    const Image truth = make_ground_truth(slice);
    const Image low = mean_image(slice.low_b);
    const Roi roi = effective_roi(slice);
    const double b_low = slice.low_b.b_value;
    const double b_high = slice.high_b.b_value;
    const double truth_adc = roi_mean(adc_map(low, truth, b_low, b_high), roi);
    const int n_total = slice.high_b.size();
    const int n0 = clean_count(slice.high_b);

    std::vector<RunRecord> out;
    for (int run = 0; run < options.runs; ++run) {
        const std::vector<int> idx = sample_indices(n_total, n0, run_seed(options.seed, run));
        const SliceSet sub = select_repetitions(slice, idx);
        const int clean_in = clean_count(sub.high_b);
        const double ratio = dropout_ratio(clean_in, n0);
        for (Method m : options.methods) {
            MethodSpec spec{m, options.awa, std::nullopt};
            if (m == Method::cd || m == Method::dlawa) spec.reference = source_for(options.reference, input.predictions, idx);
            const MethodResult res = run_method(sub, spec);
            RunRecord rec;
            rec.slice = input.name;
            rec.run = run;
            rec.n_total = n_total;
            rec.n_input = n0;
            rec.clean_in_input = clean_in;
            rec.dropout_ratio = ratio;
            rec.method = to_string(m);
            rec.roi_adc = roi_mean(adc_map(low, res.image, b_low, b_high), roi);
            rec.truth_adc = truth_adc;
            rec.adc_bias = (rec.roi_adc - truth_adc) / truth_adc;
            rec.mean_noise = mean_value(relative_noise_map(res.weights));
            rec.roi_rmse = roi_rmse(res.image, truth, roi);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

EvaluationReport evaluate(const std::vector<SliceInput>& inputs, const EvaluationOptions& options) {
    if (options.runs < 1) throw Error(ErrorCode::invalid_argument, "runs must be at least 1");
    if (options.methods.empty()) throw Error(ErrorCode::invalid_argument, "no methods selected");

    std::vector<std::vector<RunRecord>> per_slice(inputs.size());
    std::vector<std::exception_ptr> errors(inputs.size());
    std::vector<char> skipped(inputs.size(), 0);
    std::atomic<std::size_t> next{0};

    const auto worker = [&]() {
        for (std::size_t k = next++; k < inputs.size(); k = next++) {
            const auto& labels = inputs[k].slice.high_b.labels;
            if (labels && std::none_of(labels->begin(), labels->end(), [](Label l) { return l == Label::clean; })) {
                skipped[k] = 1;
                continue;
            }
            try {
                per_slice[k] = evaluate_slice(inputs[k], options);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(inputs.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvaluationReport report;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (errors[k]) std::rethrow_exception(errors[k]);
        if (skipped[k]) {
            report.skipped.push_back(inputs[k].name);
            continue;
        }
        report.records.insert(report.records.end(), per_slice[k].begin(), per_slice[k].end());
    }

    std::vector<metrics::Record> adc, bias, noise;
    for (const auto& r : report.records) {
        adc.push_back({r.dropout_ratio, r.method, r.roi_adc});
        bias.push_back({r.dropout_ratio, r.method, r.adc_bias});
        noise.push_back({r.dropout_ratio, r.method, r.mean_noise});
    }
    report.adc_bins = metrics::binned_analysis(adc);
    report.bias_bins = metrics::binned_analysis(bias);
    report.noise_bins = metrics::binned_analysis(noise);
    return report;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "slice,run,n_total,n_input,clean_in_input,dropout_ratio,method,roi_adc,truth_adc,adc_bias,mean_noise,roi_rmse\n";
    for (const auto& r : records)
        os << r.slice << ',' << r.run << ',' << r.n_total << ',' << r.n_input << ',' << r.clean_in_input << ','
           << r.dropout_ratio << ',' << r.method << ',' << r.roi_adc << ',' << r.truth_adc << ',' << r.adc_bias << ','
           << r.mean_noise << ',' << r.roi_rmse << '\n';
    return os.str();
}

std::vector<SweepEntry> sweep_lambda(const SliceSet& slice, const std::vector<double>& lambdas, const AwaParams& base,
                                     const ReferenceSource& source) {
    if (lambdas.empty()) throw Error(ErrorCode::invalid_argument, "lambda sweep needs at least one value");
    slice.validate();
    const Image low = mean_image(slice.low_b);
    const Roi roi = effective_roi(slice);
    std::optional<double> truth_adc;
    if (slice.high_b.labels && clean_count(slice.high_b) > 0)
        truth_adc = roi_mean(adc_map(low, make_ground_truth(slice), slice.low_b.b_value, slice.high_b.b_value), roi);

    std::vector<SweepEntry> out;
    for (double lambda : lambdas) {
        MethodSpec spec{Method::dlawa, base, source};
        spec.awa.lambda = lambda;
        SweepEntry e;
        e.lambda = lambda;
        e.result = run_method(slice, spec);
        e.adc = adc_map(low, e.result.image, slice.low_b.b_value, slice.high_b.b_value);
        e.noise = relative_noise_map(e.result.weights);
        e.mean_noise = mean_value(e.noise);
        e.roi_adc = roi_mean(e.adc, roi);
        e.truth_adc = truth_adc;
        if (truth_adc) e.adc_bias = (e.roi_adc - *truth_adc) / *truth_adc;
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace dwid
