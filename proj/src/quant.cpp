#include "dwid/quant.hpp"

#include <cmath>

namespace dwid {

AdcMap adc_map(const Image& low, const Image& high, double b_low, double b_high) {
    if (!low.same_shape(high)) throw Error(ErrorCode::dimension_mismatch, "low-b and high-b images differ in shape");
    if (!(b_high > b_low)) throw Error(ErrorCode::invalid_argument, "b_high must exceed b_low");
    const double db = b_high - b_low;
    AdcMap out{Map(low.rows, low.cols), Grid<unsigned char>(low.rows, low.cols, 0)};
    for (std::size_t i = 0; i < low.size(); ++i) {
        const double lo = low.data[i];
        const double hi = high.data[i];
        if (lo > 0.0 && hi > 0.0) {
            out.values.data[i] = std::log(lo / hi) / db;
            out.valid.data[i] = 1;
        }
    }
    return out;
}

double dropout_ratio(int n0, int n) {
    if (n < 1 || n0 < 0 || n0 > n)
        throw Error(ErrorCode::invalid_argument, "dropout ratio needs 0 <= n0 <= n and n >= 1");
    return 100.0 * static_cast<double>(n - n0) / static_cast<double>(n);
}

Map relative_noise_map(const WeightMaps& weights) {
    const Volume<double>& w = weights.w;
    Map out(w.rows, w.cols);
    const double n = static_cast<double>(w.reps);
    for (std::size_t i = 0; i < w.pixels(); ++i) {
        // sqrt(sum (N w)^2 / N): uniform maps give N * (1/N) = 1 before squaring.
        double sq = 0.0;
        for (int k = 0; k < w.reps; ++k) {
            const double nw = n * w.at(k, i);
            sq += nw * nw;
        }
        out.data[i] = std::sqrt(sq / n);
    }
    return out;
}

double cd_ideal_noise(double ratio_percent) {
    if (!(ratio_percent >= 0.0 && ratio_percent < 100.0))
        throw Error(ErrorCode::invalid_argument, "ideal C&D noise is defined for ratios in [0, 100)");
    return std::sqrt(100.0 / (100.0 - ratio_percent));
}

namespace {

template <typename Grid2D, typename Valid>
double roi_mean_impl(const Grid2D& g, const Roi& roi, Valid valid) {
    if (!roi.fits(g.rows, g.cols)) throw Error(ErrorCode::invalid_argument, "ROI lies outside the map");
    double acc = 0.0;
    std::size_t count = 0;
    for (int r = roi.row0; r < roi.row0 + roi.height; ++r)
        for (int c = roi.col0; c < roi.col0 + roi.width; ++c)
            if (valid(r, c)) {
                acc += static_cast<double>(g(r, c));
                ++count;
            }
    if (count == 0) throw Error(ErrorCode::empty_subset, "ROI contains no valid pixel");
    return acc / static_cast<double>(count);
}

} // namespace

double roi_mean(const AdcMap& map, const Roi& roi) {
    return roi_mean_impl(map.values, roi, [&](int r, int c) { return map.valid(r, c) != 0; });
}

double roi_mean(const Image& image, const Roi& roi) {
    return roi_mean_impl(image, roi, [](int, int) { return true; });
}

double roi_mean(const Map& map, const Roi& roi) {
    return roi_mean_impl(map, roi, [](int, int) { return true; });
}

double mean_value(const Map& map) {
    if (map.data.empty()) throw Error(ErrorCode::invalid_argument, "mean of an empty map");
    double acc = 0.0;
    for (double v : map.data) acc += v;
    return acc / static_cast<double>(map.size());
}

} // namespace dwid
