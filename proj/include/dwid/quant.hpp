#pragma once

#include "dwid/weighting.hpp"

namespace dwid {

/// Apparent diffusion coefficient in mm^2/s; `valid` marks pixels where both
/// signals are positive. Invalid pixels hold 0.
struct AdcMap {
    Map values;
    Grid<unsigned char> valid;
};

/// Two-point mono-exponential fit: ln(low / high) / (b_high - b_low).
AdcMap adc_map(const Image& low, const Image& high, double b_low, double b_high);

/// 100 * (1 - n0 / n).
double dropout_ratio(int n0, int n);

/// sqrt(N * sum_n w_n^2) per pixel: noise of the weighted sum relative to
/// uniform averaging under i.i.d. Gaussian noise.
Map relative_noise_map(const WeightMaps& weights);

/// Relative noise of discarding all but the clean share of a set; the
/// dropout ratio is given in percent.
double cd_ideal_noise(double ratio_percent);

double roi_mean(const AdcMap& map, const Roi& roi);
double roi_mean(const Image& image, const Roi& roi);
double roi_mean(const Map& map, const Roi& roi);

double mean_value(const Map& map);

} // namespace dwid
