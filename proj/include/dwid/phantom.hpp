#pragma once

#include "dwid/image.hpp"

#include <cstdint>
#include <string>

namespace dwid::phantom {

/// Axis-aligned box; an ellipse is inscribed in it.
struct Shape {
    enum class Kind { rectangle, ellipse };
    Kind kind = Kind::ellipse;
    double row0 = 0.0;
    double col0 = 0.0;
    double height = 0.0;
    double width = 0.0;

    /// Normalised distance from the centre at a pixel centre: <= 1 inside.
    double radius_at(int r, int c) const;
};

struct TissueRegion {
    std::string name;
    Shape shape;
    double s0 = 0.0;  ///< signal without diffusion weighting
    double adc = 0.0; ///< mm^2/s
};

/// Multiplicative signal loss applied to a share of the high-b repetitions.
/// Inside the shape the signal is scaled by `attenuation`, blending to 1 over
/// the outer `edge` fraction of the radius with a raised cosine (0 = hard edge).
struct DropoutField {
    Shape shape;
    double attenuation = 0.25;
    double fraction = 0.5; ///< share of high-b repetitions hit, rounded to a count
    double jitter = 0.0;   ///< per-repetition uniform perturbation of `attenuation`
    double edge = 0.35;

    double profile_at(int r, int c) const;
};

enum class NoiseModel { gaussian, rician };

struct PhantomSpec {
    int rows = 108;
    int cols = 134;
    std::vector<TissueRegion> regions;
    double b_low = 50.0;
    double b_high = 800.0;
    int n_low = 4;
    int n_high = 10;
    std::vector<DropoutField> dropouts;
    NoiseModel noise = NoiseModel::rician;
    double sigma = 20.0;
    std::optional<Roi> roi;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Liver with a left-lobe subregion, spleen and empty background on a
/// 108 x 134 grid; one dropout field over the left lobe.
PhantomSpec default_spec();

struct Phantom {
    SliceSet slice;
    Image truth_low;        ///< noiseless, dropout-free signal at b_low
    Image truth_high;       ///< noiseless, dropout-free signal at b_high
    Volume<double> attenuation; ///< multiplier applied to every high-b repetition
};

Phantom synthesize(const PhantomSpec& spec);

/// Noiseless, dropout-free signal S0 * exp(-b * ADC).
Image clean_signal(const PhantomSpec& spec, double b_value);

/// |(v + n1) + i n2| with n1, n2 ~ N(0, sigma^2). sigma = 0 is the identity.
Image rician_corrupt(const Image& image, double sigma, std::uint64_t seed);
Image gaussian_corrupt(const Image& image, double sigma, std::uint64_t seed);

PhantomSpec spec_from_json(const std::string& text);
std::string spec_to_json(const PhantomSpec& spec);

} // namespace dwid::phantom
