#include "dwid/phantom.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace dwid::phantom {

namespace {

using nlohmann::json;

// Independent per-purpose streams derived from the user seed.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix(mix(seed ^ mix(stream)) + index);
}

enum Stream : std::uint64_t { kSelection = 1, kJitter = 2, kNoiseLow = 3, kNoiseHigh = 4 };

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_shape(const Shape& s, int rows, int cols, const std::string& what) {
    if (!(s.height > 0.0 && s.width > 0.0))
        throw Error(ErrorCode::invalid_argument, what + ": shape must have positive extent");
    if (s.row0 < 0.0 || s.col0 < 0.0 || s.row0 + s.height > rows || s.col0 + s.width > cols)
        throw Error(ErrorCode::invalid_argument, what + ": shape lies outside the image bounds");
}

} // namespace

double Shape::radius_at(int r, int c) const {
    const double dy = (r + 0.5 - (row0 + 0.5 * height)) / (0.5 * height);
    const double dx = (c + 0.5 - (col0 + 0.5 * width)) / (0.5 * width);
    if (kind == Kind::rectangle) return std::max(std::abs(dy), std::abs(dx));
    return std::sqrt(dy * dy + dx * dx);
}

double DropoutField::profile_at(int r, int c) const {
    const double q = shape.radius_at(r, c);
    if (q >= 1.0) return 0.0;
    const double core = 1.0 - edge;
    if (q <= core) return 1.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (q - core) / edge));
}

void PhantomSpec::validate() const {
    if (rows <= 0 || cols <= 0) throw Error(ErrorCode::invalid_argument, "phantom dimensions must be positive");
    if (!(b_high > b_low) || b_low < 0.0) throw Error(ErrorCode::invalid_argument, "need 0 <= b_low < b_high");
    if (n_low < 1 || n_high < 1) throw Error(ErrorCode::invalid_argument, "repetition counts must be at least 1");
    if (!(sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise sigma must be non-negative");
    for (const auto& reg : regions) {
        check_shape(reg.shape, rows, cols, "region '" + reg.name + "'");
        if (!(reg.adc >= 0.0)) throw Error(ErrorCode::invalid_argument, "region '" + reg.name + "': adc must be >= 0");
        if (!(reg.s0 >= 0.0)) throw Error(ErrorCode::invalid_argument, "region '" + reg.name + "': s0 must be >= 0");
    }
    for (std::size_t k = 0; k < dropouts.size(); ++k) {
        const auto& d = dropouts[k];
        const std::string what = "dropout " + std::to_string(k);
        check_shape(d.shape, rows, cols, what);
        if (!(d.attenuation >= 0.0 && d.attenuation <= 1.0))
            throw Error(ErrorCode::invalid_argument, what + ": attenuation must lie in [0, 1]");
        if (!(d.fraction >= 0.0 && d.fraction <= 1.0))
            throw Error(ErrorCode::invalid_argument, what + ": fraction must lie in [0, 1]");
        if (!(d.jitter >= 0.0)) throw Error(ErrorCode::invalid_argument, what + ": jitter must be >= 0");
        if (!(d.edge >= 0.0 && d.edge <= 1.0)) throw Error(ErrorCode::invalid_argument, what + ": edge must lie in [0, 1]");
    }
    if (roi && !roi->fits(rows, cols)) throw Error(ErrorCode::invalid_argument, "ROI lies outside the image");
}

PhantomSpec default_spec() {
    using K = Shape::Kind;
    PhantomSpec s;
    s.regions = {
        {"liver", {K::ellipse, 18, 10, 70, 78}, 1000.0, 1.10e-3},
        {"left_lobe", {K::ellipse, 24, 70, 36, 34}, 1000.0, 1.02e-3},
        {"spleen", {K::ellipse, 40, 104, 40, 24}, 1200.0, 0.80e-3},
    };
    s.dropouts = {{{K::ellipse, 20, 64, 44, 44}, 0.25, 0.5, 0.05, 0.35}};
    s.roi = Roi{37, 82, 10, 10};
    return s;
}

Image clean_signal(const PhantomSpec& spec, double b_value) {
    Image out(spec.rows, spec.cols, 0.0f);
    for (const auto& reg : spec.regions) {
        const auto value = static_cast<float>(reg.s0 * std::exp(-b_value * reg.adc));
        for (int r = 0; r < spec.rows; ++r)
            for (int c = 0; c < spec.cols; ++c)
                if (reg.shape.radius_at(r, c) <= 1.0) out(r, c) = value;
    }
    return out;
}

Image rician_corrupt(const Image& image, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise sigma must be non-negative");
    if (sigma == 0.0) return image;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Image out(image.rows, image.cols);
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double re = image.data[i] + noise(rng);
        const double im = noise(rng);
        out.data[i] = static_cast<float>(std::hypot(re, im));
    }
    return out;
}

Image gaussian_corrupt(const Image& image, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise sigma must be non-negative");
    if (sigma == 0.0) return image;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Image out(image.rows, image.cols);
    for (std::size_t i = 0; i < image.size(); ++i) out.data[i] = static_cast<float>(image.data[i] + noise(rng));
    return out;
}

Phantom synthesize(const PhantomSpec& spec) {
    spec.validate();
    Phantom out;
    out.truth_low = clean_signal(spec, spec.b_low);
    out.truth_high = clean_signal(spec, spec.b_high);
    out.attenuation = Volume<double>(spec.n_high, spec.rows, spec.cols, 1.0);
    std::vector<bool> corrupted(static_cast<std::size_t>(spec.n_high), false);

    for (std::size_t k = 0; k < spec.dropouts.size(); ++k) {
        const DropoutField& field = spec.dropouts[k];
        const int hits = static_cast<int>(std::lround(field.fraction * spec.n_high));
        std::mt19937_64 pick(stream_seed(spec.seed, kSelection, k));
        std::mt19937_64 jit(stream_seed(spec.seed, kJitter, k));
        std::vector<int> order(static_cast<std::size_t>(spec.n_high));
        std::iota(order.begin(), order.end(), 0);
        for (int j = 0; j < hits; ++j) {
            const int swap_with = j + static_cast<int>(pick() % static_cast<std::uint64_t>(spec.n_high - j));
            std::swap(order[j], order[swap_with]);
        }
        std::sort(order.begin(), order.begin() + hits);

        for (int j = 0; j < hits; ++j) {
            const int n = order[j];
            const double alpha = std::clamp(field.attenuation + field.jitter * (2.0 * unit_uniform(jit) - 1.0), 0.0, 1.0);
            auto rep = out.attenuation.rep(n);
            for (int r = 0; r < spec.rows; ++r)
                for (int c = 0; c < spec.cols; ++c) {
                    const double p = field.profile_at(r, c);
                    if (p <= 0.0) continue;
                    const double m = 1.0 - (1.0 - alpha) * p;
                    if (m < 1.0) {
                        rep[static_cast<std::size_t>(r) * spec.cols + c] *= m;
                        corrupted[n] = true;
                    }
                }
        }
    }

    const auto corrupt = [&](const Image& im, std::uint64_t stream, std::uint64_t idx) {
        const std::uint64_t s = stream_seed(spec.seed, stream, idx);
        return spec.noise == NoiseModel::rician ? rician_corrupt(im, spec.sigma, s) : gaussian_corrupt(im, spec.sigma, s);
    };

    out.slice.low_b.b_value = spec.b_low;
    out.slice.low_b.labels = std::vector<Label>(static_cast<std::size_t>(spec.n_low), Label::clean);
    for (int n = 0; n < spec.n_low; ++n)
        out.slice.low_b.images.push_back(corrupt(out.truth_low, kNoiseLow, static_cast<std::uint64_t>(n)));

    out.slice.high_b.b_value = spec.b_high;
    out.slice.high_b.labels.emplace();
    for (int n = 0; n < spec.n_high; ++n) {
        Image attenuated = out.truth_high;
        const auto mult = out.attenuation.rep(n);
        for (std::size_t i = 0; i < attenuated.size(); ++i)
            attenuated.data[i] = static_cast<float>(attenuated.data[i] * mult[i]);
        out.slice.high_b.images.push_back(corrupt(attenuated, kNoiseHigh, static_cast<std::uint64_t>(n)));
        out.slice.high_b.labels->push_back(corrupted[n] ? Label::corrupt : Label::clean);
    }
    out.slice.roi = spec.roi;
    out.slice.validate();
    return out;
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

const char* to_string(Shape::Kind k) { return k == Shape::Kind::rectangle ? "rectangle" : "ellipse"; }

json shape_json(const Shape& s) {
    return {{"shape", to_string(s.kind)}, {"row0", s.row0}, {"col0", s.col0}, {"height", s.height}, {"width", s.width}};
}

void require_known(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorCode::config, where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            throw Error(ErrorCode::config, where + ": unknown key '" + it.key() + "'");
}

Shape parse_shape(const json& j) {
    Shape s;
    const std::string kind = j.value("shape", std::string("ellipse"));
    if (kind == "ellipse") {
        s.kind = Shape::Kind::ellipse;
    } else if (kind == "rectangle") {
        s.kind = Shape::Kind::rectangle;
    } else {
        throw Error(ErrorCode::config, "unknown shape '" + kind + "'");
    }
    s.row0 = j.at("row0").get<double>();
    s.col0 = j.at("col0").get<double>();
    s.height = j.at("height").get<double>();
    s.width = j.at("width").get<double>();
    return s;
}

std::string line_info(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

PhantomSpec spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config, "invalid JSON at " + line_info(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }

    PhantomSpec s = default_spec();
    try {
        require_known(j, {"rows", "cols", "regions", "b_values", "n_low", "n_high", "dropouts", "noise", "roi", "seed"},
                      "phantom config");
        s.rows = j.value("rows", s.rows);
        s.cols = j.value("cols", s.cols);
        if (j.contains("b_values")) {
            const auto b = j.at("b_values").get<std::vector<double>>();
            if (b.size() != 2) throw Error(ErrorCode::config, "b_values must hold exactly two entries");
            s.b_low = b[0];
            s.b_high = b[1];
        }
        s.n_low = j.value("n_low", s.n_low);
        s.n_high = j.value("n_high", s.n_high);
        s.seed = j.value("seed", s.seed);
        if (j.contains("regions")) {
            s.regions.clear();
            for (const auto& r : j.at("regions")) {
                require_known(r, {"name", "shape", "row0", "col0", "height", "width", "s0", "adc"}, "region");
                s.regions.push_back({r.value("name", std::string("region")), parse_shape(r), r.at("s0").get<double>(),
                                     r.at("adc").get<double>()});
            }
        }
        if (j.contains("dropouts")) {
            s.dropouts.clear();
            for (const auto& d : j.at("dropouts")) {
                require_known(d, {"shape", "row0", "col0", "height", "width", "attenuation", "fraction", "jitter", "edge"},
                              "dropout");
                DropoutField f;
                f.shape = parse_shape(d);
                f.attenuation = d.at("attenuation").get<double>();
                f.fraction = d.at("fraction").get<double>();
                f.jitter = d.value("jitter", 0.0);
                f.edge = d.value("edge", f.edge);
                s.dropouts.push_back(f);
            }
        }
        if (j.contains("noise")) {
            const json& n = j.at("noise");
            require_known(n, {"model", "sigma"}, "noise");
            const std::string model = n.value("model", std::string("rician"));
            if (model == "rician") {
                s.noise = NoiseModel::rician;
            } else if (model == "gaussian") {
                s.noise = NoiseModel::gaussian;
            } else {
                throw Error(ErrorCode::config, "unknown noise model '" + model + "'");
            }
            s.sigma = n.value("sigma", s.sigma);
        }
        if (j.contains("roi")) {
            if (j.at("roi").is_null()) {
                s.roi.reset();
            } else {
                const json& r = j.at("roi");
                require_known(r, {"row0", "col0", "height", "width"}, "roi");
                s.roi = Roi{r.at("row0").get<int>(), r.at("col0").get<int>(), r.at("height").get<int>(),
                            r.at("width").get<int>()};
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config, std::string("phantom config: ") + e.what());
    }
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::config, std::string("phantom config: ") + e.what());
    }
    return s;
}

std::string spec_to_json(const PhantomSpec& spec) {
    json j;
    j["rows"] = spec.rows;
    j["cols"] = spec.cols;
    j["b_values"] = {spec.b_low, spec.b_high};
    j["n_low"] = spec.n_low;
    j["n_high"] = spec.n_high;
    j["seed"] = spec.seed;
    j["regions"] = json::array();
    for (const auto& r : spec.regions) {
        json e = shape_json(r.shape);
        e["name"] = r.name;
        e["s0"] = r.s0;
        e["adc"] = r.adc;
        j["regions"].push_back(e);
    }
    j["dropouts"] = json::array();
    for (const auto& d : spec.dropouts) {
        json e = shape_json(d.shape);
        e["attenuation"] = d.attenuation;
        e["fraction"] = d.fraction;
        e["jitter"] = d.jitter;
        e["edge"] = d.edge;
        j["dropouts"].push_back(e);
    }
    j["noise"] = {{"model", spec.noise == NoiseModel::rician ? "rician" : "gaussian"}, {"sigma", spec.sigma}};
    if (spec.roi)
        j["roi"] = {{"row0", spec.roi->row0}, {"col0", spec.roi->col0}, {"height", spec.roi->height}, {"width", spec.roi->width}};
    return j.dump(2) + "\n";
}

} // namespace dwid::phantom
