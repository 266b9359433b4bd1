#pragma once

#include "dwid/error.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dwid {

/// Dense row-major 2-D field. `Image` (float) is what goes to disk; double
/// grids hold derived quantities such as ADC maps and patch statistics.
template <typename T>
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int r, int c, T fill = T{})
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}
    Grid(int r, int c, std::vector<T> values) : rows(r), cols(c), data(std::move(values)) {}

    std::size_t size() const noexcept { return data.size(); }
    T& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const T& operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    bool same_shape(int r, int c) const noexcept { return rows == r && cols == c; }
    template <typename U>
    bool same_shape(const Grid<U>& o) const noexcept { return rows == o.rows && cols == o.cols; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

using Image = Grid<float>;
using Map = Grid<double>;

/// Repetitions stacked along an outer dimension: value(n, pixel).
/// Layout is repetition-major, then row-major within each repetition.
template <typename T>
struct Volume {
    int reps = 0;
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Volume() = default;
    Volume(int n, int r, int c, T fill = T{})
        : reps(n), rows(r), cols(c),
          data(static_cast<std::size_t>(n) * static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    std::size_t pixels() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    T& at(int n, std::size_t i) { return data[n * pixels() + i]; }
    const T& at(int n, std::size_t i) const { return data[n * pixels() + i]; }
    std::span<T> rep(int n) { return {data.data() + n * pixels(), pixels()}; }
    std::span<const T> rep(int n) const { return {data.data() + n * pixels(), pixels()}; }
};

enum class Label { clean, corrupt, unknown };

const char* to_string(Label label);
Label label_from_string(const std::string& s);

struct Roi {
    int row0 = 0;
    int col0 = 0;
    int height = 0;
    int width = 0;

    bool fits(int rows, int cols) const noexcept;
    friend bool operator==(const Roi&, const Roi&) = default;
};

struct RepetitionStack {
    std::vector<Image> images;
    double b_value = 0.0;
    std::optional<std::vector<Label>> labels;

    int size() const noexcept { return static_cast<int>(images.size()); }
    int rows() const noexcept { return images.empty() ? 0 : images.front().rows; }
    int cols() const noexcept { return images.empty() ? 0 : images.front().cols; }

    /// Throws Error if any invariant of the stack is violated.
    void validate() const;

    friend bool operator==(const RepetitionStack&, const RepetitionStack&) = default;
};

struct SliceSet {
    RepetitionStack low_b;
    RepetitionStack high_b;
    std::optional<Roi> roi;

    void validate() const;

    friend bool operator==(const SliceSet&, const SliceSet&) = default;
};

/// Pixel-wise arithmetic mean of all repetitions.
Image mean_image(const RepetitionStack& stack);

/// Nearest-rank percentile (q in [0, 100]) of the pooled values.
double percentile(std::vector<double> values, double q);

/// Median of a small sample; even sizes use the midpoint of the two central
/// order statistics. The input is reordered.
double median_inplace(std::span<double> values);

} // namespace dwid
