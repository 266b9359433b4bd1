#pragma once

#include "dwid/image.hpp"

#include <filesystem>

namespace dwid::io {

inline constexpr int kFormatVersion = 1;

/// Writes `<base>.json` + `<base>.f32`. The blob holds n_reps*rows*cols
/// little-endian float32 values, repetition-major.
void write_stack(const RepetitionStack& stack, const std::filesystem::path& base);
RepetitionStack read_stack_file(const std::filesystem::path& base);

/// SliceSet directory: `low.*`/`high.*` stacks under `low/` and `high/`
/// subdirectories plus an optional `roi.json`.
void write_stack(const SliceSet& slice, const std::filesystem::path& dir);
SliceSet read_stack(const std::filesystem::path& dir);

/// Convenience for single images and derived maps (stored as a 1-repetition stack).
void write_image(const Image& image, double b_value, const std::filesystem::path& base);
void write_map(const Map& map, const std::filesystem::path& base);
/// Stores an N-repetition double volume (e.g. weight maps) as float32.
void write_volume(const Volume<double>& volume, const std::filesystem::path& base);

Roi read_roi(const std::filesystem::path& file);
void write_roi(const Roi& roi, const std::filesystem::path& file);

/// True when `dir` looks like a SliceSet container.
bool is_slice_dir(const std::filesystem::path& dir);

/// Every SliceSet directory under `root` (root itself if it is one), sorted by name.
std::vector<std::filesystem::path> list_slices(const std::filesystem::path& root);

} // namespace dwid::io
