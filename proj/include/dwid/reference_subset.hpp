#pragma once

#include <vector>

namespace dwid {

enum class SubsetOrigin { labels, external_predictions, baseline_classifier, explicit_mask, all };

const char* to_string(SubsetOrigin origin);

/// Repetitions that contribute to the per-pixel median reference and tolerance.
struct ReferenceSubset {
    std::vector<bool> selected;
    SubsetOrigin origin = SubsetOrigin::all;
    bool fallback = false; ///< set when the source selected nothing and all repetitions were used

    static ReferenceSubset all_of(int n);
    int size() const noexcept { return static_cast<int>(selected.size()); }
    int count() const noexcept;
    std::vector<int> indices() const;
};

} // namespace dwid
