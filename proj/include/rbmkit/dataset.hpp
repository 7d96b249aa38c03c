#pragma once

#include <set>
#include <string>
#include <vector>

#include "rbmkit/types.hpp"

namespace rbmkit {

inline constexpr int kNumPixels = 64;  // 8x8, row-major
inline constexpr int kNumClasses = 10; // one-hot label bits
inline constexpr int kNumVisible = kNumPixels + kNumClasses;

struct LabeledPattern {
    BinaryVector pixels; // 64 bits
    int label = 0;       // 0..9
};

enum class SplitTag { train, test };

struct Dataset {
    std::vector<LabeledPattern> patterns;
    SplitTag split_tag = SplitTag::train;

    std::size_t size() const { return patterns.size(); }
};

// Reads a CSV file, one pattern per row: 64 integer pixel intensities followed
// by the class label. Pixels are binarized against the file-wide maximum
// intensity: (intensity / max_intensity) >= threshold -> 1, else 0. An
// all-zero file binarizes to all-zero pixels.
//
// Throws std::runtime_error naming the line number on a malformed row, and on
// an empty file.
Dataset load_digits(const std::string& path, double threshold, SplitTag tag = SplitTag::train);

// 74-bit visible encoding: bits 0..63 pixels, bits 64..73 one-hot label.
BinaryVector encode_visible(const LabeledPattern& p);

// Recovers the label from the position of the single set bit in 64..73;
// returns -1 when not exactly one label bit is set.
int decode_label(const BinaryVector& visible);

// Keeps exactly the patterns whose label is in `classes`, in original order.
// Throws std::runtime_error when the selection is empty.
Dataset filter_classes(const Dataset& d, const std::set<int>& classes);

void write_digits_csv(const std::string& path, const Dataset& d, int max_intensity = 16);

} // namespace rbmkit
