#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "image.hpp"

namespace pogest {

// Ordered semantic class names; the index of a name is its label value.
struct ClassTable {
    std::vector<std::string> names;

    int size() const { return static_cast<int>(names.size()); }
    void validate() const;
};

ClassTable load_class_table(const std::string& path);
void save_class_table(const ClassTable& table, const std::string& path);

// Single-channel label map of class indices.
using LabelMap = ImageU8;

// Fraction of maps in which each class occurs at least once.
std::vector<double> image_class_presence(std::span<const LabelMap> maps, const ClassTable& table);

// Fraction of all pixels carrying each class; sums to one.
std::vector<double> pixel_class_share(std::span<const LabelMap> maps, const ClassTable& table);

struct FixationDistribution {
    std::vector<double> fraction; // per class, over non-skipped fixations
    size_t skipped = 0;           // out-of-frame gazes
};

// Class of the pixel under each gaze point (nearest pixel,
// round-half-away-from-zero), normalized over the counted fixations.
FixationDistribution fixation_class_distribution(std::span<const LabelMap> maps,
                                                 std::span<const GazePoint> gazes,
                                                 const ClassTable& table);

} // namespace pogest
