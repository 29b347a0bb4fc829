#pragma once

#include <span>
#include <utility>

#include "geometry.hpp"
#include "manifest.hpp"

namespace pogest {

// Square window centered at the midpoint of the two eye corners with side
// 1.5x the Euclidean corner distance. Returned as (left, right).
std::pair<BoundingBox, BoundingBox> compute_eye_roi(const Landmarks& landmarks);

// Smallest axis-aligned box containing every face box; the dataset-wide
// fixed facial ROI.
BoundingBox compute_facial_roi(std::span<const BoundingBox> face_boxes);

// The facial ROI in effect for a dataset: the manifest's pinned box when
// present, otherwise the union of the supplied face boxes.
BoundingBox facial_roi_for(const DatasetManifest& manifest,
                           std::span<const BoundingBox> face_boxes = {});

} // namespace pogest
