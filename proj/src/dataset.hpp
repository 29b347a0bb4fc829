#pragma once

#include <optional>
#include <string>
#include <vector>

#include "image.hpp"
#include "manifest.hpp"

namespace pogest {

// A sample with its image payloads decoded.
struct LoadedSample {
    ImageU8 scene;
    ImageU8 face;
    Landmarks landmarks;
    std::optional<GazePoint> gaze;
    std::vector<ObjectBox> object_boxes;
    std::optional<std::string> label_map_path; // resolved; decoded on demand
    std::string session_id;
    std::string subject_id;
};

struct LoadedDataset {
    std::vector<LoadedSample> samples;
    std::vector<int> session_of;          // per sample, index into session_ids
    std::vector<std::string> session_ids; // manifest order
    std::vector<std::string> subject_of_session;
    std::optional<BoundingBox> facial_roi;
    int width = 0;
    int height = 0;
    size_t skipped_without_gaze = 0;

    std::vector<int> indices_of_session(int session) const;
};

// Decodes every referenced image into memory. `filter` restricts to one
// split; `require_gaze` drops samples without a gaze annotation (counted).
// Enforces that scene and face images share one dimension across the
// dataset and that annotated gazes are in-frame.
LoadedDataset load_dataset(const DatasetManifest& manifest, std::optional<Split> filter,
                           bool require_gaze);

} // namespace pogest
