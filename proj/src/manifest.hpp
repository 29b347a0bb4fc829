#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace pogest {

struct ObjectBox {
    std::string cls;
    BoundingBox box;

    friend bool operator==(const ObjectBox&, const ObjectBox&) = default;
};

// One sample record as referenced by the manifest; image payloads are loaded
// separately (see dataset.hpp).
struct SampleRecord {
    std::string scene_path;
    std::string face_path;
    Landmarks landmarks;
    std::optional<GazePoint> gaze;
    std::vector<ObjectBox> object_boxes;
    std::optional<std::string> label_map_path;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct SessionRecord {
    std::string session_id;
    std::string subject_id;
    std::vector<SampleRecord> samples;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

enum class Split { train, test };

struct DatasetManifest {
    std::vector<SessionRecord> sessions;
    std::map<std::string, Split> split; // empty until assigned
    EyeCornerIndices eye_corners;
    std::optional<BoundingBox> facial_roi; // pinned facial ROI, if any

    // Directory the relative sample paths resolve against. Set on load /
    // save; not part of the serialized form or of equality.
    std::string base_dir;

    const SessionRecord* find_session(const std::string& id) const;
    size_t total_samples() const;

    bool operator==(const DatasetManifest& o) const {
        return sessions == o.sessions && split == o.split &&
               eye_corners == o.eye_corners && facial_roi == o.facial_roi;
    }

    // Structural validation: unique non-empty session ids, split keys that
    // refer to existing sessions, in-frame invariants left to image load.
    void validate() const;
};

DatasetManifest load_manifest(const std::string& path, bool check_files = true);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

std::string resolve_path(const DatasetManifest& manifest, const std::string& rel);

} // namespace pogest
