#include "dataset.hpp"

#include "error.hpp"

namespace pogest {

std::vector<int> LoadedDataset::indices_of_session(int session) const {
    std::vector<int> out;
    for (size_t i = 0; i < session_of.size(); ++i)
        if (session_of[i] == session) out.push_back(static_cast<int>(i));
    return out;
}

LoadedDataset load_dataset(const DatasetManifest& manifest, std::optional<Split> filter,
                           bool require_gaze) {
    manifest.validate();
    LoadedDataset out;
    out.facial_roi = manifest.facial_roi;

    for (const auto& sess : manifest.sessions) {
        if (filter) {
            auto it = manifest.split.find(sess.session_id);
            require_valid(it != manifest.split.end(),
                          "dataset: session " + sess.session_id + " has no split assignment");
            if (it->second != *filter) continue;
        }
        const int session_index = static_cast<int>(out.session_ids.size());
        out.session_ids.push_back(sess.session_id);
        out.subject_of_session.push_back(sess.subject_id);

        for (const auto& rec : sess.samples) {
            if (require_gaze && !rec.gaze) {
                ++out.skipped_without_gaze;
                continue;
            }
            LoadedSample s;
            s.scene = load_png(resolve_path(manifest, rec.scene_path));
            s.face = load_png(resolve_path(manifest, rec.face_path));
            require_valid(s.scene.channels == 3 && s.face.channels == 3,
                          "dataset: scene and face images must be RGB: " + rec.scene_path);
            if (out.width == 0) {
                out.width = s.scene.width;
                out.height = s.scene.height;
            }
            require_valid(s.scene.width == out.width && s.scene.height == out.height &&
                              s.face.width == out.width && s.face.height == out.height,
                          "dataset: images must share dimensions, offending sample " + rec.scene_path);
            if (rec.gaze) {
                require_valid(rec.gaze->in_frame(out.width, out.height),
                              "dataset: gaze out of frame in " + rec.scene_path);
                s.gaze = rec.gaze;
            }
            s.landmarks = rec.landmarks;
            s.object_boxes = rec.object_boxes;
            if (rec.label_map_path) s.label_map_path = resolve_path(manifest, *rec.label_map_path);
            s.session_id = sess.session_id;
            s.subject_id = sess.subject_id;
            out.samples.push_back(std::move(s));
            out.session_of.push_back(session_index);
        }
    }
    return out;
}

} // namespace pogest
