#include "manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pogest {

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        require_valid(allowed.count(it.key()) > 0, "manifest: unknown key '" + it.key() + "' in " + where);
}

json box_to_json(const BoundingBox& b) {
    return json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

BoundingBox box_from_json(const json& j, const std::string& where) {
    require_valid(j.is_array() && j.size() == 4, "manifest: " + where + " must be [x_min,y_min,x_max,y_max]");
    BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    b.validate(where.c_str());
    return b;
}

json sample_to_json(const SampleRecord& s) {
    json j;
    j["scene"] = s.scene_path;
    j["face"] = s.face_path;
    json lm = json::array();
    for (const auto& p : s.landmarks.points) lm.push_back(json::array({p.x, p.y}));
    j["landmarks"] = lm;
    j["gaze"] = s.gaze ? json::array({s.gaze->x, s.gaze->y}) : json(nullptr);
    if (!s.object_boxes.empty()) {
        json boxes = json::array();
        for (const auto& ob : s.object_boxes)
            boxes.push_back(json{{"cls", ob.cls}, {"box", box_to_json(ob.box)}});
        j["boxes"] = boxes;
    }
    j["label_map"] = s.label_map_path ? json(*s.label_map_path) : json(nullptr);
    return j;
}

SampleRecord sample_from_json(const json& j, const EyeCornerIndices& corners) {
    reject_unknown_keys(j, {"scene", "face", "landmarks", "gaze", "boxes", "label_map"}, "sample");
    SampleRecord s;
    require_valid(j.contains("scene") && j.contains("face") && j.contains("landmarks"),
                  "manifest: sample requires scene, face and landmarks");
    s.scene_path = j.at("scene").get<std::string>();
    s.face_path = j.at("face").get<std::string>();
    for (const auto& p : j.at("landmarks")) {
        require_valid(p.is_array() && p.size() == 2, "manifest: landmark must be [x,y]");
        s.landmarks.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    s.landmarks.corners = corners;
    s.landmarks.validate();
    if (j.contains("gaze") && !j.at("gaze").is_null()) {
        const auto& g = j.at("gaze");
        require_valid(g.is_array() && g.size() == 2, "manifest: gaze must be [x,y] or null");
        s.gaze = GazePoint{g[0].get<double>(), g[1].get<double>()};
        require_valid(s.gaze->finite(), "manifest: gaze must be finite");
    }
    if (j.contains("boxes")) {
        for (const auto& ob : j.at("boxes")) {
            reject_unknown_keys(ob, {"cls", "box"}, "object box");
            s.object_boxes.push_back({ob.at("cls").get<std::string>(), box_from_json(ob.at("box"), "object box")});
        }
    }
    if (j.contains("label_map") && !j.at("label_map").is_null())
        s.label_map_path = j.at("label_map").get<std::string>();
    return s;
}

} // namespace

const SessionRecord* DatasetManifest::find_session(const std::string& id) const {
    for (const auto& s : sessions)
        if (s.session_id == id) return &s;
    return nullptr;
}

size_t DatasetManifest::total_samples() const {
    size_t n = 0;
    for (const auto& s : sessions) n += s.samples.size();
    return n;
}

void DatasetManifest::validate() const {
    std::set<std::string> ids;
    for (const auto& s : sessions) {
        require_valid(!s.session_id.empty(), "manifest: empty session_id");
        require_valid(!s.subject_id.empty(), "manifest: empty subject_id for session " + s.session_id);
        require_valid(ids.insert(s.session_id).second, "manifest: duplicate session_id " + s.session_id);
    }
    for (const auto& [sid, _] : split)
        require_valid(ids.count(sid) > 0, "manifest: split references unknown session " + sid);
    if (facial_roi) facial_roi->validate("facial_roi");
}

DatasetManifest load_manifest(const std::string& path, bool check_files) {
    std::ifstream in(path);
    if (!in) Error::io("cannot open manifest: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        Error::validation("manifest: invalid JSON in " + path + ": " + e.what());
    }

    reject_unknown_keys(j, {"version", "eye_corners", "facial_roi", "sessions", "split"}, "manifest root");
    DatasetManifest m;
    m.base_dir = fs::path(path).parent_path().string();

    if (j.contains("eye_corners")) {
        const auto& ec = j.at("eye_corners");
        reject_unknown_keys(ec, {"left", "right"}, "eye_corners");
        m.eye_corners = {ec.at("left")[0].get<int>(), ec.at("left")[1].get<int>(),
                         ec.at("right")[0].get<int>(), ec.at("right")[1].get<int>()};
    }
    if (j.contains("facial_roi") && !j.at("facial_roi").is_null())
        m.facial_roi = box_from_json(j.at("facial_roi"), "facial_roi");

    require_valid(j.contains("sessions") && j.at("sessions").is_array(), "manifest: missing sessions array");
    for (const auto& sj : j.at("sessions")) {
        reject_unknown_keys(sj, {"session_id", "subject_id", "samples"}, "session");
        SessionRecord sess;
        sess.session_id = sj.at("session_id").get<std::string>();
        sess.subject_id = sj.at("subject_id").get<std::string>();
        for (const auto& rec : sj.at("samples"))
            sess.samples.push_back(sample_from_json(rec, m.eye_corners));
        m.sessions.push_back(std::move(sess));
    }

    if (j.contains("split")) {
        for (auto it = j.at("split").begin(); it != j.at("split").end(); ++it) {
            std::string v = it.value().get<std::string>();
            require_valid(v == "train" || v == "test", "manifest: split value must be 'train' or 'test'");
            m.split[it.key()] = (v == "train") ? Split::train : Split::test;
        }
    }

    m.validate();

    if (check_files) {
        for (const auto& sess : m.sessions) {
            for (const auto& s : sess.samples) {
                for (const std::string* p : {&s.scene_path, &s.face_path}) {
                    std::string full = resolve_path(m, *p);
                    if (!fs::exists(full)) Error::io("manifest references missing file: " + full);
                }
                if (s.label_map_path) {
                    std::string full = resolve_path(m, *s.label_map_path);
                    if (!fs::exists(full)) Error::io("manifest references missing file: " + full);
                }
            }
        }
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    manifest.validate();
    json j;
    j["version"] = 1;
    j["eye_corners"] = {{"left", {manifest.eye_corners.left_a, manifest.eye_corners.left_b}},
                        {"right", {manifest.eye_corners.right_a, manifest.eye_corners.right_b}}};
    if (manifest.facial_roi) j["facial_roi"] = box_to_json(*manifest.facial_roi);
    json sessions = json::array();
    for (const auto& sess : manifest.sessions) {
        json sj;
        sj["session_id"] = sess.session_id;
        sj["subject_id"] = sess.subject_id;
        json samples = json::array();
        for (const auto& s : sess.samples) samples.push_back(sample_to_json(s));
        sj["samples"] = samples;
        sessions.push_back(sj);
    }
    j["sessions"] = sessions;
    if (!manifest.split.empty()) {
        json split;
        for (const auto& [sid, sp] : manifest.split) split[sid] = (sp == Split::train) ? "train" : "test";
        j["split"] = split;
    }

    std::ofstream out(path);
    if (!out) Error::io("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

std::string resolve_path(const DatasetManifest& manifest, const std::string& rel) {
    fs::path p(rel);
    if (p.is_absolute() || manifest.base_dir.empty()) return rel;
    return (fs::path(manifest.base_dir) / p).string();
}

} // namespace pogest
