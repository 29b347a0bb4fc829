#include "world.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "error.hpp"
#include "image.hpp"
#include "rng.hpp"
#include "split.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pogest {

namespace {

// Session-config sampling ranges, relative to the image side.
constexpr double kRotationRange = 28.0;  // degrees, +/-
constexpr double kScaleLo = 0.18, kScaleHi = 0.23;
constexpr double kOffsetRange = 0.05;    // +/-, per axis
constexpr double kEyeGainLo = 0.032, kEyeGainHi = 0.042;

// Disk appearance; target and distractors share these distributions.
constexpr double kDiskRadiusLo = 2.2, kDiskRadiusHi = 3.2;
constexpr double kDiskColorLo = 0.45, kDiskColorHi = 0.95;

constexpr double kSceneBg = 0.10;
constexpr double kFaceBg = 0.10;

// Painter ops on a float RGB canvas.
struct Canvas {
    int side;
    std::vector<float> rgb; // CHW-free: interleaved HWC

    explicit Canvas(int s, double fill) : side(s), rgb(static_cast<size_t>(s) * s * 3) {
        std::fill(rgb.begin(), rgb.end(), static_cast<float>(fill));
    }

    void blend(int x, int y, double cov, double r, double g, double b) {
        if (x < 0 || y < 0 || x >= side || y >= side || cov <= 0.0) return;
        float* px = &rgb[(static_cast<size_t>(y) * side + x) * 3];
        const float a = static_cast<float>(std::min(1.0, cov));
        px[0] = a * static_cast<float>(r) + (1.0f - a) * px[0];
        px[1] = a * static_cast<float>(g) + (1.0f - a) * px[1];
        px[2] = a * static_cast<float>(b) + (1.0f - a) * px[2];
    }

    void disk(double cx, double cy, double radius, double r, double g, double b) {
        const int x0 = static_cast<int>(std::floor(cx - radius - 1));
        const int x1 = static_cast<int>(std::ceil(cx + radius + 1));
        const int y0 = static_cast<int>(std::floor(cy - radius - 1));
        const int y1 = static_cast<int>(std::ceil(cy + radius + 1));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot(x - cx, y - cy);
                blend(x, y, radius + 0.5 - d, r, g, b);
            }
        }
    }

    void hline(double y0, double x_lo, double x_hi, double half_thick, double v) {
        const int ya = static_cast<int>(std::floor(y0 - half_thick - 1));
        const int yb = static_cast<int>(std::ceil(y0 + half_thick + 1));
        for (int y = ya; y <= yb; ++y) {
            const double cov = half_thick + 0.5 - std::abs(y - y0);
            for (int x = static_cast<int>(std::floor(x_lo)); x <= static_cast<int>(std::ceil(x_hi)); ++x)
                blend(x, y, cov, v, v, v);
        }
    }

    void vline(double x0, double y_lo, double y_hi, double half_thick, double v) {
        const int xa = static_cast<int>(std::floor(x0 - half_thick - 1));
        const int xb = static_cast<int>(std::ceil(x0 + half_thick + 1));
        for (int x = xa; x <= xb; ++x) {
            const double cov = half_thick + 0.5 - std::abs(x - x0);
            for (int y = static_cast<int>(std::floor(y_lo)); y <= static_cast<int>(std::ceil(y_hi)); ++y)
                blend(x, y, cov, v, v, v);
        }
    }

    ImageU8 finish(double noise_sigma, Rng& rng) const {
        ImageU8 img = ImageU8::make(side, side, 3);
        for (size_t i = 0; i < rgb.size(); ++i) {
            double v = rgb[i];
            if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
            v = std::clamp(v, 0.0, 1.0);
            img.px[i] = static_cast<uint8_t>(std::lround(v * 255.0));
        }
        return img;
    }
};

double lerp(double a, double b, double t) { return a + (b - a) * t; }
double unlerp(double a, double b, double v) { return (v - a) / (b - a); }

SessionCameraConfig draw_session_config(Rng& rng, int side) {
    SessionCameraConfig cfg;
    cfg.rotation_deg = rng.uniform(-kRotationRange, kRotationRange);
    cfg.scale = rng.uniform(kScaleLo, kScaleHi) * side;
    cfg.offset_x = rng.uniform(-kOffsetRange, kOffsetRange) * side;
    cfg.offset_y = rng.uniform(-kOffsetRange, kOffsetRange) * side;
    cfg.eye_gain = rng.uniform(kEyeGainLo, kEyeGainHi) * side;
    return cfg;
}

// The fixed facial box; session cue marks live outside it.
BoundingBox face_box(int side) {
    return {0.20 * side, 0.15 * side, 0.80 * side, 0.78 * side};
}

void render_face(Canvas& canvas, const SessionCameraConfig& cfg, double gx, double gy,
                 int side, Landmarks* landmarks_out) {
    const double s = side;
    const double face_cx = 0.5 * s, face_cy = 0.46 * s;
    const double eye_y = 0.42 * s;
    const double eye_dx = 0.14 * s;
    const double eye_radius = cfg.eye_gain / 0.6;
    const double pupil_radius = 0.45 * eye_radius;

    canvas.disk(face_cx, face_cy, 0.26 * s, 0.55, 0.45, 0.40);
    canvas.hline(0.62 * s, 0.42 * s, 0.58 * s, 0.8, 0.25); // mouth

    for (int e = 0; e < 2; ++e) {
        const double ex = face_cx + (e == 0 ? -eye_dx : eye_dx);
        canvas.disk(ex, eye_y, eye_radius, 0.95, 0.95, 0.95);
        canvas.disk(ex + cfg.eye_gain * gx, eye_y + cfg.eye_gain * gy, pupil_radius, 0.05, 0.05,
                    0.08);
    }

    // Peripheral marks encoding the session geometry, all outside the
    // facial box so only the full-face view can read them.
    const double rot_t = unlerp(-kRotationRange, kRotationRange, cfg.rotation_deg);
    const double scale_t = unlerp(kScaleLo * s, kScaleHi * s, cfg.scale);
    const double dx_t = unlerp(-kOffsetRange * s, kOffsetRange * s, cfg.offset_x);
    const double dy_t = unlerp(-kOffsetRange * s, kOffsetRange * s, cfg.offset_y);

    canvas.hline(lerp(0.02 * s, 0.11 * s, rot_t), 0.15 * s, 0.85 * s, 0.8, 0.80);
    canvas.vline(lerp(0.02 * s, 0.15 * s, scale_t), 0.25 * s, 0.75 * s, 0.8, 0.72);
    canvas.vline(lerp(0.15 * s, 0.85 * s, dx_t), 0.90 * s, 0.99 * s, 0.8, 0.85);
    canvas.hline(lerp(0.25 * s, 0.75 * s, dy_t), 0.90 * s, 0.99 * s, 0.8, 0.66);

    if (landmarks_out) {
        Landmarks lm;
        const double lx = face_cx - eye_dx, rx = face_cx + eye_dx;
        lm.points = {
            {lx - eye_radius, eye_y},                                   // left outer
            {lx + eye_radius, eye_y},                                   // left inner
            {rx - eye_radius, eye_y},                                   // right inner
            {rx + eye_radius, eye_y},                                   // right outer
            {lx + cfg.eye_gain * gx, eye_y + cfg.eye_gain * gy},        // left pupil
            {rx + cfg.eye_gain * gx, eye_y + cfg.eye_gain * gy},        // right pupil
        };
        lm.corners = {0, 1, 2, 3};
        *landmarks_out = lm;
    }
}

DiskLatent draw_disk_appearance(Rng& rng) {
    DiskLatent d;
    d.radius = rng.uniform(kDiskRadiusLo, kDiskRadiusHi);
    d.r = rng.uniform(kDiskColorLo, kDiskColorHi);
    d.g = rng.uniform(kDiskColorLo, kDiskColorHi);
    d.b = rng.uniform(kDiskColorLo, kDiskColorHi);
    return d;
}

json latent_to_json(const SessionLatents& sl) {
    json j;
    j["session_id"] = sl.session_id;
    j["config"] = {{"rotation_deg", sl.config.rotation_deg}, {"scale", sl.config.scale},
                   {"offset", {sl.config.offset_x, sl.config.offset_y}},
                   {"eye_gain", sl.config.eye_gain}};
    json samples = json::array();
    auto disk_json = [](const DiskLatent& d) {
        return json{{"x", d.x}, {"y", d.y}, {"radius", d.radius}, {"rgb", {d.r, d.g, d.b}}};
    };
    for (const auto& s : sl.samples) {
        json sj;
        sj["g"] = {s.gx, s.gy};
        sj["p"] = {s.gaze.x, s.gaze.y};
        sj["target"] = disk_json(s.target);
        json ds = json::array();
        for (const auto& d : s.distractors) ds.push_back(disk_json(d));
        sj["distractors"] = ds;
        samples.push_back(sj);
    }
    j["samples"] = samples;
    return j;
}

DiskLatent disk_from_json(const json& j) {
    DiskLatent d;
    d.x = j.at("x").get<double>();
    d.y = j.at("y").get<double>();
    d.radius = j.at("radius").get<double>();
    d.r = j.at("rgb")[0].get<double>();
    d.g = j.at("rgb")[1].get<double>();
    d.b = j.at("rgb")[2].get<double>();
    return d;
}

} // namespace

void WorldConfig::validate() const {
    require_valid(image_side >= 32, "world config: image_side must be >= 32");
    require_valid(n_sessions >= 1 && samples_per_session >= 1 && n_distractors >= 1,
                  "world config: counts must be >= 1");
    require_valid(noise_sigma >= 0.0, "world config: noise_sigma must be >= 0");
}

double world_frame_margin() { return kDiskRadiusHi + 1.0; }

void validate_session_geometry(const SessionCameraConfig& cfg, int image_side) {
    require_valid(cfg.scale > 0.0, "session config: scale must be positive");
    require_valid(std::abs(cfg.rotation_deg) <= 45.0, "session config: |rotation| must be <= 45 deg");
    const double reach = cfg.scale * std::sqrt(2.0) + std::hypot(cfg.offset_x, cfg.offset_y) +
                         world_frame_margin();
    require(reach <= 0.5 * image_side, ErrorKind::validation,
            "session config: geometry cannot keep gaze points in-frame");
}

GazePoint oracle_gaze(double gx, double gy, const SessionCameraConfig& cfg, int image_side) {
    const double rad = cfg.rotation_deg * (3.14159265358979323846 / 180.0);
    const double c = std::cos(rad), s = std::sin(rad);
    const double cx = 0.5 * image_side, cy = 0.5 * image_side;
    return {cx + cfg.offset_x + cfg.scale * (c * gx - s * gy),
            cy + cfg.offset_y + cfg.scale * (s * gx + c * gy)};
}

GenerateResult generate_dataset(const WorldConfig& world, const std::string& out_dir) {
    world.validate();
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "latents");

    GenerateResult result;
    DatasetManifest& manifest = result.manifest;
    manifest.facial_roi = face_box(world.image_side);
    manifest.base_dir = out_dir;

    const Rng root(world.rng_seed);
    const int side = world.image_side;
    const double margin = world_frame_margin();

    // Sessions are dealt to subjects in a 3,2,1 cycle so small worlds
    // exercise every per-subject split rule.
    std::vector<int> sessions_per_subject;
    {
        int remaining = world.n_sessions;
        const int pattern[3] = {3, 2, 1};
        int k = 0;
        while (remaining > 0) {
            const int take = std::min(remaining, pattern[k % 3]);
            sessions_per_subject.push_back(take);
            remaining -= take;
            ++k;
        }
    }

    int session_index = 0;
    for (size_t subject = 0; subject < sessions_per_subject.size(); ++subject) {
        for (int k = 0; k < sessions_per_subject[subject]; ++k, ++session_index) {
            char sid[16], pid[16];
            std::snprintf(sid, sizeof sid, "s%03d", session_index);
            std::snprintf(pid, sizeof pid, "p%02d", static_cast<int>(subject));

            Rng session_rng = root.child("world-session", static_cast<uint64_t>(session_index));
            SessionCameraConfig cfg = draw_session_config(session_rng.child("config"), side);
            validate_session_geometry(cfg, side);

            SessionRecord record;
            record.session_id = sid;
            record.subject_id = pid;

            SessionLatents latents;
            latents.session_id = sid;
            latents.config = cfg;

            const std::string img_dir = "images/" + std::string(sid);
            fs::create_directories(fs::path(out_dir) / img_dir);

            for (int i = 0; i < world.samples_per_session; ++i) {
                Rng rng = session_rng.child("sample", static_cast<uint64_t>(i));
                SampleLatent lat;
                lat.gx = rng.uniform(-1.0, 1.0);
                lat.gy = rng.uniform(-1.0, 1.0);
                lat.gaze = oracle_gaze(lat.gx, lat.gy, cfg, side);
                require(lat.gaze.in_frame(side, side), ErrorKind::runtime,
                        "world: generated gaze left the frame");

                lat.target = draw_disk_appearance(rng.child("target"));
                lat.target.x = lat.gaze.x;
                lat.target.y = lat.gaze.y;

                Rng disk_rng = rng.child("distractors");
                for (int d = 0; d < world.n_distractors; ++d) {
                    DiskLatent dl = draw_disk_appearance(disk_rng);
                    bool placed = false;
                    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
                        dl.x = disk_rng.uniform(margin, side - margin);
                        dl.y = disk_rng.uniform(margin, side - margin);
                        if (std::hypot(dl.x - lat.gaze.x, dl.y - lat.gaze.y) < 9.0) continue;
                        placed = true;
                        for (const auto& prev : lat.distractors) {
                            if (std::hypot(dl.x - prev.x, dl.y - prev.y) < 7.0) {
                                placed = false;
                                break;
                            }
                        }
                    }
                    if (placed) lat.distractors.push_back(dl);
                }

                // Scene: distractors plus one identically distributed disk
                // at the gaze point.
                Canvas scene(side, kSceneBg);
                for (const auto& d : lat.distractors) scene.disk(d.x, d.y, d.radius, d.r, d.g, d.b);
                scene.disk(lat.target.x, lat.target.y, lat.target.radius, lat.target.r,
                           lat.target.g, lat.target.b);

                Canvas face(side, kFaceBg);
                Landmarks lm;
                render_face(face, cfg, lat.gx, lat.gy, side, &lm);

                Rng noise_rng = rng.child("noise");
                char scene_name[32], face_name[32];
                std::snprintf(scene_name, sizeof scene_name, "scene_%05d.png", i);
                std::snprintf(face_name, sizeof face_name, "face_%05d.png", i);
                const std::string scene_rel = img_dir + "/" + scene_name;
                const std::string face_rel = img_dir + "/" + face_name;
                save_png((fs::path(out_dir) / scene_rel).string(),
                         scene.finish(world.noise_sigma, noise_rng));
                save_png((fs::path(out_dir) / face_rel).string(),
                         face.finish(world.noise_sigma, noise_rng));

                SampleRecord sample;
                sample.scene_path = scene_rel;
                sample.face_path = face_rel;
                sample.landmarks = lm;
                sample.gaze = lat.gaze;
                record.samples.push_back(std::move(sample));
                latents.samples.push_back(std::move(lat));
            }

            manifest.sessions.push_back(std::move(record));

            std::ofstream lout((fs::path(out_dir) / "latents" / (std::string(sid) + ".json")).string());
            lout << latent_to_json(latents).dump(2) << '\n';
            result.latents.push_back(std::move(latents));
        }
    }

    result.manifest = split_sessions(result.manifest, world.rng_seed);
    result.manifest.base_dir = out_dir;
    result.manifest_path = (fs::path(out_dir) / "manifest.json").string();
    save_manifest(result.manifest, result.manifest_path);
    return result;
}

SessionLatents load_latents(const std::string& path) {
    std::ifstream in(path);
    if (!in) Error::io("cannot open latents file: " + path);
    json j;
    in >> j;
    SessionLatents out;
    out.session_id = j.at("session_id").get<std::string>();
    const auto& c = j.at("config");
    out.config.rotation_deg = c.at("rotation_deg").get<double>();
    out.config.scale = c.at("scale").get<double>();
    out.config.offset_x = c.at("offset")[0].get<double>();
    out.config.offset_y = c.at("offset")[1].get<double>();
    out.config.eye_gain = c.at("eye_gain").get<double>();
    for (const auto& sj : j.at("samples")) {
        SampleLatent s;
        s.gx = sj.at("g")[0].get<double>();
        s.gy = sj.at("g")[1].get<double>();
        s.gaze = {sj.at("p")[0].get<double>(), sj.at("p")[1].get<double>()};
        s.target = disk_from_json(sj.at("target"));
        for (const auto& dj : sj.at("distractors")) s.distractors.push_back(disk_from_json(dj));
        out.samples.push_back(std::move(s));
    }
    return out;
}

} // namespace pogest
