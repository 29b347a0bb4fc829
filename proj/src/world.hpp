#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "manifest.hpp"

namespace pogest {

// Latent per-session geometry of the synthetic world: the affine map taking
// a gaze direction g in [-1,1]^2 to a scene pixel, plus the pupil gain that
// drives the rendered eye appearance.
struct SessionCameraConfig {
    double rotation_deg = 0.0; // in-plane rotation of the gaze-to-scene map
    double scale = 0.0;        // pixels per unit gaze direction
    double offset_x = 0.0;     // pixels, added after rotation/scale
    double offset_y = 0.0;
    double eye_gain = 0.0; // pupil displacement in face pixels per unit g

    friend bool operator==(const SessionCameraConfig&, const SessionCameraConfig&) = default;
};

struct WorldConfig {
    int image_side = 64;
    int n_sessions = 6;
    int samples_per_session = 500;
    int n_distractors = 8;
    double noise_sigma = 0.02; // additive Gaussian, [0,1] intensity units
    uint64_t rng_seed = 0;

    void validate() const;
};

struct DiskLatent {
    double x = 0.0, y = 0.0;
    double radius = 0.0;
    double r = 0.0, g = 0.0, b = 0.0;
};

struct SampleLatent {
    double gx = 0.0, gy = 0.0; // gaze direction in [-1,1]^2
    GazePoint gaze;            // mapped scene point
    DiskLatent target;
    std::vector<DiskLatent> distractors;
};

struct SessionLatents {
    std::string session_id;
    SessionCameraConfig config;
    std::vector<SampleLatent> samples;
};

// Margin the gaze map must keep from the frame edge (largest disk radius
// plus an antialiasing ring).
double world_frame_margin();

// Rejects configs whose gaze range can leave the frame.
void validate_session_geometry(const SessionCameraConfig& cfg, int image_side);

// p = A_s * g + b_s with A_s = scale * R(rotation) and b_s = frame center
// plus the offset. The generator stores exactly this value, so recomputing
// it from the latents reproduces the annotation bit for bit.
GazePoint oracle_gaze(double gx, double gy, const SessionCameraConfig& cfg, int image_side);

struct GenerateResult {
    DatasetManifest manifest;
    std::string manifest_path;
    std::vector<SessionLatents> latents;
};

// Renders the full dataset under out_dir: manifest.json (split assigned),
// per-session PNG pairs, and a latents sidecar per session for tests.
// Deterministic per (seed, session); sessions could render in parallel.
GenerateResult generate_dataset(const WorldConfig& world, const std::string& out_dir);

SessionLatents load_latents(const std::string& path);

} // namespace pogest
