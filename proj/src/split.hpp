#pragma once

#include <cstdint>

#include "manifest.hpp"

namespace pogest {

// Assigns every session to train or test, per subject: one session goes to
// train; of two, one is randomly held out; of three, one is randomly held
// out and two train. Subjects with more than three sessions generalize to
// exactly one random test session. Deterministic given the seed and
// independent of session ordering in the manifest.
DatasetManifest split_sessions(const DatasetManifest& manifest, uint64_t rng_seed);

} // namespace pogest
