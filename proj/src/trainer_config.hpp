#pragma once

#include <cstdint>

#include <json.hpp>

#include "losses.hpp"
#include "model.hpp"

namespace pogest {

struct AblationConfig {
    bool use_triplet = true; // train the embedding margin objective
    bool use_scene = true;   // feed the scene image to the regression module

    friend bool operator==(const AblationConfig&, const AblationConfig&) = default;
};

struct TrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 64; // reference setup uses 256
    int epochs = 30;     // reference setup uses 150
    uint64_t rng_seed = 0;
    int checkpoint_every = 10;
    LossConfig loss;
    ModelConfig model;
    AblationConfig ablation;

    void validate() const {
        require_valid(learning_rate >= 0.0, "train config: learning_rate must be >= 0");
        require_valid(batch_size >= 4, "train config: batch_size must be >= 4");
        require_valid(epochs >= 1, "train config: epochs must be >= 1");
        require_valid(checkpoint_every >= 1, "train config: checkpoint_every must be >= 1");
        loss.validate();
        model.validate();
    }

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json train_config_to_json(const TrainConfig& cfg);
// Strict parse: unknown keys are rejected; rng_seed is mandatory when
// require_seed is set (config files for training runs).
TrainConfig train_config_from_json(const nlohmann::json& j, bool require_seed);
TrainConfig load_train_config(const std::string& path);

} // namespace pogest
