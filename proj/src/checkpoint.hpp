#pragma once

#include <map>
#include <string>
#include <vector>

#include "model.hpp"
#include "trainer_config.hpp"

namespace pogest {

struct AdamState {
    int64_t step = 0;
    std::map<std::string, std::vector<float>> m;
    std::map<std::string, std::vector<float>> v;
};

struct BestSnapshot {
    int epoch = 0;
    double train_px = 0.0;
    std::map<std::string, std::vector<float>> params;
};

struct CheckpointData {
    TrainConfig config;
    int epochs_completed = 0;
    uint64_t master_seed = 0;
    std::map<std::string, std::vector<float>> params;
    bool has_adam = false;
    AdamState adam;
    BestSnapshot best;
};

// Self-describing binary container (CBOR) with a mandatory version field.
// Parameter arrays are keyed by canonical layer names and round-trip
// bit-exactly.
void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);

std::map<std::string, std::vector<float>> snapshot_params(GazeNet& net);
void restore_params(GazeNet& net, const std::map<std::string, std::vector<float>>& params);

// Builds the network a checkpoint describes and loads its live parameters.
GazeNet model_from_checkpoint(const CheckpointData& data);

} // namespace pogest
