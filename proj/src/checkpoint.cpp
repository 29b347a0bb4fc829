#include "checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "error.hpp"

using nlohmann::json;

namespace pogest {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr const char* kCheckpointFormat = "pogest-checkpoint";

json params_to_json(const std::map<std::string, std::vector<float>>& params) {
    json out = json::object();
    for (const auto& [name, values] : params) out[name] = values;
    return out;
}

std::map<std::string, std::vector<float>> params_from_json(const json& j) {
    std::map<std::string, std::vector<float>> out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[it.key()] = it.value().get<std::vector<float>>();
    return out;
}

} // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
    json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["train_config"] = train_config_to_json(data.config);
    j["epochs_completed"] = data.epochs_completed;
    j["rng"] = {{"scheme", "derived-streams-v1"}, {"master_seed", data.master_seed}};
    j["params"] = params_to_json(data.params);
    if (data.has_adam) {
        j["adam"] = {{"step", data.adam.step},
                     {"m", params_to_json(data.adam.m)},
                     {"v", params_to_json(data.adam.v)}};
    }
    j["best"] = {{"epoch", data.best.epoch},
                 {"train_px", data.best.train_px},
                 {"params", params_to_json(data.best.params)}};

    std::vector<uint8_t> bytes = json::to_cbor(j);
    std::ofstream out(path, std::ios::binary);
    if (!out) Error::io("cannot write checkpoint: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) Error::io("cannot open checkpoint: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j;
    try {
        j = json::from_cbor(bytes);
    } catch (const json::parse_error& e) {
        Error::validation("checkpoint: not a valid container: " + std::string(e.what()));
    }
    require_valid(j.value("format", "") == kCheckpointFormat, "checkpoint: unknown format field");
    require_valid(j.contains("version"), "checkpoint: missing version field");
    require_valid(j.at("version").get<int>() == kCheckpointVersion,
                  "checkpoint: unsupported version " + j.at("version").dump());

    CheckpointData data;
    data.config = train_config_from_json(j.at("train_config"), false);
    data.epochs_completed = j.at("epochs_completed").get<int>();
    data.master_seed = j.at("rng").at("master_seed").get<uint64_t>();
    data.params = params_from_json(j.at("params"));
    if (j.contains("adam")) {
        data.has_adam = true;
        data.adam.step = j.at("adam").at("step").get<int64_t>();
        data.adam.m = params_from_json(j.at("adam").at("m"));
        data.adam.v = params_from_json(j.at("adam").at("v"));
    }
    data.best.epoch = j.at("best").at("epoch").get<int>();
    data.best.train_px = j.at("best").at("train_px").get<double>();
    data.best.params = params_from_json(j.at("best").at("params"));
    return data;
}

std::map<std::string, std::vector<float>> snapshot_params(GazeNet& net) {
    std::map<std::string, std::vector<float>> out;
    for (auto& [name, p] : net.named_params())
        out[name].assign(p->value.data(), p->value.data() + p->value.size());
    return out;
}

void restore_params(GazeNet& net, const std::map<std::string, std::vector<float>>& params) {
    for (auto& [name, p] : net.named_params()) {
        auto it = params.find(name);
        require(it != params.end(), ErrorKind::validation, "checkpoint: missing parameter " + name);
        require(static_cast<Eigen::Index>(it->second.size()) == p->value.size(),
                ErrorKind::validation, "checkpoint: size mismatch for parameter " + name);
        std::copy(it->second.begin(), it->second.end(), p->value.data());
    }
}

GazeNet model_from_checkpoint(const CheckpointData& data) {
    GazeNet net(data.config.model, data.master_seed);
    restore_params(net, data.params);
    return net;
}

} // namespace pogest
