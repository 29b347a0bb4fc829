#include "trainer_config.hpp"

#include <fstream>
#include <set>

namespace pogest {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        require_valid(allowed.count(it.key()) > 0,
                      "train config: unknown key '" + it.key() + "' in " + where);
}

} // namespace

json train_config_to_json(const TrainConfig& cfg) {
    return json{
        {"learning_rate", cfg.learning_rate},
        {"batch_size", cfg.batch_size},
        {"epochs", cfg.epochs},
        {"rng_seed", cfg.rng_seed},
        {"checkpoint_every", cfg.checkpoint_every},
        {"loss",
         {{"alpha", cfg.loss.alpha}, {"beta", cfg.loss.beta}, {"tau", cfg.loss.tau}, {"mu", cfg.loss.mu}}},
        {"model",
         {{"input_side", cfg.model.input_side},
          {"backbone_width", cfg.model.backbone_width},
          {"backbone_depth", cfg.model.backbone_depth},
          {"head_hidden", cfg.model.head_hidden},
          {"dropout_rate", cfg.model.dropout_rate},
          {"embedding_dim", cfg.model.embedding_dim}}},
        {"ablation", {{"use_triplet", cfg.ablation.use_triplet}, {"use_scene", cfg.ablation.use_scene}}}};
}

TrainConfig train_config_from_json(const json& j, bool require_seed) {
    check_keys(j, {"learning_rate", "batch_size", "epochs", "rng_seed", "checkpoint_every", "loss",
                   "model", "ablation", "preset"},
               "root");
    TrainConfig cfg;
    if (j.contains("preset")) {
        const std::string preset = j.at("preset").get<std::string>();
        if (preset == "desk") {
            cfg.model = ModelConfig::desk();
        } else if (preset == "reference") {
            cfg.model = ModelConfig::reference();
        } else {
            Error::validation("train config: unknown model preset '" + preset + "'");
        }
    }
    if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
    require_valid(!require_seed || j.contains("rng_seed"), "train config: rng_seed is mandatory");
    if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<uint64_t>();
    if (j.contains("checkpoint_every")) cfg.checkpoint_every = j.at("checkpoint_every").get<int>();
    if (j.contains("loss")) {
        const auto& l = j.at("loss");
        check_keys(l, {"alpha", "beta", "tau", "mu"}, "loss");
        if (l.contains("alpha")) cfg.loss.alpha = l.at("alpha").get<double>();
        if (l.contains("beta")) cfg.loss.beta = l.at("beta").get<double>();
        if (l.contains("tau")) cfg.loss.tau = l.at("tau").get<double>();
        if (l.contains("mu")) cfg.loss.mu = l.at("mu").get<double>();
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        check_keys(m, {"input_side", "backbone_width", "backbone_depth", "head_hidden",
                       "dropout_rate", "embedding_dim"},
                   "model");
        if (m.contains("input_side")) cfg.model.input_side = m.at("input_side").get<int>();
        if (m.contains("backbone_width")) cfg.model.backbone_width = m.at("backbone_width").get<int>();
        if (m.contains("backbone_depth")) cfg.model.backbone_depth = m.at("backbone_depth").get<int>();
        if (m.contains("head_hidden")) cfg.model.head_hidden = m.at("head_hidden").get<int>();
        if (m.contains("dropout_rate")) cfg.model.dropout_rate = m.at("dropout_rate").get<double>();
        if (m.contains("embedding_dim")) cfg.model.embedding_dim = m.at("embedding_dim").get<int>();
    }
    if (j.contains("ablation")) {
        const auto& a = j.at("ablation");
        check_keys(a, {"use_triplet", "use_scene"}, "ablation");
        if (a.contains("use_triplet")) cfg.ablation.use_triplet = a.at("use_triplet").get<bool>();
        if (a.contains("use_scene")) cfg.ablation.use_scene = a.at("use_scene").get<bool>();
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) Error::io("cannot open train config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        Error::validation("train config: invalid JSON in " + path + ": " + e.what());
    }
    return train_config_from_json(j, true);
}

} // namespace pogest
