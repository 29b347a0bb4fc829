#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>

#include "assemble.hpp"
#include "error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pogest {

namespace {

class Adam {
public:
    Adam(nn::ParamRefs params, double lr) : params_(std::move(params)), lr_(lr) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (auto* p : params_) {
            m_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
            v_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
        }
    }

    void step() {
        ++t_;
        const float b1 = 0.9f, b2 = 0.999f, eps = 1e-8f;
        const float c1 = 1.0f - std::pow(b1, static_cast<float>(t_));
        const float c2 = 1.0f - std::pow(b2, static_cast<float>(t_));
        const float lr = static_cast<float>(lr_);
        for (size_t i = 0; i < params_.size(); ++i) {
            nn::Mat& g = params_[i]->grad;
            m_[i] = b1 * m_[i] + (1.0f - b1) * g;
            v_[i] = b2 * v_[i] + (1.0f - b2) * g.cwiseProduct(g);
            params_[i]->value.array() -=
                lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
        }
    }

    void zero_grad() {
        for (auto* p : params_) p->zero_grad();
    }

    int64_t step_count() const { return t_; }

    AdamState save() const {
        AdamState s;
        s.step = t_;
        for (size_t i = 0; i < params_.size(); ++i) {
            s.m[params_[i]->name].assign(m_[i].data(), m_[i].data() + m_[i].size());
            s.v[params_[i]->name].assign(v_[i].data(), v_[i].data() + v_[i].size());
        }
        return s;
    }

    void restore(const AdamState& s) {
        t_ = s.step;
        for (size_t i = 0; i < params_.size(); ++i) {
            const auto& name = params_[i]->name;
            auto mi = s.m.find(name);
            auto vi = s.v.find(name);
            require(mi != s.m.end() && vi != s.v.end(), ErrorKind::validation,
                    "checkpoint: missing optimizer state for " + name);
            require(static_cast<Eigen::Index>(mi->second.size()) == m_[i].size(),
                    ErrorKind::validation, "checkpoint: optimizer state size mismatch for " + name);
            std::copy(mi->second.begin(), mi->second.end(), m_[i].data());
            std::copy(vi->second.begin(), vi->second.end(), v_[i].data());
        }
    }

private:
    nn::ParamRefs params_;
    double lr_;
    int64_t t_ = 0;
    std::vector<nn::Mat> m_, v_;
};

struct BatchTensors {
    nn::Tensor calib_input;
    nn::Tensor reg_input;
};

BatchTensors assemble_batch(const LoadedDataset& data, std::span<const int> indices,
                            const ModelConfig& model, const AblationConfig& ablation) {
    require_valid(data.facial_roi.has_value(),
                  "dataset pins no facial ROI; generate data with one or add it to the manifest");
    const int n = static_cast<int>(indices.size());
    const int side = model.input_side;
    BatchTensors t;
    t.calib_input = nn::Tensor(n, 6, side, side);
    t.reg_input = nn::Tensor(n, 12 + model.embedding_dim, side, side);
    for (int k = 0; k < n; ++k) {
        const LoadedSample& s = data.samples[indices[k]];
        assemble_calibration_channels(t.calib_input, k, s);
        assemble_image_channels(t.reg_input, k, s, *data.facial_roi, ablation.use_scene);
    }
    return t;
}

std::vector<GazePoint> to_pixel_points(const nn::Mat& out01, int width, int height) {
    std::vector<GazePoint> pts(out01.cols());
    for (Eigen::Index i = 0; i < out01.cols(); ++i)
        pts[i] = {static_cast<double>(out01(0, i)) * width, static_cast<double>(out01(1, i)) * height};
    return pts;
}

} // namespace

std::vector<std::vector<int>> plan_batches(std::span<const int> session_of, int batch_size, Rng rng) {
    const int n = static_cast<int>(session_of.size());
    require_valid(n > 0, "batch plan: empty dataset");
    const int k = (n + batch_size - 1) / batch_size;

    std::map<int, std::vector<int>> by_session;
    for (int i = 0; i < n; ++i) by_session[session_of[i]].push_back(i);

    std::vector<std::vector<int>> batches(static_cast<size_t>(k));
    for (auto& [session, items] : by_session) {
        rng.shuffle(items);
        const int start = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(k)));
        for (size_t i = 0; i < items.size(); ++i)
            batches[(start + i) % k].push_back(items[i]);
    }
    for (auto& b : batches) rng.shuffle(b);
    return batches;
}

ForwardBatch predict_batch(GazeNet& net, const LoadedDataset& data, std::span<const int> indices,
                           const AblationConfig& ablation, nn::Mode mode, Rng* dropout_rng) {
    BatchTensors t = assemble_batch(data, indices, net.config(), ablation);
    nn::Mat embeddings = net.calibration().forward(t.calib_input, mode);
    for (int kI = 0; kI < static_cast<int>(indices.size()); ++kI)
        set_calibration_channels(t.reg_input, kI, embeddings.col(kI));
    nn::Mat out01 = net.regression().forward(t.reg_input, mode, dropout_rng);

    ForwardBatch out;
    out.points = to_pixel_points(out01, data.width, data.height);
    out.embeddings = embeddings.cast<double>();
    return out;
}

ForwardBatch predict_dataset(GazeNet& net, const LoadedDataset& data,
                             const AblationConfig& ablation, int batch_size) {
    ForwardBatch all;
    const int n = static_cast<int>(data.samples.size());
    all.embeddings.resize(net.config().embedding_dim, n);
    all.points.resize(n);
    for (int start = 0; start < n; start += batch_size) {
        std::vector<int> idx;
        for (int i = start; i < std::min(n, start + batch_size); ++i) idx.push_back(i);
        ForwardBatch fb = predict_batch(net, data, idx, ablation, nn::Mode::eval, nullptr);
        for (size_t k = 0; k < idx.size(); ++k) {
            all.points[idx[k]] = fb.points[k];
            all.embeddings.col(idx[k]) = fb.embeddings.col(k);
        }
    }
    return all;
}

TrainResult train_model(const DatasetManifest& manifest, const TrainConfig& cfg,
                        const std::string& out_dir, const std::string& resume_path) {
    cfg.validate();
    fs::create_directories(out_dir);

    LoadedDataset data = load_dataset(manifest, Split::train, true);
    require_valid(!data.samples.empty(), "training: empty train split");
    {
        std::set<int> distinct(data.session_of.begin(), data.session_of.end());
        require_valid(distinct.size() >= 2,
                      "training: train split has a single session; the triplet objective is undefined");
    }

    GazeNet net(cfg.model, cfg.rng_seed);
    Adam adam(net.params(), cfg.learning_rate);
    int start_epoch = 0;
    BestSnapshot best;
    best.train_px = std::numeric_limits<double>::infinity();

    if (!resume_path.empty()) {
        CheckpointData ck = load_checkpoint(resume_path);
        require_valid(ck.config == cfg, "resume: config differs from the checkpoint's");
        require_valid(ck.has_adam, "resume: checkpoint carries no optimizer state");
        restore_params(net, ck.params);
        adam.restore(ck.adam);
        start_epoch = ck.epochs_completed;
        best = ck.best;
    }

    const Rng root(cfg.rng_seed);
    TrainResult result;
    result.metrics_path = (fs::path(out_dir) / "metrics.jsonl").string();
    result.checkpoint_best = (fs::path(out_dir) / "checkpoint_best.ckpt").string();
    result.checkpoint_last = (fs::path(out_dir) / "checkpoint_last.ckpt").string();

    std::ofstream metrics_out(result.metrics_path, start_epoch == 0 ? std::ios::trunc : std::ios::app);
    if (!metrics_out) Error::io("cannot write metrics log: " + result.metrics_path);

    auto save_last = [&](int completed) {
        CheckpointData ck;
        ck.config = cfg;
        ck.epochs_completed = completed;
        ck.master_seed = cfg.rng_seed;
        ck.params = snapshot_params(net);
        ck.has_adam = true;
        ck.adam = adam.save();
        ck.best = best;
        save_checkpoint(result.checkpoint_last, ck);
    };

    for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
        auto batches = plan_batches(data.session_of, cfg.batch_size, root.child("batches", epoch));

        double dist_sum = 0.0, trip_sum = 0.0, px_sum = 0.0;
        size_t sample_count = 0;

        for (size_t bi = 0; bi < batches.size(); ++bi) {
            const auto& batch = batches[bi];
            {
                std::set<int> sess;
                for (int i : batch) sess.insert(data.session_of[i]);
                if (sess.size() < 2) ++result.degenerate_triplet_batches;
            }

            Rng drop_rng = root.child("dropout", epoch, bi);
            BatchTensors t = assemble_batch(data, batch, cfg.model, cfg.ablation);
            nn::Mat embeddings_f = net.calibration().forward(t.calib_input, nn::Mode::train);
            for (int k = 0; k < static_cast<int>(batch.size()); ++k)
                set_calibration_channels(t.reg_input, k, embeddings_f.col(k));
            nn::Mat out01 = net.regression().forward(t.reg_input, nn::Mode::train, &drop_rng);

            std::vector<GazePoint> preds = to_pixel_points(out01, data.width, data.height);
            std::vector<GazePoint> gts(batch.size());
            std::vector<int> batch_sessions(batch.size());
            for (size_t k = 0; k < batch.size(); ++k) {
                gts[k] = *data.samples[batch[k]].gaze;
                batch_sessions[k] = data.session_of[batch[k]];
            }

            TripletBatch triplets;
            if (cfg.ablation.use_triplet) {
                Rng trip_rng = root.child("triplets", epoch, bi);
                triplets = sample_triplets(batch_sessions, trip_rng);
                if (triplets.degenerate) ++result.degenerate_triplet_batches;
            }

            Eigen::MatrixXd embeddings = embeddings_f.cast<double>();
            TotalLoss loss = total_loss(preds, embeddings, gts, triplets, cfg.loss);
            require(std::isfinite(loss.total), ErrorKind::runtime,
                    "training: non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                        std::to_string(bi));

            adam.zero_grad();

            nn::Mat d_out01(2, static_cast<Eigen::Index>(batch.size()));
            for (size_t k = 0; k < batch.size(); ++k) {
                d_out01(0, k) = static_cast<float>(loss.d_pred[k].x * data.width);
                d_out01(1, k) = static_cast<float>(loss.d_pred[k].y * data.height);
            }
            nn::Tensor d_reg_input = net.regression().backward(d_out01);

            // Embedding gradient: the margin objective plus the tiled
            // calibration channels of the regression input.
            nn::Mat d_embed = loss.d_embedding.cast<float>();
            const size_t plane = d_reg_input.plane_stride();
            for (size_t k = 0; k < batch.size(); ++k) {
                for (int e = 0; e < cfg.model.embedding_dim; ++e) {
                    const float* p = d_reg_input.plane(static_cast<int>(k), kCalibChannel + e);
                    float acc = 0.0f;
                    for (size_t s = 0; s < plane; ++s) acc += p[s];
                    d_embed(e, static_cast<Eigen::Index>(k)) += acc;
                }
            }
            net.calibration().backward(d_embed);
            adam.step();

            for (size_t k = 0; k < batch.size(); ++k) px_sum += distance(preds[k], gts[k]);
            dist_sum += loss.mean_dist * static_cast<double>(batch.size());
            trip_sum += loss.mean_trip * static_cast<double>(batch.size());
            sample_count += batch.size();
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.mean_dist_loss = dist_sum / static_cast<double>(sample_count);
        em.mean_trip_loss = trip_sum / static_cast<double>(sample_count);
        em.mean_px_error = px_sum / static_cast<double>(sample_count);
        result.metrics.push_back(em);

        metrics_out << json{{"epoch", em.epoch},
                            {"dist", em.mean_dist_loss},
                            {"trip", em.mean_trip_loss},
                            {"px", em.mean_px_error}}
                           .dump()
                    << '\n';
        metrics_out.flush();
        std::cerr << "epoch " << em.epoch << "  dist " << em.mean_dist_loss << "  trip "
                  << em.mean_trip_loss << "  px " << em.mean_px_error << '\n';

        if (em.mean_px_error < best.train_px) {
            best.epoch = epoch;
            best.train_px = em.mean_px_error;
            best.params = snapshot_params(net);
        }

        if (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs) save_last(epoch);
    }

    if (best.params.empty()) best.params = snapshot_params(net);
    result.best_epoch = best.epoch;
    result.best_train_px = best.train_px;

    CheckpointData best_ck;
    best_ck.config = cfg;
    best_ck.epochs_completed = best.epoch;
    best_ck.master_seed = cfg.rng_seed;
    best_ck.params = best.params;
    best_ck.has_adam = false;
    best_ck.best = best;
    save_checkpoint(result.checkpoint_best, best_ck);

    return result;
}

} // namespace pogest
