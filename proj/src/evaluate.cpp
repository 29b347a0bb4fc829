#include "evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "baselines.hpp"
#include "error.hpp"
#include "plots.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pogest {

namespace {

std::vector<double> default_thresholds(double max_err) {
    std::vector<double> t;
    const double hi = std::max(1.0, std::ceil(max_err));
    for (int i = 0; i <= 64; ++i) t.push_back(hi * i / 64.0);
    return t;
}

MethodResult score_method(const std::string& name, std::span<const GazePoint> preds,
                          std::span<const GazePoint> gts, int width, int height,
                          const EvalOptions& options) {
    std::vector<double> errors(preds.size());
    for (size_t i = 0; i < preds.size(); ++i) errors[i] = pixel_error(preds[i], gts[i]);
    const double max_err = *std::max_element(errors.begin(), errors.end());

    MethodResult out;
    out.name = name;
    out.summary = summarize_errors(errors, default_thresholds(max_err));

    Rng rng = Rng(options.rng_seed).child("auc/" + name);
    double auc_sum = 0.0;
    for (size_t i = 0; i < preds.size(); ++i)
        auc_sum += auc_score(preds[i], gts[i], width, height, options.auc_negatives, rng);
    out.auc = auc_sum / static_cast<double>(preds.size());
    return out;
}

EvalReport evaluate_common(const DatasetManifest& manifest, GazeNet* net,
                           const AblationConfig& ablation, const EvalOptions& options) {
    LoadedDataset test = load_dataset(manifest, Split::test, true);
    require_valid(!test.samples.empty(), "evaluation: empty test split");
    LoadedDataset train = load_dataset(manifest, Split::train, true);
    require_valid(!train.samples.empty(), "evaluation: empty train split");

    EvalReport report;
    report.width = test.width;
    report.height = test.height;
    report.n_test = test.samples.size();
    report.deg_per_px = options.deg_per_px;

    std::vector<GazePoint> gts(test.samples.size());
    for (size_t i = 0; i < test.samples.size(); ++i) gts[i] = *test.samples[i].gaze;

    if (net) {
        ForwardBatch fb = predict_dataset(*net, test, ablation, options.batch_size);
        MethodResult m = score_method("gaze-net", fb.points, gts, test.width, test.height, options);
        report.model_errors.resize(test.samples.size());
        for (size_t i = 0; i < test.samples.size(); ++i)
            report.model_errors[i] = pixel_error(fb.points[i], gts[i]);
        report.methods.push_back(std::move(m));
        report.embedding = embedding_cluster_stats(fb.embeddings, test.session_of,
                                                   Rng(options.rng_seed).child("bootstrap").seed());
    }

    std::vector<GazePoint> train_gazes(train.samples.size());
    for (size_t i = 0; i < train.samples.size(); ++i) train_gazes[i] = *train.samples[i].gaze;

    {
        const GazePoint c = baseline_center(test.width, test.height);
        std::vector<GazePoint> preds(test.samples.size(), c);
        report.methods.push_back(
            score_method("center-point", preds, gts, test.width, test.height, options));
    }
    {
        const GazePoint f = baseline_fixed(train_gazes);
        std::vector<GazePoint> preds(test.samples.size(), f);
        report.methods.push_back(
            score_method("fixed-point", preds, gts, test.width, test.height, options));
    }
    {
        MethodResult m;
        m.name = "linear-regression";
        try {
            std::vector<std::vector<double>> x;
            x.reserve(train.samples.size());
            for (const auto& s : train.samples) x.push_back(linreg_features(s.landmarks));
            LinRegModel lr = fit_linreg(x, train_gazes);
            std::vector<GazePoint> preds(test.samples.size());
            for (size_t i = 0; i < test.samples.size(); ++i)
                preds[i] = lr.predict(linreg_features(test.samples[i].landmarks));
            m = score_method(m.name, preds, gts, test.width, test.height, options);
            if (lr.ridge_fallback) m.note = "rank-deficient design, ridge fallback";
        } catch (const Error& e) {
            m.available = false;
            m.note = e.what();
        }
        report.methods.push_back(std::move(m));
    }
    {
        MethodResult m;
        m.name = "car-in-front";
        bool any_boxes = false;
        for (const auto& s : test.samples) any_boxes |= !s.object_boxes.empty();
        if (!any_boxes) {
            m.available = false;
            m.note = "no object boxes in manifest";
        } else {
            std::vector<GazePoint> preds(test.samples.size());
            size_t fallbacks = 0;
            for (size_t i = 0; i < test.samples.size(); ++i) {
                CarInFront r =
                    baseline_car_in_front(test.samples[i].object_boxes, test.width, test.height);
                preds[i] = r.point;
                fallbacks += r.fallback ? 1 : 0;
            }
            m = score_method(m.name, preds, gts, test.width, test.height, options);
            if (fallbacks > 0)
                m.note = std::to_string(fallbacks) + " samples fell back to the frame center";
        }
        report.methods.push_back(std::move(m));
    }

    return report;
}

} // namespace

EvalReport evaluate_model(const DatasetManifest& manifest, GazeNet& net,
                          const AblationConfig& ablation, const EvalOptions& options) {
    return evaluate_common(manifest, &net, ablation, options);
}

EvalReport evaluate_checkpoint(const DatasetManifest& manifest, const std::string& checkpoint_path,
                               const EvalOptions& options) {
    CheckpointData ck = load_checkpoint(checkpoint_path);
    GazeNet net = model_from_checkpoint(ck);
    return evaluate_common(manifest, &net, ck.config.ablation, options);
}

EvalReport evaluate_baselines(const DatasetManifest& manifest, const EvalOptions& options) {
    AblationConfig abl;
    return evaluate_common(manifest, nullptr, abl, options);
}

EmbeddingStats embedding_cluster_stats(const Eigen::MatrixXd& embeddings,
                                       std::span<const int> session_of, uint64_t seed,
                                       int bootstrap_rounds, int per_session_cap) {
    require_valid(static_cast<size_t>(embeddings.cols()) == session_of.size(),
                  "embedding stats: size mismatch");

    std::map<int, std::vector<int>> by_session;
    for (size_t i = 0; i < session_of.size(); ++i)
        by_session[session_of[i]].push_back(static_cast<int>(i));

    EmbeddingStats out;
    out.n_sessions = by_session.size();
    if (by_session.size() < 2) return out;

    // Cap per-session membership to keep the pair sums tractable.
    Rng rng(seed);
    std::vector<std::vector<int>> groups;
    for (auto& [sid, idx] : by_session) {
        if (static_cast<int>(idx.size()) > per_session_cap) {
            rng.child("cap", static_cast<uint64_t>(sid)).shuffle(idx);
            idx.resize(per_session_cap);
        }
        groups.push_back(idx);
    }

    auto mean_dists = [&](const std::vector<std::vector<int>>& gs, double* intra, double* inter) {
        double intra_sum = 0.0, inter_sum = 0.0;
        size_t intra_n = 0, inter_n = 0;
        for (size_t g = 0; g < gs.size(); ++g) {
            for (size_t i = 0; i < gs[g].size(); ++i)
                for (size_t j = i + 1; j < gs[g].size(); ++j) {
                    intra_sum += (embeddings.col(gs[g][i]) - embeddings.col(gs[g][j])).norm();
                    ++intra_n;
                }
            for (size_t h = g + 1; h < gs.size(); ++h)
                for (int a : gs[g])
                    for (int b : gs[h]) {
                        inter_sum += (embeddings.col(a) - embeddings.col(b)).norm();
                        ++inter_n;
                    }
        }
        *intra = intra_n ? intra_sum / static_cast<double>(intra_n) : 0.0;
        *inter = inter_n ? inter_sum / static_cast<double>(inter_n) : 0.0;
    };

    mean_dists(groups, &out.mean_intra, &out.mean_inter);
    out.gap = out.mean_inter - out.mean_intra;

    std::vector<double> gaps(bootstrap_rounds);
    for (int r = 0; r < bootstrap_rounds; ++r) {
        Rng rr = rng.child("round", static_cast<uint64_t>(r));
        std::vector<std::vector<int>> resampled(groups.size());
        for (size_t g = 0; g < groups.size(); ++g) {
            resampled[g].resize(groups[g].size());
            for (auto& v : resampled[g])
                v = groups[g][static_cast<size_t>(rr.uniform_int(groups[g].size()))];
        }
        double intra = 0.0, inter = 0.0;
        mean_dists(resampled, &intra, &inter);
        gaps[r] = inter - intra;
    }
    std::sort(gaps.begin(), gaps.end());
    const auto pct = [&](double q) {
        const double pos = q * (gaps.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(gaps.size() - 1, lo + 1);
        return gaps[lo] + (gaps[hi] - gaps[lo]) * (pos - lo);
    };
    out.gap_ci_low = pct(0.025);
    out.gap_ci_high = pct(0.975);
    return out;
}

void write_eval_report(const EvalReport& report, const std::string& report_dir) {
    fs::create_directories(report_dir);

    json methods = json::array();
    for (const auto& m : report.methods) {
        json mj;
        mj["name"] = m.name;
        mj["available"] = m.available;
        if (!m.note.empty()) mj["note"] = m.note;
        if (m.available) {
            mj["mean_px"] = m.summary.mean;
            mj["median_px"] = m.summary.median;
            mj["auc"] = m.auc;
            if (report.deg_per_px) {
                mj["mean_deg"] = px_to_degrees(m.summary.mean, {*report.deg_per_px});
                mj["median_deg"] = px_to_degrees(m.summary.median, {*report.deg_per_px});
            }
        }
        methods.push_back(mj);
    }

    json j;
    j["n_test"] = report.n_test;
    j["frame"] = {report.width, report.height};
    j["methods"] = methods;
    if (report.deg_per_px) j["deg_per_px"] = *report.deg_per_px;
    if (report.embedding.n_sessions >= 2) {
        j["embedding"] = {{"mean_intra", report.embedding.mean_intra},
                          {"mean_inter", report.embedding.mean_inter},
                          {"gap", report.embedding.gap},
                          {"gap_ci_low", report.embedding.gap_ci_low},
                          {"gap_ci_high", report.embedding.gap_ci_high}};
    }
    if (!report.model_errors.empty()) {
        const auto& model = report.methods.front();
        json cdf = json::array();
        for (const auto& [t, frac] : model.summary.cdf) cdf.push_back({t, frac});
        j["model_error_cdf"] = cdf;
    }

    std::ofstream out((fs::path(report_dir) / "report.json").string());
    if (!out) Error::io("cannot write report under " + report_dir);
    out << j.dump(2) << '\n';

    if (!report.model_errors.empty()) {
        plot_histogram((fs::path(report_dir) / "error_pdf.png").string(),
                       "PREDICTION ERROR DENSITY PX", report.model_errors, 24);
        const auto& cdf = report.methods.front().summary.cdf;
        std::vector<double> xs;
        PlotSeries s{"CDF", {}};
        for (const auto& [t, frac] : cdf) {
            xs.push_back(t);
            s.values.push_back(frac);
        }
        const PlotSeries series[] = {s};
        plot_lines((fs::path(report_dir) / "error_cdf.png").string(),
                   "PREDICTION ERROR CUMULATIVE PX", xs, series);
    }
}

LosoReport leave_one_subject_out(const DatasetManifest& manifest, const TrainConfig& cfg,
                                 const std::string& out_dir) {
    manifest.validate();
    fs::create_directories(out_dir);

    // Subjects owning at least one test session, in manifest order.
    std::vector<std::string> subjects;
    for (const auto& s : manifest.sessions) {
        auto it = manifest.split.find(s.session_id);
        require_valid(it != manifest.split.end(), "loso: manifest has no split for " + s.session_id);
        if (it->second == Split::test &&
            std::find(subjects.begin(), subjects.end(), s.subject_id) == subjects.end())
            subjects.push_back(s.subject_id);
    }
    require_valid(subjects.size() >= 2, "loso: needs at least 2 subjects with test sessions");

    LosoReport report;
    for (const auto& subject : subjects) {
        DatasetManifest fold = manifest;
        fold.base_dir = manifest.base_dir;
        std::erase_if(fold.sessions, [&](const SessionRecord& s) {
            return s.subject_id == subject && manifest.split.at(s.session_id) == Split::train;
        });
        for (auto it = fold.split.begin(); it != fold.split.end();) {
            if (!fold.find_session(it->first)) {
                it = fold.split.erase(it);
            } else {
                ++it;
            }
        }

        std::vector<std::string> train_sessions;
        std::set<std::string> train_subjects;
        for (const auto& [sid, sp] : fold.split) {
            if (sp == Split::train) {
                train_sessions.push_back(sid);
                train_subjects.insert(fold.find_session(sid)->subject_id);
            }
        }
        if (train_sessions.size() < 2) {
            report.skipped.push_back(subject);
            continue;
        }

        const std::string fold_dir = (fs::path(out_dir) / ("loso_" + subject)).string();
        TrainResult tr = train_model(fold, cfg, fold_dir);

        // Evaluate on the held-out subject's test sessions only.
        DatasetManifest eval_manifest = manifest;
        eval_manifest.base_dir = manifest.base_dir;
        eval_manifest.split.clear();
        for (const auto& s : manifest.sessions) {
            const Split sp = manifest.split.at(s.session_id);
            if (s.subject_id == subject && sp == Split::test) {
                eval_manifest.split[s.session_id] = Split::test;
            } else {
                eval_manifest.split[s.session_id] = Split::train;
            }
        }

        CheckpointData ck = load_checkpoint(tr.checkpoint_best);
        GazeNet net = model_from_checkpoint(ck);
        LoadedDataset test = load_dataset(eval_manifest, Split::test, true);
        ForwardBatch fb = predict_dataset(net, test, cfg.ablation);
        std::vector<double> errors(test.samples.size());
        for (size_t i = 0; i < test.samples.size(); ++i)
            errors[i] = pixel_error(fb.points[i], *test.samples[i].gaze);

        LosoSubjectResult r;
        r.subject = subject;
        r.trained_sessions = train_sessions;
        for (const auto& s : manifest.sessions)
            if (s.subject_id == subject && manifest.split.at(s.session_id) == Split::test)
                r.test_sessions.push_back(s.session_id);
        r.summary = summarize_errors(errors, default_thresholds(
                                                 *std::max_element(errors.begin(), errors.end())));
        report.subjects.push_back(std::move(r));
    }
    return report;
}

void write_loso_report(const LosoReport& report, const std::string& out_dir) {
    fs::create_directories(out_dir);
    json subjects = json::array();
    for (const auto& r : report.subjects) {
        subjects.push_back({{"subject", r.subject},
                            {"trained_sessions", r.trained_sessions},
                            {"test_sessions", r.test_sessions},
                            {"mean_px", r.summary.mean},
                            {"median_px", r.summary.median}});
    }
    json j;
    j["subjects"] = subjects;
    j["skipped"] = report.skipped;
    std::ofstream out((fs::path(out_dir) / "loso_report.json").string());
    if (!out) Error::io("cannot write loso report under " + out_dir);
    out << j.dump(2) << '\n';

    if (!report.subjects.empty()) {
        std::vector<std::string> labels;
        PlotSeries mean{"MEAN PX", {}}, median{"MEDIAN PX", {}};
        for (const auto& r : report.subjects) {
            labels.push_back(r.subject);
            mean.values.push_back(r.summary.mean);
            median.values.push_back(r.summary.median);
        }
        const PlotSeries series[] = {mean, median};
        plot_bars((fs::path(out_dir) / "loso_errors.png").string(),
                  "HELD-OUT SUBJECT PREDICTION ERROR", labels, series);
    }
}

} // namespace pogest
