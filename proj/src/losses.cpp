#include "losses.hpp"

#include <cmath>

namespace pogest {

namespace {
constexpr double kUnitNormTol = 1e-4;

void check_unit_norm(const Eigen::VectorXd& v, const char* which) {
    require_valid(std::abs(v.norm() - 1.0) <= kUnitNormTol,
                  std::string("triplet loss: ") + which +
                      " embedding is not unit-norm; normalize upstream");
}
} // namespace

double weighted_distance_loss(const GazePoint& pred, const GazePoint& gt, const LossConfig& cfg) {
    cfg.validate();
    require_valid(pred.finite() && gt.finite(), "distance loss: non-finite points");
    const double d = distance(pred, gt);
    return cfg.beta * std::max(0.0, d - cfg.tau) - cfg.alpha * std::max(0.0, cfg.tau - d);
}

GazePoint weighted_distance_loss_grad(const GazePoint& pred, const GazePoint& gt,
                                      const LossConfig& cfg, double* loss_out) {
    cfg.validate();
    require_valid(pred.finite() && gt.finite(), "distance loss: non-finite points");
    const double d = distance(pred, gt);
    if (loss_out)
        *loss_out = cfg.beta * std::max(0.0, d - cfg.tau) - cfg.alpha * std::max(0.0, cfg.tau - d);
    if (d == 0.0) return {0.0, 0.0};
    const double slope = (d > cfg.tau) ? cfg.beta : cfg.alpha; // lower branch at d == tau
    const double gx = slope * (pred.x - gt.x) / d;
    const double gy = slope * (pred.y - gt.y) / d;
    return {gx, gy};
}

double triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                    const Eigen::VectorXd& negative, const LossConfig& cfg) {
    cfg.validate();
    check_unit_norm(anchor, "anchor");
    check_unit_norm(positive, "positive");
    check_unit_norm(negative, "negative");
    const double dp = (anchor - positive).norm();
    const double dn = (anchor - negative).norm();
    return std::max(0.0, dp - dn + cfg.mu);
}

TripletGrad triplet_loss_grad(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                              const Eigen::VectorXd& negative, const LossConfig& cfg) {
    TripletGrad out;
    out.loss = triplet_loss(anchor, positive, negative, cfg);
    const Eigen::Index dim = anchor.size();
    out.d_anchor = Eigen::VectorXd::Zero(dim);
    out.d_positive = Eigen::VectorXd::Zero(dim);
    out.d_negative = Eigen::VectorXd::Zero(dim);
    if (out.loss <= 0.0) return out; // hinge inactive (zero at the boundary)

    const Eigen::VectorXd ap = anchor - positive;
    const Eigen::VectorXd an = anchor - negative;
    const double dp = ap.norm();
    const double dn = an.norm();
    if (dp > 0.0) {
        out.d_anchor += ap / dp;
        out.d_positive -= ap / dp;
    }
    if (dn > 0.0) {
        out.d_anchor -= an / dn;
        out.d_negative += an / dn;
    }
    return out;
}

TripletBatch sample_triplets(std::span<const int> session_of, Rng& rng) {
    const int n = static_cast<int>(session_of.size());
    TripletBatch out;
    for (int i = 0; i < n; ++i) {
        std::vector<int> same, other;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            (session_of[j] == session_of[i] ? same : other).push_back(j);
        }
        if (same.empty() || other.empty()) {
            out.skipped.push_back(i);
            continue;
        }
        Triplet t;
        t.anchor = i;
        t.positive = same[static_cast<size_t>(rng.uniform_int(same.size()))];
        t.negative = other[static_cast<size_t>(rng.uniform_int(other.size()))];
        out.triples.push_back(t);
    }
    out.degenerate = (n > 0 && out.triples.empty());
    return out;
}

TotalLoss total_loss(std::span<const GazePoint> preds, const Eigen::MatrixXd& embeddings,
                     std::span<const GazePoint> gts, const TripletBatch& triplets,
                     const LossConfig& cfg) {
    cfg.validate();
    const size_t n = preds.size();
    require_valid(gts.size() == n, "total loss: prediction/ground-truth length mismatch");
    require_valid(static_cast<size_t>(embeddings.cols()) == n || (n > 0 && triplets.triples.empty() &&
                                                                  embeddings.cols() == 0),
                  "total loss: embedding count mismatch");
    require_valid(n > 0, "total loss: empty batch");

    TotalLoss out;
    out.d_pred.resize(n);
    out.d_embedding = Eigen::MatrixXd::Zero(embeddings.rows(), embeddings.cols());

    const double inv_n = 1.0 / static_cast<double>(n);
    double dist_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double li = 0.0;
        GazePoint g = weighted_distance_loss_grad(preds[i], gts[i], cfg, &li);
        dist_sum += li;
        out.d_pred[i] = {g.x * inv_n, g.y * inv_n};
    }

    double trip_sum = 0.0;
    for (const auto& t : triplets.triples) {
        TripletGrad g = triplet_loss_grad(embeddings.col(t.anchor), embeddings.col(t.positive),
                                          embeddings.col(t.negative), cfg);
        trip_sum += g.loss;
        out.d_embedding.col(t.anchor) += g.d_anchor * inv_n;
        out.d_embedding.col(t.positive) += g.d_positive * inv_n;
        out.d_embedding.col(t.negative) += g.d_negative * inv_n;
    }

    out.mean_dist = dist_sum * inv_n;
    out.mean_trip = trip_sum * inv_n;
    out.total = out.mean_dist + out.mean_trip;
    return out;
}

} // namespace pogest
