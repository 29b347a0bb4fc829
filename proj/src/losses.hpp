#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace pogest {

struct LossConfig {
    double alpha = 0.1; // slope below the distance threshold
    double beta = 2.0;  // slope above it
    double tau = 5.0;   // threshold, pixels
    double mu = 0.2;    // triplet margin

    void validate() const {
        require_valid(alpha > 0.0 && alpha < beta, "loss config: requires 0 < alpha < beta");
        require_valid(tau > 0.0, "loss config: tau must be positive");
        require_valid(mu > 0.0, "loss config: mu must be positive");
    }
};

// beta*relu(d - tau) - alpha*relu(tau - d) with d the Euclidean prediction
// error. Continuous, piecewise linear, minimum -alpha*tau at d = 0.
double weighted_distance_loss(const GazePoint& pred, const GazePoint& gt, const LossConfig& cfg);

// Gradient w.r.t. pred. Subgradients are pinned to the lower branch: slope
// alpha at d == tau, zero at d == 0.
GazePoint weighted_distance_loss_grad(const GazePoint& pred, const GazePoint& gt,
                                      const LossConfig& cfg, double* loss_out = nullptr);

// relu(|a-p| - |a-n| + mu) over unit-norm embeddings. Inputs more than 1e-4
// away from unit norm are rejected as a missing upstream normalization.
double triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                    const Eigen::VectorXd& negative, const LossConfig& cfg);

struct TripletGrad {
    double loss = 0.0;
    Eigen::VectorXd d_anchor, d_positive, d_negative;
};
TripletGrad triplet_loss_grad(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                              const Eigen::VectorXd& negative, const LossConfig& cfg);

struct Triplet {
    int anchor = 0;
    int positive = 0;
    int negative = 0;
};

struct TripletBatch {
    std::vector<Triplet> triples;
    std::vector<int> skipped; // anchors without a valid partner pair
    bool degenerate = false;  // every anchor skipped
};

// For each anchor, draws a positive uniformly from same-session batch
// members and a negative uniformly from other-session members. Anchors
// lacking either are skipped.
TripletBatch sample_triplets(std::span<const int> session_of, Rng& rng);

struct TotalLoss {
    double total = 0.0;
    double mean_dist = 0.0;
    double mean_trip = 0.0;
    std::vector<GazePoint> d_pred;  // dL/d pred, per sample
    Eigen::MatrixXd d_embedding;    // dL/d embedding, dim x n
};

// (1/n) sum_i [dist_loss_i + trip_loss_i], with zero triplet contribution
// for skipped anchors, plus analytic gradients w.r.t. predictions and
// embeddings.
TotalLoss total_loss(std::span<const GazePoint> preds, const Eigen::MatrixXd& embeddings,
                     std::span<const GazePoint> gts, const TripletBatch& triplets,
                     const LossConfig& cfg);

} // namespace pogest
