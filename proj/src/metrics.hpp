#pragma once

#include <span>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace pogest {

struct ErrorSummary {
    double mean = 0.0;
    double median = 0.0;
    std::vector<std::pair<double, double>> cdf; // (threshold px, fraction <= threshold)
};

// Euclidean distance between prediction and annotation.
double pixel_error(const GazePoint& pred, const GazePoint& gt);

// Exact mean/median plus the CDF at the supplied thresholds.
ErrorSummary summarize_errors(std::span<const double> errors,
                              std::span<const double> thresholds = {});

struct AngleModel {
    double deg_per_px = 0.0;
};

// Least-squares slope through the origin over (pixels, degrees) pairs.
AngleModel fit_angle_model(std::span<const std::pair<double, double>> px_deg_pairs);

double px_to_degrees(double err_px, const AngleModel& m);

// Saliency-style AUC for a point predictor: the score map is the negative
// distance to the prediction, the annotated point is the positive, and
// `negatives` uniform in-frame points are the negatives.
double auc_score(const GazePoint& pred, const GazePoint& gt, int width, int height,
                 int negatives, Rng& rng);

} // namespace pogest
