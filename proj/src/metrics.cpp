#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace pogest {

double pixel_error(const GazePoint& pred, const GazePoint& gt) {
    require_valid(pred.finite() && gt.finite(), "pixel error: non-finite points");
    return distance(pred, gt);
}

ErrorSummary summarize_errors(std::span<const double> errors, std::span<const double> thresholds) {
    require_valid(!errors.empty(), "error summary: empty list");
    ErrorSummary out;
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());

    double sum = 0.0;
    for (double e : sorted) sum += e;
    out.mean = sum / static_cast<double>(sorted.size());

    const size_t n = sorted.size();
    out.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    for (double t : thresholds) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
        out.cdf.emplace_back(t, static_cast<double>(it - sorted.begin()) / static_cast<double>(n));
    }
    return out;
}

AngleModel fit_angle_model(std::span<const std::pair<double, double>> px_deg_pairs) {
    require_valid(!px_deg_pairs.empty(), "angle model: no pairs");
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [px, deg] : px_deg_pairs) {
        require_valid(px >= 0.0, "angle model: negative pixel error");
        sxx += px * px;
        sxy += px * deg;
    }
    require_valid(sxx > 0.0, "angle model: all pixel values are zero");
    return {sxy / sxx};
}

double px_to_degrees(double err_px, const AngleModel& m) {
    require_valid(m.deg_per_px > 0.0, "angle model: deg_per_px must be positive");
    require_valid(err_px >= 0.0, "angle model: negative error");
    return err_px * m.deg_per_px;
}

double auc_score(const GazePoint& pred, const GazePoint& gt, int width, int height,
                 int negatives, Rng& rng) {
    require_valid(negatives > 0, "auc: needs at least one negative");
    require_valid(gt.in_frame(width, height), "auc: annotation out of frame");
    const double pos_score = -distance(gt, pred);
    int below = 0, ties = 0;
    for (int i = 0; i < negatives; ++i) {
        const GazePoint q{rng.uniform(0.0, width), rng.uniform(0.0, height)};
        const double s = -distance(q, pred);
        if (s < pos_score) {
            ++below;
        } else if (s == pos_score) {
            ++ties;
        }
    }
    return (below + 0.5 * ties) / static_cast<double>(negatives);
}

} // namespace pogest
