#include "baselines.hpp"

#include <Eigen/Dense>

#include "error.hpp"

namespace pogest {

GazePoint baseline_center(int width, int height) {
    require_valid(width > 0 && height > 0, "center baseline: empty frame");
    return {width / 2.0, height / 2.0};
}

GazePoint baseline_fixed(std::span<const GazePoint> train_gazes) {
    require_valid(!train_gazes.empty(), "fixed-point baseline: no training fixations");
    double sx = 0.0, sy = 0.0;
    for (const auto& g : train_gazes) {
        sx += g.x;
        sy += g.y;
    }
    const double n = static_cast<double>(train_gazes.size());
    return {sx / n, sy / n};
}

GazePoint LinRegModel::predict(std::span<const double> features) const {
    require_valid(static_cast<Eigen::Index>(features.size()) + 1 == coef.rows(),
                  "linear regression: feature dimension mismatch");
    Eigen::RowVectorXd x(coef.rows());
    for (size_t i = 0; i < features.size(); ++i) x(static_cast<Eigen::Index>(i)) = features[i];
    x(coef.rows() - 1) = 1.0;
    Eigen::RowVector2d y = x * coef;
    return {y(0), y(1)};
}

LinRegModel fit_linreg(const std::vector<std::vector<double>>& features,
                       std::span<const GazePoint> gazes) {
    require_valid(!features.empty() && features.size() == gazes.size(),
                  "linear regression: empty or mismatched training data");
    const Eigen::Index dim = static_cast<Eigen::Index>(features.front().size());
    const Eigen::Index rows = static_cast<Eigen::Index>(features.size());
    require_valid(rows >= dim + 1, "linear regression: needs at least dim+1 training rows");

    Eigen::MatrixXd x(rows, dim + 1);
    Eigen::MatrixXd y(rows, 2);
    for (Eigen::Index r = 0; r < rows; ++r) {
        require_valid(static_cast<Eigen::Index>(features[r].size()) == dim,
                      "linear regression: ragged feature rows");
        for (Eigen::Index c = 0; c < dim; ++c) x(r, c) = features[r][c];
        x(r, dim) = 1.0;
        y(r, 0) = gazes[r].x;
        y(r, 1) = gazes[r].y;
    }

    LinRegModel model;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() == dim + 1) {
        model.coef = qr.solve(y);
    } else {
        model.ridge_fallback = true;
        Eigen::MatrixXd gram = x.transpose() * x;
        gram.diagonal().array() += 1e-8;
        model.coef = gram.ldlt().solve(x.transpose() * y);
    }
    return model;
}

std::vector<double> linreg_features(const Landmarks& landmarks) {
    landmarks.validate();
    const auto& pts = landmarks.points;
    const auto& c = landmarks.corners;
    const bool has_pupils = pts.size() >= 6;

    std::vector<double> f;
    f.reserve(12);
    auto push_eye = [&](int a, int b, int pupil_idx) {
        f.push_back(pts[a].x);
        f.push_back(pts[a].y);
        f.push_back(pts[b].x);
        f.push_back(pts[b].y);
        if (has_pupils) {
            f.push_back(pts[pupil_idx].x);
            f.push_back(pts[pupil_idx].y);
        } else {
            f.push_back(0.5 * (pts[a].x + pts[b].x));
            f.push_back(0.5 * (pts[a].y + pts[b].y));
        }
    };
    push_eye(c.left_a, c.left_b, 4);
    push_eye(c.right_a, c.right_b, 5);
    return f;
}

CarInFront baseline_car_in_front(std::span<const ObjectBox> boxes, int width, int height) {
    const GazePoint center = baseline_center(width, height);
    CarInFront out{center, true};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ob : boxes) {
        if (ob.cls != "car") continue;
        const GazePoint c = ob.box.center();
        const double d = distance(c, center);
        if (d < best) {
            best = d;
            out.point = c;
            out.fallback = false;
        }
    }
    return out;
}

} // namespace pogest
