#include "homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "rng.hpp"

namespace pogest {

namespace {

constexpr double kDetEps = 1e-12;

bool collinear(const Point2& a, const Point2& b, const Point2& c) {
    const double area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                   std::abs(c.y - a.y), 1.0});
    return std::abs(area2) <= 1e-9 * scale * scale;
}

bool any_three_collinear(std::span<const Correspondence> pairs) {
    const size_t n = pairs.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k)
                if (collinear(pairs[i].src, pairs[j].src, pairs[k].src)) return true;
    return false;
}

// Similarity normalization: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(std::span<const Correspondence> pairs, bool src) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pairs) {
        const Point2& q = src ? p.src : p.dst;
        cx += q.x;
        cy += q.y;
    }
    const double n = static_cast<double>(pairs.size());
    cx /= n;
    cy /= n;
    double mean_dist = 0.0;
    for (const auto& p : pairs) {
        const Point2& q = src ? p.src : p.dst;
        mean_dist += std::hypot(q.x - cx, q.y - cy);
    }
    mean_dist /= n;
    const double s = mean_dist > 0.0 ? std::sqrt(2.0) / mean_dist : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

} // namespace

Homography Homography::inverse() const {
    require_valid(std::abs(h.determinant()) > kDetEps, "homography: not invertible");
    Eigen::Matrix3d inv = h.inverse();
    require_valid(std::abs(inv(2, 2)) > kDetEps, "homography: degenerate inverse");
    return {inv / inv(2, 2)};
}

Homography dlt_homography(std::span<const Correspondence> pairs) {
    require_valid(pairs.size() >= 4, "homography: needs at least 4 correspondences");
    for (const auto& p : pairs)
        require_valid(std::isfinite(p.src.x) && std::isfinite(p.src.y) && std::isfinite(p.dst.x) &&
                          std::isfinite(p.dst.y),
                      "homography: non-finite correspondence");
    if (pairs.size() == 4)
        require_valid(!any_three_collinear(pairs), "homography: three collinear source points");

    const Eigen::Matrix3d t_src = normalizing_transform(pairs, true);
    const Eigen::Matrix3d t_dst = normalizing_transform(pairs, false);

    Eigen::MatrixXd a(2 * pairs.size(), 9);
    for (size_t i = 0; i < pairs.size(); ++i) {
        const Eigen::Vector3d s = t_src * Eigen::Vector3d(pairs[i].src.x, pairs[i].src.y, 1.0);
        const Eigen::Vector3d d = t_dst * Eigen::Vector3d(pairs[i].dst.x, pairs[i].dst.y, 1.0);
        const double x = s(0), y = s(1), u = d(0), v = d(1);
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd hvec = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);

    Eigen::Matrix3d h = t_dst.inverse() * hn * t_src;
    require_valid(std::abs(h.determinant()) > kDetEps, "homography: degenerate configuration");
    require_valid(std::abs(h(2, 2)) > kDetEps, "homography: ill-conditioned solution");
    return {h / h(2, 2)};
}

GazePoint transfer_point(const Homography& h, const GazePoint& p) {
    require_valid(p.finite(), "transfer: non-finite point");
    const Eigen::Vector3d q = h.h * Eigen::Vector3d(p.x, p.y, 1.0);
    require(std::abs(q(2)) > kDetEps, ErrorKind::validation, "transfer: point maps to infinity");
    return {q(0) / q(2), q(1) / q(2)};
}

RansacResult ransac_homography(std::span<const Correspondence> pairs, int iters,
                               double inlier_px, uint64_t rng_seed) {
    require_valid(pairs.size() >= 4, "ransac: needs at least 4 correspondences");
    require_valid(iters > 0 && inlier_px > 0.0, "ransac: invalid parameters");
    const size_t n = pairs.size();

    // Canonical order makes the result invariant to input permutation.
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        const auto& a = pairs[i];
        const auto& b = pairs[j];
        return std::tie(a.src.x, a.src.y, a.dst.x, a.dst.y) <
               std::tie(b.src.x, b.src.y, b.dst.x, b.dst.y);
    });

    auto count_inliers = [&](const Homography& h, std::vector<bool>* mask) {
        int count = 0;
        if (mask) mask->assign(n, false);
        for (size_t i = 0; i < n; ++i) {
            GazePoint mapped;
            try {
                mapped = transfer_point(h, {pairs[i].src.x, pairs[i].src.y});
            } catch (const Error&) {
                continue;
            }
            const double err = std::hypot(mapped.x - pairs[i].dst.x, mapped.y - pairs[i].dst.y);
            if (err <= inlier_px) {
                ++count;
                if (mask) (*mask)[i] = true;
            }
        }
        return count;
    };

    // A model must be supported by more than its own minimal sample; with
    // many pairs it must cover at least a quarter of them. An exact 4-pair
    // fit is always self-consistent, so the bar only starts above 4.
    const int min_support =
        std::max(n > 4 ? 5 : 4, static_cast<int>((n + 3) / 4));

    Rng rng(rng_seed);
    int best_count = 0;
    std::vector<bool> best_mask;
    for (int it = 0; it < iters; ++it) {
        size_t idx[4];
        for (int k = 0; k < 4;) {
            const size_t cand = order[static_cast<size_t>(rng.uniform_int(n))];
            bool dup = false;
            for (int j = 0; j < k; ++j) dup |= (idx[j] == cand);
            if (!dup) idx[k++] = cand;
        }
        const Correspondence sample[4] = {pairs[idx[0]], pairs[idx[1]], pairs[idx[2]], pairs[idx[3]]};
        Homography h;
        try {
            h = dlt_homography(sample);
        } catch (const Error&) {
            continue; // degenerate minimal sample
        }
        std::vector<bool> mask;
        const int count = count_inliers(h, &mask);
        if (count > best_count) {
            best_count = count;
            best_mask = std::move(mask);
        }
    }

    if (best_count < min_support)
        Error::runtime("ransac: estimation failed, best support " + std::to_string(best_count) +
                       " of " + std::to_string(n) + " pairs (need " + std::to_string(min_support) +
                       ")");

    std::vector<Correspondence> consensus;
    for (size_t i = 0; i < n; ++i)
        if (best_mask[i]) consensus.push_back(pairs[i]);
    Homography refined = dlt_homography(consensus);

    RansacResult out;
    out.h = refined;
    out.inlier_count = count_inliers(refined, &out.inlier_mask);
    return out;
}

ErrorSummary audit_transfers(std::span<const GazePoint> transferred,
                             std::span<const GazePoint> manual,
                             std::span<const double> thresholds) {
    require_valid(transferred.size() == manual.size(), "audit: length mismatch");
    require_valid(!transferred.empty(), "audit: empty lists");
    std::vector<double> errors(transferred.size());
    for (size_t i = 0; i < transferred.size(); ++i)
        errors[i] = pixel_error(transferred[i], manual[i]);
    return summarize_errors(errors, thresholds);
}

} // namespace pogest
