#include "assemble.hpp"

#include "error.hpp"

namespace pogest {

void assemble_image_channels(nn::Tensor& dst, int slot, const LoadedSample& sample,
                             const BoundingBox& facial_roi, bool use_scene) {
    const int side = dst.h;
    require_valid(side > 0 && dst.w == side, "assemble: non-positive side");
    require_valid(!sample.landmarks.points.empty(), "assemble: sample has no landmarks");
    require_valid(dst.c >= 12, "assemble: destination tensor too narrow");

    auto [left_roi, right_roi] = compute_eye_roi(sample.landmarks);
    const size_t plane = dst.plane_stride();

    if (use_scene) resize_into(sample.scene, side, dst.plane(slot, kSceneChannel), plane);
    crop_resize_into(sample.face, facial_roi, side, dst.plane(slot, kFacialRoiChannel), plane);
    crop_resize_into(sample.face, left_roi, side, dst.plane(slot, kLeftEyeChannel), plane);
    crop_resize_into(sample.face, right_roi, side, dst.plane(slot, kRightEyeChannel), plane);
}

void set_calibration_channels(nn::Tensor& dst, int slot, const Eigen::Ref<const nn::Mat>& embedding) {
    const int embed_dim = dst.c - kCalibChannel;
    require_valid(embedding.rows() == embed_dim && embedding.cols() == 1,
                  "assemble: embedding dimension mismatch");
    for (int k = 0; k < embed_dim; ++k) {
        float* plane = dst.plane(slot, kCalibChannel + k);
        const float v = embedding(k, 0);
        for (size_t s = 0; s < dst.plane_stride(); ++s) plane[s] = v;
    }
}

nn::Tensor assemble_input(const LoadedSample& sample, const BoundingBox& facial_roi,
                          const Eigen::VectorXd& calibration, int side) {
    require_valid(side > 0, "assemble: non-positive side");
    nn::Tensor out(1, 12 + static_cast<int>(calibration.size()), side, side);
    assemble_image_channels(out, 0, sample, facial_roi);
    set_calibration_channels(out, 0, calibration.cast<float>());
    return out;
}

void assemble_calibration_channels(nn::Tensor& dst, int slot, const LoadedSample& sample) {
    require_valid(dst.c == 6, "assemble: calibration input must have 6 channels");
    const size_t plane = dst.plane_stride();
    resize_into(sample.scene, dst.h, dst.plane(slot, 0), plane);
    resize_into(sample.face, dst.h, dst.plane(slot, 3), plane);
}

} // namespace pogest
