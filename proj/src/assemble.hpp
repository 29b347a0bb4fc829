#pragma once

#include <Eigen/Core>

#include "dataset.hpp"
#include "nn/tensor.hpp"
#include "roi.hpp"

namespace pogest {

// Channel layout of the regression input stack.
inline constexpr int kSceneChannel = 0;     // 3 channels
inline constexpr int kFacialRoiChannel = 3; // 3 channels
inline constexpr int kLeftEyeChannel = 6;   // 3 channels
inline constexpr int kRightEyeChannel = 9;  // 3 channels
inline constexpr int kCalibChannel = 12;    // embedding_dim channels

// Fills the 12 image channels (scene, facial ROI crop, left eye, right eye)
// of sample `slot` in a (N, 12+embed, side, side) tensor. When `use_scene`
// is false the scene channels stay zero.
void assemble_image_channels(nn::Tensor& dst, int slot, const LoadedSample& sample,
                             const BoundingBox& facial_roi, bool use_scene = true);

// Tiles embedding column `slot` over the spatial dimensions of the
// calibration channels.
void set_calibration_channels(nn::Tensor& dst, int slot, const Eigen::Ref<const nn::Mat>& embedding);

// The full stacked network input for a single sample:
// [scene(3), facial ROI(3), left eye(3), right eye(3), calibration(embed)].
nn::Tensor assemble_input(const LoadedSample& sample, const BoundingBox& facial_roi,
                          const Eigen::VectorXd& calibration, int side);

// 6-channel calibration-module input: resized scene and face images.
void assemble_calibration_channels(nn::Tensor& dst, int slot, const LoadedSample& sample);

} // namespace pogest
