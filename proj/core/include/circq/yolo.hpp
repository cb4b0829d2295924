//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/circulant.hpp"
#include "circq/hwmodel.hpp"
#include "circq/quant.hpp"
#include "circq/tensors.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace circq::yolo {

enum class Activation {
    LeakyRelu,
    Relu,
    Linear,
};

/// 2x2 max pooling after a layer. Stride1 keeps the spatial size by
/// replicating the last row/column.
enum class Pool {
    None,
    Stride2,
    Stride1,
};

std::string to_string(Activation a);
std::string to_string(Pool p);

struct LayerSpec {
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t pad = 1;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    Pool pool = Pool::None;
    bool has_bn = true;
    Activation activation = Activation::LeakyRelu;
    hw::Mode mode = hw::Mode::Shift;
    int bits = 8;
    std::size_t block_size = 16;

    bool operator==(const LayerSpec&) const = default;
};

struct Anchor {
    double w = 1.0;
    double h = 1.0;

    bool operator==(const Anchor&) const = default;
};

struct NetworkSpec {
    std::string name = "tiny-yolo";
    std::size_t input_height = 416;
    std::size_t input_width = 416;
    std::size_t input_channels = 3;
    std::size_t grid = 13;
    std::size_t boxes = 5;
    std::size_t classes = 20;
    double leaky_slope = 0.1;
    std::vector<Anchor> anchors;
    std::vector<LayerSpec> layers;

    /// Channel chaining, spatial chain down to grid x grid x (5B + C), anchor
    /// count. Throws ConfigError.
    void validate() const;

    /// Spatial size after every layer (after pooling).
    std::vector<std::pair<std::size_t, std::size_t>> spatial_chain() const;

    std::size_t output_depth() const { return boxes * 5 + classes; }

    std::vector<hw::ConvShape> conv_shapes() const;
    hw::ModeAssignment assignment() const;

    bool operator==(const NetworkSpec&) const = default;
};

/// Nine-layer tiny YOLO on a 416x416x3 input: 3x3 layers of 16..1024 channels,
/// five stride-2 pools, one stride-1 pool after the 512-channel layer, then a
/// 1x1 layer to 5B + C channels.
NetworkSpec tiny_yolo_spec(std::size_t classes, std::size_t block_size = 16);
inline NetworkSpec voc_spec() { return tiny_yolo_spec(20); }
inline NetworkSpec dji_spec() { return tiny_yolo_spec(12); }

FeatureMap maxpool_2x2(const FeatureMap& fm);
FeatureMap maxpool_2x2_stride1(const FeatureMap& fm);

/// scale * (x - mean) / sqrt(variance + eps) + shift, per channel.
FeatureMap batch_norm(const FeatureMap& fm, const circulant::BatchNormParams& bn);

FeatureMap activate(const FeatureMap& fm, Activation act, double leaky_slope = 0.1);

/// conv -> batch norm -> activation -> pool for every layer.
FeatureMap forward(const NetworkSpec& net, std::span<const circulant::BlockCirculantWeight> weights,
                   const FeatureMap& image);

/// Seeded He-style index vectors, identity batch norm, zero bias. Parameters
/// are float32-representable so they survive the weight file unchanged.
std::vector<circulant::BlockCirculantWeight> random_weights(const NetworkSpec& net, std::uint64_t seed);

/// Quantizes every layer with its mode's scheme (mode 1 equal-distance, mode 2
/// mixed powers of two) at its bit width. Alpha is calibrated per layer and
/// rounded to float32, so the result survives the weight file bit-exactly.
std::vector<circulant::BlockCirculantWeight> quantize_network(const NetworkSpec& net,
                                                              std::span<const circulant::BlockCirculantWeight> weights);

/// Seeded uniform [0, 1) image of the network's input size.
FeatureMap random_image(const NetworkSpec& net, std::uint64_t seed);

struct DetectionBox {
    double cx = 0;
    double cy = 0;
    double w = 0;
    double h = 0;
    double objectness = 0;
    /// Pr(class | object), shared by the boxes of one cell.
    std::vector<double> class_scores;
    /// objectness * best class probability.
    double score = 0;
    int class_id = -1;
};

/// Pr(Class_i | Obj) * Pr(Obj) * IOU.
double class_confidence(double class_given_object, double objectness, double iou_with_truth);

/// Intersection over union of two center-format boxes; 0 when the union is empty.
double iou(const DetectionBox& a, const DetectionBox& b);

/// Greedy suppression: boxes below score_threshold are dropped, the rest are
/// visited by descending score and kept unless their IOU with a kept box
/// exceeds iou_threshold.
std::vector<DetectionBox> nms(std::vector<DetectionBox> boxes, double score_threshold, double iou_threshold);

/// Logistic x/y/objectness, exponential anchor-scaled w/h, softmax class
/// probabilities. Coordinates are normalized to [0, 1] of the image.
std::vector<DetectionBox> decode_grid(const FeatureMap& raw, std::span<const Anchor> anchors);

} // namespace circq::yolo
