//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/yolo.hpp"

#include "circq/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace circq::yolo {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t pooled_extent(std::size_t in, Pool pool, std::size_t layer)
{
    switch (pool) {
    case Pool::None:
    case Pool::Stride1:
        return in;
    case Pool::Stride2:
        if (in % 2 != 0) {
            throw ConfigError("layer " + std::to_string(layer) + ": stride-2 pooling of odd extent " +
                              std::to_string(in));
        }
        return in / 2;
    }
    return in;
}

} // namespace

std::string to_string(Activation a)
{
    switch (a) {
    case Activation::LeakyRelu:
        return "leaky";
    case Activation::Relu:
        return "relu";
    case Activation::Linear:
        return "linear";
    }
    return "?";
}

std::string to_string(Pool p)
{
    switch (p) {
    case Pool::None:
        return "none";
    case Pool::Stride2:
        return "2";
    case Pool::Stride1:
        return "1";
    }
    return "?";
}

std::vector<std::pair<std::size_t, std::size_t>> NetworkSpec::spatial_chain() const
{
    std::vector<std::pair<std::size_t, std::size_t>> chain;
    std::size_t h = input_height;
    std::size_t w = input_width;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        try {
            h = circulant::conv_output_extent(h, l.kernel, l.stride, l.pad);
            w = circulant::conv_output_extent(w, l.kernel, l.stride, l.pad);
        } catch (const SizeError& e) {
            throw ConfigError("layer " + std::to_string(i) + ": " + e.what());
        }
        h = pooled_extent(h, l.pool, i);
        w = pooled_extent(w, l.pool, i);
        chain.emplace_back(h, w);
    }
    return chain;
}

void NetworkSpec::validate() const
{
    if (layers.empty()) {
        throw ConfigError("network '" + name + "' has no layers");
    }
    std::size_t channels = input_channels;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.in_channels != channels) {
            throw ConfigError("layer " + std::to_string(i) + " expects " + std::to_string(l.in_channels) +
                              " input channels but receives " + std::to_string(channels));
        }
        if (l.out_channels == 0 || l.kernel == 0 || l.stride == 0) {
            throw ConfigError("layer " + std::to_string(i) + " has a zero-sized dimension");
        }
        if (!spectral::is_power_of_two(l.block_size)) {
            throw ConfigError("layer " + std::to_string(i) + " block size is not a power of two");
        }
        if (l.bits < 2) {
            throw ConfigError("layer " + std::to_string(i) + " bit length must be >= 2");
        }
        channels = l.out_channels;
    }
    const auto chain = spatial_chain();
    if (chain.back().first != grid || chain.back().second != grid) {
        throw ConfigError("network output is " + std::to_string(chain.back().first) + "x" +
                          std::to_string(chain.back().second) + ", expected " + std::to_string(grid) + "x" +
                          std::to_string(grid));
    }
    if (channels != output_depth()) {
        throw ConfigError("network output depth " + std::to_string(channels) + " differs from B*5+C = " +
                          std::to_string(output_depth()));
    }
    if (anchors.size() != boxes) {
        throw ConfigError("expected " + std::to_string(boxes) + " anchors, got " + std::to_string(anchors.size()));
    }
}

std::vector<hw::ConvShape> NetworkSpec::conv_shapes() const
{
    std::vector<hw::ConvShape> shapes;
    for (const auto& l : layers) {
        shapes.push_back({l.kernel, l.in_channels, l.out_channels});
    }
    return shapes;
}

hw::ModeAssignment NetworkSpec::assignment() const
{
    hw::ModeAssignment a;
    for (const auto& l : layers) {
        a.push_back({l.mode, l.bits});
    }
    return a;
}

NetworkSpec tiny_yolo_spec(std::size_t classes, std::size_t block_size)
{
    NetworkSpec net;
    net.name = classes == 20 ? "tiny-yolo-voc" : (classes == 12 ? "tiny-yolo-dji" : "tiny-yolo");
    net.classes = classes;
    net.anchors = {{1.08, 1.19}, {3.42, 4.41}, {6.63, 11.38}, {9.42, 5.11}, {16.62, 10.52}};

    const std::size_t widths[] = {16, 32, 64, 128, 256, 512, 1024, 1024};
    std::size_t in = net.input_channels;
    for (std::size_t i = 0; i < 8; ++i) {
        LayerSpec l;
        l.in_channels = in;
        l.out_channels = widths[i];
        l.block_size = block_size;
        l.pool = i < 5 ? Pool::Stride2 : (i == 5 ? Pool::Stride1 : Pool::None);
        net.layers.push_back(l);
        in = widths[i];
    }
    LayerSpec head;
    head.kernel = 1;
    head.pad = 0;
    head.in_channels = in;
    head.out_channels = net.output_depth();
    head.has_bn = false;
    head.activation = Activation::Linear;
    head.block_size = block_size;
    net.layers.push_back(head);
    return net;
}

FeatureMap maxpool_2x2(const FeatureMap& fm)
{
    if (fm.height() % 2 != 0 || fm.width() % 2 != 0) {
        throw SizeError("maxpool_2x2: odd spatial extent " + std::to_string(fm.height()) + "x" +
                        std::to_string(fm.width()));
    }
    FeatureMap out(fm.height() / 2, fm.width() / 2, fm.channels());
    for (std::size_t y = 0; y < out.height(); ++y) {
        for (std::size_t x = 0; x < out.width(); ++x) {
            for (std::size_t c = 0; c < fm.channels(); ++c) {
                out.at(y, x, c) = std::max({fm.at(2 * y, 2 * x, c), fm.at(2 * y, 2 * x + 1, c),
                                            fm.at(2 * y + 1, 2 * x, c), fm.at(2 * y + 1, 2 * x + 1, c)});
            }
        }
    }
    return out;
}

FeatureMap maxpool_2x2_stride1(const FeatureMap& fm)
{
    FeatureMap out(fm.height(), fm.width(), fm.channels());
    for (std::size_t y = 0; y < fm.height(); ++y) {
        const std::size_t y1 = std::min(y + 1, fm.height() - 1);
        for (std::size_t x = 0; x < fm.width(); ++x) {
            const std::size_t x1 = std::min(x + 1, fm.width() - 1);
            for (std::size_t c = 0; c < fm.channels(); ++c) {
                out.at(y, x, c) = std::max({fm.at(y, x, c), fm.at(y, x1, c), fm.at(y1, x, c), fm.at(y1, x1, c)});
            }
        }
    }
    return out;
}

FeatureMap batch_norm(const FeatureMap& fm, const circulant::BatchNormParams& bn)
{
    const std::size_t c = fm.channels();
    if (bn.mean.size() != c || bn.variance.size() != c || bn.scale.size() != c || bn.shift.size() != c) {
        throw SizeError("batch_norm: parameter length does not match channel count");
    }
    std::vector<double> gain(c);
    for (std::size_t i = 0; i < c; ++i) {
        if (bn.variance[i] < 0) {
            throw ParameterError("batch_norm: negative variance");
        }
        gain[i] = bn.scale[i] / std::sqrt(bn.variance[i] + bn.epsilon);
    }
    FeatureMap out = fm;
    auto& d = out.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t ch = i % c;
        d[i] = gain[ch] * (d[i] - bn.mean[ch]) + bn.shift[ch];
    }
    return out;
}

FeatureMap activate(const FeatureMap& fm, Activation act, double leaky_slope)
{
    if (act == Activation::Linear) {
        return fm;
    }
    FeatureMap out = fm;
    const double slope = act == Activation::Relu ? 0.0 : leaky_slope;
    for (double& v : out.data()) {
        if (v < 0) {
            v *= slope;
        }
    }
    return out;
}

FeatureMap forward(const NetworkSpec& net, std::span<const circulant::BlockCirculantWeight> weights,
                   const FeatureMap& image)
{
    net.validate();
    if (weights.size() != net.layers.size()) {
        throw ConfigError("forward: " + std::to_string(weights.size()) + " weight layers for a " +
                          std::to_string(net.layers.size()) + "-layer network");
    }
    if (image.height() != net.input_height || image.width() != net.input_width ||
        image.channels() != net.input_channels) {
        throw ConfigError("forward: image shape does not match the network input");
    }
    FeatureMap x = image;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        const auto& w = weights[i];
        if (w.kernel != l.kernel || w.in_channels != l.in_channels || w.out_channels != l.out_channels) {
            throw ConfigError("forward: weights of layer " + std::to_string(i) + " do not match the spec");
        }
        x = circulant::conv_forward(x, w, l.stride, l.pad);
        if (l.has_bn && w.bn) {
            x = batch_norm(x, *w.bn);
        }
        x = activate(x, l.activation, net.leaky_slope);
        if (l.pool == Pool::Stride2) {
            x = maxpool_2x2(x);
        } else if (l.pool == Pool::Stride1) {
            x = maxpool_2x2_stride1(x);
        }
    }
    return x;
}

std::vector<circulant::BlockCirculantWeight> random_weights(const NetworkSpec& net, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<circulant::BlockCirculantWeight> out;
    for (const auto& l : net.layers) {
        const std::size_t in_blocks = (l.in_channels + l.block_size - 1) / l.block_size;
        const std::size_t out_blocks = (l.out_channels + l.block_size - 1) / l.block_size;
        const std::size_t count = l.kernel * l.kernel * in_blocks * out_blocks * l.block_size;
        const double stddev = std::sqrt(2.0 / static_cast<double>(l.kernel * l.kernel * l.in_channels));
        std::normal_distribution<double> gauss(0.0, stddev);
        std::vector<double> ivs(count);
        for (double& v : ivs) {
            v = static_cast<float>(gauss(rng));
        }
        auto w = circulant::from_index_vectors(l.kernel, l.in_channels, l.out_channels, l.block_size, std::move(ivs));
        if (l.has_bn) {
            circulant::BatchNormParams bn;
            bn.mean.assign(l.out_channels, 0.0);
            bn.variance.assign(l.out_channels, 1.0);
            bn.scale.assign(l.out_channels, 1.0);
            bn.shift.assign(l.out_channels, 0.0);
            bn.epsilon = static_cast<float>(1e-5);
            w.bn = std::move(bn);
        }
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<circulant::BlockCirculantWeight> quantize_network(const NetworkSpec& net,
                                                              std::span<const circulant::BlockCirculantWeight> weights)
{
    if (weights.size() != net.layers.size()) {
        throw ConfigError("quantize_network: layer count mismatch");
    }
    std::vector<circulant::BlockCirculantWeight> out;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const auto& l = net.layers[i];
        const auto kind = l.mode == hw::Mode::Dsp ? quant::SchemeKind::EqualDistance : quant::SchemeKind::MixedPow2;
        const auto shape = quant::QuantScheme::from_bits(kind, l.bits);
        std::vector<double> components;
        for (const auto& h : weights[i].spectra) {
            for (const auto& z : h.values()) {
                components.push_back(z.real());
                components.push_back(z.imag());
            }
        }
        const double alpha = static_cast<float>(quant::calibrate_alpha(components, shape));
        out.push_back(circulant::quantize_weights(weights[i], shape.with_alpha(alpha)));
    }
    return out;
}

FeatureMap random_image(const NetworkSpec& net, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> data(net.input_height * net.input_width * net.input_channels);
    for (double& v : data) {
        v = static_cast<float>(uni(rng));
    }
    return FeatureMap(net.input_height, net.input_width, net.input_channels, std::move(data));
}

double class_confidence(double class_given_object, double objectness, double iou_with_truth)
{
    return class_given_object * objectness * iou_with_truth;
}

double iou(const DetectionBox& a, const DetectionBox& b)
{
    const double ix = std::max(0.0, std::min(a.cx + a.w / 2, b.cx + b.w / 2) - std::max(a.cx - a.w / 2, b.cx - b.w / 2));
    const double iy = std::max(0.0, std::min(a.cy + a.h / 2, b.cy + b.h / 2) - std::max(a.cy - a.h / 2, b.cy - b.h / 2));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<DetectionBox> nms(std::vector<DetectionBox> boxes, double score_threshold, double iou_threshold)
{
    std::erase_if(boxes, [&](const DetectionBox& b) { return b.score < score_threshold; });
    std::stable_sort(boxes.begin(), boxes.end(),
                     [](const DetectionBox& a, const DetectionBox& b) { return a.score > b.score; });
    std::vector<DetectionBox> kept;
    for (auto& candidate : boxes) {
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const DetectionBox& k) {
            return iou(candidate, k) > iou_threshold;
        });
        if (!suppressed) {
            kept.push_back(std::move(candidate));
        }
    }
    return kept;
}

std::vector<DetectionBox> decode_grid(const FeatureMap& raw, std::span<const Anchor> anchors)
{
    const std::size_t b_count = anchors.size();
    if (b_count == 0 || raw.channels() <= 5 * b_count) {
        throw ConfigError("decode_grid: depth " + std::to_string(raw.channels()) + " leaves no class channels for " +
                          std::to_string(b_count) + " boxes");
    }
    if (raw.height() != raw.width()) {
        throw ConfigError("decode_grid: prediction grid must be square");
    }
    const std::size_t s = raw.height();
    const std::size_t classes = raw.channels() - 5 * b_count;
    const double grid = static_cast<double>(s);

    std::vector<DetectionBox> out;
    out.reserve(s * s * b_count);
    std::vector<double> probs(classes);
    for (std::size_t row = 0; row < s; ++row) {
        for (std::size_t col = 0; col < s; ++col) {
            const auto cell = raw.pixel(row, col);
            const auto logits = cell.subspan(5 * b_count, classes);
            const double peak = *std::max_element(logits.begin(), logits.end());
            double total = 0.0;
            for (std::size_t k = 0; k < classes; ++k) {
                probs[k] = std::exp(logits[k] - peak);
                total += probs[k];
            }
            for (double& p : probs) {
                p /= total;
            }
            const auto best = std::max_element(probs.begin(), probs.end());

            for (std::size_t b = 0; b < b_count; ++b) {
                const auto t = cell.subspan(5 * b, 5);
                DetectionBox box;
                box.cx = (static_cast<double>(col) + sigmoid(t[0])) / grid;
                box.cy = (static_cast<double>(row) + sigmoid(t[1])) / grid;
                box.w = anchors[b].w * std::exp(t[2]) / grid;
                box.h = anchors[b].h * std::exp(t[3]) / grid;
                box.objectness = sigmoid(t[4]);
                box.class_scores = probs;
                box.class_id = static_cast<int>(best - probs.begin());
                box.score = box.objectness * *best;
                out.push_back(std::move(box));
            }
        }
    }
    return out;
}

} // namespace circq::yolo
