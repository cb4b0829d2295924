//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/tensors.hpp"

#include "circq/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace circq {

namespace {

void check_finite(const std::vector<double>& data)
{
    if (!std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); })) {
        throw ParameterError("tensor contains non-finite values");
    }
}

} // namespace

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, 0.0)
{
}

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
                       std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data))
{
    if (data_.size() != height * width * channels) {
        throw SizeError("feature map data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(height) + "x" + std::to_string(width) +
                        "x" + std::to_string(channels));
    }
    check_finite(data_);
}

WeightTensor4D::WeightTensor4D(std::size_t kernel, std::size_t in_channels, std::size_t out_channels)
    : kernel_(kernel), in_channels_(in_channels), out_channels_(out_channels),
      data_(kernel * kernel * in_channels * out_channels, 0.0)
{
}

WeightTensor4D::WeightTensor4D(std::size_t kernel, std::size_t in_channels, std::size_t out_channels,
                               std::vector<double> data)
    : kernel_(kernel), in_channels_(in_channels), out_channels_(out_channels), data_(std::move(data))
{
    if (data_.size() != kernel * kernel * in_channels * out_channels) {
        throw SizeError("weight tensor data length does not match r*r*C*C'");
    }
    check_finite(data_);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows * cols) {
        throw SizeError("matrix data length does not match rows*cols");
    }
}

double frobenius_norm(const Matrix& m)
{
    double acc = 0.0;
    for (double v : m.data()) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

FeatureMap zero_pad(const FeatureMap& fm, std::size_t pad)
{
    if (pad == 0) {
        return fm;
    }
    FeatureMap out(fm.height() + 2 * pad, fm.width() + 2 * pad, fm.channels());
    for (std::size_t h = 0; h < fm.height(); ++h) {
        for (std::size_t w = 0; w < fm.width(); ++w) {
            auto src = fm.pixel(h, w);
            std::copy(src.begin(), src.end(), out.pixel(h + pad, w + pad).begin());
        }
    }
    return out;
}

std::vector<double> extract_patch_vector(const FeatureMap& fm, std::size_t row, std::size_t col,
                                         std::size_t kh, std::size_t kw, std::size_t c0,
                                         std::size_t len)
{
    const std::size_t h = row + kh;
    const std::size_t w = col + kw;
    if (h >= fm.height() || w >= fm.width() || c0 + len > fm.channels()) {
        throw std::out_of_range("patch (" + std::to_string(h) + ", " + std::to_string(w) +
                                ", channels " + std::to_string(c0) + "+" + std::to_string(len) +
                                ") outside feature map");
    }
    auto px = fm.pixel(h, w);
    return {px.begin() + static_cast<std::ptrdiff_t>(c0),
            px.begin() + static_cast<std::ptrdiff_t>(c0 + len)};
}

} // namespace circq
