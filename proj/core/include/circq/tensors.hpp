//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace circq {

/// Activation tensor stored row-major in (h, w, c) order, so the channels of
/// one pixel are contiguous.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(std::size_t height, std::size_t width, std::size_t channels);
    FeatureMap(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t h, std::size_t w, std::size_t c) { return data_[index(h, w, c)]; }
    double at(std::size_t h, std::size_t w, std::size_t c) const { return data_[index(h, w, c)]; }

    /// Channel vector of one pixel.
    std::span<const double> pixel(std::size_t h, std::size_t w) const
    {
        return {data_.data() + (h * width_ + w) * channels_, channels_};
    }
    std::span<double> pixel(std::size_t h, std::size_t w)
    {
        return {data_.data() + (h * width_ + w) * channels_, channels_};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const FeatureMap&) const = default;

private:
    std::size_t index(std::size_t h, std::size_t w, std::size_t c) const
    {
        return (h * width_ + w) * channels_ + c;
    }

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

/// Dense CONV weights, ordered (kh, kw, c, c').
class WeightTensor4D {
public:
    WeightTensor4D() = default;
    WeightTensor4D(std::size_t kernel, std::size_t in_channels, std::size_t out_channels);
    WeightTensor4D(std::size_t kernel, std::size_t in_channels, std::size_t out_channels,
                   std::vector<double> data);

    std::size_t kernel() const { return kernel_; }
    std::size_t in_channels() const { return in_channels_; }
    std::size_t out_channels() const { return out_channels_; }

    double& at(std::size_t kh, std::size_t kw, std::size_t c, std::size_t co)
    {
        return data_[index(kh, kw, c, co)];
    }
    double at(std::size_t kh, std::size_t kw, std::size_t c, std::size_t co) const
    {
        return data_[index(kh, kw, c, co)];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const WeightTensor4D&) const = default;

private:
    std::size_t index(std::size_t kh, std::size_t kw, std::size_t c, std::size_t co) const
    {
        return ((kh * kernel_ + kw) * in_channels_ + c) * out_channels_ + co;
    }

    std::size_t kernel_ = 0;
    std::size_t in_channels_ = 0;
    std::size_t out_channels_ = 0;
    std::vector<double> data_;
};

/// Row-major dense matrix. Used for circulant blocks and ADMM layer weights.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Matrix& other) const
    {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Frobenius norm.
double frobenius_norm(const Matrix& m);

/// Surrounds the map with `pad` rows/columns of zeros on every side.
FeatureMap zero_pad(const FeatureMap& fm, std::size_t pad);

/// Reads `len` channels starting at `c0` from pixel (row + kh, col + kw).
/// Throws std::out_of_range when the window or channel slice is outside the map.
std::vector<double> extract_patch_vector(const FeatureMap& fm, std::size_t row, std::size_t col,
                                         std::size_t kh, std::size_t kw, std::size_t c0,
                                         std::size_t len);

} // namespace circq
