//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/quant.hpp"
#include "circq/spectral.hpp"
#include "circq/tensors.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace circq::circulant {

/// Per-output-channel batch normalization parameters.
struct BatchNormParams {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> scale;
    std::vector<double> shift;
    double epsilon = 1e-5;

    bool operator==(const BatchNormParams&) const = default;
};

/// Block-circulant CONV weights.
///
/// For every kernel position (kh, kw) the C x C' channel plane is tiled into
/// L_b x L_b circulant blocks, each described by an index vector and its half
/// spectrum. Block order is ((pos * out_blocks + ob) * in_blocks + ib) with
/// pos = kh * kernel + kw. Channels are zero-padded up to a multiple of L_b.
struct BlockCirculantWeight {
    std::size_t kernel = 0;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t block_size = 0;
    std::size_t in_blocks = 0;
    std::size_t out_blocks = 0;

    /// block_count() * block_size reals.
    std::vector<double> index_vectors;
    /// One half spectrum per block; these are what conv_forward consumes.
    std::vector<spectral::HalfSpectrum> spectra;
    /// Set when `spectra` lie on this scheme's levels.
    std::optional<quant::QuantScheme> scheme;

    std::vector<double> bias;
    std::optional<BatchNormParams> bn;

    std::size_t block_count() const { return kernel * kernel * out_blocks * in_blocks; }
    std::size_t block_index(std::size_t pos, std::size_t ob, std::size_t ib) const
    {
        return (pos * out_blocks + ob) * in_blocks + ib;
    }
    std::span<const double> index_vector(std::size_t block) const
    {
        return {index_vectors.data() + block * block_size, block_size};
    }

    /// Stored real parameters (index vector entries).
    std::size_t parameter_count() const { return index_vectors.size(); }

    bool operator==(const BlockCirculantWeight&) const = default;
};

/// Dense L x L matrix with entry (row, col) = iv[(row - col) mod L].
Matrix expand_block(std::span<const double> iv);

/// Frobenius-nearest circulant: iv[d] = mean of the entries on circulant diagonal d.
std::vector<double> project_to_circulant(const Matrix& m);

/// Builds weights from raw index vectors (spectra computed here). Throws
/// SizeError when block_size is not a power of two or lengths disagree.
BlockCirculantWeight from_index_vectors(std::size_t kernel, std::size_t in_channels,
                                        std::size_t out_channels, std::size_t block_size,
                                        std::vector<double> index_vectors, std::vector<double> bias = {});

/// Projects every L_b x L_b (c, c') slice of a dense tensor to circulant form.
BlockCirculantWeight compress_weights(const WeightTensor4D& w, std::size_t block_size);

/// Dense tensor realized by the block-circulant weights (padding cropped).
WeightTensor4D decompress_weights(const BlockCirculantWeight& w);

/// Replaces each block spectrum by its nearest-level quantization and
/// re-derives the index vectors from the quantized spectra.
BlockCirculantWeight quantize_weights(const BlockCirculantWeight& w, const quant::QuantScheme& scheme);

/// Where conv_forward takes its block spectra from.
enum class SpectrumSource {
    Stored,   // precomputed BlockCirculantWeight::spectra
    OnTheFly, // rfft of the index vectors at call time
};

/// Block-circulant convolution: per output pixel and output block, all
/// r^2 * in_blocks spectral products are accumulated and one IFFT is applied.
/// Adds the bias; batch norm and activation are left to the caller.
FeatureMap conv_forward(const FeatureMap& fm, const BlockCirculantWeight& w, std::size_t stride,
                        std::size_t pad, SpectrumSource source = SpectrumSource::Stored);

/// Direct sliding-window multiply-accumulate.
FeatureMap naive_conv_forward(const FeatureMap& fm, const WeightTensor4D& w, std::span<const double> bias,
                              std::size_t stride, std::size_t pad);

/// (in + 2 pad - kernel) / stride + 1, or SizeError when the window does not fit.
std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad);

} // namespace circq::circulant
