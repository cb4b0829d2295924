//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/circulant.hpp"
#include "circq/tensors.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

// Binary formats. All multi-byte integers are little-endian; reals are IEEE
// float32.
//
// Weight file ("RQYW", version 1):
//   magic[4] u32 version u32 layer_count
//   per layer:
//     u32 block_size
//     u8 scheme_kind (0 equal-distance, 1 mixed pow2) u8 p_bits u8 s_bits u8 code_bits
//     u32 m (0 for mixed pow2)
//     f32 alpha
//     u32 kernel u32 in_channels u32 out_channels u32 in_blocks u32 out_blocks
//     u8 has_bn u8 reserved[3]
//     u32 code_bytes, then code_bytes bytes of bit-packed codes, MSB first.
//       Blocks in (pos, out_block, in_block) order; per block the half
//       spectrum components re[0], re[1], im[1], ..., re[N/2-1], im[N/2-1], re[N/2].
//     f32 bias[out_channels]
//     if has_bn: f32 epsilon, f32 mean[C'], variance[C'], scale[C'], shift[C']
//
// Dense weight file ("RQYD", version 1):
//   magic[4] u32 version u32 layer_count
//   per layer: u32 kernel u32 in_channels u32 out_channels
//              f32 weights[r*r*C*C'] in (kh, kw, c, c') order, f32 bias[C']
//
// Raw tensor ("RQYT", version 1):
//   magic[4] u32 version u32 height u32 width u32 channels f32 data[h*w*c] (h, w, c order)

namespace circq::io {

inline constexpr std::uint32_t kFormatVersion = 1;

std::vector<std::uint8_t> encode_weight_file(std::span<const circulant::BlockCirculantWeight> layers);
/// `source` names the input in error messages.
std::vector<circulant::BlockCirculantWeight> decode_weight_file(std::span<const std::uint8_t> bytes,
                                                                const std::string& source = "<memory>");

void save_weights(const std::filesystem::path& path, std::span<const circulant::BlockCirculantWeight> layers);
std::vector<circulant::BlockCirculantWeight> load_weights(const std::filesystem::path& path);

struct DenseLayer {
    WeightTensor4D weights;
    std::vector<double> bias;
};

std::vector<std::uint8_t> encode_dense_file(std::span<const DenseLayer> layers);
std::vector<DenseLayer> decode_dense_file(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");
void save_dense(const std::filesystem::path& path, std::span<const DenseLayer> layers);
std::vector<DenseLayer> load_dense(const std::filesystem::path& path);

void save_tensor(const std::filesystem::path& path, const FeatureMap& fm);
FeatureMap load_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace circq::io
