//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/hwmodel.hpp"
#include "circq/yolo.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

// JSON schemas. Unknown keys are rejected so typos surface as schema errors.
//
// Network spec:
//   {
//     "name": "tiny-yolo-voc",
//     "input": [416, 416, 3],          // height, width, channels
//     "grid": 13, "boxes": 5, "classes": 20,
//     "leaky_slope": 0.1,
//     "block_size": 16,                // default for layers without one
//     "anchors": [[1.08, 1.19], ...],  // `boxes` (w, h) pairs in grid cells
//     "layers": [
//       { "kernel": 3, "stride": 1, "pad": 1,
//         "in_channels": 3,            // optional, chained from the previous layer
//         "out_channels": 16,
//         "pool": "2",                 // "none" | "2" (2x2 stride 2) | "1" (2x2 stride 1)
//         "bn": true,
//         "activation": "leaky",       // "leaky" | "relu" | "linear"
//         "mode": 2, "bits": 8, "block_size": 16 }
//     ]
//   }
//
// Run config (paths are relative to the config file):
//   {
//     "seed": 42,
//     "network": "net.json", "weights": "w.rqyw", "dense": "d.rqyd", "image": "img.rqyt",
//     "fixture": "table.tsv",          // default: the shipped layer table
//     "size_unit_base": 1024,
//     "budget": { "dsp": ..., "lut": ..., "bram": ..., "bram_size_bits": 36864,
//                 "bram_bandwidth_bits": 64, "onchip_bandwidth_bits": 64, "clock_hz": 2e8 },
//     "cost": { "dsp_per_dsp_pe": 1, "dsp_per_shift_pe": 0, "lut_per_dsp_pe": 1,
//               "lut_per_shift_pe": 4, "dsp_share_divisor": 1 },
//     "latency": { "source": "model" | "table", "calibrate": true,
//                  "ops_per_cycle_mode1": 64, "ops_per_cycle_mode2": 128,
//                  "bytes_per_cycle": 64, "element_bits": 16 },
//     "explore": { "block_size": 16, "bits": [16, ..., 4], "margins": [0, 0.01, ...],
//                  "sensitivities": [0.001, ...] },   // one per layer
//     "admm": { "oracle": "quadratic" | "small-cnn", "rho": 1.0, "max_iters": 200,
//               "tol": 1e-3, "inner_steps": 5, "learning_rate": 0.25 },
//     "detect": { "score_threshold": 0.6, "iou_threshold": 0.5 }
//   }

namespace circq::io {

yolo::NetworkSpec parse_network_spec(const std::string& text, const std::string& source = "<string>");
yolo::NetworkSpec load_network_spec(const std::filesystem::path& path);
/// Pretty-printed; parse_network_spec(network_spec_to_json(n)) == n.
std::string network_spec_to_json(const yolo::NetworkSpec& net);

enum class LatencySource {
    Model,
    Table,
};

struct LatencyConfig {
    LatencySource source = LatencySource::Model;
    /// Fit bytes_per_cycle to the fixture's bound column before use.
    bool calibrate = true;
    hw::LatencyParams params;
};

struct ExploreConfig {
    std::size_t block_size = 16;
    std::vector<int> bits;
    std::vector<double> margins;
    std::vector<double> sensitivities;
};

struct AdmmConfig {
    std::string oracle;
    std::optional<double> rho;
    std::optional<std::size_t> max_iters;
    std::optional<double> tol;
    std::optional<std::size_t> inner_steps;
    std::optional<double> learning_rate;
};

struct DetectConfig {
    double score_threshold = 0.6;
    double iou_threshold = 0.5;
};

struct RunConfig {
    std::filesystem::path source;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> network;
    std::optional<std::filesystem::path> weights;
    std::optional<std::filesystem::path> dense;
    std::optional<std::filesystem::path> image;
    std::filesystem::path fixture;
    double size_unit_base = 1024.0;
    hw::FpgaBudget budget;
    hw::PeCost cost;
    LatencyConfig latency;
    ExploreConfig explore;
    AdmmConfig admm;
    DetectConfig detect;
};

/// Input paths (network, dense, image, fixture) must exist; `weights` may be
/// an output. Throws SchemaError.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& source);
RunConfig load_run_config(const std::filesystem::path& path);

/// Budget large enough for any layer table; used when a config has no budget.
hw::FpgaBudget unlimited_budget();

} // namespace circq::io
