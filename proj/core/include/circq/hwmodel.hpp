//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace circq::hw {

/// PE flavour of a layer. Mode 1: equal-distance weights on DSP multipliers.
/// Mode 2: mixed powers-of-two weights on shift-add logic.
enum class Mode : int {
    Dsp = 1,
    Shift = 2,
};

enum class BoundType {
    Communication,
    Computation,
};

std::string to_string(BoundType b);
std::string to_string(Mode m);

/// Per-CONV-operation PE costs. ΔDSP/ΔLUT are divided by `dsp_share_divisor`
/// to account for DSP sub-block sharing.
struct PeCost {
    double dsp_per_dsp_pe = 1.0;
    double dsp_per_shift_pe = 0.0;
    double lut_per_dsp_pe = 1.0;
    double lut_per_shift_pe = 4.0;
    double dsp_share_divisor = 1.0;

    void validate() const;
};

struct FpgaBudget {
    double dsp_total = 0;
    double lut_total = 0;
    double bram_count = 0;
    double bram_size_bits = 36.0 * 1024.0;
    double bram_bandwidth_bits = 64.0;
    double onchip_bandwidth_bits = 64.0;
    double clock_hz = 200e6;

    void validate() const;
};

/// Per-layer workload: MAC count and communicated element counts.
struct LayerProfile {
    std::string name;
    double comp_size = 0;
    double in_size = 0;
    double out_size = 0;
};

struct LayerAssignment {
    Mode mode = Mode::Shift;
    int bits = 8;

    bool operator==(const LayerAssignment&) const = default;
};
using ModeAssignment = std::vector<LayerAssignment>;

/// ΔDSP_D * Σ comp(mode-1 layers) + ΔDSP_S * Σ comp(mode-2 layers).
double estimate_dsp(const ModeAssignment& assignment, std::span<const LayerProfile> profiles, const PeCost& cost);
/// ΔLUT_D * Σ comp(mode-1 layers) + ΔLUT_S * Σ comp(mode-2 layers).
double estimate_lut(const ModeAssignment& assignment, std::span<const LayerProfile> profiles, const PeCost& cost);
/// max(ceil(model / BRAM size), ceil(on-chip bandwidth / BRAM bandwidth)).
std::int64_t estimate_bram(double model_size_bits, double onchip_bandwidth_bits, const FpgaBudget& budget);

/// CONV layer geometry needed for storage accounting.
struct ConvShape {
    std::size_t kernel = 3;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
};

/// Stored bits of one layer: r^2 * ceil(C/L_b) * ceil(C'/L_b) half spectra,
/// L_b real components each, `bits` per component, plus a 32-bit alpha.
double layer_model_size_bits(const ConvShape& shape, std::size_t block_size, int bits);
double model_size_bits(std::span<const ConvShape> shapes, std::size_t block_size, const ModeAssignment& assignment);

struct FftMultipliers {
    /// Butterflies whose twiddle is not in {1, -1, j, -j}.
    std::size_t fft_mults = 0;
    /// Complex multiplies left in the N-point dot product after mirroring
    /// the last N/2 - 1 outputs.
    std::size_t dot_product_mults = 0;
};
FftMultipliers fft_multiplier_count(std::size_t n);

struct LatencyParams {
    double ops_per_cycle_mode1 = 64.0;
    double ops_per_cycle_mode2 = 128.0;
    double bytes_per_cycle = 64.0;
    double element_bits = 16.0;
    double clock_hz = 200e6;

    void validate() const;
};

struct LayerLatency {
    double seconds = 0;
    double compute_cycles = 0;
    double comm_cycles = 0;
    BoundType bound = BoundType::Communication;
};

/// Roofline: latency = max(compute, communication) / clock; ties and empty
/// layers count as communication-bound.
LayerLatency layer_latency(const LayerProfile& profile, Mode mode, const LatencyParams& params);

struct BoundCalibration {
    LatencyParams params;
    std::size_t matches = 0;
    std::size_t total = 0;
};

/// Chooses bytes_per_cycle (throughput kept from `base`) to maximize agreement
/// between mode-1 bound classification and `expected`. Exhaustive over all
/// thresholds that separate the layers' compute/communication ratios.
BoundCalibration calibrate_bound_params(std::span<const LayerProfile> profiles, std::span<const BoundType> expected,
                                        const LatencyParams& base);

/// Mode selection for one margin: layers are admitted to mode 2 in ascending
/// degradation order (stable) while the accumulated degradation stays below
/// the margin; all others get mode 1.
std::vector<Mode> select_modes(std::span<const double> degradations, double margin);

/// Accuracy degradation of running `layer` in mode 2 at `bits`.
using SensitivityFn = std::function<double(std::size_t layer, int bits)>;
/// Latency in seconds of `layer` in `mode`.
using LatencyFn = std::function<double(std::size_t layer, Mode mode)>;
/// Stored bits of `layer` at `bits`.
using ModelSizeFn = std::function<double(std::size_t layer, int bits)>;

SensitivityFn constant_sensitivity(std::vector<double> per_layer);
LatencyFn model_latency(std::vector<LayerProfile> profiles, LatencyParams params);

struct ExploreInputs {
    std::vector<LayerProfile> profiles;
    SensitivityFn sensitivity;
    LatencyFn latency;
    ModelSizeFn model_size;
    FpgaBudget budget;
    PeCost cost;
    /// Searched in descending order.
    std::vector<int> bit_grid = {16, 15, 14, 13, 12, 11, 10, 9, 8, 7, 6, 5, 4};
    /// Searched in ascending order.
    std::vector<double> margins = {0.0, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1};
};

struct ResourceEstimate {
    double dsp = 0;
    double lut = 0;
    std::int64_t bram = 0;
    double model_size_bits = 0;
};

struct ExploreResult {
    bool feasible = false;
    int bits = 0;
    double margin = 0;
    ModeAssignment assignment;
    ResourceEstimate resources;
    double total_latency = 0;
    std::vector<double> layer_latency;
    /// On infeasibility: "dsp", "lut" or "bram".
    std::string binding_constraint;
};

/// Evaluates one (bits, margin) point.
ExploreResult evaluate_point(const ExploreInputs& in, int bits, double margin);

/// Grid search over (bits desc, margin asc); the feasible point with the lowest
/// total latency wins, earlier points winning ties.
ExploreResult explore(const ExploreInputs& in);

} // namespace circq::hw
