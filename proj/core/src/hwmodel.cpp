//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/hwmodel.hpp"

#include "circq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace circq::hw {

namespace {

void require_consistent(const ModeAssignment& a, std::span<const LayerProfile> p)
{
    if (a.size() != p.size()) {
        throw SizeError("mode assignment has " + std::to_string(a.size()) + " layers, profiles have " +
                        std::to_string(p.size()));
    }
}

double weighted_sum(const ModeAssignment& a, std::span<const LayerProfile> p, double mode1_coeff, double mode2_coeff)
{
    double mode1_ops = 0.0;
    double mode2_ops = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        (a[i].mode == Mode::Dsp ? mode1_ops : mode2_ops) += p[i].comp_size;
    }
    return mode1_coeff * mode1_ops + mode2_coeff * mode2_ops;
}

double comm_ratio(const LayerProfile& p)
{
    const double comm = p.in_size + p.out_size;
    return comm > 0 ? p.comp_size / comm : std::numeric_limits<double>::infinity();
}

} // namespace

std::string to_string(BoundType b) { return b == BoundType::Computation ? "Comp.-bound" : "Comm.-bound"; }

std::string to_string(Mode m) { return m == Mode::Dsp ? "1" : "2"; }

void PeCost::validate() const
{
    if (dsp_per_dsp_pe < 0 || dsp_per_shift_pe < 0 || lut_per_dsp_pe < 0 || lut_per_shift_pe < 0) {
        throw ParameterError("PE costs must be non-negative");
    }
    if (dsp_per_shift_pe > dsp_per_dsp_pe) {
        throw ParameterError("a shift-based PE cannot use more DSPs than a DSP-based PE");
    }
    if (!(dsp_share_divisor > 0)) {
        throw ParameterError("DSP share divisor must be positive");
    }
}

void FpgaBudget::validate() const
{
    if (!(dsp_total >= 0 && lut_total >= 0 && bram_count >= 0 && bram_size_bits > 0 && bram_bandwidth_bits > 0 &&
          onchip_bandwidth_bits >= 0 && clock_hz > 0)) {
        throw ParameterError("FPGA budget values must be positive");
    }
}

void LatencyParams::validate() const
{
    if (!(ops_per_cycle_mode1 > 0 && ops_per_cycle_mode2 > 0 && bytes_per_cycle > 0 && element_bits > 0 &&
          clock_hz > 0)) {
        throw ParameterError("latency parameters must be positive");
    }
    if (ops_per_cycle_mode2 < ops_per_cycle_mode1) {
        throw ParameterError("mode 2 throughput must not be below mode 1 throughput");
    }
}

double estimate_dsp(const ModeAssignment& assignment, std::span<const LayerProfile> profiles, const PeCost& cost)
{
    require_consistent(assignment, profiles);
    return weighted_sum(assignment, profiles, cost.dsp_per_dsp_pe / cost.dsp_share_divisor,
                        cost.dsp_per_shift_pe / cost.dsp_share_divisor);
}

double estimate_lut(const ModeAssignment& assignment, std::span<const LayerProfile> profiles, const PeCost& cost)
{
    require_consistent(assignment, profiles);
    return weighted_sum(assignment, profiles, cost.lut_per_dsp_pe, cost.lut_per_shift_pe);
}

std::int64_t estimate_bram(double model_size_bits, double onchip_bandwidth_bits, const FpgaBudget& budget)
{
    const double by_capacity = std::ceil(model_size_bits / budget.bram_size_bits);
    const double by_bandwidth = std::ceil(onchip_bandwidth_bits / budget.bram_bandwidth_bits);
    return static_cast<std::int64_t>(std::max(by_capacity, by_bandwidth));
}

double layer_model_size_bits(const ConvShape& shape, std::size_t block_size, int bits)
{
    const auto blocks = [&](std::size_t ch) { return static_cast<double>((ch + block_size - 1) / block_size); };
    const double vectors =
        static_cast<double>(shape.kernel * shape.kernel) * blocks(shape.in_channels) * blocks(shape.out_channels);
    // Half spectrum: N/2+1 complex values with real DC/Nyquist bins = N reals.
    const double components = static_cast<double>(block_size);
    return vectors * components * static_cast<double>(bits) + 32.0;
}

double model_size_bits(std::span<const ConvShape> shapes, std::size_t block_size, const ModeAssignment& assignment)
{
    if (shapes.size() != assignment.size()) {
        throw SizeError("model_size_bits: one assignment per layer required");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        total += layer_model_size_bits(shapes[i], block_size, assignment[i].bits);
    }
    return total;
}

FftMultipliers fft_multiplier_count(std::size_t n)
{
    if (n == 0 || (n & (n - 1)) != 0) {
        throw SizeError("fft_multiplier_count: N must be a power of two");
    }
    // A span-m stage has N/m groups with twiddles W_m^k, k < m/2; only k = 0
    // (1) and k = m/4 (-j) are trivial, so stages with m < 8 are free.
    FftMultipliers out;
    for (std::size_t m = 8; m <= n; m <<= 1) {
        out.fft_mults += (n / m) * (m / 2 - 2);
    }
    out.dot_product_mults = n >= 2 ? n - (n / 2 - 1) : n;
    return out;
}

LayerLatency layer_latency(const LayerProfile& profile, Mode mode, const LatencyParams& params)
{
    params.validate();
    LayerLatency out;
    const double throughput = mode == Mode::Dsp ? params.ops_per_cycle_mode1 : params.ops_per_cycle_mode2;
    out.compute_cycles = profile.comp_size / throughput;
    out.comm_cycles = (profile.in_size + profile.out_size) * params.element_bits / (8.0 * params.bytes_per_cycle);
    out.bound = out.compute_cycles > out.comm_cycles ? BoundType::Computation : BoundType::Communication;
    out.seconds = std::max(out.compute_cycles, out.comm_cycles) / params.clock_hz;
    return out;
}

BoundCalibration calibrate_bound_params(std::span<const LayerProfile> profiles, std::span<const BoundType> expected,
                                        const LatencyParams& base)
{
    if (profiles.size() != expected.size()) {
        throw SizeError("calibrate_bound_params: one expected bound per layer required");
    }
    base.validate();

    // A layer is compute-bound iff comp/(in+out) > tau with
    // tau = ops_per_cycle * element_bits / (8 * bytes_per_cycle).
    std::vector<double> ratios;
    for (const auto& p : profiles) {
        ratios.push_back(comm_ratio(p));
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<double> candidates;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (std::isfinite(sorted[i + 1])) {
            candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
        }
    }
    if (!sorted.empty()) {
        candidates.push_back(sorted.front() > 0 ? 0.5 * sorted.front() : 1e-12);
        if (std::isfinite(sorted.back())) {
            candidates.push_back(2.0 * sorted.back() + 1.0);
        }
    }

    BoundCalibration best;
    best.total = profiles.size();
    best.params = base;
    bool have = false;
    for (double tau : candidates) {
        LatencyParams p = base;
        p.bytes_per_cycle = base.ops_per_cycle_mode1 * base.element_bits / (8.0 * tau);
        std::size_t matches = 0;
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            matches += layer_latency(profiles[i], Mode::Dsp, p).bound == expected[i] ? 1 : 0;
        }
        if (!have || matches > best.matches) {
            best.matches = matches;
            best.params = p;
            have = true;
        }
    }
    return best;
}

std::vector<Mode> select_modes(std::span<const double> degradations, double margin)
{
    std::vector<std::size_t> order(degradations.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return degradations[a] < degradations[b]; });

    std::vector<Mode> modes(degradations.size(), Mode::Shift);
    double accumulated = 0.0;
    for (std::size_t idx : order) {
        if (accumulated + degradations[idx] >= margin) {
            modes[idx] = Mode::Dsp;
        } else {
            accumulated += degradations[idx];
        }
    }
    return modes;
}

SensitivityFn constant_sensitivity(std::vector<double> per_layer)
{
    return [v = std::move(per_layer)](std::size_t layer, int) { return v.at(layer); };
}

LatencyFn model_latency(std::vector<LayerProfile> profiles, LatencyParams params)
{
    params.validate();
    return [profiles = std::move(profiles), params](std::size_t layer, Mode mode) {
        return layer_latency(profiles.at(layer), mode, params).seconds;
    };
}

ExploreResult evaluate_point(const ExploreInputs& in, int bits, double margin)
{
    const std::size_t n = in.profiles.size();
    std::vector<double> degradation(n);
    for (std::size_t i = 0; i < n; ++i) {
        degradation[i] = in.sensitivity(i, bits);
    }
    const auto modes = select_modes(degradation, margin);

    ExploreResult r;
    r.bits = bits;
    r.margin = margin;
    for (std::size_t i = 0; i < n; ++i) {
        r.assignment.push_back({modes[i], bits});
        r.resources.model_size_bits += in.model_size(i, bits);
        r.layer_latency.push_back(in.latency(i, modes[i]));
        r.total_latency += r.layer_latency.back();
    }
    r.resources.dsp = estimate_dsp(r.assignment, in.profiles, in.cost);
    r.resources.lut = estimate_lut(r.assignment, in.profiles, in.cost);
    r.resources.bram = estimate_bram(r.resources.model_size_bits, in.budget.onchip_bandwidth_bits, in.budget);

    const double over_dsp = in.budget.dsp_total > 0 ? r.resources.dsp / in.budget.dsp_total
                                                    : (r.resources.dsp > 0 ? HUGE_VAL : 0.0);
    const double over_lut = in.budget.lut_total > 0 ? r.resources.lut / in.budget.lut_total
                                                    : (r.resources.lut > 0 ? HUGE_VAL : 0.0);
    const double over_bram = in.budget.bram_count > 0 ? static_cast<double>(r.resources.bram) / in.budget.bram_count
                                                      : (r.resources.bram > 0 ? HUGE_VAL : 0.0);
    r.feasible = over_dsp <= 1.0 && over_lut <= 1.0 && over_bram <= 1.0;
    if (!r.feasible) {
        if (over_dsp >= over_lut && over_dsp >= over_bram) {
            r.binding_constraint = "dsp";
        } else if (over_lut >= over_bram) {
            r.binding_constraint = "lut";
        } else {
            r.binding_constraint = "bram";
        }
    }
    return r;
}

ExploreResult explore(const ExploreInputs& in)
{
    in.budget.validate();
    in.cost.validate();
    if (!in.sensitivity || !in.latency || !in.model_size) {
        throw ConfigError("explore: sensitivity, latency and model-size evaluators are required");
    }
    std::vector<int> bits = in.bit_grid;
    std::sort(bits.begin(), bits.end(), std::greater<>());
    std::vector<double> margins = in.margins;
    std::sort(margins.begin(), margins.end());
    if (bits.empty() || margins.empty()) {
        throw ConfigError("explore: empty search grid");
    }

    ExploreResult best;
    ExploreResult least_infeasible;
    double least_overshoot = HUGE_VAL;
    bool found = false;
    for (int b : bits) {
        for (double margin : margins) {
            ExploreResult r = evaluate_point(in, b, margin);
            if (r.feasible) {
                if (!found || r.total_latency < best.total_latency) {
                    best = std::move(r);
                    found = true;
                }
                continue;
            }
            const double overshoot = std::max({in.budget.dsp_total > 0 ? r.resources.dsp / in.budget.dsp_total : HUGE_VAL,
                                               in.budget.lut_total > 0 ? r.resources.lut / in.budget.lut_total : HUGE_VAL,
                                               in.budget.bram_count > 0
                                                   ? static_cast<double>(r.resources.bram) / in.budget.bram_count
                                                   : HUGE_VAL});
            if (overshoot < least_overshoot) {
                least_overshoot = overshoot;
                least_infeasible = std::move(r);
            }
        }
    }
    if (found) {
        return best;
    }
    if (least_infeasible.assignment.empty()) {
        least_infeasible = evaluate_point(in, bits.back(), margins.front());
    }
    return least_infeasible;
}

} // namespace circq::hw
