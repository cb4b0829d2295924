//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/quant.hpp"
#include "circq/tensors.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace circq::admm {

using Layers = std::vector<Matrix>;

/// Differentiable training loss over all layer weights.
struct LossOracle {
    std::string name;
    std::function<double(const Layers&)> loss;
    std::function<Layers(const Layers&)> gradient;
};

/// f = 0.
LossOracle zero_oracle();
/// f = 1/2 sum_l ||W_l - A_l||_F^2.
LossOracle quadratic_oracle(Layers targets);
/// Two 1x1 CONV layers with a tanh between them, applied to every row of
/// `inputs` (samples x channels); f = 1/(2n) sum ||W2 tanh(W1 x) - t||^2.
/// Layers are (out x in): W1 is hidden x C, W2 is C' x hidden.
LossOracle small_cnn_oracle(Matrix inputs, Matrix targets);

/// Per layer: W, auxiliary Z and scaled dual U (same shapes), penalty rho.
struct AdmmState {
    Layers w;
    Layers z;
    Layers u;
    std::vector<double> rho;
    std::size_t iteration = 0;

    /// Throws SizeError / ParameterError when shapes disagree or rho <= 0.
    void validate() const;
};

/// Structural constraint of one layer: L_b x L_b circulant tiles whose index
/// vector spectra sit on `scheme`'s levels.
struct LayerConstraint {
    std::size_t block_size = 4;
    quant::QuantScheme scheme;
};

/// (rho/2) ||W - Z + U||_F^2 for one layer, and its gradient rho (W - Z + U).
double proximal_term(const Matrix& w, const Matrix& z, const Matrix& u, double rho);
Matrix proximal_gradient(const Matrix& w, const Matrix& z, const Matrix& u, double rho);

/// `steps` full-batch gradient steps on f(W) + sum_l (rho_l/2) ||W_l - Z_l + U_l||^2.
/// Throws DivergenceError on a non-finite loss or gradient.
void solve_subproblem1(AdmmState& state, const LossOracle& oracle, std::size_t steps, double lr);

/// Per tile: circulant projection, FFT, nearest-level quantization of the half
/// spectrum, IFFT, re-expansion. Rows and columns must be multiples of block_size.
Matrix solve_subproblem2(const Matrix& w_plus_u, std::size_t block_size, const quant::QuantScheme& scheme);

/// U <- U + W - Z.
void dual_update(AdmmState& state);

struct TraceRow {
    std::size_t iteration = 0;
    double residual = 0.0; // ||W - Z||_F / ||W||_F over all layers
    double loss = 0.0;
};

struct AdmmOptions {
    double rho = 1e-2;
    /// Optional per-layer rho; empty means `rho` everywhere.
    std::vector<double> rho_per_layer;
    std::size_t max_iters = 200;
    double tol = 1e-3;
    std::size_t inner_steps = 10;
    double learning_rate = 0.1;
    /// Derive alpha once from the initial spectra (rounded to float32) and
    /// freeze it. When false, the constraint schemes are used as given.
    bool calibrate_alpha = true;
    /// Called after every iteration; rows already reported survive a
    /// DivergenceError thrown later.
    std::function<void(const TraceRow&)> on_iteration;
};

enum class AdmmStatus {
    Converged,
    MaxIterations,
};

struct AdmmResult {
    /// Feasible weights (the best Z seen).
    Layers weights;
    /// Schemes with the alpha actually used.
    std::vector<quant::QuantScheme> schemes;
    std::vector<TraceRow> trace;
    AdmmStatus status = AdmmStatus::MaxIterations;
    AdmmState state;
};

/// subproblem 1 -> subproblem 2 -> dual update until the relative residual
/// drops below tol or max_iters is reached.
AdmmResult run_admm(const LossOracle& oracle, Layers initial, const std::vector<LayerConstraint>& constraints,
                    const AdmmOptions& options);

/// Relative residual ||W - Z||_F / ||W||_F aggregated over layers (absolute when W = 0).
double relative_residual(const Layers& w, const Layers& z);

/// Every tile is exactly circulant.
bool is_block_circulant(const Matrix& m, std::size_t block_size);
/// Largest distance between a tile spectrum component and its nearest level.
double max_off_level_distance(const Matrix& m, std::size_t block_size, const quant::QuantScheme& scheme);

/// Tab-separated "iteration residual loss" table with a header line.
void write_trace(std::ostream& os, const std::vector<TraceRow>& trace, char delimiter = '\t');

/// Shipped benchmark: 4 layers of 8x8, L_b = 4, quadratic loss toward seeded
/// Gaussian targets, two equal-distance (M = 32) and two mixed powers-of-two
/// (3 + 2 bit) layers.
struct Benchmark {
    LossOracle oracle;
    Layers initial;
    std::vector<LayerConstraint> constraints;
    AdmmOptions options;
};
Benchmark quadratic_benchmark(std::uint64_t seed = 7);

/// 8 -> 8 -> 8 channel small CNN on 64 seeded synthetic pixels; targets come
/// from a seeded teacher network, training starts from a perturbed teacher.
/// Both layers use L_b = 4, equal-distance first and mixed powers-of-two second.
Benchmark small_cnn_benchmark(std::uint64_t seed = 11);

} // namespace circq::admm
