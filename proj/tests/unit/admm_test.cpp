//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/admm.hpp"
#include "circq/circulant.hpp"
#include "circq/error.hpp"
#include "circq/spectral.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

namespace circq::admm {
namespace {

using oracle::gaussian_vector;

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0)
{
    return Matrix(r, c, gaussian_vector(rng, r * c, scale));
}

double frob_distance(const Matrix& a, const Matrix& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    }
    return std::sqrt(s);
}

// Builds a matrix whose L x L tiles are circulant with half spectra drawn
// from `scheme`'s levels.
Matrix random_feasible(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t lb,
                       const quant::QuantScheme& scheme)
{
    const auto lv = quant::levels(scheme);
    std::uniform_int_distribution<std::size_t> pick(0, lv.size() - 1);
    Matrix m(rows, cols);
    for (std::size_t ti = 0; ti < rows / lb; ++ti) {
        for (std::size_t tj = 0; tj < cols / lb; ++tj) {
            std::vector<spectral::Complex> bins(lb / 2 + 1);
            for (std::size_t k = 0; k < bins.size(); ++k) {
                const bool real_only = k == 0 || k == lb / 2;
                bins[k] = {lv[pick(rng)], real_only ? 0.0 : lv[pick(rng)]};
            }
            const auto iv = spectral::irfft(spectral::HalfSpectrum(lb, bins));
            const auto tile = circulant::expand_block(iv);
            for (std::size_t r = 0; r < lb; ++r) {
                for (std::size_t c = 0; c < lb; ++c) {
                    m(ti * lb + r, tj * lb + c) = tile(r, c);
                }
            }
        }
    }
    return m;
}

AdmmState single_layer_state(Matrix w, Matrix z, Matrix u, double rho)
{
    AdmmState st;
    st.w = {std::move(w)};
    st.z = {std::move(z)};
    st.u = {std::move(u)};
    st.rho = {rho};
    return st;
}

TEST(ProximalTerm, ValueAndGradient)
{
    const Matrix w(1, 2, {3, 1});
    const Matrix z(1, 2, {1, 1});
    const Matrix u(1, 2, {0, 2});
    EXPECT_DOUBLE_EQ(proximal_term(w, z, u, 2.0), 8.0);
    EXPECT_EQ(proximal_gradient(w, z, u, 2.0).data(), (std::vector<double>{4, 4}));
}

TEST(ProximalGradient, MatchesFiniteDifferences)
{
    std::mt19937_64 rng(31);
    const auto w = random_matrix(rng, 4, 4);
    const auto z = random_matrix(rng, 4, 4);
    const auto u = random_matrix(rng, 4, 4);
    const double rho = 0.7;
    const auto g = proximal_gradient(w, z, u, rho);
    const double h = 1e-6;
    for (std::size_t i = 0; i < w.data().size(); ++i) {
        Matrix plus = w;
        Matrix minus = w;
        plus.data()[i] += h;
        minus.data()[i] -= h;
        const double fd = (proximal_term(plus, z, u, rho) - proximal_term(minus, z, u, rho)) / (2 * h);
        EXPECT_NEAR(fd, g.data()[i], 1e-5);
    }
}

TEST(Subproblem1, ZeroLossDecaysTowardZMinusU)
{
    std::mt19937_64 rng(32);
    const double rho = 0.5;
    const double lr = 0.2;
    const auto z = random_matrix(rng, 4, 4);
    const auto u = random_matrix(rng, 4, 4);
    auto st = single_layer_state(random_matrix(rng, 4, 4), z, u, rho);
    Matrix anchor = z;
    for (std::size_t i = 0; i < anchor.data().size(); ++i) {
        anchor.data()[i] -= u.data()[i];
    }
    const double before = frob_distance(st.w[0], anchor);
    solve_subproblem1(st, zero_oracle(), 1, lr);
    EXPECT_NEAR(frob_distance(st.w[0], anchor), (1 - lr * rho) * before, 1e-12);
}

TEST(Subproblem1, FeasibleWIsFixedPoint)
{
    std::mt19937_64 rng(33);
    const auto w = random_matrix(rng, 4, 4);
    auto st = single_layer_state(w, w, Matrix(4, 4), 1.0);
    solve_subproblem1(st, zero_oracle(), 5, 0.3);
    EXPECT_EQ(st.w[0], w);
}

TEST(Subproblem1, QuadraticStationaryPoint)
{
    // f = 1/2 ||W - A||^2 with Z = U = 0: the minimiser is A / (1 + rho).
    std::mt19937_64 rng(34);
    const auto a = random_matrix(rng, 4, 4);
    const double rho = 1.0;
    auto st = single_layer_state(Matrix(4, 4), Matrix(4, 4), Matrix(4, 4), rho);
    solve_subproblem1(st, quadratic_oracle({a}), 200, 0.25);
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        EXPECT_NEAR(st.w[0].data()[i], a.data()[i] / (1 + rho), 1e-12);
    }
}

TEST(Subproblem1, NonFiniteLossDiverges)
{
    LossOracle bad{"bad", [](const Layers&) { return std::numeric_limits<double>::infinity(); },
                   [](const Layers& w) { return w; }};
    auto st = single_layer_state(Matrix(4, 4), Matrix(4, 4), Matrix(4, 4), 1.0);
    EXPECT_THROW(solve_subproblem1(st, bad, 1, 0.1), DivergenceError);
}

TEST(Subproblem2, ZeroMapsToZero)
{
    EXPECT_EQ(solve_subproblem2(Matrix(8, 8), 4, quant::QuantScheme::equal_distance(16, 0.1)), Matrix(8, 8));
}

TEST(Subproblem2, IdempotentAndFeasible)
{
    std::mt19937_64 rng(35);
    for (const auto& scheme :
         {quant::QuantScheme::equal_distance(16, 0.5), quant::QuantScheme::mixed_pow2(3, 2, 0.25)}) {
        const auto z = solve_subproblem2(random_matrix(rng, 8, 8), 4, scheme);
        EXPECT_TRUE(is_block_circulant(z, 4));
        EXPECT_LE(max_off_level_distance(z, 4, scheme), 1e-12);
        EXPECT_LE(frob_distance(solve_subproblem2(z, 4, scheme), z), 1e-12);
    }
}

TEST(Subproblem2, NoSampledFeasiblePointIsCloser)
{
    std::mt19937_64 rng(36);
    const auto scheme = quant::QuantScheme::equal_distance(16, 0.5);
    const auto target = random_matrix(rng, 8, 8);
    const auto z = solve_subproblem2(target, 4, scheme);
    const double dz = frob_distance(z, target);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_feasible(rng, 8, 8, 4, scheme);
        ASSERT_TRUE(is_block_circulant(c, 4));
        EXPECT_LE(dz, frob_distance(c, target) + 1e-9);
    }
}

TEST(Subproblem2, RejectsUntiledShape)
{
    EXPECT_THROW(solve_subproblem2(Matrix(6, 8), 4, quant::QuantScheme::equal_distance(16)), SizeError);
}

TEST(DualUpdate, AccumulatesResidual)
{
    auto st = single_layer_state(Matrix(1, 2, {3, 1}), Matrix(1, 2, {1, 1}), Matrix(1, 2, {0.5, -1}), 1.0);
    dual_update(st);
    EXPECT_EQ(st.u[0].data(), (std::vector<double>{2.5, -1}));
}

TEST(DualUpdate, NoChangeWhenFeasible)
{
    auto st = single_layer_state(Matrix(2, 2, {1, 2, 3, 4}), Matrix(2, 2, {1, 2, 3, 4}), Matrix(2, 2, {7, 7, 7, 7}),
                                 1.0);
    dual_update(st);
    EXPECT_EQ(st.u[0].data(), std::vector<double>(4, 7.0));
}

TEST(AdmmState, ValidateRejectsBadRho)
{
    auto st = single_layer_state(Matrix(2, 2), Matrix(2, 2), Matrix(2, 2), 0.0);
    EXPECT_THROW(st.validate(), ParameterError);
    st.rho = {1.0};
    st.z = {Matrix(2, 3)};
    EXPECT_THROW(st.validate(), SizeError);
}

TEST(RunAdmm, ZeroLossConvergesImmediately)
{
    std::mt19937_64 rng(37);
    AdmmOptions opt;
    opt.rho = 2.0;
    opt.learning_rate = 0.5;
    opt.inner_steps = 1;
    const auto res = run_admm(zero_oracle(), {random_matrix(rng, 8, 8)},
                              {{4, quant::QuantScheme::equal_distance(16)}}, opt);
    EXPECT_EQ(res.status, AdmmStatus::Converged);
    EXPECT_LE(res.trace.size(), 2u);
}

TEST(RunAdmm, AlreadyFeasibleHasZeroResidual)
{
    std::mt19937_64 rng(38);
    const auto scheme = quant::QuantScheme::equal_distance(16, 0.5);
    const auto w = random_feasible(rng, 8, 8, 4, scheme);
    AdmmOptions opt;
    opt.calibrate_alpha = false;
    const auto res = run_admm(quadratic_oracle({w}), {w}, {{4, scheme}}, opt);
    ASSERT_FALSE(res.trace.empty());
    EXPECT_LE(res.trace.front().residual, 1e-12);
    EXPECT_EQ(res.status, AdmmStatus::Converged);
}

TEST(RunAdmm, QuadraticSingleLayerReachesFeasibleMinimiser)
{
    std::mt19937_64 rng(39);
    const auto a = random_matrix(rng, 4, 4);
    AdmmOptions opt;
    opt.rho = 1.0;
    opt.learning_rate = 0.25;
    opt.inner_steps = 20;
    const auto res = run_admm(quadratic_oracle({a}), {a}, {{4, quant::QuantScheme::equal_distance(32)}}, opt);
    EXPECT_EQ(res.status, AdmmStatus::Converged);
    const auto& z = res.weights[0];
    EXPECT_TRUE(is_block_circulant(z, 4));
    EXPECT_LE(max_off_level_distance(z, 4, res.schemes[0]), 1e-12);
}

TEST(RunAdmm, CalibratedAlphaIsFloat32)
{
    auto b = quadratic_benchmark();
    const auto res = run_admm(b.oracle, b.initial, b.constraints, b.options);
    for (const auto& s : res.schemes) {
        EXPECT_EQ(s.alpha, static_cast<double>(static_cast<float>(s.alpha)));
    }
}

TEST(RunAdmm, BenchmarkResidualShrinksAfterBurnIn)
{
    auto b = quadratic_benchmark();
    const auto res = run_admm(b.oracle, b.initial, b.constraints, b.options);
    ASSERT_GE(res.trace.size(), 4u);
    EXPECT_EQ(res.status, AdmmStatus::Converged);
    EXPECT_LT(res.trace.back().residual, res.trace[1].residual);
    for (const auto& z : res.weights) {
        EXPECT_TRUE(is_block_circulant(z, 4));
    }
}

TEST(RunAdmm, CallbackSeesEveryRow)
{
    auto b = quadratic_benchmark();
    std::vector<TraceRow> seen;
    b.options.on_iteration = [&](const TraceRow& r) { seen.push_back(r); };
    const auto res = run_admm(b.oracle, b.initial, b.constraints, b.options);
    ASSERT_EQ(seen.size(), res.trace.size());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        EXPECT_EQ(seen[i].iteration, i + 1);
        EXPECT_EQ(seen[i].residual, res.trace[i].residual);
    }
}

TEST(RunAdmm, DivergenceKeepsEarlierRows)
{
    std::mt19937_64 rng(40);
    int calls = 0;
    LossOracle flaky{"flaky",
                     [&](const Layers&) {
                         return ++calls > 3 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
                     },
                     [](const Layers& w) {
                         Layers g;
                         for (const auto& m : w) {
                             g.emplace_back(m.rows(), m.cols());
                         }
                         return g;
                     }};
    std::vector<TraceRow> seen;
    AdmmOptions opt;
    opt.inner_steps = 1;
    opt.tol = 1e-300;
    opt.on_iteration = [&](const TraceRow& r) { seen.push_back(r); };
    EXPECT_THROW(run_admm(flaky, {random_matrix(rng, 4, 4)}, {{4, quant::QuantScheme::equal_distance(16)}}, opt),
                 DivergenceError);
    EXPECT_FALSE(seen.empty());
}

TEST(RunAdmm, ZeroIterationsReturnsProjection)
{
    auto b = quadratic_benchmark();
    b.options.max_iters = 0;
    const auto res = run_admm(b.oracle, b.initial, b.constraints, b.options);
    EXPECT_TRUE(res.trace.empty());
    EXPECT_EQ(res.status, AdmmStatus::MaxIterations);
    EXPECT_TRUE(is_block_circulant(res.weights[0], 4));
}

TEST(RunAdmm, MismatchedConstraintsRejected)
{
    EXPECT_THROW(run_admm(zero_oracle(), {Matrix(4, 4)}, {}, AdmmOptions{}), SizeError);
}

TEST(SmallCnnOracle, GradientMatchesFiniteDifferences)
{
    auto b = small_cnn_benchmark();
    const auto g = b.oracle.gradient(b.initial);
    const double h = 1e-6;
    for (std::size_t l = 0; l < b.initial.size(); ++l) {
        for (std::size_t i = 0; i < b.initial[l].data().size(); i += 5) {
            auto plus = b.initial;
            auto minus = b.initial;
            plus[l].data()[i] += h;
            minus[l].data()[i] -= h;
            const double fd = (b.oracle.loss(plus) - b.oracle.loss(minus)) / (2 * h);
            EXPECT_NEAR(fd, g[l].data()[i], 1e-4) << "layer " << l << " entry " << i;
        }
    }
}

TEST(SmallCnnBenchmark, ConvergesToFeasibleWeights)
{
    auto b = small_cnn_benchmark();
    const auto res = run_admm(b.oracle, b.initial, b.constraints, b.options);
    EXPECT_EQ(res.status, AdmmStatus::Converged);
    for (std::size_t l = 0; l < res.weights.size(); ++l) {
        EXPECT_TRUE(is_block_circulant(res.weights[l], 4));
        EXPECT_LE(max_off_level_distance(res.weights[l], 4, res.schemes[l]), 1e-9);
    }
}

TEST(WriteTrace, HeaderAndRows)
{
    std::ostringstream os;
    write_trace(os, {{1, 0.5, 2.0}, {2, 0.25, 1.0}});
    const auto text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "iteration\tresidual\tloss");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(IsBlockCirculant, DetectsBrokenTile)
{
    Matrix m = circulant::expand_block(std::vector<double>{1, 2, 3, 4});
    EXPECT_TRUE(is_block_circulant(m, 4));
    m(1, 2) += 1;
    EXPECT_FALSE(is_block_circulant(m, 4));
}

} // namespace
} // namespace circq::admm
