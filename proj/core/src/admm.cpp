//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/admm.hpp"

#include "circq/circulant.hpp"
#include "circq/error.hpp"
#include "circq/spectral.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <random>

namespace circq::admm {

namespace {

void require_tiled(const Matrix& m, std::size_t block_size)
{
    if (block_size == 0 || m.rows() % block_size != 0 || m.cols() % block_size != 0) {
        throw SizeError("matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                        " is not partitionable into " + std::to_string(block_size) + "x" +
                        std::to_string(block_size) + " tiles");
    }
}

Matrix tile_of(const Matrix& m, std::size_t block_size, std::size_t ti, std::size_t tj)
{
    Matrix t(block_size, block_size);
    for (std::size_t r = 0; r < block_size; ++r) {
        for (std::size_t c = 0; c < block_size; ++c) {
            t(r, c) = m(ti * block_size + r, tj * block_size + c);
        }
    }
    return t;
}

void put_tile(Matrix& m, const Matrix& t, std::size_t ti, std::size_t tj)
{
    const std::size_t n = t.rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            m(ti * n + r, tj * n + c) = t(r, c);
        }
    }
}

template <typename Fn>
void for_each_tile(const Matrix& m, std::size_t block_size, Fn&& fn)
{
    for (std::size_t ti = 0; ti < m.rows() / block_size; ++ti) {
        for (std::size_t tj = 0; tj < m.cols() / block_size; ++tj) {
            fn(ti, tj);
        }
    }
}

void require_finite(const Matrix& m, const char* what)
{
    for (double v : m.data()) {
        if (!std::isfinite(v)) {
            throw DivergenceError(std::string(what) + " is not finite");
        }
    }
}

Matrix subproblem2_impl(const Matrix& in, std::size_t block_size, const quant::Quantizer& quantizer)
{
    require_tiled(in, block_size);
    Matrix out(in.rows(), in.cols());
    for_each_tile(in, block_size, [&](std::size_t ti, std::size_t tj) {
        const auto iv = circulant::project_to_circulant(tile_of(in, block_size, ti, tj));
        const auto q = quant::quantize_half_spectrum(spectral::rfft(iv), quantizer);
        put_tile(out, circulant::expand_block(spectral::irfft(q)), ti, tj);
    });
    return out;
}

std::vector<double> projected_spectrum_components(const Matrix& m, std::size_t block_size)
{
    require_tiled(m, block_size);
    std::vector<double> values;
    for_each_tile(m, block_size, [&](std::size_t ti, std::size_t tj) {
        const auto h = spectral::rfft(circulant::project_to_circulant(tile_of(m, block_size, ti, tj)));
        for (const auto& z : h.values()) {
            values.push_back(z.real());
            values.push_back(z.imag());
        }
    });
    return values;
}

} // namespace

LossOracle zero_oracle()
{
    LossOracle o;
    o.name = "zero";
    o.loss = [](const Layers&) { return 0.0; };
    o.gradient = [](const Layers& w) {
        Layers g;
        g.reserve(w.size());
        for (const auto& m : w) {
            g.emplace_back(m.rows(), m.cols());
        }
        return g;
    };
    return o;
}

LossOracle quadratic_oracle(Layers targets)
{
    auto shared = std::make_shared<const Layers>(std::move(targets));
    LossOracle o;
    o.name = "quadratic";
    o.loss = [shared](const Layers& w) {
        double f = 0.0;
        for (std::size_t l = 0; l < w.size(); ++l) {
            for (std::size_t i = 0; i < w[l].data().size(); ++i) {
                const double d = w[l].data()[i] - (*shared)[l].data()[i];
                f += 0.5 * d * d;
            }
        }
        return f;
    };
    o.gradient = [shared](const Layers& w) {
        Layers g = w;
        for (std::size_t l = 0; l < w.size(); ++l) {
            if (!w[l].same_shape((*shared)[l])) {
                throw SizeError("quadratic oracle: layer shape mismatch");
            }
            for (std::size_t i = 0; i < g[l].data().size(); ++i) {
                g[l].data()[i] -= (*shared)[l].data()[i];
            }
        }
        return g;
    };
    return o;
}

LossOracle small_cnn_oracle(Matrix inputs, Matrix targets)
{
    if (inputs.rows() != targets.rows() || inputs.rows() == 0) {
        throw SizeError("small CNN oracle: inputs and targets need the same nonzero sample count");
    }
    struct Data {
        Matrix x;
        Matrix t;
    };
    auto data = std::make_shared<const Data>(Data{std::move(inputs), std::move(targets)});

    // Hidden activations and output residuals of every sample.
    struct Pass {
        Matrix hidden;
        Matrix residual;
    };
    auto run = [data](const Layers& w) {
        if (w.size() != 2) {
            throw SizeError("small CNN oracle: expected two layers");
        }
        const Matrix& w1 = w[0];
        const Matrix& w2 = w[1];
        const Matrix& x = data->x;
        const Matrix& t = data->t;
        if (w1.cols() != x.cols() || w2.cols() != w1.rows() || w2.rows() != t.cols()) {
            throw SizeError("small CNN oracle: layer shapes do not chain");
        }
        const std::size_t n = x.rows();
        Pass p{Matrix(n, w1.rows()), Matrix(n, w2.rows())};
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t h = 0; h < w1.rows(); ++h) {
                double acc = 0.0;
                for (std::size_t c = 0; c < w1.cols(); ++c) {
                    acc += w1(h, c) * x(s, c);
                }
                p.hidden(s, h) = std::tanh(acc);
            }
            for (std::size_t o = 0; o < w2.rows(); ++o) {
                double acc = 0.0;
                for (std::size_t h = 0; h < w2.cols(); ++h) {
                    acc += w2(o, h) * p.hidden(s, h);
                }
                p.residual(s, o) = acc - t(s, o);
            }
        }
        return p;
    };

    LossOracle o;
    o.name = "small-cnn";
    o.loss = [data, run](const Layers& w) {
        const auto p = run(w);
        double f = 0.0;
        for (double r : p.residual.data()) {
            f += r * r;
        }
        return 0.5 * f / static_cast<double>(data->x.rows());
    };
    o.gradient = [data, run](const Layers& w) {
        const auto p = run(w);
        const Matrix& w2 = w[1];
        const Matrix& x = data->x;
        const double inv_n = 1.0 / static_cast<double>(x.rows());
        Layers g{Matrix(w[0].rows(), w[0].cols()), Matrix(w2.rows(), w2.cols())};
        for (std::size_t s = 0; s < x.rows(); ++s) {
            for (std::size_t o = 0; o < w2.rows(); ++o) {
                for (std::size_t h = 0; h < w2.cols(); ++h) {
                    g[1](o, h) += inv_n * p.residual(s, o) * p.hidden(s, h);
                }
            }
            for (std::size_t h = 0; h < w2.cols(); ++h) {
                double back = 0.0;
                for (std::size_t o = 0; o < w2.rows(); ++o) {
                    back += w2(o, h) * p.residual(s, o);
                }
                const double a = p.hidden(s, h);
                back *= 1.0 - a * a;
                for (std::size_t c = 0; c < x.cols(); ++c) {
                    g[0](h, c) += inv_n * back * x(s, c);
                }
            }
        }
        return g;
    };
    return o;
}

void AdmmState::validate() const
{
    if (z.size() != w.size() || u.size() != w.size() || rho.size() != w.size()) {
        throw SizeError("ADMM state: per-layer vectors have different lengths");
    }
    for (std::size_t l = 0; l < w.size(); ++l) {
        if (!w[l].same_shape(z[l]) || !w[l].same_shape(u[l])) {
            throw SizeError("ADMM state: W, Z, U shapes differ in layer " + std::to_string(l));
        }
        if (!(rho[l] > 0.0)) {
            throw ParameterError("ADMM state: rho must be positive in layer " + std::to_string(l));
        }
    }
}

double proximal_term(const Matrix& w, const Matrix& z, const Matrix& u, double rho)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < w.data().size(); ++i) {
        const double d = w.data()[i] - z.data()[i] + u.data()[i];
        acc += d * d;
    }
    return 0.5 * rho * acc;
}

Matrix proximal_gradient(const Matrix& w, const Matrix& z, const Matrix& u, double rho)
{
    Matrix g(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.data().size(); ++i) {
        g.data()[i] = rho * (w.data()[i] - z.data()[i] + u.data()[i]);
    }
    return g;
}

void solve_subproblem1(AdmmState& state, const LossOracle& oracle, std::size_t steps, double lr)
{
    state.validate();
    for (std::size_t step = 0; step < steps; ++step) {
        if (!std::isfinite(oracle.loss(state.w))) {
            throw DivergenceError("loss is not finite at ADMM iteration " + std::to_string(state.iteration));
        }
        const Layers grad = oracle.gradient(state.w);
        if (grad.size() != state.w.size()) {
            throw SizeError("loss gradient has the wrong number of layers");
        }
        for (std::size_t l = 0; l < state.w.size(); ++l) {
            require_finite(grad[l], "loss gradient");
            const Matrix prox = proximal_gradient(state.w[l], state.z[l], state.u[l], state.rho[l]);
            auto& w = state.w[l].data();
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] -= lr * (grad[l].data()[i] + prox.data()[i]);
            }
            require_finite(state.w[l], "weights");
        }
    }
}

Matrix solve_subproblem2(const Matrix& w_plus_u, std::size_t block_size, const quant::QuantScheme& scheme)
{
    return subproblem2_impl(w_plus_u, block_size, quant::Quantizer(scheme));
}

void dual_update(AdmmState& state)
{
    state.validate();
    for (std::size_t l = 0; l < state.w.size(); ++l) {
        auto& u = state.u[l].data();
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] += state.w[l].data()[i] - state.z[l].data()[i];
        }
    }
}

double relative_residual(const Layers& w, const Layers& z)
{
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l) {
        for (std::size_t i = 0; i < w[l].data().size(); ++i) {
            const double d = w[l].data()[i] - z[l].data()[i];
            diff += d * d;
            norm += w[l].data()[i] * w[l].data()[i];
        }
    }
    return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

AdmmResult run_admm(const LossOracle& oracle, Layers initial, const std::vector<LayerConstraint>& constraints,
                    const AdmmOptions& options)
{
    if (!(options.tol > 0.0)) {
        throw ParameterError("ADMM tolerance must be positive");
    }
    if (constraints.size() != initial.size()) {
        throw SizeError("ADMM: one constraint per layer required");
    }
    if (!options.rho_per_layer.empty() && options.rho_per_layer.size() != initial.size()) {
        throw SizeError("ADMM: per-layer rho list has the wrong length");
    }

    AdmmResult result;
    std::vector<quant::Quantizer> quantizers;
    for (std::size_t l = 0; l < initial.size(); ++l) {
        quant::QuantScheme scheme = constraints[l].scheme;
        if (options.calibrate_alpha) {
            const auto values = projected_spectrum_components(initial[l], constraints[l].block_size);
            scheme.alpha = static_cast<double>(static_cast<float>(quant::calibrate_alpha(values, scheme)));
        }
        result.schemes.push_back(scheme);
        quantizers.emplace_back(scheme);
    }

    AdmmState& st = result.state;
    st.w = std::move(initial);
    st.u.clear();
    st.z.clear();
    for (std::size_t l = 0; l < st.w.size(); ++l) {
        st.z.push_back(subproblem2_impl(st.w[l], constraints[l].block_size, quantizers[l]));
        st.u.emplace_back(st.w[l].rows(), st.w[l].cols());
        st.rho.push_back(options.rho_per_layer.empty() ? options.rho : options.rho_per_layer[l]);
    }
    st.validate();

    result.weights = st.z;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= options.max_iters; ++k) {
        st.iteration = k;
        solve_subproblem1(st, oracle, options.inner_steps, options.learning_rate);
        for (std::size_t l = 0; l < st.w.size(); ++l) {
            Matrix target = st.w[l];
            for (std::size_t i = 0; i < target.data().size(); ++i) {
                target.data()[i] += st.u[l].data()[i];
            }
            st.z[l] = subproblem2_impl(target, constraints[l].block_size, quantizers[l]);
        }
        dual_update(st);

        const double residual = relative_residual(st.w, st.z);
        result.trace.push_back({k, residual, oracle.loss(st.w)});
        if (options.on_iteration) {
            options.on_iteration(result.trace.back());
        }
        if (residual <= best) {
            best = residual;
            result.weights = st.z;
        }
        if (residual < options.tol) {
            result.status = AdmmStatus::Converged;
            break;
        }
    }
    return result;
}

bool is_block_circulant(const Matrix& m, std::size_t block_size)
{
    require_tiled(m, block_size);
    bool ok = true;
    for_each_tile(m, block_size, [&](std::size_t ti, std::size_t tj) {
        const Matrix t = tile_of(m, block_size, ti, tj);
        for (std::size_t r = 0; r < block_size && ok; ++r) {
            for (std::size_t c = 0; c < block_size && ok; ++c) {
                ok = t(r, c) == t((r + block_size - c) % block_size, 0);
            }
        }
    });
    return ok;
}

double max_off_level_distance(const Matrix& m, std::size_t block_size, const quant::QuantScheme& scheme)
{
    const quant::Quantizer q(scheme);
    double worst = 0.0;
    for (double v : projected_spectrum_components(m, block_size)) {
        worst = std::max(worst, std::abs(v - q(v)));
    }
    return worst;
}

void write_trace(std::ostream& os, const std::vector<TraceRow>& trace, char delimiter)
{
    os << "iteration" << delimiter << "residual" << delimiter << "loss\n";
    const auto old_precision = os.precision(12);
    for (const auto& row : trace) {
        os << row.iteration << delimiter << row.residual << delimiter << row.loss << '\n';
    }
    os.precision(old_precision);
}

Benchmark quadratic_benchmark(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Layers targets;
    for (int l = 0; l < 4; ++l) {
        Matrix a(8, 8);
        for (double& v : a.data()) {
            v = gauss(rng);
        }
        targets.push_back(std::move(a));
    }
    Benchmark b;
    b.initial = targets;
    b.oracle = quadratic_oracle(std::move(targets));
    b.constraints = {
        {4, quant::QuantScheme::equal_distance(32)},
        {4, quant::QuantScheme::equal_distance(32)},
        {4, quant::QuantScheme::mixed_pow2(3, 2)},
        {4, quant::QuantScheme::mixed_pow2(3, 2)},
    };
    b.options.rho_per_layer = {1.0, 1.0, 1.0, 1.0};
    b.options.max_iters = 200;
    b.options.tol = 1e-3;
    b.options.inner_steps = 5;
    b.options.learning_rate = 0.25;
    return b;
}

Benchmark small_cnn_benchmark(std::uint64_t seed)
{
    constexpr std::size_t kChannels = 8;
    constexpr std::size_t kSamples = 64;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&](std::size_t r, std::size_t c, double scale) {
        Matrix m(r, c);
        for (double& v : m.data()) {
            v = scale * gauss(rng);
        }
        return m;
    };
    const double he = std::sqrt(1.0 / kChannels);
    const Layers teacher{random_matrix(kChannels, kChannels, he), random_matrix(kChannels, kChannels, he)};
    Matrix x = random_matrix(kSamples, kChannels, 1.0);
    Matrix t(kSamples, kChannels);
    for (std::size_t s = 0; s < kSamples; ++s) {
        std::vector<double> hidden(kChannels);
        for (std::size_t h = 0; h < kChannels; ++h) {
            double acc = 0.0;
            for (std::size_t c = 0; c < kChannels; ++c) {
                acc += teacher[0](h, c) * x(s, c);
            }
            hidden[h] = std::tanh(acc);
        }
        for (std::size_t o = 0; o < kChannels; ++o) {
            double acc = 0.0;
            for (std::size_t h = 0; h < kChannels; ++h) {
                acc += teacher[1](o, h) * hidden[h];
            }
            t(s, o) = acc;
        }
    }

    Benchmark b;
    b.initial = teacher;
    for (auto& layer : b.initial) {
        for (double& v : layer.data()) {
            v += 0.1 * he * gauss(rng);
        }
    }
    b.oracle = small_cnn_oracle(std::move(x), std::move(t));
    b.constraints = {
        {4, quant::QuantScheme::equal_distance(32)},
        {4, quant::QuantScheme::mixed_pow2(3, 2)},
    };
    b.options.rho_per_layer = {1.0, 1.0};
    b.options.max_iters = 200;
    b.options.tol = 1e-3;
    b.options.inner_steps = 5;
    b.options.learning_rate = 0.25;
    return b;
}

} // namespace circq::admm
