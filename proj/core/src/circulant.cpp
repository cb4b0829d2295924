//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/circulant.hpp"

#include "circq/error.hpp"

#include <string>

namespace circq::circulant {

using spectral::Complex;
using spectral::HalfSpectrum;

namespace {

std::size_t blocks_for(std::size_t channels, std::size_t block_size)
{
    return (channels + block_size - 1) / block_size;
}

void require_block_size(std::size_t block_size)
{
    if (!spectral::is_power_of_two(block_size)) {
        throw SizeError("block size " + std::to_string(block_size) + " is not a power of two");
    }
}

// rfft without the symmetry check; bit-identical to spectral::rfft for real input.
HalfSpectrum real_half_spectrum(std::span<const double> v, std::vector<Complex>& scratch)
{
    scratch.assign(v.begin(), v.end());
    spectral::plan_for(v.size()).forward(scratch);
    const std::size_t half = v.size() / 2 + 1;
    std::vector<Complex> out(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(half));
    out.front() = {out.front().real(), 0.0};
    out.back() = {out.back().real(), 0.0};
    return HalfSpectrum(v.size(), std::move(out));
}

} // namespace

Matrix expand_block(std::span<const double> iv)
{
    const std::size_t n = iv.size();
    Matrix m(n, n);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            m(row, col) = iv[(row + n - col) % n];
        }
    }
    return m;
}

std::vector<double> project_to_circulant(const Matrix& m)
{
    if (m.rows() != m.cols() || !spectral::is_power_of_two(m.rows())) {
        throw SizeError("project_to_circulant: expected a square power-of-two matrix");
    }
    const std::size_t n = m.rows();
    std::vector<double> iv(n, 0.0);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            iv[(row + n - col) % n] += m(row, col);
        }
    }
    for (double& v : iv) {
        v /= static_cast<double>(n);
    }
    return iv;
}

BlockCirculantWeight from_index_vectors(std::size_t kernel, std::size_t in_channels,
                                        std::size_t out_channels, std::size_t block_size,
                                        std::vector<double> index_vectors, std::vector<double> bias)
{
    require_block_size(block_size);
    BlockCirculantWeight w;
    w.kernel = kernel;
    w.in_channels = in_channels;
    w.out_channels = out_channels;
    w.block_size = block_size;
    w.in_blocks = blocks_for(in_channels, block_size);
    w.out_blocks = blocks_for(out_channels, block_size);
    if (index_vectors.size() != w.block_count() * block_size) {
        throw SizeError("from_index_vectors: expected " + std::to_string(w.block_count() * block_size) +
                        " index vector entries, got " + std::to_string(index_vectors.size()));
    }
    if (bias.empty()) {
        bias.assign(out_channels, 0.0);
    }
    if (bias.size() != out_channels) {
        throw SizeError("from_index_vectors: bias length does not match output channels");
    }
    w.index_vectors = std::move(index_vectors);
    w.bias = std::move(bias);
    w.spectra.reserve(w.block_count());
    std::vector<Complex> scratch;
    for (std::size_t b = 0; b < w.block_count(); ++b) {
        w.spectra.push_back(real_half_spectrum(w.index_vector(b), scratch));
    }
    return w;
}

BlockCirculantWeight compress_weights(const WeightTensor4D& dense, std::size_t block_size)
{
    require_block_size(block_size);
    const std::size_t r = dense.kernel();
    const std::size_t c_in = dense.in_channels();
    const std::size_t c_out = dense.out_channels();
    const std::size_t in_blocks = blocks_for(c_in, block_size);
    const std::size_t out_blocks = blocks_for(c_out, block_size);

    std::vector<double> ivs;
    ivs.reserve(r * r * in_blocks * out_blocks * block_size);
    Matrix tile(block_size, block_size);
    for (std::size_t kh = 0; kh < r; ++kh) {
        for (std::size_t kw = 0; kw < r; ++kw) {
            for (std::size_t ob = 0; ob < out_blocks; ++ob) {
                for (std::size_t ib = 0; ib < in_blocks; ++ib) {
                    // Tile rows index output channels, columns input channels.
                    for (std::size_t row = 0; row < block_size; ++row) {
                        for (std::size_t col = 0; col < block_size; ++col) {
                            const std::size_t c = ib * block_size + col;
                            const std::size_t co = ob * block_size + row;
                            tile(row, col) = (c < c_in && co < c_out) ? dense.at(kh, kw, c, co) : 0.0;
                        }
                    }
                    const auto iv = project_to_circulant(tile);
                    ivs.insert(ivs.end(), iv.begin(), iv.end());
                }
            }
        }
    }
    return from_index_vectors(r, c_in, c_out, block_size, std::move(ivs));
}

WeightTensor4D decompress_weights(const BlockCirculantWeight& w)
{
    WeightTensor4D dense(w.kernel, w.in_channels, w.out_channels);
    const std::size_t lb = w.block_size;
    for (std::size_t kh = 0; kh < w.kernel; ++kh) {
        for (std::size_t kw = 0; kw < w.kernel; ++kw) {
            const std::size_t pos = kh * w.kernel + kw;
            for (std::size_t c = 0; c < w.in_channels; ++c) {
                for (std::size_t co = 0; co < w.out_channels; ++co) {
                    const auto iv = w.index_vector(w.block_index(pos, co / lb, c / lb));
                    dense.at(kh, kw, c, co) = iv[(co % lb + lb - c % lb) % lb];
                }
            }
        }
    }
    return dense;
}

BlockCirculantWeight quantize_weights(const BlockCirculantWeight& w, const quant::QuantScheme& scheme)
{
    const quant::Quantizer quantizer(scheme);
    BlockCirculantWeight out = w;
    out.scheme = scheme;
    for (std::size_t b = 0; b < w.block_count(); ++b) {
        out.spectra[b] = quant::quantize_half_spectrum(w.spectra[b], quantizer);
        const auto iv = spectral::irfft(out.spectra[b]);
        std::copy(iv.begin(), iv.end(), out.index_vectors.begin() + static_cast<std::ptrdiff_t>(b * w.block_size));
    }
    return out;
}

std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad)
{
    if (stride == 0) {
        throw SizeError("stride must be positive");
    }
    if (in + 2 * pad < kernel) {
        throw SizeError("kernel " + std::to_string(kernel) + " does not fit input extent " + std::to_string(in) +
                        " with padding " + std::to_string(pad));
    }
    return (in + 2 * pad - kernel) / stride + 1;
}

FeatureMap conv_forward(const FeatureMap& fm, const BlockCirculantWeight& w, std::size_t stride,
                        std::size_t pad, SpectrumSource source)
{
    if (fm.channels() != w.in_channels) {
        throw SizeError("conv_forward: input has " + std::to_string(fm.channels()) + " channels, weights expect " +
                        std::to_string(w.in_channels));
    }
    if (w.spectra.size() != w.block_count()) {
        throw SizeError("conv_forward: weights are missing block spectra");
    }
    const std::size_t lb = w.block_size;
    const std::size_t half = lb / 2 + 1;
    const std::size_t r = w.kernel;
    const std::size_t out_h = conv_output_extent(fm.height(), r, stride, pad);
    const std::size_t out_w = conv_output_extent(fm.width(), r, stride, pad);

    std::vector<Complex> scratch;

    // Block spectra, either as stored or recomputed from the index vectors.
    std::vector<HalfSpectrum> computed;
    const std::vector<HalfSpectrum>* weight_spectra = &w.spectra;
    if (source == SpectrumSource::OnTheFly) {
        computed.reserve(w.block_count());
        for (std::size_t b = 0; b < w.block_count(); ++b) {
            computed.push_back(real_half_spectrum(w.index_vector(b), scratch));
        }
        weight_spectra = &computed;
    }

    // One FFT per padded input pixel and input block, shared by every window
    // that reads it. Channels beyond in_channels are zero.
    const std::size_t ph = fm.height() + 2 * pad;
    const std::size_t pw = fm.width() + 2 * pad;
    std::vector<Complex> input_spectra(ph * pw * w.in_blocks * half, Complex{});
    std::vector<double> slice(lb);
    for (std::size_t y = 0; y < fm.height(); ++y) {
        for (std::size_t x = 0; x < fm.width(); ++x) {
            const auto px = fm.pixel(y, x);
            for (std::size_t ib = 0; ib < w.in_blocks; ++ib) {
                for (std::size_t j = 0; j < lb; ++j) {
                    const std::size_t c = ib * lb + j;
                    slice[j] = c < fm.channels() ? px[c] : 0.0;
                }
                const auto hs = real_half_spectrum(slice, scratch);
                const std::size_t base = (((y + pad) * pw + (x + pad)) * w.in_blocks + ib) * half;
                std::copy(hs.values().begin(), hs.values().end(), input_spectra.begin() + static_cast<std::ptrdiff_t>(base));
            }
        }
    }

    FeatureMap out(out_h, out_w, w.out_channels);
    std::vector<Complex> acc(half);
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            auto dst = out.pixel(oy, ox);
            for (std::size_t ob = 0; ob < w.out_blocks; ++ob) {
                std::fill(acc.begin(), acc.end(), Complex{});
                for (std::size_t kh = 0; kh < r; ++kh) {
                    for (std::size_t kw = 0; kw < r; ++kw) {
                        const std::size_t pos = kh * r + kw;
                        const std::size_t pix = (oy * stride + kh) * pw + (ox * stride + kw);
                        for (std::size_t ib = 0; ib < w.in_blocks; ++ib) {
                            const auto& ws = (*weight_spectra)[w.block_index(pos, ob, ib)].values();
                            const std::span<const Complex> xs(input_spectra.data() + (pix * w.in_blocks + ib) * half, half);
                            spectral::pointwise_mac(acc, ws, xs);
                        }
                    }
                }
                std::vector<Complex> accumulated(acc);
                accumulated.front() = {accumulated.front().real(), 0.0};
                accumulated.back() = {accumulated.back().real(), 0.0};
                const auto y = spectral::irfft(HalfSpectrum(lb, std::move(accumulated)));
                for (std::size_t j = 0; j < lb; ++j) {
                    const std::size_t co = ob * lb + j;
                    if (co < w.out_channels) {
                        dst[co] = y[j] + w.bias[co];
                    }
                }
            }
        }
    }
    return out;
}

FeatureMap naive_conv_forward(const FeatureMap& fm, const WeightTensor4D& w, std::span<const double> bias,
                              std::size_t stride, std::size_t pad)
{
    if (fm.channels() != w.in_channels()) {
        throw SizeError("naive_conv_forward: channel mismatch");
    }
    if (!bias.empty() && bias.size() != w.out_channels()) {
        throw SizeError("naive_conv_forward: bias length mismatch");
    }
    const std::size_t r = w.kernel();
    const std::size_t out_h = conv_output_extent(fm.height(), r, stride, pad);
    const std::size_t out_w = conv_output_extent(fm.width(), r, stride, pad);
    const FeatureMap padded = zero_pad(fm, pad);
    FeatureMap out(out_h, out_w, w.out_channels());
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            for (std::size_t co = 0; co < w.out_channels(); ++co) {
                double sum = bias.empty() ? 0.0 : bias[co];
                for (std::size_t kh = 0; kh < r; ++kh) {
                    for (std::size_t kw = 0; kw < r; ++kw) {
                        for (std::size_t c = 0; c < w.in_channels(); ++c) {
                            sum += w.at(kh, kw, c, co) * padded.at(oy * stride + kh, ox * stride + kw, c);
                        }
                    }
                }
                out.at(oy, ox, co) = sum;
            }
        }
    }
    return out;
}

} // namespace circq::circulant
