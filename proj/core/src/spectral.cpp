//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/spectral.hpp"

#include "circq/error.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <unordered_map>

namespace circq::spectral {

namespace {

void require_power_of_two(std::size_t n, const char* what)
{
    if (!is_power_of_two(n)) {
        throw SizeError(std::string(what) + ": length " + std::to_string(n) +
                        " is not a power of two");
    }
}

double norm2(std::span<const Complex> s)
{
    double acc = 0.0;
    for (const auto& z : s) {
        acc += std::norm(z);
    }
    return acc;
}

} // namespace

HalfSpectrum::HalfSpectrum(std::size_t n, std::vector<Complex> values)
    : n_(n), values_(std::move(values))
{
    require_power_of_two(n_, "HalfSpectrum");
    if (values_.size() != n_ / 2 + 1) {
        throw SizeError("HalfSpectrum: expected " + std::to_string(n_ / 2 + 1) + " values, got " +
                        std::to_string(values_.size()));
    }
    if (values_.front().imag() != 0.0 || values_.back().imag() != 0.0) {
        throw SymmetryError("HalfSpectrum: DC and Nyquist bins must be real");
    }
}

FftPlan::FftPlan(std::size_t n) : n_(n), bitrev_(n), twiddles_(n / 2)
{
    require_power_of_two(n, "fft");
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) {
        ++bits;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            r |= ((i >> b) & 1u) << (bits - 1 - b);
        }
        bitrev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddles_[k] = {std::cos(angle), std::sin(angle)};
    }
}

void FftPlan::forward(std::span<Complex> data) const
{
    if (data.size() != n_) {
        throw SizeError("fft: plan/data length mismatch");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (i < bitrev_[i]) {
            std::swap(data[i], data[bitrev_[i]]);
        }
    }
    // Iterative decimation-in-time: log2(N) stages of N/2 butterflies.
    for (std::size_t span = 2; span <= n_; span <<= 1) {
        const std::size_t half = span / 2;
        const std::size_t stride = n_ / span;
        for (std::size_t start = 0; start < n_; start += span) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex t = twiddles_[k * stride] * data[start + k + half];
                const Complex u = data[start + k];
                data[start + k] = u + t;
                data[start + k + half] = u - t;
            }
        }
    }
}

const FftPlan& plan_for(std::size_t n)
{
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<FftPlan>(n);
    }
    return *slot;
}

Spectrum fft(std::span<const double> v)
{
    require_power_of_two(v.size(), "fft");
    Spectrum s{std::vector<Complex>(v.begin(), v.end())};
    plan_for(v.size()).forward(s.values);
    return s;
}

Spectrum fft(std::span<const Complex> v)
{
    require_power_of_two(v.size(), "fft");
    Spectrum s{std::vector<Complex>(v.begin(), v.end())};
    plan_for(v.size()).forward(s.values);
    return s;
}

std::vector<double> ifft(const Spectrum& s)
{
    const std::size_t n = s.size();
    require_power_of_two(n, "ifft");
    std::vector<Complex> work(n);
    for (std::size_t k = 0; k < n; ++k) {
        work[k] = std::conj(s.values[k]);
    }
    plan_for(n).forward(work);

    const double scale = 1.0 / static_cast<double>(n);
    // ||v|| via Parseval, used to make the residue test relative.
    const double signal_norm = std::sqrt(norm2(s.values) * scale);
    double residue = 0.0;
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        const Complex z = std::conj(work[t]) * scale;
        out[t] = z.real();
        residue = std::max(residue, std::abs(z.imag()));
    }
    if (residue > kRelTol * signal_norm) {
        throw SymmetryError("ifft: imaginary residue " + std::to_string(residue) +
                            " exceeds tolerance; spectrum is not conjugate symmetric");
    }
    return out;
}

HalfSpectrum compact(const Spectrum& s)
{
    const std::size_t n = s.size();
    require_power_of_two(n, "compact");
    const double tol = kRelTol * std::sqrt(norm2(s.values));
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const Complex mirror = std::conj(s.values[(n - k) % n]);
        if (std::abs(s.values[k] - mirror) > tol) {
            throw SymmetryError("compact: bin " + std::to_string(k) + " is not the conjugate of bin " +
                                std::to_string((n - k) % n));
        }
    }
    std::vector<Complex> half(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(n / 2 + 1));
    half.front() = {half.front().real(), 0.0};
    half.back() = {half.back().real(), 0.0};
    return HalfSpectrum(n, std::move(half));
}

Spectrum expand(const HalfSpectrum& h)
{
    const std::size_t n = h.n();
    Spectrum s{std::vector<Complex>(n)};
    const auto& half = h.values();
    for (std::size_t k = 0; k <= n / 2; ++k) {
        s.values[k] = half[k];
    }
    for (std::size_t k = 1; k < n / 2; ++k) {
        s.values[n - k] = std::conj(half[k]);
    }
    return s;
}

HalfSpectrum rfft(std::span<const double> v) { return compact(fft(v)); }

std::vector<double> irfft(const HalfSpectrum& h) { return ifft(expand(h)); }

std::vector<double> circular_convolve(std::span<const double> w, std::span<const double> x)
{
    if (w.size() != x.size()) {
        throw SizeError("circular_convolve: length mismatch " + std::to_string(w.size()) + " vs " +
                        std::to_string(x.size()));
    }
    Spectrum acc{std::vector<Complex>(w.size())};
    const Spectrum fw = fft(w);
    const Spectrum fx = fft(x);
    pointwise_mac(acc.values, fw.values, fx.values);
    return ifft(acc);
}

void pointwise_mac(std::span<Complex> acc, std::span<const Complex> a, std::span<const Complex> b)
{
    if (acc.size() != a.size() || a.size() != b.size()) {
        throw SizeError("pointwise_mac: length mismatch");
    }
    for (std::size_t k = 0; k < acc.size(); ++k) {
        acc[k] += a[k] * b[k];
    }
}

Spectrum pointwise_mac(Spectrum acc, const Spectrum& a, const Spectrum& b)
{
    pointwise_mac(std::span<Complex>(acc.values), a.values, b.values);
    return acc;
}

} // namespace circq::spectral
