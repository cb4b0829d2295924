//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace circq::spectral {

using Complex = std::complex<double>;

/// Relative tolerance used for floating-point equivalence and symmetry checks.
inline constexpr double kRelTol = 1e-9;

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Full N-point spectrum. Lengths are powers of two; N = 1 is accepted as the
/// degenerate scalar case.
struct Spectrum {
    std::vector<Complex> values;

    std::size_t size() const { return values.size(); }
    bool operator==(const Spectrum&) const = default;
};

/// Non-redundant half of a real signal's spectrum: N/2+1 entries, with the DC
/// and Nyquist bins purely real.
class HalfSpectrum {
public:
    HalfSpectrum() = default;
    /// Throws SizeError for a bad length and SymmetryError when bin 0 or N/2
    /// carries an imaginary part.
    HalfSpectrum(std::size_t n, std::vector<Complex> values);

    std::size_t n() const { return n_; }
    const std::vector<Complex>& values() const { return values_; }
    std::vector<Complex>& values() { return values_; }

    bool operator==(const HalfSpectrum&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<Complex> values_;
};

/// Precomputed bit-reversal permutation and twiddle table for one length.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const { return n_; }
    /// Forward transform in place: X[k] = sum_t x[t] e^{-2 pi i k t / N}.
    void forward(std::span<Complex> data) const;

private:
    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<Complex> twiddles_; // e^{-2 pi i k / N}, k < N/2
};

/// Returns a cached plan for length `n` (thread-local cache).
const FftPlan& plan_for(std::size_t n);

Spectrum fft(std::span<const double> v);
Spectrum fft(std::span<const Complex> v);

/// Inverse transform of a conjugate-symmetric spectrum, computed as
/// conj -> fft -> conj -> /N. Throws SymmetryError when the imaginary residue
/// exceeds kRelTol * ||v||.
std::vector<double> ifft(const Spectrum& s);

HalfSpectrum compact(const Spectrum& s);
Spectrum expand(const HalfSpectrum& h);

/// compact(fft(v)) and ifft(expand(h)).
HalfSpectrum rfft(std::span<const double> v);
std::vector<double> irfft(const HalfSpectrum& h);

/// result[k] = sum_j w[j] x[(k - j) mod N], through the spectral product.
std::vector<double> circular_convolve(std::span<const double> w, std::span<const double> x);

/// acc[k] += a[k] * b[k].
void pointwise_mac(std::span<Complex> acc, std::span<const Complex> a, std::span<const Complex> b);
Spectrum pointwise_mac(Spectrum acc, const Spectrum& a, const Spectrum& b);

} // namespace circq::spectral
