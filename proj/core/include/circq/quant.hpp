//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/spectral.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace circq::quant {

enum class SchemeKind : std::uint8_t {
    EqualDistance = 0,
    MixedPow2 = 1,
};

std::string to_string(SchemeKind kind);

/// Level-set definition for one layer.
///
/// EqualDistance: alpha * {-(M/2-1), ..., -1, 0, 1, ..., M/2-1}. Note this has
/// M-1 members, not M.
///
/// MixedPow2: alpha * s * (P + S) with s = +/-1,
/// P in {0, 2^0, ..., 2^M1}, S in {0, 2^0, ..., 2^M2},
/// M1 = 2^p_bits - 2 and M2 = 2^s_bits - 2.
struct QuantScheme {
    SchemeKind kind = SchemeKind::EqualDistance;
    int m = 16;     // EqualDistance level-count parameter (even, >= 2)
    int p_bits = 3; // MixedPow2 primary field width
    int s_bits = 2; // MixedPow2 secondary field width
    double alpha = 1.0;

    static QuantScheme equal_distance(int m, double alpha = 1.0);
    static QuantScheme mixed_pow2(int p_bits, int s_bits, double alpha = 1.0);
    /// Scheme whose stored code occupies exactly `bits` bits.
    /// EqualDistance: M = 2^(bits-1). MixedPow2: 1 sign + ceil((bits-1)/2) primary + floor((bits-1)/2) secondary.
    static QuantScheme from_bits(SchemeKind kind, int bits, double alpha = 1.0);

    /// Throws ParameterError for alpha <= 0 or unsupported widths.
    void validate() const;

    /// Width of one stored code in bits.
    int code_bits() const;

    /// Largest level magnitude for alpha = 1.
    double max_unit_level() const;

    QuantScheme with_alpha(double a) const
    {
        QuantScheme s = *this;
        s.alpha = a;
        return s;
    }

    /// Fields the kind does not use are ignored.
    friend bool operator==(const QuantScheme& a, const QuantScheme& b)
    {
        if (a.kind != b.kind || a.alpha != b.alpha) {
            return false;
        }
        return a.kind == SchemeKind::EqualDistance ? a.m == b.m : a.p_bits == b.p_bits && a.s_bits == b.s_bits;
    }
};

/// Sorted, deduplicated level set (symmetric about 0, contains 0).
std::vector<double> levels(const QuantScheme& scheme);

/// Nearest-level quantizer over a cached level table.
class Quantizer {
public:
    explicit Quantizer(const QuantScheme& scheme);

    /// argmin over levels of |x - level|; ties go to the smaller magnitude.
    double operator()(double x) const;

    const QuantScheme& scheme() const { return scheme_; }
    const std::vector<double>& levels() const { return levels_; }

private:
    QuantScheme scheme_;
    std::vector<double> levels_;
};

double quantize_value(double x, const QuantScheme& scheme);

/// Quantizes real and imaginary parts independently; bins 0 and N/2 stay real.
spectral::HalfSpectrum quantize_half_spectrum(const spectral::HalfSpectrum& h, const QuantScheme& scheme);
spectral::HalfSpectrum quantize_half_spectrum(const spectral::HalfSpectrum& h, const Quantizer& quantizer);

/// alpha such that the largest level equals max|values|; 1 when all values are 0.
double calibrate_alpha(std::span<const double> values, const QuantScheme& shape);

/// Mixed powers-of-two code: sign | primary | secondary, MSB first.
/// Field value k = 0 contributes nothing; k >= 1 contributes 2^(k-1).
struct QuantCode {
    int p_bits = 3;
    int s_bits = 2;
    bool negative = false;
    std::uint32_t primary = 0;
    std::uint32_t secondary = 0;

    int width() const { return 1 + p_bits + s_bits; }

    /// Packed integer, most significant bit is the sign.
    std::uint32_t bits() const;
    static QuantCode from_bits(std::uint32_t bits, int p_bits, int s_bits);
    /// Parses a binary string such as "101101".
    static QuantCode from_string(const std::string& bits, int p_bits, int s_bits);
    std::string to_string() const;

    /// Shift amount of a field, or -1 when the field is zero.
    int primary_shift() const { return static_cast<int>(primary) - 1; }
    int secondary_shift() const { return static_cast<int>(secondary) - 1; }

    /// Integer magnitude P + S.
    std::int64_t magnitude() const;

    bool operator==(const QuantCode&) const = default;
};

/// Canonical code for a MixedPow2 level (largest primary term first).
/// Throws EncodingError if the value is not a level of the scheme.
QuantCode encode(double level_value, const QuantScheme& scheme);
double decode(const QuantCode& code, const QuantScheme& scheme);

/// sign * ((input << primary_shift) + (input << secondary_shift)); zero fields add nothing.
std::int64_t shift_add_multiply(std::int64_t input, const QuantCode& code);

/// Scheme-independent stored code used by the weight file.
/// EqualDistance: two's-complement level index in code_bits() bits.
/// MixedPow2: QuantCode::bits().
std::uint32_t encode_bits(double level_value, const QuantScheme& scheme);
double decode_bits(std::uint32_t bits, const QuantScheme& scheme);

} // namespace circq::quant
