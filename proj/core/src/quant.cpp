//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/quant.hpp"

#include "circq/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace circq::quant {

namespace {

constexpr int kMaxPrimaryBits = 5;
constexpr int kMaxSecondaryBits = 5;
constexpr int kMaxEqualDistanceM = 1 << 20;

// Field value k contributes 2^(k-1); k = 0 contributes nothing.
std::int64_t field_term(std::uint32_t k) { return k == 0 ? 0 : std::int64_t{1} << (k - 1); }

std::uint32_t field_count(int bits) { return std::uint32_t{1} << bits; }

std::vector<std::int64_t> mixed_unit_magnitudes(const QuantScheme& s)
{
    std::set<std::int64_t> mags;
    for (std::uint32_t p = 0; p < field_count(s.p_bits); ++p) {
        for (std::uint32_t q = 0; q < field_count(s.s_bits); ++q) {
            mags.insert(field_term(p) + field_term(q));
        }
    }
    return {mags.begin(), mags.end()};
}

int ceil_log2(int m)
{
    int bits = 0;
    while ((1 << bits) < m) {
        ++bits;
    }
    return bits;
}

} // namespace

std::string to_string(SchemeKind kind)
{
    return kind == SchemeKind::EqualDistance ? "equal-distance" : "mixed-pow2";
}

QuantScheme QuantScheme::equal_distance(int m, double alpha)
{
    QuantScheme s;
    s.kind = SchemeKind::EqualDistance;
    s.m = m;
    s.alpha = alpha;
    s.validate();
    return s;
}

QuantScheme QuantScheme::mixed_pow2(int p_bits, int s_bits, double alpha)
{
    QuantScheme s;
    s.kind = SchemeKind::MixedPow2;
    s.p_bits = p_bits;
    s.s_bits = s_bits;
    s.alpha = alpha;
    s.validate();
    return s;
}

QuantScheme QuantScheme::from_bits(SchemeKind kind, int bits, double alpha)
{
    if (bits < 2) {
        throw ParameterError("bit length must be at least 2, got " + std::to_string(bits));
    }
    if (kind == SchemeKind::EqualDistance) {
        if (bits > 21) {
            throw ParameterError("equal-distance bit length above 21 is not supported");
        }
        return equal_distance(1 << (bits - 1), alpha);
    }
    const int magnitude_bits = bits - 1;
    return mixed_pow2((magnitude_bits + 1) / 2, magnitude_bits / 2, alpha);
}

void QuantScheme::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("quantization coefficient alpha must be positive, got " + std::to_string(alpha));
    }
    if (kind == SchemeKind::EqualDistance) {
        if (m < 2 || m % 2 != 0 || m > kMaxEqualDistanceM) {
            throw ParameterError("equal-distance M must be even and in [2, 2^20], got " + std::to_string(m));
        }
    } else {
        if (p_bits < 1 || p_bits > kMaxPrimaryBits || s_bits < 0 || s_bits > kMaxSecondaryBits) {
            throw ParameterError("mixed powers-of-two field widths out of range (p_bits " +
                                 std::to_string(p_bits) + ", s_bits " + std::to_string(s_bits) + ")");
        }
    }
}

int QuantScheme::code_bits() const
{
    if (kind == SchemeKind::EqualDistance) {
        return ceil_log2(m) + 1;
    }
    return 1 + p_bits + s_bits;
}

double QuantScheme::max_unit_level() const
{
    if (kind == SchemeKind::EqualDistance) {
        return static_cast<double>(m / 2 - 1);
    }
    return static_cast<double>(field_term(field_count(p_bits) - 1) + field_term(field_count(s_bits) - 1));
}

std::vector<double> levels(const QuantScheme& scheme)
{
    scheme.validate();
    std::vector<double> out;
    if (scheme.kind == SchemeKind::EqualDistance) {
        const int half = scheme.m / 2 - 1;
        out.reserve(static_cast<std::size_t>(2 * half + 1));
        for (int i = -half; i <= half; ++i) {
            out.push_back(scheme.alpha * static_cast<double>(i));
        }
        return out;
    }
    const auto mags = mixed_unit_magnitudes(scheme);
    out.reserve(2 * mags.size() - 1);
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) {
        if (*it != 0) {
            out.push_back(-scheme.alpha * static_cast<double>(*it));
        }
    }
    for (auto mag : mags) {
        out.push_back(scheme.alpha * static_cast<double>(mag));
    }
    return out;
}

Quantizer::Quantizer(const QuantScheme& scheme) : scheme_(scheme), levels_(quant::levels(scheme)) {}

double Quantizer::operator()(double x) const
{
    auto hi = std::lower_bound(levels_.begin(), levels_.end(), x);
    if (hi == levels_.end()) {
        return levels_.back();
    }
    if (*hi == x || hi == levels_.begin()) {
        return *hi;
    }
    const double upper = *hi;
    const double lower = *(hi - 1);
    const double d_lower = x - lower;
    const double d_upper = upper - x;
    if (d_lower < d_upper) {
        return lower;
    }
    if (d_upper < d_lower) {
        return upper;
    }
    return std::abs(lower) <= std::abs(upper) ? lower : upper;
}

double quantize_value(double x, const QuantScheme& scheme) { return Quantizer(scheme)(x); }

spectral::HalfSpectrum quantize_half_spectrum(const spectral::HalfSpectrum& h, const Quantizer& quantizer)
{
    std::vector<spectral::Complex> out;
    out.reserve(h.values().size());
    for (const auto& z : h.values()) {
        out.emplace_back(quantizer(z.real()), quantizer(z.imag()));
    }
    // The quantizer is odd, so 0 maps to 0 and the DC/Nyquist bins stay real.
    return spectral::HalfSpectrum(h.n(), std::move(out));
}

spectral::HalfSpectrum quantize_half_spectrum(const spectral::HalfSpectrum& h, const QuantScheme& scheme)
{
    return quantize_half_spectrum(h, Quantizer(scheme));
}

double calibrate_alpha(std::span<const double> values, const QuantScheme& shape)
{
    if (values.empty()) {
        throw ParameterError("calibrate_alpha: no values");
    }
    double peak = 0.0;
    for (double v : values) {
        peak = std::max(peak, std::abs(v));
    }
    const double top = shape.max_unit_level();
    if (peak == 0.0 || top == 0.0) {
        return 1.0;
    }
    return peak / top;
}

std::uint32_t QuantCode::bits() const
{
    return (static_cast<std::uint32_t>(negative) << (p_bits + s_bits)) | (primary << s_bits) | secondary;
}

QuantCode QuantCode::from_bits(std::uint32_t bits, int p_bits, int s_bits)
{
    QuantCode c;
    c.p_bits = p_bits;
    c.s_bits = s_bits;
    c.secondary = bits & (field_count(s_bits) - 1);
    c.primary = (bits >> s_bits) & (field_count(p_bits) - 1);
    c.negative = ((bits >> (p_bits + s_bits)) & 1u) != 0;
    return c;
}

QuantCode QuantCode::from_string(const std::string& text, int p_bits, int s_bits)
{
    if (static_cast<int>(text.size()) != 1 + p_bits + s_bits) {
        throw EncodingError("code '" + text + "' does not have " + std::to_string(1 + p_bits + s_bits) + " bits");
    }
    std::uint32_t bits = 0;
    for (char ch : text) {
        if (ch != '0' && ch != '1') {
            throw EncodingError("code '" + text + "' is not a binary string");
        }
        bits = (bits << 1) | static_cast<std::uint32_t>(ch - '0');
    }
    return from_bits(bits, p_bits, s_bits);
}

std::string QuantCode::to_string() const
{
    std::string out;
    const auto packed = bits();
    for (int b = width() - 1; b >= 0; --b) {
        out.push_back(((packed >> b) & 1u) ? '1' : '0');
    }
    return out;
}

std::int64_t QuantCode::magnitude() const { return field_term(primary) + field_term(secondary); }

QuantCode encode(double level_value, const QuantScheme& scheme)
{
    if (scheme.kind != SchemeKind::MixedPow2) {
        throw EncodingError("encode: QuantCode applies to mixed powers-of-two schemes only");
    }
    scheme.validate();
    const double units = std::abs(level_value) / scheme.alpha;
    const auto target = static_cast<std::int64_t>(std::llround(units));
    if (std::abs(static_cast<double>(target) - units) > 1e-9 * std::max(1.0, units)) {
        throw EncodingError("value " + std::to_string(level_value) + " is not a level of the scheme");
    }

    QuantCode code;
    code.p_bits = scheme.p_bits;
    code.s_bits = scheme.s_bits;
    code.negative = level_value < 0.0 && target != 0;
    for (std::uint32_t p = field_count(scheme.p_bits); p-- > 0;) {
        const std::int64_t rest = target - field_term(p);
        if (rest < 0) {
            continue;
        }
        for (std::uint32_t q = 0; q < field_count(scheme.s_bits); ++q) {
            if (field_term(q) == rest) {
                code.primary = p;
                code.secondary = q;
                return code;
            }
        }
    }
    throw EncodingError("value " + std::to_string(level_value) + " is not a level of the scheme");
}

double decode(const QuantCode& code, const QuantScheme& scheme)
{
    const double mag = scheme.alpha * static_cast<double>(code.magnitude());
    if (mag == 0.0) {
        return 0.0;
    }
    return code.negative ? -mag : mag;
}

std::int64_t shift_add_multiply(std::int64_t input, const QuantCode& code)
{
    std::int64_t sum = 0;
    if (code.primary != 0) {
        sum += input << code.primary_shift();
    }
    if (code.secondary != 0) {
        sum += input << code.secondary_shift();
    }
    return code.negative ? -sum : sum;
}

std::uint32_t encode_bits(double level_value, const QuantScheme& scheme)
{
    if (scheme.kind == SchemeKind::MixedPow2) {
        return encode(level_value, scheme).bits();
    }
    scheme.validate();
    const double units = level_value / scheme.alpha;
    const auto index = static_cast<std::int64_t>(std::llround(units));
    const std::int64_t half = scheme.m / 2 - 1;
    if (std::abs(static_cast<double>(index) - units) > 1e-9 * std::max(1.0, std::abs(units)) ||
        index < -half || index > half) {
        throw EncodingError("value " + std::to_string(level_value) + " is not a level of the scheme");
    }
    const std::uint32_t mask = (std::uint32_t{1} << scheme.code_bits()) - 1;
    return static_cast<std::uint32_t>(index) & mask;
}

double decode_bits(std::uint32_t bits, const QuantScheme& scheme)
{
    if (scheme.kind == SchemeKind::MixedPow2) {
        return decode(QuantCode::from_bits(bits, scheme.p_bits, scheme.s_bits), scheme);
    }
    const int width = scheme.code_bits();
    std::int64_t index = bits & ((std::uint32_t{1} << width) - 1);
    if (index & (std::int64_t{1} << (width - 1))) {
        index -= std::int64_t{1} << width;
    }
    if (std::abs(index) > scheme.m / 2 - 1) {
        throw EncodingError("level index " + std::to_string(index) + " outside the scheme");
    }
    return scheme.alpha * static_cast<double>(index);
}

} // namespace circq::quant
