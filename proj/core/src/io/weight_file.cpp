//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/io/weight_file.hpp"

#include "circq/error.hpp"
#include "circq/quant.hpp"
#include "circq/spectral.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace circq::io {

namespace {

using circulant::BlockCirculantWeight;
using spectral::Complex;

constexpr char kWeightMagic[4] = {'R', 'Q', 'Y', 'W'};
constexpr char kDenseMagic[4] = {'R', 'Q', 'Y', 'D'};
constexpr char kTensorMagic[4] = {'R', 'Q', 'Y', 'T'};
// Upper bound on any single dimension read from a file.
constexpr std::uint32_t kMaxDim = 1u << 24;

class Writer {
public:
    void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
    void f32s(std::span<const double> vs)
    {
        for (double v : vs) {
            f32(v);
        }
    }
    void raw(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, std::string source) : data_(data), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& what) const
    {
        throw SchemaError(source_, "byte " + std::to_string(pos_), what);
    }

    void need(std::size_t n) const
    {
        if (data_.size() - pos_ < n) {
            fail("unexpected end of file (need " + std::to_string(n) + " more bytes)");
        }
    }
    void magic(const char (&expected)[4], const char* kind)
    {
        need(4);
        if (std::memcmp(data_.data() + pos_, expected, 4) != 0) {
            fail(std::string("bad magic; not a ") + kind + " file");
        }
        pos_ += 4;
    }
    std::uint8_t u8()
    {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
        }
        return v;
    }
    std::uint32_t dim(const char* what)
    {
        const auto v = u32();
        if (v == 0 || v > kMaxDim) {
            fail(std::string(what) + " out of range: " + std::to_string(v));
        }
        return v;
    }
    double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
    std::vector<double> f32s(std::size_t n)
    {
        need(4 * n);
        std::vector<double> out(n);
        for (auto& v : out) {
            v = f32();
        }
        return out;
    }
    std::span<const std::uint8_t> raw(std::size_t n)
    {
        need(n);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == data_.size(); }

private:
    std::span<const std::uint8_t> data_;
    std::string source_;
    std::size_t pos_ = 0;
};

class BitWriter {
public:
    void put(std::uint32_t code, int width)
    {
        for (int b = width - 1; b >= 0; --b) {
            if (used_ == 0) {
                out_.push_back(0);
            }
            if ((code >> b) & 1u) {
                out_.back() |= static_cast<std::uint8_t>(0x80u >> used_);
            }
            used_ = (used_ + 1) % 8;
        }
    }
    const std::vector<std::uint8_t>& bytes() const { return out_; }

private:
    std::vector<std::uint8_t> out_;
    int used_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}
    bool get(std::uint32_t& code, int width)
    {
        code = 0;
        for (int b = 0; b < width; ++b) {
            if (bit_ / 8 >= data_.size()) {
                return false;
            }
            const std::uint32_t bit = (data_[bit_ / 8] >> (7 - bit_ % 8)) & 1u;
            code = (code << 1) | bit;
            ++bit_;
        }
        return true;
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t bit_ = 0;
};

std::vector<double> half_spectrum_components(const spectral::HalfSpectrum& h)
{
    const std::size_t n = h.n();
    const auto& v = h.values();
    std::vector<double> out;
    out.reserve(n);
    out.push_back(v[0].real());
    for (std::size_t k = 1; k < n / 2; ++k) {
        out.push_back(v[k].real());
        out.push_back(v[k].imag());
    }
    if (n >= 2) {
        out.push_back(v[n / 2].real());
    }
    return out;
}

spectral::HalfSpectrum half_spectrum_from_components(std::size_t n, std::span<const double> c)
{
    std::vector<Complex> v(n / 2 + 1);
    v[0] = {c[0], 0.0};
    for (std::size_t k = 1; k < n / 2; ++k) {
        v[k] = {c[2 * k - 1], c[2 * k]};
    }
    if (n >= 2) {
        v[n / 2] = {c[n - 1], 0.0};
    }
    return spectral::HalfSpectrum(n, std::move(v));
}

} // namespace

std::vector<std::uint8_t> encode_weight_file(std::span<const BlockCirculantWeight> layers)
{
    Writer w;
    w.bytes(kWeightMagic, 4);
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(layers.size()));
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& layer = layers[li];
        if (!layer.scheme) {
            throw ConfigError("layer " + std::to_string(li) + " is not quantized; only quantized spectra can be stored");
        }
        const auto& scheme = *layer.scheme;
        w.u32(static_cast<std::uint32_t>(layer.block_size));
        w.u8(static_cast<std::uint8_t>(scheme.kind));
        const bool mixed = scheme.kind == quant::SchemeKind::MixedPow2;
        w.u8(static_cast<std::uint8_t>(mixed ? scheme.p_bits : 0));
        w.u8(static_cast<std::uint8_t>(mixed ? scheme.s_bits : 0));
        w.u8(static_cast<std::uint8_t>(scheme.code_bits()));
        w.u32(mixed ? 0u : static_cast<std::uint32_t>(scheme.m));
        w.f32(scheme.alpha);
        w.u32(static_cast<std::uint32_t>(layer.kernel));
        w.u32(static_cast<std::uint32_t>(layer.in_channels));
        w.u32(static_cast<std::uint32_t>(layer.out_channels));
        w.u32(static_cast<std::uint32_t>(layer.in_blocks));
        w.u32(static_cast<std::uint32_t>(layer.out_blocks));
        w.u8(layer.bn ? 1 : 0);
        w.u8(0);
        w.u8(0);
        w.u8(0);

        // Codes are computed against the alpha that is actually stored.
        const auto stored = scheme.with_alpha(static_cast<float>(scheme.alpha));
        BitWriter bits;
        for (const auto& h : layer.spectra) {
            for (double c : half_spectrum_components(h)) {
                bits.put(quant::encode_bits(c * stored.alpha / scheme.alpha, stored), scheme.code_bits());
            }
        }
        w.u32(static_cast<std::uint32_t>(bits.bytes().size()));
        w.raw(bits.bytes());
        w.f32s(layer.bias);
        if (layer.bn) {
            w.f32(layer.bn->epsilon);
            w.f32s(layer.bn->mean);
            w.f32s(layer.bn->variance);
            w.f32s(layer.bn->scale);
            w.f32s(layer.bn->shift);
        }
    }
    return w.take();
}

std::vector<BlockCirculantWeight> decode_weight_file(std::span<const std::uint8_t> bytes, const std::string& source)
{
    Reader r(bytes, source);
    r.magic(kWeightMagic, "weight");
    const auto version = r.u32();
    if (version != kFormatVersion) {
        r.fail("unsupported format version " + std::to_string(version));
    }
    const auto count = r.u32();
    if (count > kMaxDim) {
        r.fail("layer count out of range");
    }
    std::vector<BlockCirculantWeight> layers;
    for (std::uint32_t li = 0; li < count; ++li) {
        const auto block_size = r.dim("block size");
        if (!spectral::is_power_of_two(block_size)) {
            r.fail("layer " + std::to_string(li) + ": block size is not a power of two");
        }
        quant::QuantScheme scheme;
        const auto kind = r.u8();
        if (kind > 1) {
            r.fail("layer " + std::to_string(li) + ": unknown scheme kind " + std::to_string(kind));
        }
        scheme.kind = static_cast<quant::SchemeKind>(kind);
        scheme.p_bits = r.u8();
        scheme.s_bits = r.u8();
        const int code_bits = r.u8();
        scheme.m = static_cast<int>(r.u32());
        scheme.alpha = r.f32();
        try {
            scheme.validate();
        } catch (const ParameterError& e) {
            r.fail("layer " + std::to_string(li) + ": " + e.what());
        }
        if (code_bits != scheme.code_bits()) {
            r.fail("layer " + std::to_string(li) + ": code width disagrees with the scheme");
        }

        const auto kernel = r.dim("kernel");
        const auto in_ch = r.dim("in_channels");
        const auto out_ch = r.dim("out_channels");
        const auto in_blocks = r.dim("in_blocks");
        const auto out_blocks = r.dim("out_blocks");
        if (in_blocks != (in_ch + block_size - 1) / block_size || out_blocks != (out_ch + block_size - 1) / block_size) {
            r.fail("layer " + std::to_string(li) + ": block counts disagree with channel counts");
        }
        const bool has_bn = r.u8() != 0;
        r.raw(3);

        const std::size_t blocks = std::size_t{kernel} * kernel * in_blocks * out_blocks;
        const std::size_t components = blocks * block_size;
        const auto code_bytes = r.u32();
        if (code_bytes != (components * static_cast<std::size_t>(code_bits) + 7) / 8) {
            r.fail("layer " + std::to_string(li) + ": code section has the wrong length");
        }
        BitReader bits(r.raw(code_bytes));

        BlockCirculantWeight layer;
        layer.kernel = kernel;
        layer.in_channels = in_ch;
        layer.out_channels = out_ch;
        layer.block_size = block_size;
        layer.in_blocks = in_blocks;
        layer.out_blocks = out_blocks;
        layer.scheme = scheme;
        layer.spectra.reserve(blocks);
        layer.index_vectors.reserve(components);
        std::vector<double> comp(block_size);
        for (std::size_t b = 0; b < blocks; ++b) {
            for (auto& c : comp) {
                std::uint32_t code = 0;
                bits.get(code, code_bits);
                try {
                    c = quant::decode_bits(code, scheme);
                } catch (const EncodingError& e) {
                    r.fail("layer " + std::to_string(li) + ": " + e.what());
                }
            }
            auto h = half_spectrum_from_components(block_size, comp);
            const auto iv = spectral::irfft(h);
            layer.index_vectors.insert(layer.index_vectors.end(), iv.begin(), iv.end());
            layer.spectra.push_back(std::move(h));
        }
        layer.bias = r.f32s(out_ch);
        if (has_bn) {
            circulant::BatchNormParams bn;
            bn.epsilon = r.f32();
            bn.mean = r.f32s(out_ch);
            bn.variance = r.f32s(out_ch);
            bn.scale = r.f32s(out_ch);
            bn.shift = r.f32s(out_ch);
            layer.bn = std::move(bn);
        }
        layers.push_back(std::move(layer));
    }
    if (!r.at_end()) {
        r.fail("trailing bytes after the last layer");
    }
    return layers;
}

std::vector<std::uint8_t> encode_dense_file(std::span<const DenseLayer> layers)
{
    Writer w;
    w.bytes(kDenseMagic, 4);
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(layers.size()));
    for (const auto& l : layers) {
        w.u32(static_cast<std::uint32_t>(l.weights.kernel()));
        w.u32(static_cast<std::uint32_t>(l.weights.in_channels()));
        w.u32(static_cast<std::uint32_t>(l.weights.out_channels()));
        w.f32s(l.weights.data());
        if (l.bias.size() != l.weights.out_channels()) {
            throw SizeError("dense layer bias length does not match output channels");
        }
        w.f32s(l.bias);
    }
    return w.take();
}

std::vector<DenseLayer> decode_dense_file(std::span<const std::uint8_t> bytes, const std::string& source)
{
    Reader r(bytes, source);
    r.magic(kDenseMagic, "dense weight");
    const auto version = r.u32();
    if (version != kFormatVersion) {
        r.fail("unsupported format version " + std::to_string(version));
    }
    const auto count = r.u32();
    if (count > kMaxDim) {
        r.fail("layer count out of range");
    }
    std::vector<DenseLayer> layers;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto kernel = r.dim("kernel");
        const auto in_ch = r.dim("in_channels");
        const auto out_ch = r.dim("out_channels");
        const std::size_t n = std::size_t{kernel} * kernel * in_ch * out_ch;
        auto data = r.f32s(n);
        DenseLayer l{WeightTensor4D(kernel, in_ch, out_ch, std::move(data)), r.f32s(out_ch)};
        layers.push_back(std::move(l));
    }
    if (!r.at_end()) {
        r.fail("trailing bytes after the last layer");
    }
    return layers;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError(path.string(), "open", "cannot read file");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw SchemaError(path.string(), "open", "cannot write file");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw SchemaError(path.string(), "write", "short write");
    }
}

void save_weights(const std::filesystem::path& path, std::span<const BlockCirculantWeight> layers)
{
    write_file(path, encode_weight_file(layers));
}

std::vector<BlockCirculantWeight> load_weights(const std::filesystem::path& path)
{
    return decode_weight_file(read_file(path), path.string());
}

void save_dense(const std::filesystem::path& path, std::span<const DenseLayer> layers)
{
    write_file(path, encode_dense_file(layers));
}

std::vector<DenseLayer> load_dense(const std::filesystem::path& path)
{
    return decode_dense_file(read_file(path), path.string());
}

void save_tensor(const std::filesystem::path& path, const FeatureMap& fm)
{
    Writer w;
    w.bytes(kTensorMagic, 4);
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(fm.height()));
    w.u32(static_cast<std::uint32_t>(fm.width()));
    w.u32(static_cast<std::uint32_t>(fm.channels()));
    w.f32s(fm.data());
    write_file(path, w.take());
}

FeatureMap load_tensor(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    Reader r(bytes, path.string());
    r.magic(kTensorMagic, "tensor");
    const auto version = r.u32();
    if (version != kFormatVersion) {
        r.fail("unsupported format version " + std::to_string(version));
    }
    const auto h = r.dim("height");
    const auto w = r.dim("width");
    const auto c = r.dim("channels");
    auto data = r.f32s(std::size_t{h} * w * c);
    if (!r.at_end()) {
        r.fail("trailing bytes after tensor data");
    }
    return FeatureMap(h, w, c, std::move(data));
}

} // namespace circq::io
