//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/circulant.hpp"
#include "circq/error.hpp"
#include "circq/io/fixture.hpp"
#include "circq/io/network_config.hpp"
#include "circq/io/weight_file.hpp"
#include "circq/yolo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace circq::io {
namespace {

namespace fs = std::filesystem;

std::string schema_error_text(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const SchemaError& e) {
        return e.what();
    }
    return "<no SchemaError>";
}

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir()
        : path_(fs::temp_directory_path() /
                (std::string("circq_io_") + ::testing::UnitTest::GetInstance()->current_test_info()->name()))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

    fs::path write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path_ / name) << text;
        return path_ / name;
    }

private:
    fs::path path_;
};

yolo::NetworkSpec small_net()
{
    yolo::NetworkSpec net;
    net.name = "small";
    net.input_height = 8;
    net.input_width = 8;
    net.input_channels = 3;
    net.grid = 4;
    net.boxes = 1;
    net.classes = 3;
    net.anchors = {{1.5, 2.0}};
    yolo::LayerSpec a;
    a.in_channels = 3;
    a.out_channels = 16;
    a.block_size = 8;
    a.mode = hw::Mode::Dsp;
    a.bits = 6;
    a.pool = yolo::Pool::Stride2;
    yolo::LayerSpec head;
    head.kernel = 1;
    head.pad = 0;
    head.in_channels = 16;
    head.out_channels = 8;
    head.block_size = 4;
    head.has_bn = false;
    head.activation = yolo::Activation::Linear;
    net.layers = {a, head};
    return net;
}

circulant::BlockCirculantWeight tiny_quantized_layer()
{
    const auto w = circulant::from_index_vectors(1, 2, 2, 2, {1.0, 0.0}, {0.5, -1.0});
    return circulant::quantize_weights(w, quant::QuantScheme::equal_distance(4, 1.0));
}

TEST(WeightFile, GoldenBytesOfSmallestLayer)
{
    const std::vector<circulant::BlockCirculantWeight> layers{tiny_quantized_layer()};
    const std::vector<std::uint8_t> want{
        'R',  'Q',  'Y',  'W',  1, 0, 0, 0, 1, 0, 0, 0, // magic, version, layer count
        2,    0,    0,    0,                            // block size
        0,    0,    0,    3,                            // kind, p, s, code bits
        4,    0,    0,    0,                            // m
        0x00, 0x00, 0x80, 0x3F,                         // alpha = 1.0f
        1,    0,    0,    0,    2, 0, 0, 0, 2, 0, 0, 0, // kernel, C, C'
        1,    0,    0,    0,    1, 0, 0, 0,             // block counts
        0,    0,    0,    0,                            // no batch norm
        1,    0,    0,    0,    0x24,                   // codes 001 001, zero padded
        0x00, 0x00, 0x00, 0x3F, 0x00, 0x00, 0x80, 0xBF, // bias 0.5, -1
    };
    EXPECT_EQ(encode_weight_file(layers), want);
    const auto back = decode_weight_file(want);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], layers[0]);
}

TEST(WeightFile, QuantizedNetworkRoundTripsBitExactly)
{
    const auto net = small_net();
    const auto q = yolo::quantize_network(net, yolo::random_weights(net, 3));
    const auto back = decode_weight_file(encode_weight_file(q));
    ASSERT_EQ(back.size(), q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_EQ(back[i].index_vectors, q[i].index_vectors) << i;
        EXPECT_EQ(back[i].spectra, q[i].spectra) << i;
        EXPECT_EQ(back[i].scheme, q[i].scheme) << i;
        EXPECT_EQ(back[i].bias, q[i].bias) << i;
        EXPECT_EQ(back[i].bn, q[i].bn) << i;
    }
}

TEST(WeightFile, LoadedWeightsGiveIdenticalDetections)
{
    TempDir dir;
    const auto net = small_net();
    const auto q = yolo::quantize_network(net, yolo::random_weights(net, 4));
    const auto image = yolo::random_image(net, 5);
    save_weights(dir.path() / "w.rqyw", q);
    save_tensor(dir.path() / "x.rqyt", image);
    const auto direct = yolo::forward(net, q, image);
    const auto via_files = yolo::forward(net, load_weights(dir.path() / "w.rqyw"), load_tensor(dir.path() / "x.rqyt"));
    EXPECT_EQ(direct, via_files);
}

TEST(WeightFile, UnquantizedLayerRefused)
{
    const auto w = circulant::from_index_vectors(1, 2, 2, 2, {1.0, 0.0});
    EXPECT_THROW(encode_weight_file(std::vector{w}), ConfigError);
}

TEST(WeightFile, CorruptMagicNamesByteOffset)
{
    auto bytes = encode_weight_file(std::vector{tiny_quantized_layer()});
    bytes[0] = 'X';
    const auto text = schema_error_text([&] { decode_weight_file(bytes, "w.bin"); });
    EXPECT_NE(text.find("w.bin"), std::string::npos) << text;
    EXPECT_NE(text.find("byte 0"), std::string::npos) << text;
}

TEST(WeightFile, UnknownVersionRejected)
{
    auto bytes = encode_weight_file(std::vector{tiny_quantized_layer()});
    bytes[4] = 2;
    EXPECT_THROW(decode_weight_file(bytes), SchemaError);
}

TEST(WeightFile, TruncationRejected)
{
    const auto bytes = encode_weight_file(std::vector{tiny_quantized_layer()});
    for (std::size_t n = 0; n < bytes.size(); ++n) {
        const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
        EXPECT_THROW(decode_weight_file(cut), SchemaError) << n;
    }
}

TEST(WeightFile, TrailingBytesRejected)
{
    auto bytes = encode_weight_file(std::vector{tiny_quantized_layer()});
    bytes.push_back(0);
    EXPECT_THROW(decode_weight_file(bytes), SchemaError);
}

TEST(WeightFile, InconsistentCodeWidthRejected)
{
    auto bytes = encode_weight_file(std::vector{tiny_quantized_layer()});
    bytes[19] = 4; // code_bits field
    EXPECT_THROW(decode_weight_file(bytes), SchemaError);
}

TEST(DenseFile, RoundTrip)
{
    WeightTensor4D t(3, 2, 4);
    for (std::size_t i = 0; i < t.data().size(); ++i) {
        t.data()[i] = 0.25 * static_cast<double>(i) - 4.0;
    }
    const std::vector<DenseLayer> layers{{t, {0.5, -0.5, 1, 2}}};
    const auto back = decode_dense_file(encode_dense_file(layers));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].weights, t);
    EXPECT_EQ(back[0].bias, layers[0].bias);
}

TEST(DenseFile, WrongMagicRejected)
{
    const std::vector<std::uint8_t> bytes{'X', 'X', 'X', 'X', 1, 0, 0, 0};
    EXPECT_THROW(decode_dense_file(bytes), SchemaError);
}

TEST(TensorFile, RoundTrip)
{
    TempDir dir;
    const FeatureMap fm(2, 3, 2, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11.5});
    save_tensor(dir.path() / "t.rqyt", fm);
    EXPECT_EQ(load_tensor(dir.path() / "t.rqyt"), fm);
}

TEST(ReadFile, MissingFileIsError)
{
    EXPECT_THROW(read_file("/nonexistent/circq/file"), Error);
}

TEST(Fixture, ShippedTableTotals)
{
    const auto t = load_layer_table(default_fixture_path());
    ASSERT_EQ(t.rows.size(), 9u);
    EXPECT_NEAR(t.total_eq_latency_us(), 4800.9, 1e-9);
    EXPECT_NEAR(t.total_het_latency_us(), 3181.8, 1e-9);
    EXPECT_EQ(t.rows[0].profile.name, "Conv0");
    EXPECT_EQ(t.rows[3].bound, hw::BoundType::Communication);
    EXPECT_EQ(t.rows[4].bound, hw::BoundType::Computation);
    EXPECT_DOUBLE_EQ(t.rows[5].eq_model_bits, 1.69 * 1024 * 1024);
}

TEST(Fixture, SizeUnits)
{
    EXPECT_DOUBLE_EQ(parse_size_bits("1.69Mb"), 1.69 * 1024 * 1024);
    EXPECT_DOUBLE_EQ(parse_size_bits("0.16kb"), 0.16 * 1024);
    EXPECT_DOUBLE_EQ(parse_size_bits("12b"), 12);
    EXPECT_DOUBLE_EQ(parse_size_bits("1.69Mb", 1000), 1.69e6);
    EXPECT_THROW(parse_size_bits("1.69Gb"), ParameterError);
    EXPECT_THROW(parse_size_bits("Mb"), ParameterError);
}

TEST(Fixture, MalformedRowNamesLine)
{
    std::istringstream in("# comment\nname\tcomp\tin\tout\tbound\ta\tb\tc\td\nConv0\t1\t2\n");
    const auto text = schema_error_text([&] { parse_layer_table(in, "t.tsv"); });
    EXPECT_NE(text.find("t.tsv:line 3"), std::string::npos) << text;
}

TEST(Fixture, UnknownBoundRejected)
{
    std::istringstream in("name\tcomp\tin\tout\tbound\ta\tb\tc\td\nConv0\t1\t2\t3\tfast\t1\t1kb\t1\t1kb\n");
    EXPECT_THROW(parse_layer_table(in), SchemaError);
}

TEST(NetworkSpecJson, DefaultSpecRoundTrips)
{
    for (const auto& net : {yolo::voc_spec(), yolo::dji_spec(), small_net()}) {
        EXPECT_EQ(parse_network_spec(network_spec_to_json(net)), net);
    }
}

TEST(NetworkSpecJson, ErrorsCarryLocation)
{
    const std::string head = R"({"input": [8, 8, 3], "grid": 4, "boxes": 1, "classes": 3, "anchors": [[1, 1]], )";
    const auto bad_kernel = schema_error_text([&] {
        parse_network_spec(head + R"("layers": [{"kernel": "three", "out_channels": 8}]})", "net.json");
    });
    EXPECT_NE(bad_kernel.find("net.json"), std::string::npos) << bad_kernel;
    EXPECT_NE(bad_kernel.find("layers[0].kernel"), std::string::npos) << bad_kernel;

    const auto unknown = schema_error_text(
        [&] { parse_network_spec(head + R"("layers": [{"out_channels": 8, "colour": 1}]})"); });
    EXPECT_NE(unknown.find("colour"), std::string::npos) << unknown;

    EXPECT_THROW(parse_network_spec(R"({"anchors": []})"), SchemaError);
    EXPECT_THROW(parse_network_spec("{not json"), SchemaError);
}

TEST(NetworkSpecJson, ChainMismatchIsSchemaError)
{
    EXPECT_THROW(parse_network_spec(R"({"input": [8, 8, 3], "grid": 8, "boxes": 1, "classes": 3,
        "anchors": [[1, 1]], "layers": [{"out_channels": 8}, {"in_channels": 9, "out_channels": 8}]})"),
                 SchemaError);
}

TEST(RunConfig, PathsResolveAgainstConfigDirectory)
{
    TempDir dir;
    dir.write("net.json", network_spec_to_json(small_net()));
    const auto cfg_path = dir.write("run.json", R"({"seed": 9, "network": "net.json", "weights": "out/w.rqyw",
        "budget": {"dsp": 100, "lut": 2000, "bram": 10, "clock_hz": 1e8},
        "latency": {"source": "table"}, "explore": {"bits": [8, 6], "margins": [0.01]},
        "admm": {"oracle": "quadratic", "rho": 0.5}, "detect": {"score_threshold": 0.3}})");
    const auto cfg = load_run_config(cfg_path);
    EXPECT_EQ(cfg.seed, 9u);
    ASSERT_TRUE(cfg.network.has_value());
    EXPECT_EQ(*cfg.network, dir.path() / "net.json");
    EXPECT_EQ(*cfg.weights, dir.path() / "out/w.rqyw");
    EXPECT_EQ(cfg.fixture, default_fixture_path());
    EXPECT_EQ(cfg.budget.dsp_total, 100);
    EXPECT_EQ(cfg.latency.params.clock_hz, 1e8);
    EXPECT_EQ(cfg.latency.source, LatencySource::Table);
    EXPECT_EQ(cfg.explore.bits, (std::vector<int>{8, 6}));
    EXPECT_EQ(cfg.admm.oracle, "quadratic");
    EXPECT_EQ(cfg.admm.rho, 0.5);
    EXPECT_EQ(cfg.detect.score_threshold, 0.3);
}

TEST(RunConfig, MissingInputFileIsSchemaError)
{
    TempDir dir;
    const auto cfg_path = dir.write("run.json", R"({"dense": "nowhere.rqyd"})");
    const auto text = schema_error_text([&] { load_run_config(cfg_path); });
    EXPECT_NE(text.find("nowhere.rqyd"), std::string::npos) << text;
}

TEST(RunConfig, DefaultsAreUnlimited)
{
    const auto cfg = parse_run_config("{}", "run.json");
    EXPECT_EQ(cfg.budget.dsp_total, unlimited_budget().dsp_total);
    EXPECT_FALSE(cfg.network.has_value());
    EXPECT_EQ(cfg.detect.iou_threshold, 0.5);
}

TEST(RunConfig, UnknownKeyRejected)
{
    EXPECT_THROW(parse_run_config(R"({"budget": {"dsps": 1}})", "run.json"), SchemaError);
    EXPECT_THROW(parse_run_config(R"({"latency": {"source": "guess"}})", "run.json"), SchemaError);
}

} // namespace
} // namespace circq::io
