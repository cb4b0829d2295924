//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/io/network_config.hpp"

#include "circq/error.hpp"
#include "circq/io/fixture.hpp"

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace circq::io {

namespace {

using nlohmann::json;

// A JSON object plus its location, for error messages like "layers[3].kernel".
class Node {
public:
    Node(const json& value, std::string where, const std::string& source)
        : value_(value), where_(std::move(where)), source_(source) {}

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(source_, where_, what); }

    const json& value() const { return value_; }

    bool has(const char* key) const { return value_.contains(key); }

    Node child(const char* key) const
    {
        return Node(value_.at(key), where_.empty() ? key : where_ + "." + key, source_);
    }
    Node element(std::size_t i) const
    {
        return Node(value_.at(i), where_ + "[" + std::to_string(i) + "]", source_);
    }

    void expect_object(std::initializer_list<const char*> allowed) const
    {
        if (!value_.is_object()) {
            fail("expected an object");
        }
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [k, v] : value_.items()) {
            if (!keys.contains(k)) {
                Node(v, where_.empty() ? k : where_ + "." + k, source_).fail("unknown key");
            }
        }
    }

    std::size_t array_size() const
    {
        if (!value_.is_array()) {
            fail("expected an array");
        }
        return value_.size();
    }

    double number() const
    {
        if (!value_.is_number()) {
            fail("expected a number");
        }
        return value_.get<double>();
    }
    std::uint64_t count() const
    {
        if (!value_.is_number_integer() || value_.get<std::int64_t>() < 0) {
            fail("expected a non-negative integer");
        }
        return value_.get<std::uint64_t>();
    }
    bool boolean() const
    {
        if (!value_.is_boolean()) {
            fail("expected true or false");
        }
        return value_.get<bool>();
    }
    std::string string() const
    {
        if (!value_.is_string()) {
            fail("expected a string");
        }
        return value_.get<std::string>();
    }

    double number(const char* key, double fallback) const { return has(key) ? child(key).number() : fallback; }
    std::uint64_t count(const char* key, std::uint64_t fallback) const
    {
        return has(key) ? child(key).count() : fallback;
    }
    bool boolean(const char* key, bool fallback) const { return has(key) ? child(key).boolean() : fallback; }

private:
    const json& value_;
    std::string where_;
    const std::string& source_;
};

json parse_json(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(source, "byte " + std::to_string(e.byte), "invalid JSON");
    }
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError(path.string(), "open", "cannot read file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

yolo::Pool parse_pool(const Node& n)
{
    const auto s = n.string();
    if (s == "none") {
        return yolo::Pool::None;
    }
    if (s == "2") {
        return yolo::Pool::Stride2;
    }
    if (s == "1") {
        return yolo::Pool::Stride1;
    }
    n.fail("pool must be \"none\", \"2\" or \"1\"");
}

std::string pool_name(yolo::Pool p)
{
    switch (p) {
    case yolo::Pool::None:
        return "none";
    case yolo::Pool::Stride2:
        return "2";
    case yolo::Pool::Stride1:
        return "1";
    }
    return "none";
}

yolo::Activation parse_activation(const Node& n)
{
    const auto s = n.string();
    if (s == "leaky") {
        return yolo::Activation::LeakyRelu;
    }
    if (s == "relu") {
        return yolo::Activation::Relu;
    }
    if (s == "linear") {
        return yolo::Activation::Linear;
    }
    n.fail("activation must be \"leaky\", \"relu\" or \"linear\"");
}

std::string activation_name(yolo::Activation a)
{
    switch (a) {
    case yolo::Activation::LeakyRelu:
        return "leaky";
    case yolo::Activation::Relu:
        return "relu";
    case yolo::Activation::Linear:
        return "linear";
    }
    return "linear";
}

hw::Mode parse_mode(const Node& n)
{
    const auto m = n.count();
    if (m == 1) {
        return hw::Mode::Dsp;
    }
    if (m == 2) {
        return hw::Mode::Shift;
    }
    n.fail("mode must be 1 or 2");
}

std::filesystem::path resolve(const std::filesystem::path& base, const Node& n, bool must_exist)
{
    std::filesystem::path p = n.string();
    if (p.is_relative()) {
        p = base / p;
    }
    if (must_exist && !std::filesystem::exists(p)) {
        n.fail("file does not exist: " + p.string());
    }
    return p;
}

} // namespace

yolo::NetworkSpec parse_network_spec(const std::string& text, const std::string& source)
{
    const json doc = parse_json(text, source);
    const Node root(doc, "", source);
    root.expect_object({"name", "input", "grid", "boxes", "classes", "leaky_slope", "block_size", "anchors", "layers"});

    yolo::NetworkSpec net;
    if (root.has("name")) {
        net.name = root.child("name").string();
    }
    if (root.has("input")) {
        const auto in = root.child("input");
        if (in.array_size() != 3) {
            in.fail("expected [height, width, channels]");
        }
        net.input_height = in.element(0).count();
        net.input_width = in.element(1).count();
        net.input_channels = in.element(2).count();
    }
    net.grid = root.count("grid", net.grid);
    net.boxes = root.count("boxes", net.boxes);
    net.classes = root.count("classes", net.classes);
    net.leaky_slope = root.number("leaky_slope", net.leaky_slope);
    const std::size_t default_block = root.count("block_size", 16);

    if (!root.has("anchors")) {
        root.fail("missing key \"anchors\"");
    }
    const auto anchors = root.child("anchors");
    for (std::size_t i = 0; i < anchors.array_size(); ++i) {
        const auto a = anchors.element(i);
        if (a.array_size() != 2) {
            a.fail("expected [w, h]");
        }
        net.anchors.push_back({a.element(0).number(), a.element(1).number()});
    }

    if (!root.has("layers")) {
        root.fail("missing key \"layers\"");
    }
    const auto layers = root.child("layers");
    std::size_t channels = net.input_channels;
    for (std::size_t i = 0; i < layers.array_size(); ++i) {
        const auto l = layers.element(i);
        l.expect_object({"kernel", "stride", "pad", "in_channels", "out_channels", "pool", "bn", "activation", "mode",
                         "bits", "block_size"});
        yolo::LayerSpec spec;
        spec.kernel = l.count("kernel", spec.kernel);
        spec.stride = l.count("stride", spec.stride);
        spec.pad = l.count("pad", spec.pad);
        spec.in_channels = l.count("in_channels", channels);
        if (spec.in_channels != channels) {
            l.child("in_channels").fail("does not chain: previous layer produces " + std::to_string(channels));
        }
        if (!l.has("out_channels")) {
            l.fail("missing key \"out_channels\"");
        }
        spec.out_channels = l.child("out_channels").count();
        if (l.has("pool")) {
            spec.pool = parse_pool(l.child("pool"));
        }
        spec.has_bn = l.boolean("bn", spec.has_bn);
        if (l.has("activation")) {
            spec.activation = parse_activation(l.child("activation"));
        }
        if (l.has("mode")) {
            spec.mode = parse_mode(l.child("mode"));
        }
        if (l.has("bits")) {
            const auto b = l.child("bits").count();
            if (b < 2 || b > 32) {
                l.child("bits").fail("bits must be in [2, 32]");
            }
            spec.bits = static_cast<int>(b);
        }
        spec.block_size = l.count("block_size", default_block);
        channels = spec.out_channels;
        net.layers.push_back(spec);
    }

    try {
        net.validate();
    } catch (const ConfigError& e) {
        throw SchemaError(source, "network", e.what());
    }
    return net;
}

yolo::NetworkSpec load_network_spec(const std::filesystem::path& path)
{
    return parse_network_spec(read_text(path), path.string());
}

std::string network_spec_to_json(const yolo::NetworkSpec& net)
{
    json doc;
    doc["name"] = net.name;
    doc["input"] = {net.input_height, net.input_width, net.input_channels};
    doc["grid"] = net.grid;
    doc["boxes"] = net.boxes;
    doc["classes"] = net.classes;
    doc["leaky_slope"] = net.leaky_slope;
    json anchors = json::array();
    for (const auto& a : net.anchors) {
        anchors.push_back({a.w, a.h});
    }
    doc["anchors"] = anchors;
    json layers = json::array();
    for (const auto& l : net.layers) {
        layers.push_back({
            {"kernel", l.kernel},
            {"stride", l.stride},
            {"pad", l.pad},
            {"in_channels", l.in_channels},
            {"out_channels", l.out_channels},
            {"pool", pool_name(l.pool)},
            {"bn", l.has_bn},
            {"activation", activation_name(l.activation)},
            {"mode", static_cast<int>(l.mode)},
            {"bits", l.bits},
            {"block_size", l.block_size},
        });
    }
    doc["layers"] = layers;
    return doc.dump(2) + "\n";
}

hw::FpgaBudget unlimited_budget()
{
    hw::FpgaBudget b;
    const double big = std::numeric_limits<double>::max();
    b.dsp_total = big;
    b.lut_total = big;
    b.bram_count = big;
    return b;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& source)
{
    const auto source_name = source.string();
    const json doc = parse_json(text, source_name);
    const Node root(doc, "", source_name);
    root.expect_object({"seed", "network", "weights", "dense", "image", "fixture", "size_unit_base", "budget", "cost",
                        "latency", "explore", "admm", "detect"});
    const auto base = source.has_parent_path() ? source.parent_path() : std::filesystem::path(".");

    RunConfig cfg;
    cfg.source = source;
    cfg.seed = root.count("seed", 0);
    if (root.has("network")) {
        cfg.network = resolve(base, root.child("network"), true);
    }
    if (root.has("weights")) {
        cfg.weights = resolve(base, root.child("weights"), false);
    }
    if (root.has("dense")) {
        cfg.dense = resolve(base, root.child("dense"), true);
    }
    if (root.has("image")) {
        cfg.image = resolve(base, root.child("image"), true);
    }
    cfg.fixture = root.has("fixture") ? resolve(base, root.child("fixture"), true) : default_fixture_path();
    cfg.size_unit_base = root.number("size_unit_base", cfg.size_unit_base);

    cfg.budget = unlimited_budget();
    if (root.has("budget")) {
        const auto b = root.child("budget");
        b.expect_object({"dsp", "lut", "bram", "bram_size_bits", "bram_bandwidth_bits", "onchip_bandwidth_bits",
                         "clock_hz"});
        cfg.budget.dsp_total = b.number("dsp", cfg.budget.dsp_total);
        cfg.budget.lut_total = b.number("lut", cfg.budget.lut_total);
        cfg.budget.bram_count = b.number("bram", cfg.budget.bram_count);
        cfg.budget.bram_size_bits = b.number("bram_size_bits", cfg.budget.bram_size_bits);
        cfg.budget.bram_bandwidth_bits = b.number("bram_bandwidth_bits", cfg.budget.bram_bandwidth_bits);
        cfg.budget.onchip_bandwidth_bits = b.number("onchip_bandwidth_bits", cfg.budget.onchip_bandwidth_bits);
        cfg.budget.clock_hz = b.number("clock_hz", cfg.budget.clock_hz);
    }
    if (root.has("cost")) {
        const auto c = root.child("cost");
        c.expect_object({"dsp_per_dsp_pe", "dsp_per_shift_pe", "lut_per_dsp_pe", "lut_per_shift_pe",
                         "dsp_share_divisor"});
        cfg.cost.dsp_per_dsp_pe = c.number("dsp_per_dsp_pe", cfg.cost.dsp_per_dsp_pe);
        cfg.cost.dsp_per_shift_pe = c.number("dsp_per_shift_pe", cfg.cost.dsp_per_shift_pe);
        cfg.cost.lut_per_dsp_pe = c.number("lut_per_dsp_pe", cfg.cost.lut_per_dsp_pe);
        cfg.cost.lut_per_shift_pe = c.number("lut_per_shift_pe", cfg.cost.lut_per_shift_pe);
        cfg.cost.dsp_share_divisor = c.number("dsp_share_divisor", cfg.cost.dsp_share_divisor);
    }
    cfg.latency.params.clock_hz = cfg.budget.clock_hz;
    if (root.has("latency")) {
        const auto l = root.child("latency");
        l.expect_object({"source", "calibrate", "ops_per_cycle_mode1", "ops_per_cycle_mode2", "bytes_per_cycle",
                         "element_bits"});
        if (l.has("source")) {
            const auto s = l.child("source");
            if (s.string() == "model") {
                cfg.latency.source = LatencySource::Model;
            } else if (s.string() == "table") {
                cfg.latency.source = LatencySource::Table;
            } else {
                s.fail("latency source must be \"model\" or \"table\"");
            }
        }
        cfg.latency.calibrate = l.boolean("calibrate", cfg.latency.calibrate);
        auto& p = cfg.latency.params;
        p.ops_per_cycle_mode1 = l.number("ops_per_cycle_mode1", p.ops_per_cycle_mode1);
        p.ops_per_cycle_mode2 = l.number("ops_per_cycle_mode2", p.ops_per_cycle_mode2);
        p.bytes_per_cycle = l.number("bytes_per_cycle", p.bytes_per_cycle);
        p.element_bits = l.number("element_bits", p.element_bits);
    }
    if (root.has("explore")) {
        const auto e = root.child("explore");
        e.expect_object({"block_size", "bits", "margins", "sensitivities"});
        cfg.explore.block_size = e.count("block_size", cfg.explore.block_size);
        if (e.has("bits")) {
            const auto b = e.child("bits");
            for (std::size_t i = 0; i < b.array_size(); ++i) {
                const auto v = b.element(i).count();
                if (v < 2 || v > 32) {
                    b.element(i).fail("bits must be in [2, 32]");
                }
                cfg.explore.bits.push_back(static_cast<int>(v));
            }
        }
        if (e.has("margins")) {
            const auto m = e.child("margins");
            for (std::size_t i = 0; i < m.array_size(); ++i) {
                cfg.explore.margins.push_back(m.element(i).number());
            }
        }
        if (e.has("sensitivities")) {
            const auto s = e.child("sensitivities");
            for (std::size_t i = 0; i < s.array_size(); ++i) {
                const double v = s.element(i).number();
                if (v < 0) {
                    s.element(i).fail("sensitivity must be non-negative");
                }
                cfg.explore.sensitivities.push_back(v);
            }
        }
    }
    if (root.has("admm")) {
        const auto a = root.child("admm");
        a.expect_object({"oracle", "rho", "max_iters", "tol", "inner_steps", "learning_rate"});
        if (a.has("oracle")) {
            cfg.admm.oracle = a.child("oracle").string();
        }
        if (a.has("rho")) {
            cfg.admm.rho = a.child("rho").number();
        }
        if (a.has("max_iters")) {
            cfg.admm.max_iters = a.child("max_iters").count();
        }
        if (a.has("tol")) {
            cfg.admm.tol = a.child("tol").number();
        }
        if (a.has("inner_steps")) {
            cfg.admm.inner_steps = a.child("inner_steps").count();
        }
        if (a.has("learning_rate")) {
            cfg.admm.learning_rate = a.child("learning_rate").number();
        }
    }
    if (root.has("detect")) {
        const auto d = root.child("detect");
        d.expect_object({"score_threshold", "iou_threshold"});
        cfg.detect.score_threshold = d.number("score_threshold", cfg.detect.score_threshold);
        cfg.detect.iou_threshold = d.number("iou_threshold", cfg.detect.iou_threshold);
        for (const char* key : {"score_threshold", "iou_threshold"}) {
            if (d.has(key)) {
                const double v = d.child(key).number();
                if (v < 0 || v > 1) {
                    d.child(key).fail("threshold must be in [0, 1]");
                }
            }
        }
    }
    try {
        cfg.cost.validate();
        cfg.latency.params.validate();
    } catch (const ParameterError& e) {
        throw SchemaError(source_name, "config", e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    return parse_run_config(read_text(path), path);
}

} // namespace circq::io
