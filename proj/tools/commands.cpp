//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "commands.hpp"

#include "report.hpp"

#include "circq/admm.hpp"
#include "circq/circulant.hpp"
#include "circq/error.hpp"
#include "circq/hwmodel.hpp"
#include "circq/io/fixture.hpp"
#include "circq/io/network_config.hpp"
#include "circq/io/weight_file.hpp"
#include "circq/quant.hpp"
#include "circq/version.hpp"
#include "circq/yolo.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace circq::cli {

namespace {

using circulant::BlockCirculantWeight;
using nlohmann::ordered_json;

io::RunConfig load_config(const Options& opt)
{
    if (opt.config) {
        return io::load_run_config(*opt.config);
    }
    return io::parse_run_config("{}", "<defaults>");
}

std::uint64_t effective_seed(const Options& opt, const io::RunConfig& cfg)
{
    return opt.seed.value_or(cfg.seed);
}

std::filesystem::path first_input(const Options& opt, const std::optional<std::filesystem::path>& fallback,
                                  const char* what)
{
    if (!opt.inputs.empty()) {
        return opt.inputs.front();
    }
    if (fallback) {
        return *fallback;
    }
    throw UsageError(std::string("no ") + what + " given");
}

quant::SchemeKind parse_scheme(const std::string& name)
{
    if (name == "ed" || name == "equal-distance") {
        return quant::SchemeKind::EqualDistance;
    }
    if (name == "mixed" || name == "mixed-pow2") {
        return quant::SchemeKind::MixedPow2;
    }
    throw UsageError("unknown scheme '" + name + "' (use ed or mixed)");
}

/// Alpha from the layer's own spectra, rounded to float32 so the weight file
/// stores it exactly.
quant::QuantScheme calibrated_scheme(const BlockCirculantWeight& w, quant::SchemeKind kind, int bits)
{
    const auto shape = quant::QuantScheme::from_bits(kind, bits);
    std::vector<double> components;
    for (const auto& h : w.spectra) {
        for (const auto& z : h.values()) {
            components.push_back(z.real());
            components.push_back(z.imag());
        }
    }
    return shape.with_alpha(static_cast<float>(quant::calibrate_alpha(components, shape)));
}

std::string scheme_label(const quant::QuantScheme& s)
{
    if (s.kind == quant::SchemeKind::EqualDistance) {
        return "equal-distance M=" + std::to_string(s.m);
    }
    return "mixed-pow2 p=" + std::to_string(s.p_bits) + " s=" + std::to_string(s.s_bits);
}

ordered_json scheme_json(const quant::QuantScheme& s)
{
    ordered_json j;
    j["kind"] = quant::to_string(s.kind);
    if (s.kind == quant::SchemeKind::EqualDistance) {
        j["m"] = s.m;
    } else {
        j["p_bits"] = s.p_bits;
        j["s_bits"] = s.s_bits;
    }
    j["code_bits"] = s.code_bits();
    j["alpha"] = s.alpha;
    return j;
}

double dense_parameter_count(const BlockCirculantWeight& w)
{
    return static_cast<double>(w.kernel * w.kernel * w.in_channels * w.out_channels);
}

// Shared (profiles, latency parameters) setup of explore and simulate.
struct HardwareContext {
    io::LayerTable table;
    hw::LatencyParams params;
    std::optional<hw::BoundCalibration> calibration;
};

HardwareContext hardware_context(const io::RunConfig& cfg)
{
    HardwareContext ctx{io::load_layer_table(cfg.fixture, cfg.size_unit_base), cfg.latency.params, std::nullopt};
    if (cfg.latency.source == io::LatencySource::Model && cfg.latency.calibrate) {
        const auto profiles = ctx.table.profiles();
        const auto bounds = ctx.table.bounds();
        ctx.calibration = hw::calibrate_bound_params(profiles, bounds, ctx.params);
        ctx.params = ctx.calibration->params;
    }
    return ctx;
}

hw::BoundType bound_of(const HardwareContext& ctx, const io::RunConfig& cfg, std::size_t layer, hw::Mode mode)
{
    if (cfg.latency.source == io::LatencySource::Table) {
        return ctx.table.rows[layer].bound;
    }
    return hw::layer_latency(ctx.table.rows[layer].profile, mode, ctx.params).bound;
}

void print_calibration(std::ostream& out, const HardwareContext& ctx, const io::RunConfig& cfg)
{
    if (cfg.latency.source == io::LatencySource::Table) {
        out << "latency source: layer table columns\n";
        return;
    }
    out << "latency source: roofline, ops/cycle " << general(ctx.params.ops_per_cycle_mode1) << " (mode 1) "
        << general(ctx.params.ops_per_cycle_mode2) << " (mode 2), bytes/cycle " << general(ctx.params.bytes_per_cycle)
        << '\n';
    if (ctx.calibration) {
        out << "bound calibration: " << ctx.calibration->matches << "/" << ctx.calibration->total
            << " layers match the table\n";
    }
}

BlockCirculantWeight weights_from_matrix(const Matrix& z, std::size_t block_size, const quant::QuantScheme& scheme)
{
    const std::size_t out_blocks = z.rows() / block_size;
    const std::size_t in_blocks = z.cols() / block_size;
    std::vector<double> ivs;
    ivs.reserve(out_blocks * in_blocks * block_size);
    for (std::size_t ob = 0; ob < out_blocks; ++ob) {
        for (std::size_t ib = 0; ib < in_blocks; ++ib) {
            for (std::size_t k = 0; k < block_size; ++k) {
                ivs.push_back(z(ob * block_size + k, ib * block_size));
            }
        }
    }
    auto w = circulant::from_index_vectors(1, z.cols(), z.rows(), block_size, std::move(ivs));
    return circulant::quantize_weights(w, scheme);
}

} // namespace

int cmd_compress(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const auto input = first_input(opt, cfg.dense, "dense weight file");
    const std::size_t lb = opt.lb.value_or(cfg.explore.block_size);
    const auto kind = parse_scheme(opt.scheme.value_or("ed"));
    const int bits = opt.bits.value_or(kind == quant::SchemeKind::EqualDistance ? 16 : 8);

    const auto dense = io::load_dense(input);
    std::vector<BlockCirculantWeight> layers;
    TextTable table({"layer", "kernel", "in", "out", "block", "scheme", "dense_params", "stored_params", "ratio"});
    double dense_total = 0;
    double stored_total = 0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        auto w = circulant::compress_weights(dense[i].weights, lb);
        w.bias = dense[i].bias;
        const auto scheme = calibrated_scheme(w, kind, bits);
        layers.push_back(circulant::quantize_weights(w, scheme));
        const double d = dense_parameter_count(w);
        const double s = static_cast<double>(w.parameter_count());
        dense_total += d;
        stored_total += s;
        table.add_row({std::to_string(i), std::to_string(w.kernel), std::to_string(w.in_channels),
                       std::to_string(w.out_channels), std::to_string(lb), scheme_label(scheme), general(d),
                       general(s), fixed(d / s, 3)});
    }
    print_banner(out, "compress", effective_seed(opt, cfg));
    table.print(out);
    out << "compression ratio: " << fixed(dense_total / stored_total, 3) << '\n';
    if (opt.out) {
        io::save_weights(*opt.out, layers);
        out << "wrote " << opt.out->string() << '\n';
    }
    return kOk;
}

int cmd_quantize(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const auto input = first_input(opt, cfg.weights, "weight file");
    const auto kind = parse_scheme(opt.scheme.value_or("ed"));
    const int bits = opt.bits.value_or(kind == quant::SchemeKind::EqualDistance ? 16 : 8);

    auto layers = io::load_weights(input);
    TextTable table({"layer", "scheme", "alpha", "max_spectral_change"});
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& src = layers[i];
        auto raw = circulant::from_index_vectors(src.kernel, src.in_channels, src.out_channels, src.block_size,
                                                 src.index_vectors, src.bias);
        raw.bn = src.bn;
        const auto scheme = calibrated_scheme(raw, kind, bits);
        auto q = circulant::quantize_weights(raw, scheme);
        double change = 0;
        for (std::size_t b = 0; b < q.spectra.size(); ++b) {
            for (std::size_t k = 0; k < q.spectra[b].values().size(); ++k) {
                change = std::max(change, std::abs(q.spectra[b].values()[k] - raw.spectra[b].values()[k]));
            }
        }
        table.add_row({std::to_string(i), scheme_label(scheme), general(scheme.alpha), general(change)});
        layers[i] = std::move(q);
    }
    print_banner(out, "quantize", effective_seed(opt, cfg));
    table.print(out);
    if (opt.out) {
        io::save_weights(*opt.out, layers);
        out << "wrote " << opt.out->string() << '\n';
    }
    return kOk;
}

int cmd_admm(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const std::string oracle = opt.oracle.value_or(cfg.admm.oracle);
    if (oracle.empty()) {
        throw UsageError("admm: no loss oracle named (use --oracle quadratic or --oracle small-cnn)");
    }
    admm::Benchmark bench;
    std::uint64_t seed = 0;
    if (oracle == "quadratic") {
        seed = opt.seed.value_or(opt.config ? cfg.seed : 7);
        bench = admm::quadratic_benchmark(seed);
    } else if (oracle == "small-cnn") {
        seed = opt.seed.value_or(opt.config ? cfg.seed : 11);
        bench = admm::small_cnn_benchmark(seed);
    } else {
        throw UsageError("admm: unknown loss oracle '" + oracle + "' (use quadratic or small-cnn)");
    }
    auto& o = bench.options;
    if (cfg.admm.rho) {
        o.rho_per_layer.assign(bench.initial.size(), *cfg.admm.rho);
    }
    o.max_iters = opt.max_iters.value_or(cfg.admm.max_iters.value_or(o.max_iters));
    o.tol = cfg.admm.tol.value_or(o.tol);
    o.inner_steps = cfg.admm.inner_steps.value_or(o.inner_steps);
    o.learning_rate = cfg.admm.learning_rate.value_or(o.learning_rate);

    print_banner(out, "admm", seed);
    out << "oracle: " << oracle << ", layers: " << bench.initial.size() << ", max iterations: " << o.max_iters
        << ", tolerance: " << general(o.tol) << '\n';

    std::ofstream trace_file;
    if (opt.out) {
        const auto trace_path = opt.out->string() + ".trace.tsv";
        trace_file.open(trace_path);
        if (!trace_file) {
            throw SchemaError(trace_path, "open", "cannot write file");
        }
        trace_file << "iteration\tresidual\tloss\n";
    }
    out << "iteration\tresidual\tloss\n";
    o.on_iteration = [&](const admm::TraceRow& row) {
        const auto line = std::to_string(row.iteration) + '\t' + general(row.residual) + '\t' + general(row.loss) + '\n';
        out << line;
        if (trace_file.is_open()) {
            trace_file << line << std::flush;
        }
    };

    admm::AdmmResult result;
    try {
        result = admm::run_admm(bench.oracle, bench.initial, bench.constraints, o);
    } catch (const DivergenceError&) {
        out << "status: diverged\n";
        throw;
    }

    const double final_residual = result.trace.empty() ? 0.0 : result.trace.back().residual;
    out << "status: "
        << (result.trace.empty() ? "initial projection"
                                 : (result.status == admm::AdmmStatus::Converged ? "converged" : "max iterations"))
        << ", iterations: " << result.trace.size() << ", final residual: " << general(final_residual) << '\n';

    bool structured = true;
    double off_level = 0;
    std::vector<BlockCirculantWeight> layers;
    for (std::size_t l = 0; l < result.weights.size(); ++l) {
        const auto& c = bench.constraints[l];
        structured = structured && admm::is_block_circulant(result.weights[l], c.block_size);
        off_level = std::max(off_level, admm::max_off_level_distance(result.weights[l], c.block_size, result.schemes[l]));
        layers.push_back(weights_from_matrix(result.weights[l], c.block_size, result.schemes[l]));
    }
    out << "block-circulant: " << (structured ? "yes" : "no") << ", max off-level distance: " << general(off_level)
        << '\n';
    if (opt.out) {
        io::save_weights(*opt.out, layers);
        out << "wrote " << opt.out->string() << " and " << opt.out->string() << ".trace.tsv\n";
    }
    return kOk;
}

int cmd_explore(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const auto seed = effective_seed(opt, cfg);
    const auto ctx = hardware_context(cfg);
    const auto profiles = ctx.table.profiles();
    const std::size_t n = profiles.size();
    const std::size_t lb = opt.lb.value_or(cfg.explore.block_size);

    const auto net = cfg.network ? io::load_network_spec(*cfg.network) : yolo::tiny_yolo_spec(20, lb);
    const auto shapes = net.conv_shapes();
    if (shapes.size() != n) {
        throw ConfigError("explore: network has " + std::to_string(shapes.size()) + " layers, layer table has " +
                          std::to_string(n));
    }
    std::vector<double> sens = cfg.explore.sensitivities;
    if (sens.empty()) {
        sens.assign(n, 0.0);
    }
    if (sens.size() != n) {
        throw ConfigError("explore: " + std::to_string(sens.size()) + " sensitivities for " + std::to_string(n) +
                          " layers");
    }

    hw::ExploreInputs in;
    in.profiles = profiles;
    in.sensitivity = hw::constant_sensitivity(sens);
    if (cfg.latency.source == io::LatencySource::Table) {
        in.latency = [rows = ctx.table.rows](std::size_t layer, hw::Mode mode) {
            const auto& r = rows.at(layer);
            return 1e-6 * (mode == hw::Mode::Dsp ? r.eq_latency_us : r.het_latency_us);
        };
    } else {
        in.latency = hw::model_latency(profiles, ctx.params);
    }
    in.model_size = [shapes, lb](std::size_t layer, int bits) { return hw::layer_model_size_bits(shapes.at(layer), lb, bits); };
    in.budget = cfg.budget;
    in.cost = cfg.cost;
    if (opt.bits) {
        in.bit_grid = {*opt.bits};
    } else if (!cfg.explore.bits.empty()) {
        in.bit_grid = cfg.explore.bits;
    }
    if (opt.margin) {
        in.margins = {*opt.margin};
    } else if (!cfg.explore.margins.empty()) {
        in.margins = cfg.explore.margins;
    }

    const auto result = hw::explore(in);

    print_banner(out, "explore", seed);
    print_calibration(out, ctx, cfg);
    TextTable table({"layer", "mode", "bits", "latency_us", "bound", "sensitivity"});
    ordered_json layers_json = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = result.assignment[i];
        const auto bound = bound_of(ctx, cfg, i, a.mode);
        const double us = 1e6 * result.layer_latency[i];
        table.add_row({profiles[i].name, std::to_string(static_cast<int>(a.mode)), std::to_string(a.bits), fixed(us, 1),
                       hw::to_string(bound), general(sens[i])});
        layers_json.push_back({{"name", profiles[i].name},
                               {"mode", static_cast<int>(a.mode)},
                               {"bits", a.bits},
                               {"latency_us", us},
                               {"bound", hw::to_string(bound)}});
    }
    table.print(out);
    out << "bits: " << result.bits << ", margin: " << general(result.margin) << '\n';
    out << "total latency_us: " << fixed(1e6 * result.total_latency, 1) << '\n';
    out << "dsp: " << general(result.resources.dsp) << ", lut: " << general(result.resources.lut)
        << ", bram: " << result.resources.bram << ", model bits: " << general(result.resources.model_size_bits) << '\n';
    out << "status: " << (result.feasible ? "feasible" : "infeasible, binding constraint " + result.binding_constraint)
        << '\n';

    if (opt.out) {
        auto doc = report_envelope("explore", seed);
        doc["feasible"] = result.feasible;
        if (!result.feasible) {
            doc["binding_constraint"] = result.binding_constraint;
        }
        doc["bits"] = result.bits;
        doc["margin"] = result.margin;
        doc["layers"] = layers_json;
        doc["total_latency_us"] = 1e6 * result.total_latency;
        doc["resources"] = {{"dsp", result.resources.dsp},
                            {"lut", result.resources.lut},
                            {"bram", result.resources.bram},
                            {"model_size_bits", result.resources.model_size_bits}};
        write_json(*opt.out, doc);
    }
    return result.feasible ? kOk : kNumerical;
}

int cmd_simulate(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const auto seed = effective_seed(opt, cfg);
    const auto ctx = hardware_context(cfg);

    print_banner(out, "simulate", seed);
    print_calibration(out, ctx, cfg);
    TextTable table({"layer", "comp", "in", "out", "mode1_us", "mode2_us", "bound", "table_bound"});
    ordered_json layers_json = ordered_json::array();
    double total1 = 0;
    double total2 = 0;
    for (std::size_t i = 0; i < ctx.table.rows.size(); ++i) {
        const auto& row = ctx.table.rows[i];
        double us1 = 0;
        double us2 = 0;
        hw::BoundType bound = row.bound;
        if (cfg.latency.source == io::LatencySource::Table) {
            us1 = row.eq_latency_us;
            us2 = row.het_latency_us;
        } else {
            const auto l1 = hw::layer_latency(row.profile, hw::Mode::Dsp, ctx.params);
            const auto l2 = hw::layer_latency(row.profile, hw::Mode::Shift, ctx.params);
            us1 = 1e6 * l1.seconds;
            us2 = 1e6 * l2.seconds;
            bound = l1.bound;
        }
        total1 += us1;
        total2 += us2;
        table.add_row({row.profile.name, general(row.profile.comp_size), general(row.profile.in_size),
                       general(row.profile.out_size), fixed(us1, 1), fixed(us2, 1), hw::to_string(bound),
                       hw::to_string(row.bound)});
        layers_json.push_back({{"name", row.profile.name},
                               {"mode1_latency_us", us1},
                               {"mode2_latency_us", us2},
                               {"bound", hw::to_string(bound)},
                               {"table_bound", hw::to_string(row.bound)}});
    }
    table.print(out);
    out << "total mode1_us: " << fixed(total1, 1) << ", total mode2_us: " << fixed(total2, 1)
        << ", ratio: " << fixed(total2 / total1, 5) << '\n';
    if (opt.out) {
        auto doc = report_envelope("simulate", seed);
        doc["layers"] = layers_json;
        doc["total_mode1_latency_us"] = total1;
        doc["total_mode2_latency_us"] = total2;
        if (ctx.calibration) {
            doc["bytes_per_cycle"] = ctx.params.bytes_per_cycle;
            doc["bound_matches"] = ctx.calibration->matches;
        }
        write_json(*opt.out, doc);
    }
    return kOk;
}

int cmd_detect(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const auto seed = effective_seed(opt, cfg);
    const auto net = cfg.network ? io::load_network_spec(*cfg.network) : yolo::voc_spec();
    const auto weights = cfg.weights ? io::load_weights(*cfg.weights)
                                     : yolo::quantize_network(net, yolo::random_weights(net, seed));
    const auto image = cfg.image ? io::load_tensor(*cfg.image) : yolo::random_image(net, seed);
    const double score_threshold = opt.score_threshold.value_or(cfg.detect.score_threshold);
    if (score_threshold < 0 || score_threshold > 1) {
        throw UsageError("detect: score threshold must be in [0, 1]");
    }

    const auto raw = yolo::forward(net, weights, image);
    const auto boxes = yolo::decode_grid(raw, net.anchors);
    const auto kept = yolo::nms(boxes, score_threshold, cfg.detect.iou_threshold);

    print_banner(out, "detect", seed);
    out << "network: " << net.name << ", output " << raw.height() << "x" << raw.width() << "x" << raw.channels()
        << ", candidates: " << boxes.size() << ", kept: " << kept.size() << '\n';
    TextTable table({"class", "score", "cx", "cy", "w", "h", "objectness"});
    ordered_json boxes_json = ordered_json::array();
    for (const auto& b : kept) {
        table.add_row({std::to_string(b.class_id), fixed(b.score, 6), fixed(b.cx, 6), fixed(b.cy, 6), fixed(b.w, 6),
                       fixed(b.h, 6), fixed(b.objectness, 6)});
        boxes_json.push_back({{"class", b.class_id},
                              {"score", b.score},
                              {"cx", b.cx},
                              {"cy", b.cy},
                              {"w", b.w},
                              {"h", b.h},
                              {"objectness", b.objectness}});
    }
    table.print(out);
    if (opt.out) {
        auto doc = report_envelope("detect", seed);
        doc["network"] = net.name;
        doc["score_threshold"] = score_threshold;
        doc["iou_threshold"] = cfg.detect.iou_threshold;
        doc["boxes"] = boxes_json;
        write_json(*opt.out, doc);
    }
    return kOk;
}

int cmd_report(const Options& opt, std::ostream& out)
{
    const auto cfg = load_config(opt);
    const auto seed = effective_seed(opt, cfg);
    const auto input = first_input(opt, cfg.weights ? cfg.weights : cfg.network, "file to report on");
    const auto bytes = io::read_file(input);
    auto doc = report_envelope("report", seed);
    doc["file"] = input.string();
    print_banner(out, "report", seed);

    const auto magic = bytes.size() >= 4 ? std::string(bytes.begin(), bytes.begin() + 4) : std::string();
    if (magic == "RQYW") {
        const auto layers = io::decode_weight_file(bytes, input.string());
        TextTable table({"layer", "kernel", "in", "out", "block", "scheme", "bits", "alpha", "stored_bits"});
        ordered_json lj = ordered_json::array();
        double total_bits = 0;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& w = layers[i];
            const auto& s = *w.scheme;
            const double stored = hw::layer_model_size_bits({w.kernel, w.in_channels, w.out_channels}, w.block_size,
                                                            s.code_bits());
            total_bits += stored;
            table.add_row({std::to_string(i), std::to_string(w.kernel), std::to_string(w.in_channels),
                           std::to_string(w.out_channels), std::to_string(w.block_size), scheme_label(s),
                           std::to_string(s.code_bits()), general(s.alpha), general(stored)});
            lj.push_back({{"kernel", w.kernel},
                          {"in_channels", w.in_channels},
                          {"out_channels", w.out_channels},
                          {"block_size", w.block_size},
                          {"scheme", scheme_json(s)},
                          {"stored_bits", stored},
                          {"batch_norm", w.bn.has_value()}});
        }
        out << "weight file, " << layers.size() << " layers, " << bytes.size() << " bytes\n";
        table.print(out);
        out << "model bits: " << general(total_bits) << '\n';
        doc["kind"] = "weights";
        doc["layers"] = lj;
        doc["model_size_bits"] = total_bits;
    } else if (magic == "RQYD") {
        const auto layers = io::decode_dense_file(bytes, input.string());
        TextTable table({"layer", "kernel", "in", "out", "params"});
        ordered_json lj = ordered_json::array();
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& w = layers[i].weights;
            table.add_row({std::to_string(i), std::to_string(w.kernel()), std::to_string(w.in_channels()),
                           std::to_string(w.out_channels()), std::to_string(w.data().size())});
            lj.push_back({{"kernel", w.kernel()}, {"in_channels", w.in_channels()}, {"out_channels", w.out_channels()}});
        }
        out << "dense weight file, " << layers.size() << " layers\n";
        table.print(out);
        doc["kind"] = "dense";
        doc["layers"] = lj;
    } else if (magic == "RQYT") {
        const auto fm = io::load_tensor(input);
        const auto [lo, hi] = std::minmax_element(fm.data().begin(), fm.data().end());
        out << "tensor " << fm.height() << "x" << fm.width() << "x" << fm.channels() << ", min " << general(*lo)
            << ", max " << general(*hi) << '\n';
        doc["kind"] = "tensor";
        doc["shape"] = {fm.height(), fm.width(), fm.channels()};
    } else {
        const auto net = io::parse_network_spec(std::string(bytes.begin(), bytes.end()), input.string());
        const auto chain = net.spatial_chain();
        TextTable table({"layer", "kernel", "stride", "in", "out", "pool", "activation", "mode", "bits", "output"});
        ordered_json lj = ordered_json::array();
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            const auto& l = net.layers[i];
            const auto shape = std::to_string(chain[i].first) + "x" + std::to_string(chain[i].second) + "x" +
                               std::to_string(l.out_channels);
            table.add_row({std::to_string(i), std::to_string(l.kernel), std::to_string(l.stride),
                           std::to_string(l.in_channels), std::to_string(l.out_channels), yolo::to_string(l.pool),
                           yolo::to_string(l.activation), std::to_string(static_cast<int>(l.mode)),
                           std::to_string(l.bits), shape});
            lj.push_back({{"output", shape}});
        }
        out << "network " << net.name << ", input " << net.input_height << "x" << net.input_width << "x"
            << net.input_channels << '\n';
        table.print(out);
        doc["kind"] = "network";
        doc["layers"] = lj;
    }
    if (opt.out) {
        write_json(*opt.out, doc);
    }
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"circq: block-circulant compression, frequency-domain quantization and FPGA cost modeling", "circq"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Options opt;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t lb = 0;
    int bits = 0;
    double margin = 0;
    std::string out_path;
    std::string scheme;
    std::string oracle;
    std::size_t max_iters = 0;
    double score_threshold = 0;

    struct Verb {
        const char* name;
        const char* help;
        int (*fn)(const Options&, std::ostream&);
    };
    const Verb verbs[] = {
        {"compress", "compress a dense weight file into block-circulant quantized spectra", cmd_compress},
        {"quantize", "re-quantize the spectra of a weight file", cmd_quantize},
        {"admm", "run ADMM frequency-domain quantization on a toy loss oracle", cmd_admm},
        {"explore", "resource-aware per-layer mode and bit-length exploration", cmd_explore},
        {"simulate", "per-layer latency and bound-type report", cmd_simulate},
        {"detect", "tiny YOLO forward pass and detection post-processing", cmd_detect},
        {"report", "summarize a weight, dense, tensor or network file", cmd_report},
    };
    std::vector<std::pair<CLI::App*, const Verb*>> subs;
    for (const auto& v : verbs) {
        auto* sub = app.add_subcommand(v.name, v.help);
        sub->add_option("--config", config, "JSON run configuration");
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--lb", lb, "block size L_b")->check(CLI::PositiveNumber);
        sub->add_option("--bits", bits, "bit length")->check(CLI::Range(2, 32));
        sub->add_option("--margin", margin, "accuracy degradation margin")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", out_path, "output file");
        sub->add_option("inputs", opt.inputs, "input files");
        if (std::strcmp(v.name, "compress") == 0 || std::strcmp(v.name, "quantize") == 0) {
            sub->add_option("--scheme", scheme, "ed (equal-distance) or mixed (mixed powers of two)");
        }
        if (std::strcmp(v.name, "admm") == 0) {
            sub->add_option("--oracle", oracle, "loss oracle: quadratic or small-cnn");
            sub->add_option("--max-iters", max_iters, "iteration budget");
        }
        if (std::strcmp(v.name, "detect") == 0) {
            sub->add_option("--score-threshold", score_threshold, "class score threshold")->check(CLI::Range(0.0, 1.0));
        }
        subs.emplace_back(sub, &v);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    for (const auto& [sub, verb] : subs) {
        if (!sub->parsed()) {
            continue;
        }
        if (sub->count("--config")) {
            opt.config = config;
        }
        if (sub->count("--seed")) {
            opt.seed = seed;
        }
        if (sub->count("--lb")) {
            opt.lb = lb;
        }
        if (sub->count("--bits")) {
            opt.bits = bits;
        }
        if (sub->count("--margin")) {
            opt.margin = margin;
        }
        if (sub->count("--out")) {
            opt.out = out_path;
        }
        if (sub->get_option_no_throw("--scheme") && sub->count("--scheme")) {
            opt.scheme = scheme;
        }
        if (sub->get_option_no_throw("--oracle") && sub->count("--oracle")) {
            opt.oracle = oracle;
        }
        if (sub->get_option_no_throw("--max-iters") && sub->count("--max-iters")) {
            opt.max_iters = max_iters;
        }
        if (sub->get_option_no_throw("--score-threshold") && sub->count("--score-threshold")) {
            opt.score_threshold = score_threshold;
        }
        try {
            return verb->fn(opt, out);
        } catch (const UsageError& e) {
            err << "circq " << verb->name << ": " << e.what() << '\n';
            return kUsage;
        } catch (const DivergenceError& e) {
            err << "circq " << verb->name << ": numerical failure: " << e.what() << '\n';
            return kNumerical;
        } catch (const SymmetryError& e) {
            err << "circq " << verb->name << ": numerical failure: " << e.what() << '\n';
            return kNumerical;
        } catch (const Error& e) {
            err << "circq " << verb->name << ": " << e.what() << '\n';
            return kConfig;
        } catch (const std::exception& e) {
            err << "circq " << verb->name << ": internal error: " << e.what() << '\n';
            return kInternal;
        }
    }
    return kUsage;
}

} // namespace circq::cli
