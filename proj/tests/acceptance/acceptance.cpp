//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Acceptance runner. Prints one "C<n> PASS|FAIL" line per criterion and exits
// non-zero if any selected criterion fails. Usage: circq_acceptance [n ...]

#include "circq/admm.hpp"
#include "circq/circulant.hpp"
#include "circq/hwmodel.hpp"
#include "circq/io/fixture.hpp"
#include "circq/quant.hpp"
#include "circq/spectral.hpp"
#include "circq/yolo.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace circq;
using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Convolution-theorem equivalence of the circulant fast path.
Verdict c1()
{
    constexpr double kTol = 1e-9;
    constexpr double kBudgetS = 10.0;
    constexpr int kCases = 1000;
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> exp(1, 8);
    const auto t0 = Clock::now();
    double worst = 0;
    for (int i = 0; i < kCases; ++i) {
        const std::size_t n = std::size_t{1} << exp(rng);
        const auto iv = oracle::gaussian_vector(rng, n);
        const auto x = oracle::gaussian_vector(rng, n);
        const auto fast = spectral::circular_convolve(iv, x);
        const auto dense = oracle::dense_matvec(circulant::expand_block(iv), x);
        worst = std::max(worst, oracle::relative_error(fast, dense));
    }
    const double t = seconds_since(t0);
    std::ostringstream d;
    d << kCases << " cases, max relative error " << worst << " (tol " << kTol << "), " << t << " s (budget "
      << kBudgetS << " s)";
    return {worst <= kTol && t < kBudgetS, d.str()};
}

// Spectral CONV layer against the direct sliding-window sum.
Verdict c2()
{
    constexpr double kTol = 1e-6;
    constexpr double kBudgetS = 30.0;
    constexpr int kCases = 200;
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<std::size_t> ch(1, 32);
    std::uniform_int_distribution<std::size_t> extent(3, 9);
    std::uniform_int_distribution<int> lb_exp(0, 4);
    const auto t0 = Clock::now();
    double worst = 0;
    for (int i = 0; i < kCases; ++i) {
        const std::size_t r = i % 2 == 0 ? 1 : 3;
        const std::size_t lb = std::size_t{1} << lb_exp(rng);
        const std::size_t c = ch(rng);
        const std::size_t co = ch(rng);
        const std::size_t stride = i % 5 == 0 ? 2 : 1;
        const std::size_t pad = r == 3 ? 1 : 0;
        const std::size_t h = extent(rng);
        const std::size_t w = extent(rng);
        const FeatureMap fm(h, w, c, oracle::gaussian_vector(rng, h * w * c));
        const WeightTensor4D dense(r, c, co, oracle::gaussian_vector(rng, r * r * c * co));
        auto bc = circulant::compress_weights(dense, lb);
        bc.bias = oracle::gaussian_vector(rng, co);
        const auto got = circulant::conv_forward(fm, bc, stride, pad);
        const auto want = circulant::naive_conv_forward(fm, circulant::decompress_weights(bc), bc.bias, stride, pad);
        worst = std::max(worst, oracle::relative_error(got.data(), want.data()));
    }
    const double t = seconds_since(t0);
    std::ostringstream d;
    d << kCases << " layers, max relative error " << worst << " (tol " << kTol << "), " << t << " s (budget "
      << kBudgetS << " s)";
    return {worst <= kTol && t < kBudgetS, d.str()};
}

// Quantizing the half spectrum keeps the restored vector real.
Verdict c3()
{
    constexpr double kTol = 1e-9;
    constexpr int kVectors = 1000;
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<int> exp(1, 8);
    double worst = 0;
    for (const auto& shape : {quant::QuantScheme::equal_distance(32), quant::QuantScheme::mixed_pow2(3, 2)}) {
        for (int i = 0; i < kVectors; ++i) {
            const std::size_t n = std::size_t{1} << exp(rng);
            const auto v = oracle::gaussian_vector(rng, n);
            const auto h = spectral::rfft(v);
            std::vector<double> comps;
            for (const auto& z : h.values()) {
                comps.push_back(z.real());
                comps.push_back(z.imag());
            }
            const auto scheme = shape.with_alpha(quant::calibrate_alpha(comps, shape));
            const auto full = spectral::expand(quant::quantize_half_spectrum(h, scheme));
            const auto restored = oracle::naive_idft(full.values);
            double imag = 0;
            double norm = 0;
            for (const auto& z : restored) {
                imag = std::max(imag, std::abs(z.imag()));
                norm = std::max(norm, std::abs(z.real()));
            }
            worst = std::max(worst, imag / std::max(norm, 1.0));
        }
    }
    std::ostringstream d;
    d << 2 * kVectors << " vectors, max imaginary residue " << worst << " (tol " << kTol << ")";
    return {worst < kTol, d.str()};
}

// Nearest-level optimality and exact code round trips.
Verdict c4()
{
    constexpr int kSamples = 100000;
    std::mt19937_64 rng(104);
    std::size_t mismatches = 0;
    std::size_t checked = 0;
    for (const auto& scheme : {quant::QuantScheme::equal_distance(16, 0.3), quant::QuantScheme::mixed_pow2(3, 2, 0.25)}) {
        const auto lv = quant::levels(scheme);
        std::uniform_real_distribution<double> u(1.2 * lv.front(), 1.2 * lv.back());
        std::vector<double> xs;
        for (int i = 0; i < kSamples; ++i) {
            xs.push_back(u(rng));
        }
        for (std::size_t i = 1; i < lv.size(); ++i) {
            xs.push_back(0.5 * (lv[i - 1] + lv[i]));
        }
        for (double x : xs) {
            ++checked;
            mismatches += quant::quantize_value(x, scheme) != oracle::exhaustive_nearest(lv, x);
        }
    }

    std::size_t codes = 0;
    std::size_t code_failures = 0;
    for (int p = 1; p <= 4; ++p) {
        for (int s = 0; s <= 3; ++s) {
            const auto scheme = quant::QuantScheme::mixed_pow2(p, s, 1.0);
            const auto lv = quant::levels(scheme);
            for (std::uint32_t bits = 0; bits < (1u << (1 + p + s)); ++bits) {
                ++codes;
                const auto c = quant::QuantCode::from_bits(bits, p, s);
                const double v = quant::decode(c, scheme);
                bool ok = c.bits() == bits && std::binary_search(lv.begin(), lv.end(), v);
                ok = ok && quant::decode(quant::encode(v, scheme), scheme) == v;
                for (std::int64_t x : {-32768, -1000, -3, -1, 0, 1, 7, 255, 32767}) {
                    ok = ok && quant::shift_add_multiply(x, c) == static_cast<std::int64_t>(v) * x;
                }
                code_failures += ok ? 0 : 1;
            }
            for (double l : lv) {
                code_failures += quant::decode(quant::encode(l, scheme), scheme) == l ? 0 : 1;
            }
        }
    }

    const auto named = quant::QuantCode::from_string("101101", 3, 2);
    const bool named_ok = named.negative && named.primary_shift() == 2 && named.secondary_shift() == 0 &&
                          quant::decode(named, quant::QuantScheme::mixed_pow2(3, 2, 1.0)) == -5.0 &&
                          quant::shift_add_multiply(3, named) == -15;

    std::ostringstream d;
    d << mismatches << "/" << checked << " nearest-level mismatches, " << code_failures << " failures over " << codes
      << " codes, code 101101 " << (named_ok ? "decodes to shifts 2 and 0" : "WRONG");
    return {mismatches == 0 && code_failures == 0 && named_ok, d.str()};
}

// ADMM reaches a feasible point on the shipped benchmark.
Verdict c5()
{
    constexpr double kResidualTol = 1e-3;
    constexpr std::size_t kMaxIters = 200;
    constexpr double kOffLevelTol = 1e-9;
    constexpr double kBudgetS = 60.0;
    const auto t0 = Clock::now();
    auto b = admm::quadratic_benchmark();
    b.options.max_iters = kMaxIters;
    const auto res = admm::run_admm(b.oracle, b.initial, b.constraints, b.options);
    const double t = seconds_since(t0);
    const double residual = res.trace.empty() ? 1.0 : res.trace.back().residual;
    bool structured = true;
    double off_level = 0;
    for (std::size_t l = 0; l < res.weights.size(); ++l) {
        structured = structured && admm::is_block_circulant(res.weights[l], b.constraints[l].block_size);
        off_level = std::max(off_level, admm::max_off_level_distance(res.weights[l], b.constraints[l].block_size,
                                                                     res.schemes[l]));
    }
    std::ostringstream d;
    d << "residual " << residual << " after " << res.trace.size() << " iterations (tol " << kResidualTol << ", cap "
      << kMaxIters << "), block-circulant " << (structured ? "yes" : "no") << ", off-level " << off_level << " (tol "
      << kOffLevelTol << "), " << t << " s";
    return {residual < kResidualTol && res.trace.size() <= kMaxIters && structured && off_level <= kOffLevelTol &&
                t < kBudgetS,
            d.str()};
}

// One calibrated (throughput, bandwidth) pair reproduces the bound column.
Verdict c6()
{
    const auto table = io::load_layer_table(io::default_fixture_path());
    const auto profiles = table.profiles();
    const auto expected = table.bounds();
    const auto cal = hw::calibrate_bound_params(profiles, expected, hw::LatencyParams{});
    std::ostringstream d;
    d << cal.matches << "/" << cal.total << " layers match at " << cal.params.bytes_per_cycle << " bytes/cycle";
    std::size_t matches = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto got = hw::layer_latency(profiles[i], hw::Mode::Dsp, cal.params).bound;
        if (got == expected[i]) {
            ++matches;
        } else {
            d << "; " << profiles[i].name << " classified " << hw::to_string(got) << ", table says "
              << hw::to_string(expected[i]);
        }
    }
    return {matches == profiles.size(), d.str()};
}

// Heterogeneous design beats the equal-distance one on the fixture.
Verdict c7()
{
    constexpr double kRatio = 0.663;
    constexpr double kTol = 1e-3;
    const auto table = io::load_layer_table(io::default_fixture_path());
    const double ratio = table.total_het_latency_us() / table.total_eq_latency_us();

    hw::ExploreInputs in;
    in.profiles = table.profiles();
    in.sensitivity = hw::constant_sensitivity(std::vector<double>(in.profiles.size(), 0.0));
    in.latency = [&](std::size_t i, hw::Mode m) {
        return 1e-6 * (m == hw::Mode::Dsp ? table.rows.at(i).eq_latency_us : table.rows.at(i).het_latency_us);
    };
    const auto shapes = yolo::voc_spec().conv_shapes();
    in.model_size = [&](std::size_t i, int bits) { return hw::layer_model_size_bits(shapes.at(i), 16, bits); };
    in.budget.dsp_total = 1e12;
    in.budget.lut_total = 1e12;
    in.budget.bram_count = 1e6;
    in.margins = {1.0};
    const auto r = hw::explore(in);
    std::size_t comp_bound = 0;
    std::size_t comp_bound_mode2 = 0;
    for (std::size_t i = 0; i < table.rows.size() && r.feasible; ++i) {
        if (table.rows[i].bound == hw::BoundType::Computation) {
            ++comp_bound;
            comp_bound_mode2 += r.assignment[i].mode == hw::Mode::Shift;
        }
    }
    std::ostringstream d;
    d << "latency ratio " << ratio << " (target " << kRatio << " +/- " << kTol << "), permissive margin puts "
      << comp_bound_mode2 << "/" << comp_bound << " computation-bound layers in mode 2";
    return {std::abs(ratio - kRatio) <= kTol && r.feasible && comp_bound > 0 && comp_bound_mode2 == comp_bound,
            d.str()};
}

// Resource estimators against a per-row recomputation.
Verdict c8()
{
    constexpr int kAssignments = 100;
    constexpr std::int64_t kPublishedBram = 141;
    std::mt19937_64 rng(108);
    const auto p = io::load_layer_table(io::default_fixture_path()).profiles();
    std::bernoulli_distribution coin;
    // Per-PE costs are counts; power-of-two sharing keeps the arithmetic exact.
    std::uniform_int_distribution<int> count(0, 10);
    int mismatches = 0;
    for (int i = 0; i < kAssignments; ++i) {
        hw::PeCost cost;
        cost.dsp_per_dsp_pe = count(rng);
        cost.dsp_per_shift_pe = std::uniform_int_distribution<int>(0, static_cast<int>(cost.dsp_per_dsp_pe))(rng);
        cost.lut_per_dsp_pe = count(rng);
        cost.lut_per_shift_pe = count(rng);
        cost.dsp_share_divisor = static_cast<double>(1 << (i % 3));
        hw::ModeAssignment a;
        for (std::size_t l = 0; l < p.size(); ++l) {
            a.push_back({coin(rng) ? hw::Mode::Dsp : hw::Mode::Shift, 8});
        }
        const auto want = oracle::spreadsheet(a, p, cost);
        mismatches += hw::estimate_dsp(a, p, cost) != want.dsp || hw::estimate_lut(a, p, cost) != want.lut;
    }
    const auto bram = hw::estimate_bram(4.95 * io::kBinaryKilo * io::kBinaryKilo, 64, hw::FpgaBudget{});
    std::ostringstream d;
    d << mismatches << "/" << kAssignments << " assignments differ from the spreadsheet, BRAM for 4.95Mb = " << bram
      << " (expected " << kPublishedBram << ")";
    return {mismatches == 0 && bram == kPublishedBram, d.str()};
}

// FFT multiplier savings.
Verdict c9()
{
    constexpr std::size_t kDotProduct16 = 9;
    int failures = 0;
    std::ostringstream d;
    for (std::size_t n = 4; n <= 1024; n *= 2) {
        const auto got = hw::fft_multiplier_count(n);
        const auto want = circq::oracle::enumerate_nontrivial_twiddles(n);
        std::size_t stages = 0;
        for (std::size_t m = n; m > 1; m /= 2) {
            ++stages;
        }
        const bool below = n < 8 || got.fft_mults < n / 2 * stages;
        if (got.fft_mults != want || !below) {
            ++failures;
            d << "N=" << n << " got " << got.fft_mults << " want " << want << "; ";
        }
    }
    const auto dot = hw::fft_multiplier_count(16).dot_product_mults;
    d << "sizes 4..1024 checked, " << failures << " failures, 16-point dot product " << dot << " multiplies";
    return {failures == 0 && dot == kDotProduct16, d.str()};
}

// Shape pipeline and NMS postconditions.
Verdict c10()
{
    constexpr int kSets = 1000;
    std::ostringstream d;
    bool ok = true;
    for (const auto& [net, depth] : {std::pair{yolo::voc_spec(), std::size_t{45}}, std::pair{yolo::dji_spec(), std::size_t{37}}}) {
        const auto out = yolo::forward(net, yolo::random_weights(net, 110), yolo::random_image(net, 111));
        const bool shape_ok = out.height() == 13 && out.width() == 13 && out.channels() == depth;
        ok = ok && shape_ok;
        d << net.classes << " classes -> " << out.height() << "x" << out.width() << "x" << out.channels() << "; ";
    }

    std::mt19937_64 rng(112);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> count(0, 60);
    int violations = 0;
    for (int s = 0; s < kSets; ++s) {
        std::vector<yolo::DetectionBox> boxes(static_cast<std::size_t>(count(rng)));
        for (auto& b : boxes) {
            b.cx = u(rng);
            b.cy = u(rng);
            b.w = 0.02 + 0.4 * u(rng);
            b.h = 0.02 + 0.4 * u(rng);
            b.score = u(rng);
        }
        const double score_thr = 0.5 * u(rng);
        const double iou_thr = 0.1 + 0.8 * u(rng);
        const auto kept = yolo::nms(boxes, score_thr, iou_thr);
        bool set_ok = kept.size() <= boxes.size();
        for (std::size_t i = 0; i < kept.size(); ++i) {
            set_ok = set_ok && kept[i].score >= score_thr && (i == 0 || kept[i - 1].score >= kept[i].score);
            for (std::size_t j = i + 1; j < kept.size(); ++j) {
                set_ok = set_ok && yolo::iou(kept[i], kept[j]) <= iou_thr;
            }
        }
        // Maximality: every dropped qualifying box is covered by a kept one.
        for (const auto& b : boxes) {
            if (b.score < score_thr) {
                continue;
            }
            bool covered = false;
            for (const auto& k : kept) {
                covered = covered || (k.cx == b.cx && k.cy == b.cy && k.score == b.score) ||
                          (k.score >= b.score && yolo::iou(k, b) > iou_thr);
            }
            set_ok = set_ok && covered;
        }
        violations += set_ok ? 0 : 1;
    }
    d << "NMS violations in " << violations << "/" << kSets << " random sets";
    return {ok && violations == 0, d.str()};
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria()
{
    static const std::vector<std::pair<std::string, std::function<Verdict()>>> all{
        {"convolution theorem", c1},        {"conv layer oracle", c2},   {"realness after quantization", c3},
        {"quantizer optimality", c4},       {"admm feasibility", c5},    {"bound reproduction", c6},
        {"heterogeneous advantage", c7},    {"resource arithmetic", c8}, {"fft multiplier savings", c9},
        {"shape pipeline", c10},
    };
    return all;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const long n = std::strtol(argv[i], &end, 10);
        if (*end != '\0' || n < 1 || n > static_cast<long>(criteria().size())) {
            std::cerr << "usage: circq_acceptance [criterion 1..10 ...]\n";
            return 2;
        }
        selected.push_back(static_cast<std::size_t>(n));
    }
    if (selected.empty()) {
        for (std::size_t n = 1; n <= criteria().size(); ++n) {
            selected.push_back(n);
        }
    }

    int failed = 0;
    for (std::size_t n : selected) {
        const auto& [name, fn] = criteria()[n - 1];
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "C" << n << " " << (v.pass ? "PASS" : "FAIL") << " " << name << ": " << v.detail << std::endl;
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
