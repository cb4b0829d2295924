//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "circq/hwmodel.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace circq::io {

/// One row of the layer table: workload, bound type and the two measured
/// (latency, model size) columns.
struct LayerRow {
    hw::LayerProfile profile;
    hw::BoundType bound = hw::BoundType::Communication;
    double eq_latency_us = 0;
    double eq_model_bits = 0;
    double het_latency_us = 0;
    double het_model_bits = 0;
};

struct LayerTable {
    std::vector<LayerRow> rows;

    std::vector<hw::LayerProfile> profiles() const;
    std::vector<hw::BoundType> bounds() const;
    double total_eq_latency_us() const;
    double total_het_latency_us() const;
};

/// Binary units unless overridden: "1.69Mb" = 1.69 * kilo^2 bits.
inline constexpr double kBinaryKilo = 1024.0;

/// Parses "<number>{b,kb,Mb}". Throws ParameterError.
double parse_size_bits(const std::string& text, double kilo = kBinaryKilo);

/// Tab-separated, '#' comment lines, one header line. Throws SchemaError with
/// source:line context.
LayerTable parse_layer_table(std::istream& in, const std::string& source = "<stream>", double kilo = kBinaryKilo);
LayerTable load_layer_table(const std::filesystem::path& path, double kilo = kBinaryKilo);

/// The shipped tiny-YOLO layer table.
std::filesystem::path default_fixture_path();

} // namespace circq::io
