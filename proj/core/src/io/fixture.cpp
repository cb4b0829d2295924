//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/io/fixture.hpp"

#include "circq/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef CIRCQ_DATA_DIR
#define CIRCQ_DATA_DIR "data"
#endif

namespace circq::io {

namespace {

constexpr std::size_t kColumns = 9;

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) {
        if (!field.empty() && field.back() == '\r') {
            field.pop_back();
        }
        out.push_back(field);
    }
    return out;
}

double parse_number(const std::string& text)
{
    double v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ParameterError("not a number: '" + text + "'");
    }
    return v;
}

hw::BoundType parse_bound(const std::string& text)
{
    if (text == "comm" || text == "Comm.-bound") {
        return hw::BoundType::Communication;
    }
    if (text == "comp" || text == "Comp.-bound") {
        return hw::BoundType::Computation;
    }
    throw ParameterError("unknown bound type '" + text + "'");
}

} // namespace

std::vector<hw::LayerProfile> LayerTable::profiles() const
{
    std::vector<hw::LayerProfile> out;
    for (const auto& r : rows) {
        out.push_back(r.profile);
    }
    return out;
}

std::vector<hw::BoundType> LayerTable::bounds() const
{
    std::vector<hw::BoundType> out;
    for (const auto& r : rows) {
        out.push_back(r.bound);
    }
    return out;
}

double LayerTable::total_eq_latency_us() const
{
    double s = 0;
    for (const auto& r : rows) {
        s += r.eq_latency_us;
    }
    return s;
}

double LayerTable::total_het_latency_us() const
{
    double s = 0;
    for (const auto& r : rows) {
        s += r.het_latency_us;
    }
    return s;
}

double parse_size_bits(const std::string& text, double kilo)
{
    if (!(kilo > 0)) {
        throw ParameterError("unit base must be positive");
    }
    std::string number = text;
    double scale = 1.0;
    auto strip = [&](const std::string& suffix, double s) {
        if (number.size() > suffix.size() && number.ends_with(suffix)) {
            number.resize(number.size() - suffix.size());
            scale = s;
            return true;
        }
        return false;
    };
    if (!strip("Mb", kilo * kilo) && !strip("kb", kilo)) {
        strip("b", 1.0);
    }
    const double v = parse_number(number);
    if (v < 0) {
        throw ParameterError("negative size: '" + text + "'");
    }
    return v * scale;
}

LayerTable parse_layer_table(std::istream& in, const std::string& source, double kilo)
{
    LayerTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_tabs(line);
        const auto where = "line " + std::to_string(line_no);
        if (fields.size() != kColumns) {
            throw SchemaError(source, where,
                              "expected " + std::to_string(kColumns) + " tab-separated fields, got " +
                                  std::to_string(fields.size()));
        }
        if (!header_seen) {
            if (fields[0] != "name") {
                throw SchemaError(source, where, "missing header line");
            }
            header_seen = true;
            continue;
        }
        try {
            LayerRow row;
            row.profile.name = fields[0];
            row.profile.comp_size = parse_number(fields[1]);
            row.profile.in_size = parse_number(fields[2]);
            row.profile.out_size = parse_number(fields[3]);
            if (row.profile.comp_size <= 0 || row.profile.in_size <= 0 || row.profile.out_size <= 0) {
                throw ParameterError("sizes must be positive");
            }
            row.bound = parse_bound(fields[4]);
            row.eq_latency_us = parse_number(fields[5]);
            row.eq_model_bits = parse_size_bits(fields[6], kilo);
            row.het_latency_us = parse_number(fields[7]);
            row.het_model_bits = parse_size_bits(fields[8], kilo);
            table.rows.push_back(std::move(row));
        } catch (const ParameterError& e) {
            throw SchemaError(source, where, e.what());
        }
    }
    if (table.rows.empty()) {
        throw SchemaError(source, "line " + std::to_string(line_no), "no layer rows");
    }
    return table;
}

LayerTable load_layer_table(const std::filesystem::path& path, double kilo)
{
    std::ifstream in(path);
    if (!in) {
        throw SchemaError(path.string(), "open", "cannot read file");
    }
    return parse_layer_table(in, path.string(), kilo);
}

std::filesystem::path default_fixture_path()
{
    return std::filesystem::path(CIRCQ_DATA_DIR) / "table1_yolo3.tsv";
}

} // namespace circq::io
