//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace circq::cli {

/// Left-aligned text table; every row has the header's width.
class TextTable {
public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row);
    void print(std::ostream& os) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string fixed(double v, int precision);
std::string general(double v);

/// "# circq <version> <command> seed=<seed>"
void print_banner(std::ostream& os, const std::string& command, std::uint64_t seed);

/// Top-level report object with tool, version, command and seed filled in.
nlohmann::ordered_json report_envelope(const std::string& command, std::uint64_t seed);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

} // namespace circq::cli
