//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "report.hpp"

#include "circq/error.hpp"
#include "circq/version.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace circq::cli {

void TextTable::add_row(std::vector<std::string> row)
{
    row.resize(header_.size());
    rows_.push_back(std::move(row));
}

void TextTable::print(std::ostream& os) const
{
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) {
        width[c] = header_[c].size();
        for (const auto& r : rows_) {
            width[c] = std::max(width[c], r[c].size());
        }
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            os << cells[c];
            if (c + 1 < cells.size()) {
                os << std::string(width[c] - cells[c].size() + 2, ' ');
            }
        }
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) {
        line(r);
    }
}

std::string fixed(double v, int precision)
{
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(precision) << v;
    return ss.str();
}

std::string general(double v)
{
    std::ostringstream ss;
    ss << std::setprecision(6) << v;
    return ss.str();
}

void print_banner(std::ostream& os, const std::string& command, std::uint64_t seed)
{
    os << "# circq " << kVersion << ' ' << command << " seed=" << seed << '\n';
}

nlohmann::ordered_json report_envelope(const std::string& command, std::uint64_t seed)
{
    nlohmann::ordered_json doc;
    doc["tool"] = "circq";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["seed"] = seed;
    return doc;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc)
{
    std::ofstream out(path);
    if (!out) {
        throw SchemaError(path.string(), "open", "cannot write file");
    }
    out << doc.dump(2) << '\n';
}

} // namespace circq::cli
