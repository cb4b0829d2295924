//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace circq::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kConfig = 3,
    kNumerical = 4,
};

/// Bad command-line usage detected after parsing (exit 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> lb;
    std::optional<int> bits;
    std::optional<double> margin;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> scheme;
    std::optional<std::string> oracle;
    std::optional<std::size_t> max_iters;
    std::optional<double> score_threshold;
    std::vector<std::string> inputs;
};

int cmd_compress(const Options& opt, std::ostream& out);
int cmd_quantize(const Options& opt, std::ostream& out);
int cmd_admm(const Options& opt, std::ostream& out);
int cmd_explore(const Options& opt, std::ostream& out);
int cmd_simulate(const Options& opt, std::ostream& out);
int cmd_detect(const Options& opt, std::ostream& out);
int cmd_report(const Options& opt, std::ostream& out);

/// Parses argv, dispatches, and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace circq::cli
