#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "mobhoro/error.hpp"

namespace mobhoro::cli {

inline constexpr const char* kReportSchema = "mobhoro.report/1";

struct Series {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct RunReport {
    nlohmann::ordered_json json;  // schema, command, config, result, timings
    std::optional<Series> series;
};

// Validates, then dispatches on config.command. Timings are the only fields
// that differ between identical runs.
RunReport run(const ExperimentConfig& config);

// CSV with a header row; validation error if the report carries no series.
void emit_series(const RunReport& report, std::ostream& out);
void emit_series(const RunReport& report, const std::filesystem::path& path);

int exit_code(Errc code) noexcept;

// Full command-line entry point; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mobhoro::cli
