#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fracops/experiments/config.hpp"

namespace fracops::experiments {

using Cell = std::variant<double, long long, std::string>;

/// A CSV table. Doubles are written with %.17g so reruns compare byte for byte.
struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::string render() const;
};

struct Assertion {
    std::string name;
    bool passed;
    double value;
    double threshold;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::string config_source;
    std::map<std::string, std::string> config_echo;
    std::filesystem::path output_dir;
    std::vector<std::string> tables;  // file names inside output_dir
    std::vector<Assertion> assertions;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    double wall_clock_seconds = 0.0;
    std::string version;
    std::uint64_t seed = 0;

    bool passed() const noexcept;
    nlohmann::ordered_json to_json() const;
};

/// Collects tables and assertions of one experiment run and writes them
/// below its output directory.
class RunContext {
public:
    explicit RunContext(ExperimentReport& report) : report_(report) {}

    void write(const CsvTable& table);
    /// Writes `content` to output_dir/file and lists it among the tables.
    void write_text(const std::string& file, const std::string& content);
    void check(std::string name, bool passed, double value, double threshold, std::string detail = {});
    nlohmann::ordered_json& summary() { return report_.summary; }

private:
    ExperimentReport& report_;
};

std::string format_double(double v);

}  // namespace fracops::experiments
