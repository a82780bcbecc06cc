#include "fracops/experiments/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fracops/errors.hpp"

namespace fracops::experiments {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) fail(ErrorCode::InvalidArgument, "row width differs from the header of " + name);
    rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out += format_double(v);
                    else if constexpr (std::is_same_v<T, long long>) out += std::to_string(v);
                    else out += v;
                },
                row[c]);
        }
        out += '\n';
    }
    return out;
}

bool ExperimentReport::passed() const noexcept {
    for (const auto& a : assertions) {
        if (!a.passed) return false;
    }
    return true;
}

namespace {

// JSON has no inf/nan; keep them readable as strings.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

nlohmann::ordered_json ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["version"] = version;
    j["config_source"] = config_source;
    j["config"] = config_echo;
    j["seed"] = seed;
    j["passed"] = passed();
    j["tables"] = tables;
    auto& arr = j["assertions"] = nlohmann::ordered_json::array();
    for (const auto& a : assertions) {
        arr.push_back({{"name", a.name},
                       {"passed", a.passed},
                       {"value", number(a.value)},
                       {"threshold", number(a.threshold)},
                       {"detail", a.detail}});
    }
    j["summary"] = summary;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
}

void RunContext::write(const CsvTable& table) { write_text(table.name + ".csv", table.render()); }

void RunContext::write_text(const std::string& file, const std::string& content) {
    const auto path = report_.output_dir / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
    report_.tables.push_back(file);
}

void RunContext::check(std::string name, bool passed, double value, double threshold, std::string detail) {
    report_.assertions.push_back({std::move(name), passed, value, threshold, std::move(detail)});
}

}  // namespace fracops::experiments
