#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fracops::experiments {

/// Parsed `key = value` file. Lines starting with '#' and blank lines are
/// ignored; duplicate keys are errors. Values are kept as text until a typed
/// getter reads them.
class ExperimentConfig {
public:
    static ExperimentConfig parse(const std::string& text, const std::string& source = "<string>");
    static ExperimentConfig load(const std::filesystem::path& path);

    const std::string& source() const noexcept { return source_; }
    /// Value of the mandatory `experiment` key.
    const std::string& experiment() const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    bool has(const std::string& key) const { return entries_.contains(key); }

    /// Rejects every key outside `allowed` (ConfigParse naming the key).
    void require_only(const std::set<std::string>& allowed) const;

    std::string get_string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const;
    double get_double(const std::string& key, std::optional<double> fallback = std::nullopt) const;
    std::size_t get_size(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) const;
    std::uint64_t get_seed(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) const;
    bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
    std::vector<double> get_doubles(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) const;
    std::vector<std::size_t> get_sizes(const std::string& key,
                                       std::optional<std::vector<std::size_t>> fallback = std::nullopt) const;

    /// Throws ConfigParse "<source>: key '<key>': <what>".
    [[noreturn]] void reject(const std::string& key, const std::string& what) const;

private:
    const std::string* raw(const std::string& key) const;

    std::string source_;
    std::map<std::string, std::string> entries_;
};

}  // namespace fracops::experiments
