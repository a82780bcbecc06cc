#include "fracops/experiments/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fracops/errors.hpp"

namespace fracops::experiments {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    cfg.source_ = source;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        std::ostringstream where;
        where << source << ":" << lineno;
        if (eq == std::string::npos) fail(ErrorCode::ConfigParse, where.str() + ": expected 'key = value'");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) fail(ErrorCode::ConfigParse, where.str() + ": empty key");
        if (value.empty()) fail(ErrorCode::ConfigParse, where.str() + ": key '" + key + "' has no value");
        if (!cfg.entries_.emplace(key, value).second) {
            fail(ErrorCode::ConfigParse, where.str() + ": key '" + key + "' is repeated");
        }
    }
    if (!cfg.has("experiment")) fail(ErrorCode::ConfigParse, source + ": key 'experiment' is missing");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

const std::string& ExperimentConfig::experiment() const { return entries_.at("experiment"); }

void ExperimentConfig::require_only(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : entries_) {
        if (!allowed.contains(k)) reject(k, "unknown key for experiment '" + experiment() + "'");
    }
}

void ExperimentConfig::reject(const std::string& key, const std::string& what) const {
    fail(ErrorCode::ConfigParse, source_ + ": key '" + key + "': " + what);
}

const std::string* ExperimentConfig::raw(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::string ExperimentConfig::get_string(const std::string& key, std::optional<std::string> fallback) const {
    if (const auto* v = raw(key)) return *v;
    if (fallback) return *fallback;
    reject(key, "required");
}

double ExperimentConfig::get_double(const std::string& key, std::optional<double> fallback) const {
    const auto* v = raw(key);
    if (!v) {
        if (fallback) return *fallback;
        reject(key, "required");
    }
    double out = 0.0;
    if (!parse_number(*v, out)) reject(key, "'" + *v + "' is not a number");
    return out;
}

std::size_t ExperimentConfig::get_size(const std::string& key, std::optional<std::size_t> fallback) const {
    const auto* v = raw(key);
    if (!v) {
        if (fallback) return *fallback;
        reject(key, "required");
    }
    std::size_t out = 0;
    if (!parse_number(*v, out)) {
        // Accept integral scientific notation such as 1e6.
        double d = 0.0;
        if (!parse_number(*v, d) || d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
            reject(key, "'" + *v + "' is not a nonnegative integer");
        }
        out = static_cast<std::size_t>(d);
    }
    return out;
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key, std::optional<std::uint64_t> fallback) const {
    const auto* v = raw(key);
    if (!v) {
        if (fallback) return *fallback;
        reject(key, "required");
    }
    std::uint64_t out = 0;
    if (!parse_number(*v, out)) reject(key, "'" + *v + "' is not an unsigned 64-bit integer");
    return out;
}

bool ExperimentConfig::get_bool(const std::string& key, std::optional<bool> fallback) const {
    const auto* v = raw(key);
    if (!v) {
        if (fallback) return *fallback;
        reject(key, "required");
    }
    if (*v == "true") return true;
    if (*v == "false") return false;
    reject(key, "'" + *v + "' is not true or false");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key,
                                                  std::optional<std::vector<double>> fallback) const {
    const auto* v = raw(key);
    if (!v) {
        if (fallback) return *fallback;
        reject(key, "required");
    }
    std::vector<double> out;
    for (const auto& item : split_list(*v)) {
        double d = 0.0;
        if (!parse_number(item, d)) reject(key, "'" + item + "' is not a number");
        out.push_back(d);
    }
    return out;
}

std::vector<std::size_t> ExperimentConfig::get_sizes(const std::string& key,
                                                     std::optional<std::vector<std::size_t>> fallback) const {
    const auto* v = raw(key);
    if (!v) {
        if (fallback) return *fallback;
        reject(key, "required");
    }
    std::vector<std::size_t> out;
    for (const auto& item : split_list(*v)) {
        std::size_t d = 0;
        if (!parse_number(item, d)) reject(key, "'" + item + "' is not a nonnegative integer");
        out.push_back(d);
    }
    return out;
}

}  // namespace fracops::experiments
