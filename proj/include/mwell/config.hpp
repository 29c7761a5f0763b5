#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mwell/error.hpp"

namespace mwell {

/// Flat key = value experiment configuration. '#' starts a comment.
/// Every entry remembers the line it came from so errors can point at it.
class ExperimentConfig {
public:
    struct Entry {
        std::string value;
        int line = 0; // 0 for values set programmatically
    };

    static ExperimentConfig parse(std::istream& is, const std::string& source = "<config>")
    {
        ExperimentConfig c;
        std::string raw;
        int line = 0;
        std::vector<std::string> problems;
        while (std::getline(is, raw)) {
            ++line;
            if (auto h = raw.find('#'); h != std::string::npos)
                raw.erase(h);
            const auto s = trim(raw);
            if (s.empty())
                continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                problems.push_back(source + ":" + std::to_string(line) + ": expected key = value");
                continue;
            }
            const auto key = trim(s.substr(0, eq));
            const auto val = trim(s.substr(eq + 1));
            if (key.empty()) {
                problems.push_back(source + ":" + std::to_string(line) + ": empty key");
                continue;
            }
            if (c.entries_.count(key)) {
                problems.push_back(source + ":" + std::to_string(line) + ": duplicate key '" + key + "' (first on line " +
                                   std::to_string(c.entries_[key].line) + ")");
                continue;
            }
            c.entries_[key] = {val, line};
        }
        if (!problems.empty()) {
            std::string msg;
            for (const auto& p : problems)
                msg += (msg.empty() ? "" : "; ") + p;
            detail::fail(ErrorKind::config, "cli", msg);
        }
        c.source_ = source;
        return c;
    }

    static ExperimentConfig load(const std::string& path)
    {
        std::ifstream is(path);
        detail::require(static_cast<bool>(is), ErrorKind::io, "cli", "cannot open config " + path);
        return parse(is, path);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

    /// Entries of `other` replace ours.
    void merge(const ExperimentConfig& other)
    {
        for (const auto& [k, e] : other.entries_)
            entries_[k] = e;
    }

    std::string str(const std::string& key, const std::string& fallback) const
    {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    std::string str(const std::string& key) const
    {
        auto it = entries_.find(key);
        if (it == entries_.end())
            detail::fail(ErrorKind::config, "cli", "missing required field '" + key + "'");
        return it->second.value;
    }

    double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }
    double real(const std::string& key) const { return convert<double>(key); }
    std::int64_t integer(const std::string& key, std::int64_t fallback) const
    {
        return has(key) ? integer(key) : fallback;
    }
    std::int64_t integer(const std::string& key) const { return convert<std::int64_t>(key); }
    std::optional<double> maybe_real(const std::string& key) const
    {
        return has(key) ? std::optional<double>(real(key)) : std::nullopt;
    }

    /// Canonical text: sorted keys, one per line. Re-parsing it gives the same config.
    void write(std::ostream& os) const
    {
        for (const auto& [k, e] : entries_)
            os << k << " = " << e.value << '\n';
    }

    std::string to_string() const
    {
        std::ostringstream os;
        write(os);
        return os.str();
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
    std::string source_ = "<flags>";

    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::string where(const std::string& key) const
    {
        const auto& e = entries_.at(key);
        return e.line ? source_ + ":" + std::to_string(e.line) : std::string("<flags>");
    }

    template <class T>
    T convert(const std::string& key) const
    {
        const auto& v = str(key);
        T out{};
        const auto* end = v.data() + v.size();
        const auto [ptr, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc{} || ptr != end)
            detail::fail(ErrorKind::config, "cli",
                         "field '" + key + "' at " + where(key) + ": cannot parse '" + v + "' as a number");
        return out;
    }
};

} // namespace mwell
