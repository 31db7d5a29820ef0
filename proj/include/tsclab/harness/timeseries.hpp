#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsclab::harness {

/// Column store of named channels against strictly increasing time.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<std::string> names) : names_(std::move(names)), columns_(names_.size()) {}

    void append(double t, std::span<const double> row) {
        if (row.size() != names_.size()) throw std::invalid_argument("TimeSeries::append: row width mismatch");
        if (!time_.empty() && !(t > time_.back()))
            throw std::invalid_argument("TimeSeries::append: time must increase strictly");
        time_.push_back(t);
        for (std::size_t c = 0; c < row.size(); ++c) columns_[c].push_back(row[c]);
    }

    std::size_t size() const noexcept { return time_.size(); }
    bool empty() const noexcept { return time_.empty(); }
    const std::vector<double>& time() const noexcept { return time_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::optional<std::size_t> index(const std::string& name) const {
        for (std::size_t c = 0; c < names_.size(); ++c)
            if (names_[c] == name) return c;
        return std::nullopt;
    }
    const std::vector<double>& column(std::size_t c) const { return columns_.at(c); }
    const std::vector<double>& column(const std::string& name) const {
        const auto c = index(name);
        if (!c) throw std::out_of_range("unknown channel '" + name + "'");
        return columns_[*c];
    }
    bool has(const std::string& name) const { return index(name).has_value(); }

    /// First sample index with time >= t.
    std::size_t lower_index(double t) const {
        std::size_t lo = 0, hi = time_.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (time_[mid] < t) lo = mid + 1;
            else hi = mid;
        }
        return lo;
    }

private:
    std::vector<std::string> names_;
    std::vector<double> time_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace tsclab::harness
