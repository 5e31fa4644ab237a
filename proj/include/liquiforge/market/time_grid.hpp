#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "liquiforge/core/error.hpp"

namespace liquiforge {

class TimeGrid {
public:
    static constexpr double kTolerance = 1e-10;

    TimeGrid() : times_{0.0} {}

    explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
        require(!times_.empty(), ErrorCode::InvalidSpec, "time grid is empty");
        require(std::abs(times_.front()) <= kTolerance, ErrorCode::InvalidSpec, "time grid must start at 0");
        times_.front() = 0.0;
        for (std::size_t i = 1; i < times_.size(); ++i)
            require(times_[i] > times_[i - 1], ErrorCode::InvalidSpec, "time grid must be strictly increasing");
    }

    static TimeGrid uniform(double horizon, std::size_t steps) {
        require(steps > 0 && horizon > 0.0, ErrorCode::InvalidSpec, "uniform grid needs horizon > 0 and steps > 0");
        std::vector<double> t(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
        return TimeGrid(std::move(t));
    }

    std::size_t size() const { return times_.size(); }
    std::size_t last_index() const { return times_.size() - 1; }
    double operator[](std::size_t i) const { return times_[i]; }
    double back() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }

    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 1; i < times_.size(); ++i) m = std::max(m, times_[i] - times_[i - 1]);
        return m;
    }

    std::optional<std::size_t> find(double t) const {
        auto it = std::lower_bound(times_.begin(), times_.end(), t - kTolerance);
        if (it != times_.end() && std::abs(*it - t) <= kTolerance)
            return static_cast<std::size_t>(it - times_.begin());
        return std::nullopt;
    }

    bool contains(double t) const { return find(t).has_value(); }

    std::size_t index_of(double t) const {
        auto idx = find(t);
        if (!idx) fail(ErrorCode::NotOnGrid, "time " + std::to_string(t) + " is not a grid time");
        return *idx;
    }

    // Every interval split in two.
    TimeGrid refined() const {
        std::vector<double> t;
        t.reserve(2 * times_.size() - 1);
        for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
            t.push_back(times_[i]);
            t.push_back(0.5 * (times_[i] + times_[i + 1]));
        }
        t.push_back(times_.back());
        return TimeGrid(std::move(t));
    }

    bool is_subgrid_of(const TimeGrid& fine) const {
        return std::all_of(times_.begin(), times_.end(), [&](double t) { return fine.contains(t); });
    }

    bool operator==(const TimeGrid& other) const {
        if (times_.size() != other.times_.size()) return false;
        for (std::size_t i = 0; i < times_.size(); ++i)
            if (std::abs(times_[i] - other.times_[i]) > kTolerance) return false;
        return true;
    }

private:
    std::vector<double> times_;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (!(a == b)) fail(ErrorCode::GridMismatch, std::string(what) + ": grids differ");
}

} // namespace liquiforge
