#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/market/time_grid.hpp"

namespace liquiforge {

using ActiveMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Contractual flows X_i per (path, grid time). fixing_index(i) = m means X_i is known at t_m.
class CashFlowStream {
public:
    CashFlowStream(TimeGrid grid, std::size_t paths, std::string name = {})
        : grid_(std::move(grid)), name_(std::move(name)),
          flows_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(paths), static_cast<Eigen::Index>(grid_.size()))),
          fixing_(grid_.size()) {
        for (std::size_t i = 0; i < fixing_.size(); ++i) fixing_[i] = i;
    }

    const TimeGrid& grid() const { return grid_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    std::size_t paths() const { return static_cast<std::size_t>(flows_.rows()); }
    std::size_t times() const { return grid_.size(); }

    double flow(std::size_t p, std::size_t i) const {
        return flows_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
    }
    void set_flow(std::size_t p, std::size_t i, double x) {
        require(i > 0, ErrorCode::InvalidSpec, "flows start at t_1");
        flows_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = x;
    }
    const Eigen::MatrixXd& flows() const { return flows_; }

    std::size_t fixing_index(std::size_t i) const { return fixing_[i]; }
    void set_fixing_index(std::size_t i, std::size_t m) {
        require(m <= i, ErrorCode::InvalidSpec, "a flow cannot fix after it is paid");
        fixing_[i] = m;
    }
    // X_i is known one step ahead (or earlier).
    bool predictable(std::size_t i) const { return i > 0 && fixing_[i] < i; }

    // false once a path can have no further flows after t_i.
    bool active(std::size_t p, std::size_t i) const {
        return !active_ || (*active_)(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) != 0;
    }
    bool has_active_mask() const { return active_.has_value(); }
    void set_active_mask(ActiveMask mask) { active_ = std::move(mask); }

    bool lambda_dependent() const { return lambda_dependent_; }
    void set_lambda_dependent(bool v) { lambda_dependent_ = v; }

    // Grid indices carrying a nonzero flow on some path.
    std::vector<std::size_t> flow_times() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 1; i < times(); ++i)
            if (flows_.col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() > 0.0) out.push_back(i);
        return out;
    }

    CashFlowStream scaled(double factor) const {
        CashFlowStream out = *this;
        out.flows_ *= factor;
        return out;
    }

    CashFlowStream& operator+=(const CashFlowStream& other) {
        require_same_grid(grid_, other.grid_, "stream addition");
        require(paths() == other.paths(), ErrorCode::GridMismatch, "stream addition: path counts differ");
        flows_ += other.flows_;
        for (std::size_t i = 0; i < fixing_.size(); ++i) fixing_[i] = std::max(fixing_[i], other.fixing_[i]);
        if (active_ && other.active_) {
            *active_ = active_->cwiseMax(*other.active_);
        } else {
            active_.reset();
        }
        lambda_dependent_ = lambda_dependent_ || other.lambda_dependent_;
        if (!other.name_.empty()) name_ = name_.empty() ? other.name_ : name_ + "+" + other.name_;
        return *this;
    }

private:
    TimeGrid grid_;
    std::string name_;
    Eigen::MatrixXd flows_;
    std::vector<std::size_t> fixing_;
    std::optional<ActiveMask> active_;
    bool lambda_dependent_ = false;
};

inline CashFlowStream operator+(CashFlowStream a, const CashFlowStream& b) {
    a += b;
    return a;
}

} // namespace liquiforge
