#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/market/model.hpp"
#include "liquiforge/market/time_grid.hpp"

namespace liquiforge {

// Simulated paths: state and numeraire per (path, time); bonds come from the term structure
// on demand or, for finite-state markets, from an explicit table.
class ScenarioSet {
public:
    ScenarioSet(TimeGrid grid, std::uint64_t seed, std::shared_ptr<const TermStructure> model,
                NumeraireChoice numeraire, Eigen::MatrixXd state, Eigen::MatrixXd numeraire_values)
        : grid_(std::move(grid)), seed_(seed), model_(std::move(model)), numeraire_choice_(numeraire),
          state_(std::move(state)), numeraire_(std::move(numeraire_values)) {
        require(state_.rows() == numeraire_.rows() && state_.cols() == static_cast<Eigen::Index>(grid_.size()) &&
                    numeraire_.cols() == state_.cols(),
                ErrorCode::InvalidSpec, "scenario matrices do not match the grid");
    }

    // Finite-state market: bonds[i] is paths x grid.size() with P(t_j; t_i) in column j >= i.
    static ScenarioSet tabulated(TimeGrid grid, std::vector<Eigen::MatrixXd> bonds, Eigen::MatrixXd numeraire_values,
                                 NumeraireChoice numeraire, std::vector<double> weights) {
        const auto paths = numeraire_values.rows();
        require(bonds.size() == grid.size(), ErrorCode::InvalidSpec, "bond table needs one slice per time");
        require(static_cast<Eigen::Index>(weights.size()) == paths, ErrorCode::InvalidSpec, "one weight per scenario");
        Eigen::MatrixXd state = Eigen::MatrixXd::Zero(paths, static_cast<Eigen::Index>(grid.size()));
        ScenarioSet s(std::move(grid), 0, nullptr, numeraire, std::move(state), std::move(numeraire_values));
        s.bond_table_ = std::move(bonds);
        s.weights_ = std::move(weights);
        return s;
    }

    const TimeGrid& grid() const { return grid_; }
    std::size_t paths() const { return static_cast<std::size_t>(state_.rows()); }
    std::size_t times() const { return grid_.size(); }
    std::uint64_t seed() const { return seed_; }
    const TermStructure* model() const { return model_.get(); }
    const NumeraireChoice& numeraire_choice() const { return numeraire_choice_; }
    MeasureSpec measure() const { return {numeraire_choice_, CurveKind::FUNDING}; }

    double state(std::size_t p, std::size_t i) const { return state_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)); }
    double numeraire(std::size_t p, std::size_t i) const {
        return numeraire_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i));
    }
    const Eigen::MatrixXd& state_matrix() const { return state_; }
    const Eigen::MatrixXd& numeraire_matrix() const { return numeraire_; }

    bool has_weights() const { return weights_.has_value(); }
    const std::vector<double>& weights() const {
        if (!weights_) fail(ErrorCode::MissingInput, "scenario set carries no probability weights");
        return *weights_;
    }

    bool finite_state() const { return bond_table_.has_value(); }

    // Paths with equal group id at t_i share the same information; by default only t_0 is shared.
    std::size_t information_group(std::size_t p, std::size_t i) const {
        if (info_groups_) return (*info_groups_)[i][p];
        return i == 0 ? 0 : p;
    }
    void set_information_groups(std::vector<std::vector<std::size_t>> groups) {
        require(groups.size() == grid_.size(), ErrorCode::InvalidSpec, "one information partition per time");
        for (const auto& g : groups) require(g.size() == paths(), ErrorCode::InvalidSpec, "one group id per path");
        info_groups_ = std::move(groups);
    }

    double ois_bond(std::size_t p, std::size_t i, double T) const {
        const double t = grid_[i];
        if (T < t - TimeGrid::kTolerance) fail(ErrorCode::NegativeTimeOrder, "bond maturity before valuation time");
        if (bond_table_) {
            const auto j = grid_.index_of(T);
            return (*bond_table_)[i](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j));
        }
        return model_->ois_bond(t, T, state(p, i));
    }

    double funding_bond(std::size_t p, std::size_t i, double T) const {
        if (bond_table_) return ois_bond(p, i, T);
        return model_->funding_bond(grid_[i], T, state(p, i));
    }

    double bond(std::size_t p, std::size_t i, double T, CurveKind kind) const {
        return kind == CurveKind::OIS ? ois_bond(p, i, T) : funding_bond(p, i, T);
    }

    double initial_bond(double T, CurveKind kind = CurveKind::FUNDING) const { return bond(0, 0, T, kind); }

    double spread_integral(double t, double T) const { return (bond_table_ || !model_) ? 0.0 : model_->spread_integral(t, T); }

    // Value of the numeraire of measure m at (p, i) when derivable from this simulation.
    double numeraire_value(const MeasureSpec& m, std::size_t p, std::size_t i) const {
        if (m.numeraire.kind == NumeraireChoice::Kind::TERMINAL_BOND) {
            if (grid_[i] > m.numeraire.maturity + TimeGrid::kTolerance)
                fail(ErrorCode::MissingNumeraire, "terminal bond numeraire has matured");
            if (numeraire_choice_ == m.numeraire && m.curve_kind == CurveKind::FUNDING) return numeraire(p, i);
            return bond(p, i, m.numeraire.maturity, m.curve_kind);
        }
        if (numeraire_choice_.kind != NumeraireChoice::Kind::FUNDING_ACCOUNT)
            fail(ErrorCode::MissingNumeraire, "funding account is not simulated under a bond measure");
        const double n = numeraire(p, i);
        return m.curve_kind == CurveKind::FUNDING ? n : n * std::exp(-spread_integral(0.0, grid_[i]));
    }

    // Same paths observed on a coarser grid whose times are all present here.
    ScenarioSet restrict_to(const TimeGrid& coarse) const {
        require(coarse.is_subgrid_of(grid_), ErrorCode::GridMismatch, "coarse grid is not contained in the simulation grid");
        const auto n = static_cast<Eigen::Index>(coarse.size());
        Eigen::MatrixXd st(state_.rows(), n), nu(numeraire_.rows(), n);
        std::vector<std::size_t> idx(coarse.size());
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            idx[k] = grid_.index_of(coarse[k]);
            st.col(static_cast<Eigen::Index>(k)) = state_.col(static_cast<Eigen::Index>(idx[k]));
            nu.col(static_cast<Eigen::Index>(k)) = numeraire_.col(static_cast<Eigen::Index>(idx[k]));
        }
        ScenarioSet out(coarse, seed_, model_, numeraire_choice_, std::move(st), std::move(nu));
        out.weights_ = weights_;
        if (info_groups_) {
            std::vector<std::vector<std::size_t>> g(coarse.size());
            for (std::size_t k = 0; k < coarse.size(); ++k) g[k] = (*info_groups_)[idx[k]];
            out.info_groups_ = std::move(g);
        }
        if (bond_table_) {
            std::vector<Eigen::MatrixXd> table(coarse.size());
            for (std::size_t k = 0; k < coarse.size(); ++k) {
                table[k].resize(state_.rows(), n);
                for (std::size_t j = 0; j < coarse.size(); ++j)
                    table[k].col(static_cast<Eigen::Index>(j)) =
                        (*bond_table_)[idx[k]].col(static_cast<Eigen::Index>(idx[j]));
            }
            out.bond_table_ = std::move(table);
        }
        return out;
    }

private:
    TimeGrid grid_;
    std::uint64_t seed_;
    std::shared_ptr<const TermStructure> model_;
    NumeraireChoice numeraire_choice_;
    Eigen::MatrixXd state_;
    Eigen::MatrixXd numeraire_;
    std::optional<std::vector<Eigen::MatrixXd>> bond_table_;
    std::optional<std::vector<double>> weights_;
    std::optional<std::vector<std::vector<std::size_t>>> info_groups_;
};

// (N2(t)/N1(t)) (N1(0)/N2(0)) per path, from measure `from` to measure `to`.
inline std::vector<double> numeraire_change_weight(const ScenarioSet& s, const MeasureSpec& from, const MeasureSpec& to,
                                                   double t) {
    const auto i = s.grid().index_of(t);
    std::vector<double> w(s.paths(), 1.0);
    if (from == to) return w;
    for (std::size_t p = 0; p < s.paths(); ++p) {
        const double n1t = s.numeraire_value(from, p, i);
        const double n2t = s.numeraire_value(to, p, i);
        const double n10 = s.numeraire_value(from, p, 0);
        const double n20 = s.numeraire_value(to, p, 0);
        w[p] = (n2t * n10) / (n1t * n20);
    }
    return w;
}

} // namespace liquiforge
