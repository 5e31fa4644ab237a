#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liquiforge/core/error.hpp"
#include "liquiforge/sensitivity/tape.hpp"

namespace liquiforge {

struct RegressionBasis {
    int degree = 2;
    bool include_terminal_bond = false;

    std::string describe() const {
        std::string d = "1";
        for (int k = 1; k <= degree; ++k) d += k == 1 ? ",x" : ",x^" + std::to_string(k);
        if (include_terminal_bond) d += ",P(t_n)";
        return d;
    }
};

// Standardised monomials in the state plus an optional bond regressor.
struct BasisFunctions {
    int degree = 0;
    bool use_bond = false;
    double center = 0.0, scale = 1.0;
    double bond_center = 0.0, bond_scale = 1.0;

    int columns() const { return 1 + degree + (use_bond ? 1 : 0); }

    template <class Out>
    void row(double x, double bond, Out&& out) const {
        const double z = (x - center) / scale;
        double pw = 1.0;
        out(0) = 1.0;
        for (int k = 1; k <= degree; ++k) {
            pw *= z;
            out(k) = pw;
        }
        if (use_bond) out(degree + 1) = (bond - bond_center) / bond_scale;
    }
};

/// Least-squares fit of several targets on one time slice.
struct SliceFit {
    BasisFunctions basis;
    Eigen::MatrixXd beta;  // columns() x targets

    double value(double x, double bond, Eigen::Index target) const {
        Eigen::VectorXd r(basis.columns());
        basis.row(x, bond, [&](int k) -> double& { return r(k); });
        return r.dot(beta.col(target));
    }

    // Frozen-coefficient regression node: beta is a constant, only the state is differentiated.
    Var value(const Var& x, double bond, Eigen::Index target) const {
        const double z = (x.value - basis.center) / basis.scale;
        double v = beta(0, target), dv = 0.0, pw = 1.0;
        for (int k = 1; k <= basis.degree; ++k) {
            dv += static_cast<double>(k) * beta(k, target) * pw / basis.scale;
            pw *= z;
            v += beta(k, target) * pw;
        }
        if (basis.use_bond) v += beta(basis.degree + 1, target) * (bond - basis.bond_center) / basis.bond_scale;
        return x.tape->push(v, 1, x.id, dv, 0, 0.0);
    }
};

namespace detail {

inline void masked_moments(const Eigen::VectorXd& v, const std::vector<std::uint8_t>& mask, double& mean, double& sd) {
    double s = 0.0, n = 0.0;
    for (Eigen::Index p = 0; p < v.size(); ++p)
        if (mask[static_cast<std::size_t>(p)]) {
            s += v(p);
            n += 1.0;
        }
    mean = n > 0 ? s / n : 0.0;
    double q = 0.0;
    for (Eigen::Index p = 0; p < v.size(); ++p)
        if (mask[static_cast<std::size_t>(p)]) q += (v(p) - mean) * (v(p) - mean);
    sd = n > 1 ? std::sqrt(q / (n - 1.0)) : 0.0;
}

} // namespace detail

// Regress targets Y (paths x m) on the basis over masked paths. A regressor with zero spread
// is dropped so deterministic slices reduce to a regression on constants.
inline SliceFit fit_slice(const Eigen::VectorXd& x, const Eigen::VectorXd* bond, const Eigen::MatrixXd& Y,
                          const std::vector<std::uint8_t>& mask, const RegressionBasis& spec) {
    SliceFit fit;
    detail::masked_moments(x, mask, fit.basis.center, fit.basis.scale);
    fit.basis.degree = fit.basis.scale > 1e-12 * std::max(1.0, std::abs(fit.basis.center)) ? spec.degree : 0;
    if (fit.basis.degree == 0) fit.basis.scale = 1.0;
    if (spec.include_terminal_bond && bond) {
        detail::masked_moments(*bond, mask, fit.basis.bond_center, fit.basis.bond_scale);
        fit.basis.use_bond = fit.basis.bond_scale > 1e-12 * std::max(1.0, std::abs(fit.basis.bond_center));
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index p = 0; p < x.size(); ++p)
        if (mask[static_cast<std::size_t>(p)]) rows.push_back(p);
    const auto cols = fit.basis.columns();
    fit.beta = Eigen::MatrixXd::Zero(cols, Y.cols());
    if (rows.empty()) return fit;
    if (static_cast<Eigen::Index>(rows.size()) < cols)
        fail(ErrorCode::SingularRegression, "fewer active paths than basis functions; enlarge paths or shrink basis");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), cols);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(rows.size()), Y.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto p = rows[r];
        const auto rr = static_cast<Eigen::Index>(r);
        fit.basis.row(x(p), bond ? (*bond)(p) : 0.0, [&](int k) -> double& { return A(rr, k); });
        B.row(rr) = Y.row(p);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols)
        fail(ErrorCode::SingularRegression, "rank-deficient design matrix; enlarge paths or shrink basis");
    fit.beta = qr.solve(B);
    return fit;
}

} // namespace liquiforge
