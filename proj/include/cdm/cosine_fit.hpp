#pragma once

#include "cdm/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace cdm {

/// col(row) = amplitude * cos(2*pi*row/period + phase) + offset
template <typename Scalar>
struct CosineFit {
    Scalar amplitude = 0;
    Scalar period = 1;
    Scalar phase = 0;  // (-pi, pi]
    Scalar offset = 0;
    Scalar rms_residual = 0;
    int iterations = 0;
    /// Cost after initialisation and after every accepted step.
    std::vector<Scalar> cost_trace;

    Scalar operator()(Scalar row) const {
        return amplitude * std::cos(2 * static_cast<Scalar>(kPi) * row / period + phase) + offset;
    }
};

struct CosineFitOptions {
    double noise_floor = 1.0;  // amplitudes below this are "no oscillation"
    int max_iterations = 200;
    double relative_tolerance = 1e-10;
};

namespace detail {

template <typename Scalar>
Scalar wrap_phase(Scalar p) {
    const Scalar two_pi = 2 * static_cast<Scalar>(kPi);
    p = std::fmod(p, two_pi);
    if (p <= -static_cast<Scalar>(kPi)) p += two_pi;
    if (p > static_cast<Scalar>(kPi)) p -= two_pi;
    return p;
}

/// Lag of the dominant autocorrelation peak of mean-removed samples,
/// resampled on a unit grid. Returns 0 when no peak exists inside two thirds
/// of the span.
template <typename Scalar>
Scalar dominant_lag(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& t, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) {
    const Scalar t0 = t.minCoeff();
    const Scalar t1 = t.maxCoeff();
    const int m = static_cast<int>(std::floor(t1 - t0)) + 1;
    if (m < 4) return 0;

    // Linear interpolation onto t0, t0+1, ...; `t` is sorted.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> g(m);
    Eigen::Index j = 0;
    for (int i = 0; i < m; ++i) {
        const Scalar ti = t0 + i;
        while (j + 1 < t.size() && t(j + 1) < ti) ++j;
        if (j + 1 >= t.size()) {
            g(i) = y(t.size() - 1);
        } else {
            const Scalar span = t(j + 1) - t(j);
            const Scalar w = span > 0 ? std::clamp((ti - t(j)) / span, Scalar(0), Scalar(1)) : Scalar(0);
            g(i) = (1 - w) * y(j) + w * y(j + 1);
        }
    }
    g.array() -= g.mean();
    const Scalar energy = g.squaredNorm();
    if (!(energy > 0)) return 0;

    const int max_lag = (2 * m) / 3;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> acf(max_lag + 2);
    for (int k = 0; k <= max_lag + 1 && k < m; ++k) acf(k) = g.head(m - k).dot(g.tail(m - k)) / energy;

    int k0 = 1;
    while (k0 <= max_lag && acf(k0) >= 0) ++k0;
    if (k0 > max_lag) return 0;
    int best = k0;
    for (int k = k0; k <= max_lag; ++k) {
        if (acf(k) > acf(best)) best = k;
    }
    if (best >= max_lag || acf(best) <= 0) return 0;
    // Parabolic refinement of the peak.
    const Scalar a = acf(best - 1), b = acf(best), c = acf(best + 1);
    const Scalar denom = a - 2 * b + c;
    const Scalar shift = denom < 0 ? std::clamp((a - c) / (2 * denom), Scalar(-0.5), Scalar(0.5)) : Scalar(0);
    return static_cast<Scalar>(best) + shift;
}

}  // namespace detail

/// Levenberg-Marquardt fit of a single cosine to (row, col) samples.
///
/// Start values: offset from the sample mean, amplitude from half the range,
/// period from the dominant autocorrelation lag, phase from the first
/// sample's residual (the sign branch with the lower cost). Stops when an
/// accepted step changes the cost by less than `relative_tolerance`.
template <typename DerivedR, typename DerivedC>
CosineFit<typename DerivedR::Scalar> fit_cosine(const Eigen::MatrixBase<DerivedR>& rows,
                                                const Eigen::MatrixBase<DerivedC>& cols,
                                                const CosineFitOptions& options = {}) {
    using Scalar = typename DerivedR::Scalar;
    using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
    using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
    const Scalar two_pi = 2 * static_cast<Scalar>(kPi);

    const Eigen::Index n = rows.size();
    if (n != cols.size()) throw Error("cosine fit: row and column sample counts differ");
    if (n < 8) throw InsufficientData("insufficient periods: need at least 8 samples");

    // Sort by row so the autocorrelation grid is monotone.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows(a) < rows(b); });
    VecX r(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(i) = static_cast<Scalar>(rows(order[static_cast<std::size_t>(i)]));
        y(i) = static_cast<Scalar>(cols(order[static_cast<std::size_t>(i)]));
    }

    const Scalar offset0 = y.mean();
    const Scalar amp0 = (y.maxCoeff() - y.minCoeff()) / 2;
    if (amp0 < options.noise_floor) throw InsufficientData("no oscillation: amplitude below noise floor");

    const Scalar period0 = detail::dominant_lag<Scalar>(r, y);
    const Scalar span = r(n - 1) - r(0);
    if (!(period0 > 0) || span < static_cast<Scalar>(1.5) * period0) {
        throw InsufficientData("insufficient periods: samples do not span 1.5 periods");
    }

    // Work in rows centred on the sample mean to decouple period and phase.
    const Scalar rc = r.mean();
    const VecX t = r.array() - rc;

    auto residuals = [&](const Vec4& x) -> VecX {
        return (x(0) * (two_pi * t.array() / x(1) + x(2)).cos() + x(3) - y.array()).matrix();
    };
    auto cost_of = [&](const Vec4& x) { return residuals(x).squaredNorm() / 2; };

    const Scalar c0 = std::clamp((y(0) - offset0) / amp0, Scalar(-1), Scalar(1));
    const Scalar base = std::acos(c0) - two_pi * t(0) / period0;
    const Scalar alt = -std::acos(c0) - two_pi * t(0) / period0;
    Vec4 x(amp0, period0, base, offset0);
    Vec4 x_alt(amp0, period0, alt, offset0);
    if (cost_of(x_alt) < cost_of(x)) x = x_alt;

    CosineFit<Scalar> fit;
    Scalar cost = cost_of(x);
    fit.cost_trace.push_back(cost);
    Scalar lambda = static_cast<Scalar>(1e-3);
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::numeric_limits<Scalar>::epsilon() *
                        (1 + y.squaredNorm());
    bool converged = cost <= tiny;
    int it = 0;
    for (; it < options.max_iterations && !converged; ++it) {
        const VecX res = residuals(x);
        const auto arg = (two_pi * t.array() / x(1) + x(2)).eval();
        Eigen::Matrix<Scalar, Eigen::Dynamic, 4> J(n, 4);
        J.col(0) = arg.cos().matrix();
        J.col(1) = (x(0) * arg.sin() * two_pi * t.array() / (x(1) * x(1))).matrix();
        J.col(2) = (-x(0) * arg.sin()).matrix();
        J.col(3).setOnes();
        const Mat4 JtJ = J.transpose() * J;
        const Vec4 g = J.transpose() * res;

        bool accepted = false;
        while (lambda < static_cast<Scalar>(1e16)) {
            Mat4 H = JtJ;
            H.diagonal() += lambda * JtJ.diagonal().cwiseMax(static_cast<Scalar>(1e-12));
            const Vec4 step = H.ldlt().solve(-g);
            Vec4 trial = x + step;
            if (trial(1) <= 0) {
                lambda *= 10;
                continue;
            }
            const Scalar trial_cost = cost_of(trial);
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const Scalar drop = cost - trial_cost;
                x = trial;
                cost = trial_cost;
                fit.cost_trace.push_back(cost);
                lambda = std::max(lambda / 10, static_cast<Scalar>(1e-12));
                accepted = true;
                if (drop <= options.relative_tolerance * (cost + drop) || cost <= tiny) converged = true;
                break;
            }
            lambda *= 10;
        }
        // No downhill step at any damping: the current point is a minimum to
        // working precision.
        if (!accepted) converged = true;
    }
    if (!converged || !x.allFinite()) {
        std::ostringstream msg;
        msg << "cosine fit failed after " << it << " iterations, rms residual "
            << std::sqrt(2 * cost / static_cast<Scalar>(n));
        throw Error(msg.str());
    }

    if (x(0) < 0) {
        x(0) = -x(0);
        x(2) += static_cast<Scalar>(kPi);
    }
    fit.amplitude = x(0);
    fit.period = x(1);
    fit.phase = detail::wrap_phase<Scalar>(x(2) - two_pi * rc / x(1));
    fit.offset = x(3);
    fit.rms_residual = std::sqrt(2 * cost / static_cast<Scalar>(n));
    fit.iterations = it;
    if (fit.amplitude < options.noise_floor) throw InsufficientData("no oscillation: fitted amplitude below noise floor");
    return fit;
}

/// Analytic extrema of a fitted cosine inside [row_begin, row_end].
/// Crests are where the cosine term is +1 (largest column), troughs where it
/// is -1.
template <typename Scalar>
struct Extrema {
    std::vector<Scalar> crests;
    std::vector<Scalar> troughs;
};

template <typename Scalar>
Extrema<Scalar> extrema_rows(const CosineFit<Scalar>& fit, Scalar row_begin, Scalar row_end) {
    const Scalar two_pi = 2 * static_cast<Scalar>(kPi);
    Extrema<Scalar> out;
    // Row of the k-th half-turn: (k*pi - phase) * P / (2*pi).
    auto row_at = [&](long k) { return (static_cast<Scalar>(k) * static_cast<Scalar>(kPi) - fit.phase) * fit.period / two_pi; };
    long k = static_cast<long>(std::floor((row_begin * two_pi / fit.period + fit.phase) / static_cast<Scalar>(kPi))) - 1;
    for (;; ++k) {
        const Scalar row = row_at(k);
        if (row > row_end + static_cast<Scalar>(1e-9)) break;
        if (row < row_begin - static_cast<Scalar>(1e-9)) continue;
        const Scalar clean = std::abs(row) < static_cast<Scalar>(1e-9) ? Scalar(0) : row;
        ((k % 2 == 0) ? out.crests : out.troughs).push_back(clean);
    }
    return out;
}

}  // namespace cdm
