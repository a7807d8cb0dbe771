#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgtidf/detail/hash.hpp"
#include "hgtidf/error.hpp"
#include "hgtidf/scoring.hpp"
#include "hgtidf/synthetic.hpp"
#include "hgtidf/termstats.hpp"

namespace hgtidf {

/// Constants of the continuous surrogates: f(p, q) = -beta p ln q - alpha p
/// and g(p, q) = n KL(p || q), with lambda the zoom factor toward the
/// origin of the unit square.
struct SurrogateParams {
    double beta = 1.0;
    double alpha = 1.0;
    double lambda = 1.0;
    Count n = 1;

    void validate() const
    {
        if (!(beta > 0.0)) {
            throw DomainError("surrogate params: requires beta > 0");
        }
        if (!(lambda > 0.0 && lambda <= 1.0)) {
            throw DomainError("surrogate params: requires 0 < lambda <= 1");
        }
        if (n < 1) {
            throw DomainError("surrogate params: requires n >= 1");
        }
    }
};

namespace detail {

inline void require_open_unit(double v, std::string_view op, std::string_view name)
{
    if (!(v > 0.0 && v < 1.0)) {
        throw DomainError(std::string(op) + ": requires 0 < " + std::string(name) + " < 1 (got " +
                          std::to_string(v) + ")");
    }
}

inline void require_below_diagonal(double p, double q, std::string_view op)
{
    require_open_unit(p, op, "p");
    require_open_unit(q, op, "q");
    if (!(q < p)) {
        throw DomainError(std::string(op) + ": requires q < p (got p=" + std::to_string(p) +
                          ", q=" + std::to_string(q) + ")");
    }
}

}  // namespace detail

/// Bernoulli KL divergence KL(p || q) for 0 <= p <= 1, 0 < q < 1, with the
/// limits 0 ln 0 = 0 at p in {0, 1}.
inline double bernoulli_kl(double p, double q)
{
    if (!(p >= 0.0 && p <= 1.0) || !(q > 0.0 && q < 1.0)) {
        throw DomainError("bernoulli_kl: requires 0 <= p <= 1 and 0 < q < 1");
    }
    double kl = 0.0;
    if (p > 0.0) {
        kl += p * std::log(p / q);
    }
    if (p < 1.0) {
        kl += (1.0 - p) * std::log1p((q - p) / (1.0 - q));
    }
    return std::max(0.0, kl);
}

inline double f_surrogate(double p, double q, SurrogateParams const& params)
{
    params.validate();
    detail::require_open_unit(p, "f_surrogate", "p");
    detail::require_open_unit(q, "f_surrogate", "q");
    return -params.beta * p * std::log(q) - params.alpha * p;
}

/// n KL(p || q) on the half square below the diagonal.
inline double g_surrogate(double p, double q, SurrogateParams const& params)
{
    params.validate();
    detail::require_below_diagonal(p, q, "g_surrogate");
    return static_cast<double>(params.n) * bernoulli_kl(p, q);
}

/// g written out term by term: -np ln q + np ln p - n(1-p) ln(1-q) + n(1-p) ln(1-p).
inline double g_surrogate_expanded(double p, double q, SurrogateParams const& params)
{
    params.validate();
    detail::require_below_diagonal(p, q, "g_surrogate_expanded");
    auto const n = static_cast<double>(params.n);
    return -n * p * std::log(q) + n * p * std::log(p) - n * (1.0 - p) * std::log1p(-q) +
           n * (1.0 - p) * std::log1p(-p);
}

struct ChvatalResult {
    double fisher;
    double bound;
    bool holds;
};

/// Compares the Fisher score with its lower bound n KL(k/n || K/N); the
/// tail upper bound exp(-n KL) requires K/N < k/n. At k = n the bound is
/// the limit n ln(1/q).
inline ChvatalResult chvatal_check(Count k, Count n, Count successes, Count total)
{
    if (n == 0 || total == 0) {
        throw DomainError("chvatal_check: requires n >= 1 and total >= 1");
    }
    // q < p  <=>  successes * n < k * total, compared exactly.
    if (!(static_cast<unsigned __int128>(successes) * n < static_cast<unsigned __int128>(k) * total)) {
        throw DomainError("chvatal_check: requires q < p, i.e. successes/total < k/n");
    }
    if (successes == 0) {
        throw DomainError("chvatal_check: requires successes >= 1");
    }
    double const fisher = fisher_score(k, n, successes, total);
    double const p = static_cast<double>(k) / static_cast<double>(n);
    double const q = static_cast<double>(successes) / static_cast<double>(total);
    double const bound = static_cast<double>(n) * (k == n ? -std::log(q) : bernoulli_kl(p, q));
    return {fisher, bound, fisher >= bound - 1e-12};
}

/// Outcome of checking the bound over many (k, n, successes, total) tuples.
struct ChvatalSweep {
    std::uint64_t tuples = 0;
    std::uint64_t violations = 0;
    double min_gap = std::numeric_limits<double>::infinity();  ///< min of fisher - bound
    double max_gap = 0.0;
    double mean_gap = 0.0;
    double worst_relative_gap = std::numeric_limits<double>::infinity();  ///< min of (fisher - bound) / fisher
};

namespace detail {

inline void record(ChvatalSweep& sweep, ChvatalResult const& r)
{
    auto const gap = r.fisher - r.bound;
    sweep.tuples += 1;
    sweep.violations += r.holds ? 0 : 1;
    sweep.min_gap = std::min(sweep.min_gap, gap);
    sweep.max_gap = std::max(sweep.max_gap, gap);
    sweep.mean_gap += (gap - sweep.mean_gap) / static_cast<double>(sweep.tuples);
    if (r.fisher > 0.0) {
        sweep.worst_relative_gap = std::min(sweep.worst_relative_gap, gap / r.fisher);
    }
}

}  // namespace detail

/// Every admissible tuple with 1 <= total <= max_total and q < p.
inline ChvatalSweep chvatal_sweep_exhaustive(Count max_total)
{
    ChvatalSweep sweep;
    for (Count total = 1; total <= max_total; ++total) {
        for (Count successes = 1; successes < total; ++successes) {
            for (Count n = 1; n <= total; ++n) {
                auto const top = std::min(n, successes);
                for (Count k = 1; k <= top; ++k) {
                    if (successes * n < k * total) {
                        detail::record(sweep, chvatal_check(k, n, successes, total));
                    }
                }
            }
        }
    }
    return sweep;
}

/// `count` random admissible tuples with total drawn up to max_total.
inline ChvatalSweep chvatal_sweep_random(std::size_t count, Count max_total, std::uint64_t seed)
{
    if (max_total < 2) {
        throw DomainError("chvatal_sweep_random: requires max_total >= 2");
    }
    detail::Rng rng(seed);
    ChvatalSweep sweep;
    while (sweep.tuples < count) {
        Count const total = rng.between(2, max_total);
        Count const successes = rng.between(1, total - 1);
        Count const n = rng.between(1, total);
        Count const lowest = n > total - successes ? n - (total - successes) : 0;
        Count const highest = std::min(n, successes);
        // Smallest k with successes * n < k * total.
        Count const k_min = std::max<Count>(lowest, successes * n / total + 1);
        if (k_min > highest || k_min == 0) {
            continue;
        }
        Count const k = rng.between(k_min, highest);
        detail::record(sweep, chvatal_check(k, n, successes, total));
    }
    return sweep;
}

/// f(lambda p, lambda q).
inline double f_scaled(double p, double q, SurrogateParams const& params)
{
    params.validate();
    return f_surrogate(params.lambda * p, params.lambda * q, params);
}

/// f(lambda p, lambda q) - [lambda f(p, q) - lambda ln(lambda) beta p];
/// zero up to rounding for every admissible input.
inline double f_scaled_identity_residual(double p, double q, SurrogateParams const& params)
{
    double const lhs = f_scaled(p, q, params);
    double const rhs =
        params.lambda * f_surrogate(p, q, params) - params.lambda * std::log(params.lambda) * params.beta * p;
    return lhs - rhs;
}

enum class ScaledMode {
    exact,             ///< g(lambda p, lambda q)
    taylor,            ///< the published first-order closed form, signs as printed
    taylor_corrected,  ///< first-order expansion of ln(1 - lambda p) and ln(1 - lambda q)
};

/// g at (lambda p, lambda q). `taylor` is n[lambda p ln q + lambda p ln p
/// + lambda^2 p (q + 1) + lambda (q - p)] exactly as published.
/// `taylor_corrected` replaces ln(1 - lambda x) by -lambda x and gives
/// n[lambda p ln(p/q) + lambda (q - p) + lambda^2 p (p - q)]; the two differ
/// in the sign of the ln q term and in the lambda^2 term.
inline double g_scaled(double p, double q, SurrogateParams const& params, ScaledMode mode = ScaledMode::exact)
{
    params.validate();
    auto const lam = params.lambda;
    detail::require_below_diagonal(lam * p, lam * q, "g_scaled");
    detail::require_open_unit(p, "g_scaled", "p");
    auto const n = static_cast<double>(params.n);
    switch (mode) {
    case ScaledMode::exact: return g_surrogate(lam * p, lam * q, params);
    case ScaledMode::taylor:
        return n * (lam * p * std::log(q) + lam * p * std::log(p) + lam * lam * p * (q + 1.0) + lam * (q - p));
    case ScaledMode::taylor_corrected:
        return n * (lam * p * std::log(p / q) + lam * (q - p) + lam * lam * p * (p - q));
    }
    return 0.0;
}

/// Polar coordinates around O = (lambda, 0): the scaled point
/// (lambda p, lambda q) = (lambda - eps cos theta, eps sin theta).
struct PolarPoint {
    double epsilon;
    double theta;
};

struct ScaledPoint {
    double x;  ///< lambda p
    double y;  ///< lambda q
};

inline ScaledPoint polar_to_scaled(PolarPoint pt, SurrogateParams const& params)
{
    params.validate();
    if (!(pt.epsilon > 0.0)) {
        throw DomainError("polar point: requires epsilon > 0");
    }
    if (!(pt.theta > 0.0 && pt.theta < std::numbers::pi / 2)) {
        throw DomainError("polar point: requires 0 < theta < pi/2");
    }
    ScaledPoint const s{params.lambda - pt.epsilon * std::cos(pt.theta), pt.epsilon * std::sin(pt.theta)};
    if (!(s.x > 0.0 && s.y < s.x)) {
        throw DomainError("polar point: mapped point leaves the domain 0 < q < p < 1");
    }
    return s;
}

enum class PolarMode {
    exact_map,      ///< the surrogate evaluated at the mapped point
    published,      ///< the published polar expression, verbatim
};

/// f(lambda p, lambda q) in polar form. The published expression ends in
/// "- ln lambda" where direct substitution gives "- alpha lambda"; both are
/// available for comparison.
inline double f_polar(PolarPoint pt, SurrogateParams const& params, PolarMode mode = PolarMode::exact_map)
{
    auto const s = polar_to_scaled(pt, params);
    if (mode == PolarMode::exact_map) {
        return f_surrogate(s.x, s.y, params);
    }
    double const c = std::cos(pt.theta);
    double const log_es = std::log(pt.epsilon * std::sin(pt.theta));
    double const lam = params.lambda;
    double const beta = params.beta;
    return -lam * beta * log_es + beta * pt.epsilon * c * log_es + pt.epsilon * c - std::log(lam);
}

/// g(lambda p, lambda q) in polar form; `published` is the published
/// first-order expansion, term for term.
inline double g_polar(PolarPoint pt, SurrogateParams const& params, PolarMode mode = PolarMode::exact_map)
{
    auto const s = polar_to_scaled(pt, params);
    if (mode == PolarMode::exact_map) {
        return g_surrogate(s.x, s.y, params);
    }
    double const n = static_cast<double>(params.n);
    double const lam = params.lambda;
    double const eps = pt.epsilon;
    double const c = std::cos(pt.theta);
    double const sn = std::sin(pt.theta);
    double const log_es = std::log(eps * sn);
    double const w = 1.0 - lam + eps * c;
    return -n * lam * log_es + n * eps * c * log_es + n * eps * (1.0 - std::log(lam) * c - c - lam) +
           n * eps * eps * (c * c / lam + c * sn) + n * w * std::log(w) + n * lam * std::log(lam);
}

// ---- idf linearity -------------------------------------------------------

struct RegressionFit {
    double beta_hat;
    double alpha_hat;
    double r_squared;
    std::size_t n_points;
};

struct ScatterPoint {
    double x;
    double y;
};

/// Ordinary least squares y = alpha + beta x on centered sums.
inline RegressionFit fit_ols(std::span<ScatterPoint const> points)
{
    if (points.size() < 2) {
        throw DomainError("fit_ols: requires at least 2 points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (auto const& pt : points) {
        mx += pt.x;
        my += pt.y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (auto const& pt : points) {
        sxx += (pt.x - mx) * (pt.x - mx);
        sxy += (pt.x - mx) * (pt.y - my);
        syy += (pt.y - my) * (pt.y - my);
    }
    if (!(sxx > 0.0)) {
        throw DomainError("fit_ols: x has zero variance");
    }
    double const slope = sxy / sxx;
    double const intercept = my - slope * mx;
    double ss_res = 0.0;
    for (auto const& pt : points) {
        double const r = pt.y - (intercept + slope * pt.x);
        ss_res += r * r;
    }
    double r2 = 1.0;
    if (syy > 0.0) {
        r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    } else if (ss_res > 0.0) {
        r2 = 0.0;
    }
    return {slope, intercept, r2, points.size()};
}

/// (x, y) = (-ln(total_freq / total_tokens), -ln(K / N)) for every term with
/// K >= min_doc_freq.
inline std::vector<ScatterPoint> idf_scatter(TermDocStats const& stats, Count min_doc_freq = 1)
{
    std::vector<ScatterPoint> points;
    auto const N = static_cast<double>(stats.num_docs());
    auto const tokens = static_cast<double>(stats.total_tokens());
    for (std::uint32_t i = 0; i < stats.num_terms(); ++i) {
        TermId const t{i};
        if (stats.doc_freq(t) < min_doc_freq) {
            continue;
        }
        points.push_back({std::log(tokens / static_cast<double>(stats.total_freq(t))),
                          std::log(N / static_cast<double>(stats.doc_freq(t)))});
    }
    return points;
}

inline RegressionFit fit_idf_linearity(TermDocStats const& stats, Count min_doc_freq = 1)
{
    auto const points = idf_scatter(stats, min_doc_freq);
    return fit_ols(points);
}

// ---- contour grids ---------------------------------------------------------

enum class GridFunction { f, g, f_scaled, g_scaled };

inline GridFunction parse_grid_function(std::string_view name)
{
    if (name == "f") {
        return GridFunction::f;
    }
    if (name == "g") {
        return GridFunction::g;
    }
    if (name == "f_scaled") {
        return GridFunction::f_scaled;
    }
    if (name == "g_scaled") {
        return GridFunction::g_scaled;
    }
    throw Error("unknown grid function \"" + std::string(name) + "\"");
}

struct GridPoint {
    double p;
    double q;
    double value;
};

/// Values on the interior lattice p, q in {1, ..., r} / (r + 1), restricted
/// to q < p for the g variants. Rows are ordered by p, then q.
inline std::vector<GridPoint> emit_contour_grid(SurrogateParams const& params, GridFunction which,
                                                std::size_t resolution)
{
    if (resolution < 2) {
        throw DomainError("emit_contour_grid: requires resolution >= 2");
    }
    params.validate();
    std::vector<GridPoint> grid;
    double const step = 1.0 / static_cast<double>(resolution + 1);
    for (std::size_t i = 1; i <= resolution; ++i) {
        double const p = static_cast<double>(i) * step;
        for (std::size_t j = 1; j <= resolution; ++j) {
            double const q = static_cast<double>(j) * step;
            bool const below = j < i;
            switch (which) {
            case GridFunction::f: grid.push_back({p, q, f_surrogate(p, q, params)}); break;
            case GridFunction::f_scaled: grid.push_back({p, q, f_scaled(p, q, params)}); break;
            case GridFunction::g:
                if (below) {
                    grid.push_back({p, q, g_surrogate(p, q, params)});
                }
                break;
            case GridFunction::g_scaled:
                if (below) {
                    grid.push_back({p, q, g_scaled(p, q, params)});
                }
                break;
            }
        }
    }
    return grid;
}

inline void write_grid_csv(std::ostream& out, std::span<GridPoint const> grid)
{
    out << "p,q,value\n";
    char buffer[96];
    for (auto const& g : grid) {
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g,%.17g\n", g.p, g.q, g.value);
        out << buffer;
    }
}

inline void write_scatter_csv(std::ostream& out, std::span<ScatterPoint const> points)
{
    out << "x,y\n";
    char buffer[80];
    for (auto const& pt : points) {
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g\n", pt.x, pt.y);
        out << buffer;
    }
}

}  // namespace hgtidf
