#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hgtidf/surrogate.hpp"
#include "oracles.hpp"

using hgtidf::SurrogateParams;

TEST(FSurrogate, FrozenValues)
{
    SurrogateParams const unit{1.0, 1.0, 1.0, 1};
    EXPECT_NEAR(hgtidf::f_surrogate(0.3, std::exp(-1.0), unit), 0.0, 1e-15);
    SurrogateParams const fitted{2.47, 1.0, 1.0, 1};
    EXPECT_NEAR(hgtidf::f_surrogate(0.5, 0.1, fitted), 2.34369, 1e-5);
    EXPECT_GT(hgtidf::f_surrogate(0.5, 0.05, fitted), hgtidf::f_surrogate(0.5, 0.1, fitted));
    EXPECT_THROW(hgtidf::f_surrogate(0.0, 0.1, fitted), hgtidf::DomainError);
    EXPECT_THROW(hgtidf::f_surrogate(0.5, 1.0, fitted), hgtidf::DomainError);
}

TEST(GSurrogate, FrozenValues)
{
    SurrogateParams const p{1.0, 1.0, 1.0, 100};
    EXPECT_NEAR(hgtidf::g_surrogate(0.5, 0.1, p), 51.0826, 1e-4);
    EXPECT_NEAR(hgtidf::g_surrogate(0.5, 0.1, p), 100 * (0.5 * std::log(5.0) + 0.5 * std::log(0.5 / 0.9)), 1e-12);
    EXPECT_THROW(hgtidf::g_surrogate(0.1, 0.5, p), hgtidf::DomainError);
    EXPECT_THROW(hgtidf::g_surrogate(0.3, 0.3, p), hgtidf::DomainError);
    // Shrinking gap toward the diagonal.
    double prev = hgtidf::g_surrogate(0.5, 0.4, p);
    for (double gap : {1e-2, 1e-3, 1e-4, 1e-6}) {
        double const v = hgtidf::g_surrogate(0.5, 0.5 - gap, p);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, 1e-8);
}

TEST(GSurrogateProperty, EqualsScaledKlAndPrintedForm)
{
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 10000; ++i) {
        double p = u(rng);
        double q = u(rng);
        if (q >= p) {
            std::swap(p, q);
        }
        if (q == p) {
            continue;
        }
        SurrogateParams const params{1.0, 1.0, 1.0, 1 + rng() % 1000};
        double const g = hgtidf::g_surrogate(p, q, params);
        double const n = static_cast<double>(params.n);
        EXPECT_GE(g, 0.0);
        EXPECT_NEAR(g, n * oracle::kl(p, q), 1e-10 * std::max(1.0, g));
        EXPECT_NEAR(g, hgtidf::g_surrogate_expanded(p, q, params), 1e-9 * std::max(1.0, g));
    }
}

TEST(Chvatal, FrozenValues)
{
    auto const r = hgtidf::chvatal_check(3, 5, 4, 10);
    EXPECT_NEAR(r.fisher, 1.33977, 1e-5);
    EXPECT_NEAR(r.bound, 5 * oracle::kl(0.6, 0.4), 1e-12);
    EXPECT_NEAR(r.bound, 0.405465, 1e-6);
    EXPECT_TRUE(r.holds);

    auto const edge = hgtidf::chvatal_check(4, 4, 5, 20);
    EXPECT_NEAR(edge.bound, 4 * std::log(4.0), 1e-12);
    EXPECT_TRUE(edge.holds);

    EXPECT_THROW(hgtidf::chvatal_check(2, 5, 4, 10), hgtidf::DomainError);  // q = p
}

TEST(Chvatal, ExhaustiveSmallSweep)
{
    auto const sweep = hgtidf::chvatal_sweep_exhaustive(20);
    EXPECT_GT(sweep.tuples, 1000U);
    EXPECT_EQ(sweep.violations, 0U);
    EXPECT_GE(sweep.min_gap, -1e-12);
}

TEST(Chvatal, RandomLargeSweep)
{
    auto const sweep = hgtidf::chvatal_sweep_random(500, 1'000'000, 3);
    EXPECT_EQ(sweep.tuples, 500U);
    EXPECT_EQ(sweep.violations, 0U);
}

TEST(FScaled, IdentityAndUnitLambda)
{
    SurrogateParams const p{2.47, 1.0, 0.01, 1};
    EXPECT_NEAR(hgtidf::f_scaled_identity_residual(0.5, 0.1, p), 0.0, 1e-15);
    SurrogateParams const unit{2.47, 1.0, 1.0, 1};
    EXPECT_EQ(hgtidf::f_scaled(0.5, 0.1, unit), hgtidf::f_surrogate(0.5, 0.1, unit));
}

TEST(FScaledProperty, IdentityResidualIsRoundoff)
{
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(1e-4, 1.0 - 1e-4);
    for (int i = 0; i < 10000; ++i) {
        SurrogateParams const p{0.1 + 5 * u(rng), 1.0, u(rng), 1};
        EXPECT_LE(std::abs(hgtidf::f_scaled_identity_residual(u(rng), u(rng), p)), 1e-12);
    }
}

TEST(GScaled, TaylorModes)
{
    SurrogateParams const p{1.0, 1.0, 0.01, 100};
    double const exact = hgtidf::g_scaled(0.5, 0.1, p, hgtidf::ScaledMode::exact);
    EXPECT_NEAR(exact, hgtidf::g_surrogate(0.005, 0.001, p), 1e-12);
    double const corrected = hgtidf::g_scaled(0.5, 0.1, p, hgtidf::ScaledMode::taylor_corrected);
    EXPECT_LE(std::abs(exact - corrected) / exact, 0.05);
    // The published form, taken verbatim, has the wrong sign on ln q.
    double const printed = hgtidf::g_scaled(0.5, 0.1, p, hgtidf::ScaledMode::taylor);
    double const by_hand = 100 * (0.005 * std::log(0.1) + 0.005 * std::log(0.5) + 1e-4 * 0.5 * 1.1 + 0.01 * (0.1 - 0.5));
    EXPECT_NEAR(printed, by_hand, 1e-12);
    EXPECT_LT(printed, 0.0);
}

TEST(GScaledProperty, CorrectedGapShrinksWithLambda)
{
    for (int pi = 2; pi <= 9; ++pi) {
        double const p = pi / 10.0;
        for (int qi = 1; qi / 100.0 <= p / 2 + 1e-12; ++qi) {
            double const q = qi / 100.0;
            double prev = INFINITY;
            for (double lam : {0.1, 0.01, 0.001}) {
                SurrogateParams const params{1.0, 1.0, lam, 100};
                double const exact = hgtidf::g_scaled(p, q, params);
                double const gap =
                    std::abs(exact - hgtidf::g_scaled(p, q, params, hgtidf::ScaledMode::taylor_corrected)) / exact;
                EXPECT_LT(gap, prev) << p << ' ' << q << ' ' << lam;
                prev = gap;
            }
        }
    }
}

TEST(Polar, ExactMapIsChangeOfVariables)
{
    SurrogateParams const params{2.47, 1.0, 0.01, 100};
    hgtidf::PolarPoint const pt{1e-4, std::numbers::pi / 4};
    auto const mapped = hgtidf::polar_to_scaled(pt, params);
    EXPECT_DOUBLE_EQ(mapped.x, params.lambda - pt.epsilon * std::cos(pt.theta));
    EXPECT_DOUBLE_EQ(mapped.y, pt.epsilon * std::sin(pt.theta));
    EXPECT_EQ(hgtidf::f_polar(pt, params), hgtidf::f_surrogate(mapped.x, mapped.y, params));
    EXPECT_EQ(hgtidf::g_polar(pt, params), hgtidf::g_surrogate(mapped.x, mapped.y, params));
    EXPECT_THROW(hgtidf::f_polar({1e-4, 0.0}, params), hgtidf::DomainError);
    EXPECT_THROW(hgtidf::f_polar({0.02, 1.0}, params), hgtidf::DomainError);
}

TEST(Polar, FDominanceRatio)
{
    SurrogateParams const params{2.47, 1.0, 0.01, 100};
    double prev_gap = INFINITY;
    for (int e = 3; e <= 8; ++e) {
        double const eps = std::pow(10.0, -e);
        double const ratio = hgtidf::f_polar({eps, std::numbers::pi / 4}, params) / std::log(1.0 / eps);
        double const gap = std::abs(ratio - params.lambda * params.beta);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LE(prev_gap, 0.02 * params.lambda * params.beta);
}

TEST(Polar, PublishedFormulaDiffersOnlyInConstant)
{
    // The published f differs from the exact map by the constant
    // -ln(lambda) + alpha lambda.
    SurrogateParams const params{2.47, 1.0, 0.01, 100};
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        hgtidf::PolarPoint const pt{eps, 0.7};
        double const diff = hgtidf::f_polar(pt, params, hgtidf::PolarMode::published) - hgtidf::f_polar(pt, params);
        EXPECT_NEAR(diff, -std::log(params.lambda) + params.alpha * params.lambda, 1e-9);
    }
}

TEST(Regression, ExactLine)
{
    std::vector<hgtidf::ScatterPoint> pts;
    for (int i = 0; i < 30; ++i) {
        double const x = 0.5 + 0.37 * i;
        pts.push_back({x, 2.47 * x + 1.03});
    }
    auto const fit = hgtidf::fit_ols(pts);
    EXPECT_NEAR(fit.beta_hat, 2.47, 1e-12);
    EXPECT_NEAR(fit.alpha_hat, 1.03, 1e-12);
    EXPECT_DOUBLE_EQ(fit.r_squared, 1.0);
    EXPECT_EQ(fit.n_points, 30U);

    std::vector<hgtidf::ScatterPoint> const two{{1.0, 3.0}, {2.0, 1.0}};
    EXPECT_DOUBLE_EQ(hgtidf::fit_ols(two).r_squared, 1.0);
    std::vector<hgtidf::ScatterPoint> const flat{{1.0, 3.0}, {1.0, 1.0}};
    EXPECT_THROW(hgtidf::fit_ols(flat), hgtidf::DomainError);
}

TEST(RegressionProperty, MatchesNormalEquations)
{
    std::mt19937_64 rng(53);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<hgtidf::ScatterPoint> pts;
        std::vector<double> xs, ys;
        auto const n = 3 + rng() % 200;
        for (std::size_t i = 0; i < n; ++i) {
            double const x = std::uniform_real_distribution<double>(0.0, 12.0)(rng);
            double const y = 2.0 * x + 0.8 + noise(rng);
            pts.push_back({x, y});
            xs.push_back(x);
            ys.push_back(y);
        }
        auto const fit = hgtidf::fit_ols(pts);
        auto const ref = oracle::normal_equations(xs, ys);
        EXPECT_NEAR(fit.beta_hat, ref.slope, 1e-10);
        EXPECT_NEAR(fit.alpha_hat, ref.intercept, 1e-10);
        EXPECT_GE(fit.r_squared, 0.0);
        EXPECT_LE(fit.r_squared, 1.0);
        // Least squares: nudging the line never lowers the residual sum.
        auto sse = [&](double b, double a) {
            double s = 0;
            for (auto const& pt : pts) {
                s += (pt.y - a - b * pt.x) * (pt.y - a - b * pt.x);
            }
            return s;
        };
        double const best = sse(fit.beta_hat, fit.alpha_hat);
        EXPECT_LE(best, sse(fit.beta_hat + 1e-3, fit.alpha_hat));
        EXPECT_LE(best, sse(fit.beta_hat, fit.alpha_hat - 1e-3));
    }
}

TEST(Regression, IdfScatterFromCorpus)
{
    auto const s = hgtidf::build_stats(
        std::vector<hgtidf::Document>{{"a", {"x", "x", "y"}}, {"b", {"x", "z"}}, {"c", {"y", "w", "w", "w"}}});
    auto const pts = hgtidf::idf_scatter(s);
    ASSERT_EQ(pts.size(), s.num_terms());
    auto const x = s.term_id("x");
    EXPECT_DOUBLE_EQ(pts[index(x)].x, std::log(9.0 / 3.0));
    EXPECT_DOUBLE_EQ(pts[index(x)].y, std::log(3.0 / 2.0));
    EXPECT_EQ(hgtidf::idf_scatter(s, 2).size(), 2U);
}

TEST(Grid, DomainAndConsistency)
{
    SurrogateParams const params{2.47, 1.0, 1.0, 100};
    auto const f = hgtidf::emit_contour_grid(params, hgtidf::GridFunction::f, 3);
    ASSERT_EQ(f.size(), 9U);
    for (auto const& pt : f) {
        EXPECT_GT(pt.p, 0.0);
        EXPECT_LT(pt.p, 1.0);
        EXPECT_EQ(pt.value, hgtidf::f_surrogate(pt.p, pt.q, params));
    }
    auto const g = hgtidf::emit_contour_grid(params, hgtidf::GridFunction::g, 10);
    EXPECT_EQ(g.size(), 45U);
    for (auto const& pt : g) {
        EXPECT_LT(pt.q, pt.p);
        EXPECT_EQ(pt.value, hgtidf::g_surrogate(pt.p, pt.q, params));
    }
    std::ostringstream csv;
    hgtidf::write_grid_csv(csv, g);
    EXPECT_EQ(csv.str().rfind("p,q,value\n", 0), 0U);
    EXPECT_THROW(hgtidf::emit_contour_grid(params, hgtidf::GridFunction::g, 1), hgtidf::DomainError);
}
