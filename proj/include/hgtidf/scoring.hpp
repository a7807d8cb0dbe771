#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hgtidf/detail/hash.hpp"
#include "hgtidf/detail/parallel.hpp"
#include "hgtidf/error.hpp"
#include "hgtidf/termstats.hpp"

namespace hgtidf {

enum class ScorerKind { tp, idf, tf_idf, tp_idf, fisher, random };

inline constexpr std::string_view to_string(ScorerKind kind) noexcept
{
    switch (kind) {
    case ScorerKind::tp: return "tp";
    case ScorerKind::idf: return "idf";
    case ScorerKind::tf_idf: return "tf_idf";
    case ScorerKind::tp_idf: return "tp_idf";
    case ScorerKind::fisher: return "fisher";
    case ScorerKind::random: return "random";
    }
    return "?";
}

inline ScorerKind parse_scorer(std::string_view name)
{
    for (auto kind : {ScorerKind::tp, ScorerKind::idf, ScorerKind::tf_idf, ScorerKind::tp_idf,
                      ScorerKind::fisher, ScorerKind::random}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    if (name == "tf-idf") {
        return ScorerKind::tf_idf;
    }
    if (name == "tp-idf") {
        return ScorerKind::tp_idf;
    }
    throw Error("unknown scorer \"" + std::string(name) + "\"");
}

namespace detail {

inline double lgamma_positive(double x) noexcept
{
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Tail of the Stirling series for log Gamma(x), valid for x >= 30 to
// below double rounding.
inline double stirling_correction(double x) noexcept
{
    double const r = 1.0 / x;
    double const r2 = r * r;
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0))));
}

/// log Gamma(a) - log Gamma(b) for a, b > 0. For large arguments the
/// difference is formed analytically so it stays accurate when a and b are
/// both huge and close together.
inline double log_gamma_ratio(double a, double b) noexcept
{
    if (a == b) {
        return 0.0;
    }
    if (std::min(a, b) < 30.0) {
        return lgamma_positive(a) - lgamma_positive(b);
    }
    double const d = a - b;
    return (a - 0.5) * std::log1p(d / b) + d * std::log(b) - d + (stirling_correction(a) - stirling_correction(b));
}

/// log C(n, k) for integers 0 <= k <= n.
inline double log_choose(Count n, Count k) noexcept
{
    k = std::min(k, n - k);
    if (k == 0) {
        return 0.0;
    }
    auto const nd = static_cast<double>(n);
    auto const kd = static_cast<double>(k);
    return log_gamma_ratio(nd + 1.0, nd - kd + 1.0) - lgamma_positive(kd + 1.0);
}

inline void require(bool ok, std::string_view op, std::string_view inequality, Count lhs, Count rhs)
{
    if (!ok) {
        throw DomainError(std::string(op) + ": requires " + std::string(inequality) + " (got " +
                          std::to_string(lhs) + " vs " + std::to_string(rhs) + ")");
    }
}

}  // namespace detail

struct TailResult {
    double log_p;  ///< natural log of the tail probability, <= 0
    double p;
    Count terms_summed;
};

/// P(X >= k) for X ~ Hypergeometric(total, successes, draws): the chance of
/// seeing an item at least k times in n draws without replacement from
/// `total` items of which `successes` are that item.
///
/// The leading pmf is evaluated in log space; the remaining terms are summed
/// relative to it with the exact ratio recurrence, rescaling on overflow, and
/// the sum stops once the rest of the tail is provably below 1e-17 of it.
/// For k below the mean the short lower tail P(X < k) is summed instead and
/// the result is 1 minus it; the tail is then at least about one half, so
/// nothing is lost to cancellation.
inline TailResult hypergeom_tail(Count k, Count n, Count successes, Count total)
{
    constexpr std::string_view op = "hypergeom_tail";
    detail::require(k <= n, op, "k <= n", k, n);
    detail::require(n <= total, op, "n <= total", n, total);
    detail::require(successes <= total, op, "successes <= total", successes, total);
    detail::require(k <= successes, op, "k <= successes", k, successes);

    Count const failures = total - successes;
    Count const lowest = n > failures ? n - failures : 0;
    Count const highest = std::min(n, successes);
    if (k <= lowest) {
        return {0.0, 1.0, 0};
    }

    auto const K = static_cast<double>(successes);
    auto const nd = static_cast<double>(n);
    // failures - n + x + 1 >= 1 for every x > lowest.
    double const gap = static_cast<double>(failures) - nd;
    bool const lower = static_cast<unsigned __int128>(k) * total < static_cast<unsigned __int128>(n) * successes;
    Count const start = lower ? k - 1 : k;

    double const log_leading = detail::log_choose(successes, start) + detail::log_choose(failures, n - start) -
                               detail::log_choose(total, n);

    constexpr double kRescale = 1e280;
    double sum = 1.0;
    double term = 1.0;
    double log_scale = 0.0;
    Count summed = 1;
    // Successive ratios shrink in the direction of travel (log-concave pmf),
    // so once one is below 1 the rest is below term * r / (1 - r).
    auto const add = [&](double ratio) {
        term *= ratio;
        sum += term;
        ++summed;
        if (sum > kRescale) {
            sum /= kRescale;
            term /= kRescale;
            log_scale += std::log(kRescale);
        }
        return ratio < 1.0 && term * ratio <= 1e-17 * sum * (1.0 - ratio);
    };
    if (lower) {
        for (Count x = start; x > lowest; --x) {
            auto const xd = static_cast<double>(x);
            if (add(xd * (gap + xd) / ((K - xd + 1.0) * (nd - xd + 1.0)))) {
                break;
            }
        }
        double const below = std::exp(log_leading + log_scale + std::log(sum));
        double const p = std::max(0.0, 1.0 - below);
        return {std::min(0.0, std::log1p(-std::min(below, 1.0))), p, summed};
    }
    for (Count x = k; x < highest; ++x) {
        auto const xd = static_cast<double>(x);
        if (add((K - xd) * (nd - xd) / ((xd + 1.0) * (gap + xd + 1.0)))) {
            break;
        }
    }
    double const log_p = std::min(0.0, log_leading + log_scale + std::log(sum));
    return {log_p, std::exp(log_p), summed};
}

/// -log P(X >= k); 0 when k = 0.
inline double fisher_score(Count k, Count n, Count successes, Count total)
{
    auto const tail = hypergeom_tail(k, n, successes, total);
    return tail.log_p == 0.0 ? 0.0 : -tail.log_p;
}

/// k / n, with 0 for an empty document.
inline double tp_score(Count k, Count n)
{
    detail::require(k <= n, "tp_score", "k <= n", k, n);
    if (n == 0) {
        return 0.0;
    }
    return static_cast<double>(k) / static_cast<double>(n);
}

/// ln(N / K).
inline double idf_score(Count doc_freq, Count num_docs)
{
    detail::require(doc_freq >= 1, "idf_score", "K >= 1", doc_freq, 1);
    detail::require(doc_freq <= num_docs, "idf_score", "K <= N", doc_freq, num_docs);
    return std::log(static_cast<double>(num_docs) / static_cast<double>(doc_freq));
}

inline double tp_idf_score(Count k, Count n, Count doc_freq, Count num_docs)
{
    return tp_score(k, n) * idf_score(doc_freq, num_docs);
}

inline double tf_idf_score(Count k, Count doc_freq, Count num_docs)
{
    return static_cast<double>(k) * idf_score(doc_freq, num_docs);
}

/// Uniform [0, 1) value fixed by (seed, term, doc).
inline double random_score(std::uint64_t seed, TermId t, DocId d) noexcept
{
    return detail::to_unit_interval(detail::hash_combine(seed, index(t), index(d)));
}

/// Scores one cell from its counts. Empty documents score 0 under every
/// scorer; absent terms score 0 under every scorer except `random`.
inline double score_cell(ScorerKind kind, CellCounts const& c, TermDocStats const& stats, TermId t, DocId d,
                         std::optional<std::uint64_t> seed = std::nullopt)
{
    if (kind == ScorerKind::random && !seed) {
        throw Error("the random scorer requires a seed");
    }
    if (c.doc_length == 0) {
        return 0.0;
    }
    switch (kind) {
    case ScorerKind::tp: return tp_score(c.term_count, c.doc_length);
    case ScorerKind::idf:
        return c.term_count == 0 ? 0.0 : idf_score(c.doc_freq, stats.num_docs());
    case ScorerKind::tf_idf: return tf_idf_score(c.term_count, c.doc_freq, stats.num_docs());
    case ScorerKind::tp_idf: return tp_idf_score(c.term_count, c.doc_length, c.doc_freq, stats.num_docs());
    case ScorerKind::fisher:
        return c.term_count == 0 ? 0.0
                                 : fisher_score(c.term_count, c.doc_length, c.total_freq, stats.total_tokens());
    case ScorerKind::random: return random_score(*seed, t, d);
    }
    return 0.0;
}

inline double score(TermDocStats const& stats, ScorerKind kind, TermId t, DocId d,
                    std::optional<std::uint64_t> seed = std::nullopt)
{
    return score_cell(kind, lookup(stats, t, d), stats, t, d, seed);
}

/// Scores of every nonzero cell, in term-major posting order (the value for
/// the j-th posting of term t sits at stats.posting_begin(t) + j).
inline std::vector<double> score_matrix(TermDocStats const& stats, ScorerKind kind,
                                        std::optional<std::uint64_t> seed = std::nullopt, unsigned threads = 1)
{
    std::vector<double> values(stats.num_nonzeros());
    detail::parallel_for(stats.num_terms(), threads, [&](std::size_t i) {
        TermId const t{static_cast<std::uint32_t>(i)};
        auto const base = stats.posting_begin(t);
        auto postings = stats.postings(t);
        for (std::size_t j = 0; j < postings.size(); ++j) {
            DocId const d{postings[j].id};
            CellCounts const c{postings[j].count, stats.doc_length(d), stats.doc_freq(t), stats.total_freq(t)};
            values[base + j] = score_cell(kind, c, stats, t, d, seed);
        }
    });
    return values;
}

}  // namespace hgtidf
