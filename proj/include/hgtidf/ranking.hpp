#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgtidf/detail/hash.hpp"
#include "hgtidf/error.hpp"
#include "hgtidf/scoring.hpp"
#include "hgtidf/termstats.hpp"

namespace hgtidf {

/// Query terms; duplicates are allowed and are summed with multiplicity.
struct Query {
    std::vector<TermId> terms;
};

inline Query make_query(TermDocStats const& stats, std::span<std::string const> terms)
{
    Query q;
    for (auto const& term : terms) {
        q.terms.push_back(stats.term_id(term));
    }
    return q;
}

struct RankedItem {
    std::uint32_t id;  ///< document index or term index
    double score;

    friend bool operator==(RankedItem const&, RankedItem const&) = default;
};

/// Items by nonincreasing score; a tied class is ordered by a permutation
/// derived from (seed, item id) only, so the order does not depend on the
/// order items were scored in.
struct Ranking {
    std::vector<RankedItem> items;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return items.size(); }
};

inline std::uint64_t tie_key(std::uint64_t seed, std::uint32_t id) noexcept
{
    return detail::hash_combine(seed, id);
}

namespace detail {

struct RankOrder {
    std::uint64_t seed;

    bool operator()(RankedItem const& a, RankedItem const& b) const noexcept
    {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        auto const ka = tie_key(seed, a.id);
        auto const kb = tie_key(seed, b.id);
        if (ka != kb) {
            return ka < kb;
        }
        return a.id < b.id;
    }
};

inline void validate_query(TermDocStats const& stats, Query const& q)
{
    if (q.terms.empty()) {
        throw Error("query must contain at least one term");
    }
    for (auto t : q.terms) {
        if (!stats.contains(t)) {
            throw NotFoundError("unknown query term id " + std::to_string(index(t)));
        }
    }
}

/// Orders items and keeps the first `keep` of them.
inline Ranking order_items(std::vector<RankedItem> items, std::uint64_t seed, std::size_t keep)
{
    RankOrder const order{seed};
    keep = std::min(keep, items.size());
    if (keep < items.size()) {
        std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(keep), items.end(), order);
        items.resize(keep);
    } else {
        std::sort(items.begin(), items.end(), order);
    }
    return Ranking{std::move(items), seed};
}

}  // namespace detail

/// Score(d, q) = sum over query terms of score(t, d), for every document.
inline std::vector<double> query_scores(TermDocStats const& stats, ScorerKind kind, Query const& q,
                                        std::uint64_t seed)
{
    detail::validate_query(stats, q);
    std::vector<double> scores(stats.num_docs(), 0.0);
    for (auto t : q.terms) {
        if (kind == ScorerKind::random) {
            for (std::uint32_t d = 0; d < stats.num_docs(); ++d) {
                if (stats.doc_length(DocId{d}) > 0) {
                    scores[d] += random_score(seed, t, DocId{d});
                }
            }
            continue;
        }
        for (auto const& p : stats.postings(t)) {
            DocId const d{p.id};
            CellCounts const c{p.count, stats.doc_length(d), stats.doc_freq(t), stats.total_freq(t)};
            scores[p.id] += score_cell(kind, c, stats, t, d, seed);
        }
    }
    return scores;
}

/// The first k entries of rank_documents(stats, kind, q, seed), computed
/// with a partial sort.
inline Ranking top_documents(TermDocStats const& stats, ScorerKind kind, Query const& q, std::uint64_t seed,
                             std::size_t k)
{
    auto const scores = query_scores(stats, kind, q, seed);
    std::vector<RankedItem> items;
    items.reserve(scores.size());
    for (std::uint32_t d = 0; d < scores.size(); ++d) {
        items.push_back({d, scores[d]});
    }
    return detail::order_items(std::move(items), seed, k);
}

/// Every document, ranked by summed query score. Zero-score documents stay
/// in the ranking.
inline Ranking rank_documents(TermDocStats const& stats, ScorerKind kind, Query const& q, std::uint64_t seed)
{
    return top_documents(stats, kind, q, seed, stats.num_docs());
}

/// Top m terms of one document. Only terms occurring in the document are
/// ranked unless `pad` is set, in which case absent terms (score 0) fill a
/// document with fewer than m distinct terms.
inline Ranking summarize_document(TermDocStats const& stats, ScorerKind kind, DocId doc, std::size_t m,
                                  std::uint64_t seed, bool pad = false)
{
    if (m < 1) {
        throw DomainError("summarize_document: requires m >= 1");
    }
    if (!stats.contains(doc)) {
        throw NotFoundError("unknown document id " + std::to_string(index(doc)));
    }
    auto const terms = stats.doc_terms(doc);
    auto const n = stats.doc_length(doc);
    std::vector<RankedItem> items;
    items.reserve(terms.size());
    for (auto const& p : terms) {
        TermId const t{p.id};
        CellCounts const c{p.count, n, stats.doc_freq(t), stats.total_freq(t)};
        items.push_back({p.id, score_cell(kind, c, stats, t, doc, seed)});
    }
    if (pad && terms.size() < m) {
        std::size_t next = 0;
        for (std::uint32_t t = 0; t < stats.num_terms(); ++t) {
            if (next < terms.size() && terms[next].id == t) {
                ++next;
                continue;
            }
            CellCounts const c{0, n, stats.doc_freq(TermId{t}), stats.total_freq(TermId{t})};
            items.push_back({t, score_cell(kind, c, stats, TermId{t}, doc, seed)});
        }
    }
    return detail::order_items(std::move(items), seed, m);
}

/// First min(k, size) item ids.
inline std::vector<std::uint32_t> top_k(Ranking const& ranking, std::size_t k)
{
    std::vector<std::uint32_t> ids;
    auto const count = std::min(k, ranking.items.size());
    ids.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ids.push_back(ranking.items[i].id);
    }
    return ids;
}

}  // namespace hgtidf
