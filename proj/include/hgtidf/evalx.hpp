#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgtidf/detail/hash.hpp"
#include "hgtidf/detail/parallel.hpp"
#include "hgtidf/error.hpp"
#include "hgtidf/ranking.hpp"
#include "hgtidf/scoring.hpp"
#include "hgtidf/termstats.hpp"

namespace hgtidf {

/// Mean and sample standard deviation of a set of agreement scores.
struct AgreementStat {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;

    bool empty() const noexcept { return count == 0; }
};

inline AgreementStat summarize(std::span<double const> values)
{
    AgreementStat s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    return s;
}

/// |first k of a  ∩  first k of b|.
inline std::size_t overlap_at_k(std::span<std::uint32_t const> a, std::span<std::uint32_t const> b,
                                std::size_t k = 10)
{
    std::vector<std::uint32_t> left(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(k, a.size())));
    std::vector<std::uint32_t> right(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(std::min(k, b.size())));
    std::ranges::sort(left);
    std::ranges::sort(right);
    std::vector<std::uint32_t> common;
    std::ranges::set_intersection(left, right, std::back_inserter(common));
    return common.size();
}

/// Number of items shared by the top k of two rankings of the same items.
inline std::size_t p_at_k(Ranking const& r1, Ranking const& r2, std::size_t k = 10)
{
    auto ids = [](Ranking const& r) {
        std::vector<std::uint32_t> v;
        v.reserve(r.size());
        for (auto const& item : r.items) {
            v.push_back(item.id);
        }
        std::ranges::sort(v);
        return v;
    };
    if (r1.size() != r2.size() || ids(r1) != ids(r2)) {
        throw Error("p_at_k: rankings cover different item sets");
    }
    return overlap_at_k(top_k(r1, k), top_k(r2, k), k);
}

inline std::size_t p_at_10(Ranking const& r1, Ranking const& r2) { return p_at_k(r1, r2, 10); }

/// B(t) = (1/K) * sum_j k_tj / n_j.
inline double burstiness(TermDocStats const& stats, TermId t)
{
    if (!stats.contains(t)) {
        throw NotFoundError("unknown term id " + std::to_string(index(t)));
    }
    auto const K = stats.doc_freq(t);
    if (K == 0) {
        throw DomainError("burstiness: term does not occur in the corpus");
    }
    double sum = 0.0;
    for (auto const& p : stats.postings(t)) {
        sum += static_cast<double>(p.count) / static_cast<double>(stats.doc_length(DocId{p.id}));
    }
    return sum / static_cast<double>(K);
}

struct BurstyParams {
    std::size_t total_bursty = 106;
    std::size_t num_common = 6;
    Count min_doc_freq = 10;
};

struct BurstyPools {
    std::vector<TermId> common;  ///< decreasing K/N
    std::vector<TermId> rare;    ///< decreasing burstiness
    BurstyParams params;
};

/// The total_bursty most bursty terms among those with K >= min_doc_freq
/// (ties by term id), split into the num_common with the highest K/N and
/// the rest.
inline BurstyPools select_bursty_pools(TermDocStats const& stats, BurstyParams const& params = {})
{
    if (params.num_common > params.total_bursty) {
        throw DomainError("select_bursty_pools: num_common exceeds total_bursty");
    }
    struct Candidate {
        TermId term;
        double burst;
    };
    std::vector<Candidate> eligible;
    for (std::uint32_t i = 0; i < stats.num_terms(); ++i) {
        TermId const t{i};
        if (stats.doc_freq(t) >= params.min_doc_freq) {
            eligible.push_back({t, burstiness(stats, t)});
        }
    }
    if (eligible.size() < params.total_bursty) {
        throw Error("select_bursty_pools: only " + std::to_string(eligible.size()) + " terms have K >= " +
                    std::to_string(params.min_doc_freq) + ", need " + std::to_string(params.total_bursty));
    }
    std::ranges::sort(eligible, [](Candidate const& a, Candidate const& b) {
        return a.burst != b.burst ? a.burst > b.burst : index(a.term) < index(b.term);
    });
    eligible.resize(params.total_bursty);
    auto pool = eligible;
    std::ranges::stable_sort(pool, [&](Candidate const& a, Candidate const& b) {
        auto const ka = stats.doc_freq(a.term);
        auto const kb = stats.doc_freq(b.term);
        return ka != kb ? ka > kb : index(a.term) < index(b.term);
    });
    BurstyPools pools{{}, {}, params};
    std::vector<bool> is_common(stats.num_terms(), false);
    for (std::size_t i = 0; i < params.num_common; ++i) {
        pools.common.push_back(pool[i].term);
        is_common[index(pool[i].term)] = true;
    }
    for (auto const& c : eligible) {
        if (!is_common[index(c.term)]) {
            pools.rare.push_back(c.term);
        }
    }
    return pools;
}

struct ScorerPair {
    ScorerKind first;
    ScorerKind second;

    std::string label() const { return std::string(to_string(first)) + "/" + std::string(to_string(second)); }
    bool involves_random() const { return first == ScorerKind::random || second == ScorerKind::random; }
};

inline ScorerPair parse_pair(std::string_view text)
{
    auto const slash = text.find('/');
    if (slash == std::string_view::npos) {
        throw Error("scorer pair must look like a/b, got \"" + std::string(text) + "\"");
    }
    return {parse_scorer(text.substr(0, slash)), parse_scorer(text.substr(slash + 1))};
}

/// One line of an agreement table: experiment, parameter (cutoff, common
/// term, ...), scorer pair and the statistic. count == 0 marks an empty row.
struct AgreementRow {
    std::string experiment;
    std::string parameter;
    std::string pair;
    AgreementStat stat;
};

struct Histogram {
    std::string pair;
    std::vector<std::uint64_t> frequency;  ///< frequency[s] = items with P@k == s
};

struct ExperimentResult {
    std::string experiment;
    std::vector<AgreementRow> rows;
    std::vector<Histogram> histograms;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// Shared knobs of the experiment drivers.
struct AgreementOptions {
    std::vector<ScorerPair> pairs;
    std::uint64_t seed = 0;
    std::size_t k = 10;
    /// Both sides of a pair break ties with the same permutation. Scores of
    /// the random scorer always use independent per-side seeds.
    bool shared_tiebreak = true;
    /// Repetitions of pairs that involve the random scorer, per query.
    std::size_t random_trials = 1;
    unsigned threads = 1;
};

namespace detail {

inline constexpr std::uint64_t kOneTermTag = 0x6f6e652d7465726dULL;
inline constexpr std::uint64_t kTwoTermTag = 0x74776f2d7465726dULL;
inline constexpr std::uint64_t kSummaryTag = 0x73756d6d61727921ULL;
inline constexpr std::uint64_t kRandomTag = 0x72616e646f6d2121ULL;

inline std::uint64_t side_seed(std::uint64_t query_seed, ScorerKind kind, std::size_t side, std::size_t trial,
                               bool shared_tiebreak)
{
    auto const base = trial == 0 ? query_seed : hash_combine(query_seed, trial);
    if (kind == ScorerKind::random) {
        return hash_combine(base, kRandomTag, side);
    }
    return shared_tiebreak ? base : hash_combine(base, side + 1);
}

// Agreement of every pair on one item; random pairs are averaged over trials.
template <class TopFn>
std::vector<double> agreement_for_item(AgreementOptions const& opt, std::uint64_t item_seed, TopFn&& top)
{
    std::vector<double> out;
    out.reserve(opt.pairs.size());
    for (auto const& pair : opt.pairs) {
        auto const trials = pair.involves_random() ? std::max<std::size_t>(1, opt.random_trials) : 1;
        double total = 0.0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto const a = top(pair.first, side_seed(item_seed, pair.first, 0, trial, opt.shared_tiebreak));
            auto const b = top(pair.second, side_seed(item_seed, pair.second, 1, trial, opt.shared_tiebreak));
            total += static_cast<double>(overlap_at_k(a, b, opt.k));
        }
        out.push_back(total / static_cast<double>(trials));
    }
    return out;
}

}  // namespace detail

inline std::vector<ScorerPair> one_term_default_pairs()
{
    return {{ScorerKind::fisher, ScorerKind::tp_idf},
            {ScorerKind::fisher, ScorerKind::random},
            {ScorerKind::tp, ScorerKind::tp_idf}};
}

inline std::vector<ScorerPair> two_term_default_pairs()
{
    return {{ScorerKind::random, ScorerKind::random},
            {ScorerKind::fisher, ScorerKind::tp},
            {ScorerKind::fisher, ScorerKind::tp_idf},
            {ScorerKind::tp_idf, ScorerKind::tp}};
}

inline std::vector<ScorerPair> summarization_default_pairs()
{
    return {{ScorerKind::fisher, ScorerKind::tp_idf},
            {ScorerKind::fisher, ScorerKind::tp},
            {ScorerKind::fisher, ScorerKind::random}};
}

/// Average P@k over all one-term queries whose term occurs in at least C
/// documents, for each cutoff C and scorer pair.
inline ExperimentResult run_one_term_experiment(TermDocStats const& stats, std::vector<Count> cutoffs,
                                                AgreementOptions opt)
{
    if (opt.pairs.empty()) {
        opt.pairs = one_term_default_pairs();
    }
    if (cutoffs.empty()) {
        throw DomainError("run_one_term_experiment: no cutoffs given");
    }
    if (std::ranges::any_of(cutoffs, [](Count c) { return c < 1; })) {
        throw DomainError("run_one_term_experiment: cutoffs must be >= 1");
    }
    auto const min_cutoff = *std::ranges::min_element(cutoffs);
    std::vector<TermId> queries;
    for (std::uint32_t i = 0; i < stats.num_terms(); ++i) {
        if (stats.doc_freq(TermId{i}) >= min_cutoff) {
            queries.push_back(TermId{i});
        }
    }
    std::vector<std::vector<double>> per_query(queries.size());
    detail::parallel_for(queries.size(), opt.threads, [&](std::size_t i) {
        Query const q{{queries[i]}};
        auto const seed = detail::hash_combine(opt.seed, detail::kOneTermTag, index(queries[i]));
        per_query[i] = detail::agreement_for_item(opt, seed, [&](ScorerKind kind, std::uint64_t s) {
            return top_k(top_documents(stats, kind, q, s, opt.k), opt.k);
        });
    });

    ExperimentResult result{"one_term", {}, {}, {}};
    nlohmann::ordered_json query_counts = nlohmann::ordered_json::object();
    for (auto const cutoff : cutoffs) {
        for (std::size_t p = 0; p < opt.pairs.size(); ++p) {
            std::vector<double> values;
            for (std::size_t i = 0; i < queries.size(); ++i) {
                if (stats.doc_freq(queries[i]) >= cutoff) {
                    values.push_back(per_query[i][p]);
                }
            }
            result.rows.push_back({"one_term", std::to_string(cutoff), opt.pairs[p].label(), summarize(values)});
            query_counts[std::to_string(cutoff)] = values.size();
        }
    }
    result.metadata["num_docs"] = stats.num_docs();
    result.metadata["k"] = opt.k;
    result.metadata["seed"] = opt.seed;
    result.metadata["random_trials"] = opt.random_trials;
    result.metadata["queries_per_cutoff"] = query_counts;
    return result;
}

/// For each common bursty term c, the queries {c, r} over every rare term r.
inline ExperimentResult run_two_term_experiment(TermDocStats const& stats, BurstyPools const& pools,
                                                AgreementOptions opt)
{
    if (opt.pairs.empty()) {
        opt.pairs = two_term_default_pairs();
    }
    if (pools.rare.empty() || pools.common.empty()) {
        throw DomainError("run_two_term_experiment: both bursty pools must be nonempty");
    }
    auto const n_rare = pools.rare.size();
    auto const n_queries = pools.common.size() * n_rare;
    std::vector<std::vector<double>> per_query(n_queries);
    detail::parallel_for(n_queries, opt.threads, [&](std::size_t i) {
        Query const q{{pools.common[i / n_rare], pools.rare[i % n_rare]}};
        auto const seed = detail::hash_combine(opt.seed, detail::kTwoTermTag, i);
        per_query[i] = detail::agreement_for_item(opt, seed, [&](ScorerKind kind, std::uint64_t s) {
            return top_k(top_documents(stats, kind, q, s, opt.k), opt.k);
        });
    });

    ExperimentResult result{"two_term", {}, {}, {}};
    nlohmann::ordered_json proportions = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < pools.common.size(); ++c) {
        auto const& name = stats.term(pools.common[c]);
        for (std::size_t p = 0; p < opt.pairs.size(); ++p) {
            std::vector<double> values;
            values.reserve(n_rare);
            for (std::size_t r = 0; r < n_rare; ++r) {
                values.push_back(per_query[c * n_rare + r][p]);
            }
            result.rows.push_back({"two_term", name, opt.pairs[p].label(), summarize(values)});
        }
        proportions[name] = static_cast<double>(stats.doc_freq(pools.common[c])) /
                            static_cast<double>(stats.num_docs());
    }
    nlohmann::ordered_json rare = nlohmann::ordered_json::array();
    for (auto t : pools.rare) {
        rare.push_back(stats.term(t));
    }
    result.metadata["num_docs"] = stats.num_docs();
    result.metadata["k"] = opt.k;
    result.metadata["seed"] = opt.seed;
    result.metadata["doc_proportion"] = proportions;
    result.metadata["rare_terms"] = rare;
    return result;
}

/// P@m between the top-m terms of every document under each scorer pair.
/// Documents with no terms are skipped; documents with fewer than m distinct
/// terms compare all of them (effective k < m), which is reported.
inline ExperimentResult run_summarization_experiment(TermDocStats const& stats, AgreementOptions opt)
{
    if (opt.pairs.empty()) {
        opt.pairs = summarization_default_pairs();
    }
    if (opt.k < 1) {
        throw DomainError("run_summarization_experiment: m must be >= 1");
    }
    std::vector<DocId> docs;
    for (std::uint32_t d = 0; d < stats.num_docs(); ++d) {
        if (!stats.doc_terms(DocId{d}).empty()) {
            docs.push_back(DocId{d});
        }
    }
    std::vector<std::vector<double>> per_doc(docs.size());
    detail::parallel_for(docs.size(), opt.threads, [&](std::size_t i) {
        auto const seed = detail::hash_combine(opt.seed, detail::kSummaryTag, index(docs[i]));
        per_doc[i] = detail::agreement_for_item(opt, seed, [&](ScorerKind kind, std::uint64_t s) {
            return top_k(summarize_document(stats, kind, docs[i], opt.k, s), opt.k);
        });
    });

    ExperimentResult result{"summarization", {}, {}, {}};
    for (std::size_t p = 0; p < opt.pairs.size(); ++p) {
        std::vector<double> values;
        values.reserve(docs.size());
        Histogram hist{opt.pairs[p].label(), std::vector<std::uint64_t>(opt.k + 1, 0)};
        for (auto const& row : per_doc) {
            values.push_back(row[p]);
            auto const bucket = static_cast<std::size_t>(std::lround(row[p]));
            hist.frequency[std::min(bucket, opt.k)] += 1;
        }
        result.rows.push_back({"summarization", std::to_string(opt.k), opt.pairs[p].label(), summarize(values)});
        result.histograms.push_back(std::move(hist));
    }
    std::size_t short_docs = 0;
    double effective_sum = 0.0;
    for (auto d : docs) {
        auto const distinct = stats.doc_terms(d).size();
        short_docs += distinct < opt.k ? 1 : 0;
        effective_sum += static_cast<double>(std::min(distinct, opt.k));
    }
    result.metadata["num_docs"] = stats.num_docs();
    result.metadata["m"] = opt.k;
    result.metadata["seed"] = opt.seed;
    result.metadata["documents_compared"] = docs.size();
    result.metadata["documents_skipped_empty"] = stats.num_docs() - docs.size();
    result.metadata["documents_with_effective_k_below_m"] = short_docs;
    result.metadata["mean_effective_k"] = docs.empty() ? 0.0 : effective_sum / static_cast<double>(docs.size());
    return result;
}

/// P@k between pairs of independent random document rankings; expectation
/// k^2 / N' where N' counts the nonempty documents.
inline AgreementStat random_overlap_baseline(TermDocStats const& stats, std::size_t trials, std::uint64_t seed,
                                             std::size_t k = 10)
{
    if (stats.num_terms() == 0) {
        throw DomainError("random_overlap_baseline: empty corpus");
    }
    Query const q{{TermId{0}}};
    std::vector<double> values;
    values.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        auto const base = detail::hash_combine(seed, detail::kRandomTag, i);
        auto const a = top_k(top_documents(stats, ScorerKind::random, q, detail::hash_combine(base, 0), k), k);
        auto const b = top_k(top_documents(stats, ScorerKind::random, q, detail::hash_combine(base, 1), k), k);
        values.push_back(static_cast<double>(overlap_at_k(a, b, k)));
    }
    return summarize(values);
}

// ---- output ------------------------------------------------------------

inline std::string format_fixed(double value, int decimals = 6)
{
    if (std::isnan(value)) {
        return "";
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

inline void write_rows_csv(std::ostream& out, std::span<AgreementRow const> rows)
{
    out << "experiment,parameter,pair,mean,std,count\n";
    for (auto const& r : rows) {
        out << r.experiment << ',' << r.parameter << ',' << r.pair << ',' << format_fixed(r.stat.mean) << ','
            << format_fixed(r.stat.std) << ',' << r.stat.count << '\n';
    }
}

inline void write_histogram_csv(std::ostream& out, std::span<Histogram const> histograms)
{
    out << "pair,score,frequency\n";
    for (auto const& h : histograms) {
        for (std::size_t s = 0; s < h.frequency.size(); ++s) {
            out << h.pair << ',' << s << ',' << h.frequency[s] << '\n';
        }
    }
}

/// Table 1 layout: one line per common term with mean and std per pair.
inline void write_two_term_table_csv(std::ostream& out, ExperimentResult const& result)
{
    std::vector<std::string> pairs;
    std::vector<std::string> terms;
    for (auto const& r : result.rows) {
        if (std::ranges::find(pairs, r.pair) == pairs.end()) {
            pairs.push_back(r.pair);
        }
        if (std::ranges::find(terms, r.parameter) == terms.end()) {
            terms.push_back(r.parameter);
        }
    }
    out << "term,doc_proportion";
    for (auto const& p : pairs) {
        out << ',' << p << "_mean," << p << "_std";
    }
    out << '\n';
    for (auto const& t : terms) {
        double proportion = std::numeric_limits<double>::quiet_NaN();
        if (result.metadata.contains("doc_proportion") && result.metadata["doc_proportion"].contains(t)) {
            proportion = result.metadata["doc_proportion"][t].get<double>();
        }
        out << t << ',' << format_fixed(proportion);
        for (auto const& p : pairs) {
            auto it = std::ranges::find_if(result.rows, [&](AgreementRow const& r) {
                return r.parameter == t && r.pair == p;
            });
            out << ',' << format_fixed(it->stat.mean) << ',' << format_fixed(it->stat.std);
        }
        out << '\n';
    }
}

inline nlohmann::ordered_json to_json(ExperimentResult const& result)
{
    nlohmann::ordered_json j;
    j["experiment"] = result.experiment;
    j["metadata"] = result.metadata;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (auto const& r : result.rows) {
        nlohmann::ordered_json row;
        row["parameter"] = r.parameter;
        row["pair"] = r.pair;
        row["count"] = r.stat.count;
        row["empty"] = r.stat.empty();
        row["mean"] = r.stat.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.stat.mean);
        row["std"] = r.stat.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.stat.std);
        rows.push_back(std::move(row));
    }
    if (!result.histograms.empty()) {
        auto& hist = j["histograms"] = nlohmann::ordered_json::object();
        for (auto const& h : result.histograms) {
            hist[h.pair] = h.frequency;
        }
    }
    return j;
}

}  // namespace hgtidf
