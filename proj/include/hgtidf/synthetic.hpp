#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hgtidf/corpus.hpp"
#include "hgtidf/error.hpp"

namespace hgtidf {

/// Corpus generator with a Zipfian background vocabulary and planted bursty
/// terms. Background tokens are named "w<rank>", bursty tokens "b<index>".
struct SyntheticParams {
    std::size_t num_docs = 500;
    std::size_t vocab_size = 5000;
    double zipf_exponent = 1.0;
    std::size_t min_doc_length = 80;
    std::size_t max_doc_length = 240;
    std::size_t bursty_terms = 400;
    std::size_t bursty_min_docs = 2;   ///< documents each bursty term is planted in
    std::size_t bursty_max_docs = 12;
    std::size_t bursty_min_count = 2;  ///< occurrences per planted document
    std::size_t bursty_max_count = 6;
    std::uint64_t seed = 1;
};

namespace detail {

// Distribution helpers with a fixed mapping from engine output, so corpora
// are identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::size_t below(std::size_t bound)
    {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * bound) >> 64U);
    }

    /// Uniform integer in [lo, hi].
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace detail

inline std::vector<Document> generate_bursty_corpus(SyntheticParams const& p)
{
    if (p.num_docs == 0 || p.vocab_size == 0 || p.min_doc_length > p.max_doc_length ||
        p.bursty_min_docs > p.bursty_max_docs || p.bursty_max_docs > p.num_docs ||
        p.bursty_min_count > p.bursty_max_count) {
        throw DomainError("generate_bursty_corpus: inconsistent parameters");
    }
    detail::Rng rng(p.seed);

    std::vector<double> cumulative(p.vocab_size);
    double total = 0.0;
    for (std::size_t r = 0; r < p.vocab_size; ++r) {
        total += std::pow(static_cast<double>(r + 1), -p.zipf_exponent);
        cumulative[r] = total;
    }

    std::vector<Document> docs(p.num_docs);
    auto const width = std::to_string(p.num_docs - 1).size();
    for (std::size_t d = 0; d < p.num_docs; ++d) {
        auto id = std::to_string(d);
        docs[d].doc_id = "d" + std::string(width - id.size(), '0') + id;
        auto const length = rng.between(p.min_doc_length, p.max_doc_length);
        docs[d].tokens.reserve(length);
        for (std::size_t i = 0; i < length; ++i) {
            double const u = rng.uniform() * total;
            auto const r = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                    cumulative.begin());
            docs[d].tokens.push_back("w" + std::to_string(std::min(r, p.vocab_size - 1)));
        }
    }

    std::vector<std::size_t> order(p.num_docs);
    for (std::size_t b = 0; b < p.bursty_terms; ++b) {
        auto const name = "b" + std::to_string(b);
        auto const spread = rng.between(p.bursty_min_docs, p.bursty_max_docs);
        for (std::size_t i = 0; i < p.num_docs; ++i) {
            order[i] = i;
        }
        // Partial Fisher-Yates: the first `spread` slots are a uniform sample.
        for (std::size_t i = 0; i < spread; ++i) {
            std::swap(order[i], order[i + rng.below(p.num_docs - i)]);
        }
        for (std::size_t i = 0; i < spread; ++i) {
            auto const copies = rng.between(p.bursty_min_count, p.bursty_max_count);
            for (std::size_t c = 0; c < copies; ++c) {
                docs[order[i]].tokens.push_back(name);
            }
        }
    }
    for (auto& doc : docs) {
        rng.shuffle(doc.tokens);
    }
    return docs;
}

}  // namespace hgtidf
