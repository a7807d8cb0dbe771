#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hgtidf/corpus.hpp"
#include "hgtidf/error.hpp"

namespace hgtidf {

using Count = std::uint64_t;

enum class TermId : std::uint32_t {};
enum class DocId : std::uint32_t {};

constexpr std::uint32_t index(TermId t) noexcept { return static_cast<std::uint32_t>(t); }
constexpr std::uint32_t index(DocId d) noexcept { return static_cast<std::uint32_t>(d); }

/// One nonzero entry of the count matrix. `id` is a document index in a
/// term's posting list and a term index in a document's term list.
struct Posting {
    std::uint32_t id;
    std::uint32_t count;

    friend bool operator==(Posting const&, Posting const&) = default;
};

/// The counts behind one (term, document) cell.
struct CellCounts {
    Count term_count;   ///< k: occurrences of the term in the document
    Count doc_length;   ///< n: tokens in the document
    Count doc_freq;     ///< K: documents containing the term
    Count total_freq;   ///< occurrences of the term in the whole corpus

    friend bool operator==(CellCounts const&, CellCounts const&) = default;
};

class TermDocStats;
TermDocStats build_stats(std::span<Document const> docs);
TermDocStats read_snapshot(std::istream& in);

/// Sparse term-document count matrix with its marginals. Immutable once
/// built; postings are kept both term-major and document-major.
class TermDocStats {
  public:
    TermDocStats() = default;

    std::size_t num_docs() const noexcept { return doc_names_.size(); }
    std::size_t num_terms() const noexcept { return term_names_.size(); }
    Count total_tokens() const noexcept { return total_tokens_; }
    std::size_t num_nonzeros() const noexcept { return by_doc_.size(); }

    Count doc_length(DocId d) const { return doc_length_.at(index(d)); }
    Count doc_freq(TermId t) const { return doc_freq_.at(index(t)); }
    Count total_freq(TermId t) const { return total_freq_.at(index(t)); }

    /// Documents containing the term, ascending document index.
    std::span<Posting const> postings(TermId t) const
    {
        auto const i = index(t);
        return std::span(by_term_).subspan(term_offsets_.at(i), term_offsets_.at(i + 1) - term_offsets_[i]);
    }

    /// Offset of the term's first posting in the flat term-major order.
    std::size_t posting_begin(TermId t) const { return term_offsets_.at(index(t)); }

    /// Terms occurring in the document, ascending term index.
    std::span<Posting const> doc_terms(DocId d) const
    {
        auto const i = index(d);
        return std::span(by_doc_).subspan(doc_offsets_.at(i), doc_offsets_.at(i + 1) - doc_offsets_[i]);
    }

    std::string const& term(TermId t) const { return term_names_.at(index(t)); }
    std::string const& doc_name(DocId d) const { return doc_names_.at(index(d)); }

    std::optional<TermId> find_term(std::string_view name) const
    {
        auto it = term_lookup_.find(std::string(name));
        if (it == term_lookup_.end()) {
            return std::nullopt;
        }
        return TermId{it->second};
    }

    std::optional<DocId> find_doc(std::string_view name) const
    {
        auto it = doc_lookup_.find(std::string(name));
        if (it == doc_lookup_.end()) {
            return std::nullopt;
        }
        return DocId{it->second};
    }

    TermId term_id(std::string_view name) const
    {
        if (auto t = find_term(name)) {
            return *t;
        }
        throw NotFoundError("unknown term \"" + std::string(name) + "\"");
    }

    DocId doc_id(std::string_view name) const
    {
        if (auto d = find_doc(name)) {
            return *d;
        }
        throw NotFoundError("unknown document \"" + std::string(name) + "\"");
    }

    bool contains(TermId t) const noexcept { return index(t) < num_terms(); }
    bool contains(DocId d) const noexcept { return index(d) < num_docs(); }

    /// k for (term, doc); 0 when the term does not occur in the document.
    Count count(TermId t, DocId d) const
    {
        auto terms = doc_terms(d);
        auto it = std::ranges::lower_bound(terms, index(t), {}, &Posting::id);
        return it != terms.end() && it->id == index(t) ? it->count : 0;
    }

    friend bool operator==(TermDocStats const& a, TermDocStats const& b)
    {
        return a.term_names_ == b.term_names_ && a.doc_names_ == b.doc_names_ &&
               a.doc_offsets_ == b.doc_offsets_ && a.by_doc_ == b.by_doc_ &&
               a.term_offsets_ == b.term_offsets_ && a.by_term_ == b.by_term_ &&
               a.doc_length_ == b.doc_length_ && a.doc_freq_ == b.doc_freq_ &&
               a.total_freq_ == b.total_freq_ && a.total_tokens_ == b.total_tokens_;
    }

  private:
    friend TermDocStats build_stats(std::span<Document const> docs);
    friend TermDocStats read_snapshot(std::istream& in);
    friend void write_snapshot(TermDocStats const& stats, std::ostream& out);

    // Derives the term-major index and every marginal from the
    // document-major lists.
    void finalize()
    {
        auto const n_terms = term_names_.size();
        auto const n_docs = doc_names_.size();
        term_lookup_.clear();
        term_lookup_.reserve(n_terms);
        for (std::uint32_t i = 0; i < n_terms; ++i) {
            if (!term_lookup_.emplace(term_names_[i], i).second) {
                throw ParseError("duplicate term \"" + term_names_[i] + "\"");
            }
        }
        doc_lookup_.clear();
        doc_lookup_.reserve(n_docs);
        for (std::uint32_t i = 0; i < n_docs; ++i) {
            if (!doc_lookup_.emplace(doc_names_[i], i).second) {
                throw Error("duplicate document id \"" + doc_names_[i] + "\"");
            }
        }
        doc_length_.assign(n_docs, 0);
        doc_freq_.assign(n_terms, 0);
        total_freq_.assign(n_terms, 0);
        total_tokens_ = 0;
        for (std::size_t d = 0; d < n_docs; ++d) {
            for (auto p = doc_offsets_[d]; p < doc_offsets_[d + 1]; ++p) {
                auto const& entry = by_doc_[p];
                doc_length_[d] += entry.count;
                doc_freq_[entry.id] += 1;
                total_freq_[entry.id] += entry.count;
            }
            total_tokens_ += doc_length_[d];
        }
        term_offsets_.assign(n_terms + 1, 0);
        for (std::size_t t = 0; t < n_terms; ++t) {
            term_offsets_[t + 1] = term_offsets_[t] + doc_freq_[t];
        }
        by_term_.resize(by_doc_.size());
        std::vector<std::size_t> cursor(term_offsets_.begin(), term_offsets_.end() - 1);
        for (std::uint32_t d = 0; d < n_docs; ++d) {
            for (auto p = doc_offsets_[d]; p < doc_offsets_[d + 1]; ++p) {
                by_term_[cursor[by_doc_[p].id]++] = Posting{d, by_doc_[p].count};
            }
        }
    }

    std::vector<std::string> term_names_;
    std::vector<std::string> doc_names_;
    std::unordered_map<std::string, std::uint32_t> term_lookup_;
    std::unordered_map<std::string, std::uint32_t> doc_lookup_;
    std::vector<std::size_t> doc_offsets_{0};
    std::vector<Posting> by_doc_;
    std::vector<std::size_t> term_offsets_{0};
    std::vector<Posting> by_term_;
    std::vector<Count> doc_length_;
    std::vector<Count> doc_freq_;
    std::vector<Count> total_freq_;
    Count total_tokens_ = 0;
};

/// Term ids are assigned in order of first appearance across the corpus.
inline TermDocStats build_stats(std::span<Document const> docs)
{
    TermDocStats stats;
    stats.doc_names_.reserve(docs.size());
    stats.doc_offsets_.reserve(docs.size() + 1);
    std::unordered_map<std::string_view, std::uint32_t> ids;
    std::vector<std::uint32_t> scratch;
    std::vector<std::uint32_t> touched;
    for (auto const& doc : docs) {
        stats.doc_names_.push_back(doc.doc_id);
        touched.clear();
        for (auto const& token : doc.tokens) {
            auto [it, inserted] = ids.try_emplace(token, static_cast<std::uint32_t>(stats.term_names_.size()));
            if (inserted) {
                stats.term_names_.push_back(token);
                scratch.push_back(0);
            }
            if (scratch[it->second]++ == 0) {
                touched.push_back(it->second);
            }
        }
        std::ranges::sort(touched);
        for (auto t : touched) {
            stats.by_doc_.push_back(Posting{t, scratch[t]});
            scratch[t] = 0;
        }
        stats.doc_offsets_.push_back(stats.by_doc_.size());
    }
    stats.finalize();
    return stats;
}

inline TermDocStats build_stats(std::vector<Document> const& docs)
{
    return build_stats(std::span<Document const>(docs));
}

/// (k, n, K, total count) for a cell; k = 0 when the term is absent from the
/// document.
inline CellCounts lookup(TermDocStats const& stats, TermId t, DocId d)
{
    if (!stats.contains(t)) {
        throw NotFoundError("unknown term id " + std::to_string(index(t)));
    }
    if (!stats.contains(d)) {
        throw NotFoundError("unknown document id " + std::to_string(index(d)));
    }
    return {stats.count(t, d), stats.doc_length(d), stats.doc_freq(t), stats.total_freq(t)};
}

inline CellCounts lookup(TermDocStats const& stats, std::string_view term, std::string_view doc)
{
    return lookup(stats, stats.term_id(term), stats.doc_id(doc));
}

// Snapshot layout (all integers little-endian):
//   "HGTIDFSS" | u32 version | u64 M | u64 N | M x str term | N x str doc
//   | N x (u64 distinct, distinct x (u32 term, u32 count))
// where str = u32 length + bytes.
inline constexpr std::array<char, 8> kSnapshotMagic = {'H', 'G', 'T', 'I', 'D', 'F', 'S', 'S'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class UInt>
void put(std::ostream& out, UInt value)
{
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFU);
    }
    out.write(bytes.data(), bytes.size());
}

template <class UInt>
UInt get(std::istream& in)
{
    std::array<unsigned char, sizeof(UInt)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw ParseError("snapshot truncated");
    }
    UInt value = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        value |= static_cast<UInt>(static_cast<UInt>(bytes[i]) << (8 * i));
    }
    return value;
}

inline void put_string(std::ostream& out, std::string const& s)
{
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in)
{
    auto const size = get<std::uint32_t>(in);
    std::string s(size, '\0');
    in.read(s.data(), size);
    if (in.gcount() != static_cast<std::streamsize>(size)) {
        throw ParseError("snapshot truncated");
    }
    return s;
}

}  // namespace detail

inline void write_snapshot(TermDocStats const& stats, std::ostream& out)
{
    out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
    detail::put<std::uint32_t>(out, kSnapshotVersion);
    detail::put<std::uint64_t>(out, stats.num_terms());
    detail::put<std::uint64_t>(out, stats.num_docs());
    for (auto const& t : stats.term_names_) {
        detail::put_string(out, t);
    }
    for (auto const& d : stats.doc_names_) {
        detail::put_string(out, d);
    }
    for (std::size_t d = 0; d < stats.num_docs(); ++d) {
        auto terms = stats.doc_terms(DocId{static_cast<std::uint32_t>(d)});
        detail::put<std::uint64_t>(out, terms.size());
        for (auto const& p : terms) {
            detail::put<std::uint32_t>(out, p.id);
            detail::put<std::uint32_t>(out, p.count);
        }
    }
    if (!out) {
        throw Error("failed to write snapshot");
    }
}

inline TermDocStats read_snapshot(std::istream& in)
{
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kSnapshotMagic) {
        throw ParseError("not a stats snapshot (bad magic header)");
    }
    auto const version = detail::get<std::uint32_t>(in);
    if (version != kSnapshotVersion) {
        throw ParseError("unsupported snapshot version " + std::to_string(version));
    }
    auto const n_terms = detail::get<std::uint64_t>(in);
    auto const n_docs = detail::get<std::uint64_t>(in);
    if (n_terms > UINT32_MAX || n_docs > UINT32_MAX) {
        throw ParseError("snapshot dimensions out of range");
    }
    TermDocStats stats;
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        stats.term_names_.push_back(detail::get_string(in));
    }
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        stats.doc_names_.push_back(detail::get_string(in));
    }
    for (std::uint64_t d = 0; d < n_docs; ++d) {
        auto const distinct = detail::get<std::uint64_t>(in);
        if (distinct > n_terms) {
            throw ParseError("snapshot document " + std::to_string(d) + " lists too many terms");
        }
        std::uint64_t previous = 0;
        for (std::uint64_t j = 0; j < distinct; ++j) {
            auto const term = detail::get<std::uint32_t>(in);
            auto const count = detail::get<std::uint32_t>(in);
            if (term >= n_terms || count == 0 || (j > 0 && term <= previous)) {
                throw ParseError("corrupt posting in snapshot document " + std::to_string(d));
            }
            previous = term;
            stats.by_doc_.push_back(Posting{term, count});
        }
        stats.doc_offsets_.push_back(stats.by_doc_.size());
    }
    stats.finalize();
    for (std::size_t t = 0; t < stats.num_terms(); ++t) {
        if (stats.doc_freq_[t] == 0) {
            throw ParseError("snapshot term \"" + stats.term_names_[t] + "\" never occurs");
        }
    }
    return stats;
}

inline void save_snapshot(TermDocStats const& stats, std::filesystem::path const& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open for writing: " + path.string());
    }
    write_snapshot(stats, out);
}

inline TermDocStats load_snapshot(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open snapshot: " + path.string());
    }
    try {
        return read_snapshot(in);
    } catch (ParseError const& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace hgtidf
