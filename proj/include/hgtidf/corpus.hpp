#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hgtidf/detail/number_words.hpp"
#include "hgtidf/detail/xml_records.hpp"
#include "hgtidf/error.hpp"

namespace hgtidf {

struct RawDocument {
    std::string doc_id;
    std::string text;

    friend bool operator==(RawDocument const&, RawDocument const&) = default;
};

struct Document {
    std::string doc_id;
    std::vector<std::string> tokens;

    friend bool operator==(Document const&, Document const&) = default;
};

enum class Normalizer { none, simple_suffix };

inline constexpr std::string_view kAsciiPunctuation = R"(!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~)";

struct PipelineConfig {
    std::unordered_set<std::string> stopwords;
    bool strip_non_ascii = true;
    bool number_to_words = true;
    Normalizer normalizer = Normalizer::none;
    std::string punctuation{kAsciiPunctuation};
};

namespace detail {

inline std::string read_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error("cannot read file: " + path.string());
    }
    return std::move(buffer).str();
}

inline bool is_ascii(std::string_view s)
{
    return std::ranges::all_of(s, [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

inline void to_lower_ascii(std::string& s)
{
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
}

inline void strip_chars(std::string& s, std::string_view set)
{
    std::erase_if(s, [set](char c) { return set.find(c) != std::string_view::npos; });
}

inline bool is_whitespace(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::vector<std::string_view> split_whitespace(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_whitespace(text[i])) {
            ++i;
        }
        auto const start = i;
        while (i < text.size() && !is_whitespace(text[i])) {
            ++i;
        }
        if (i > start) {
            out.push_back(text.substr(start, i - start));
        }
    }
    return out;
}

// Plural stripping: "-ies" -> "-y", and a final "s" not preceded by s/u/i.
// Idempotent: the output never matches a rule again.
inline std::string simple_suffix(std::string token)
{
    if (token.size() > 4 && token.ends_with("ies")) {
        token.resize(token.size() - 3);
        token.push_back('y');
        return token;
    }
    if (token.size() > 3 && token.back() == 's') {
        char const prev = token[token.size() - 2];
        if (prev != 's' && prev != 'u' && prev != 'i') {
            token.pop_back();
        }
    }
    return token;
}

}  // namespace detail

/// Normalizes one stopword entry the same way document tokens are (lowercase,
/// punctuation removed).
inline std::string normalize_stopword(std::string_view word, std::string_view punctuation = kAsciiPunctuation)
{
    std::string out(word);
    detail::to_lower_ascii(out);
    detail::strip_chars(out, punctuation);
    return out;
}

/// Reads a stopword list, one term per line. Blank lines and lines starting
/// with '#' are skipped; entries are normalized.
inline std::unordered_set<std::string> load_stopwords(std::filesystem::path const& path,
                                                      std::string_view punctuation = kAsciiPunctuation)
{
    std::unordered_set<std::string> words;
    std::istringstream lines(detail::read_file(path));
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto word = normalize_stopword(line, punctuation);
        if (!word.empty()) {
            words.insert(std::move(word));
        }
    }
    return words;
}

/// One document per line: {"id": string, "text": string}. Whitespace-only
/// lines are skipped.
inline std::vector<RawDocument> ingest_jsonl(std::filesystem::path const& path)
{
    std::istringstream lines(detail::read_file(path));
    std::vector<RawDocument> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (std::ranges::all_of(line, detail::is_whitespace)) {
            continue;
        }
        auto const where = path.string() + ":" + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (nlohmann::json::parse_error const& e) {
            throw ParseError("malformed JSON at line " + std::to_string(line_no) + " (" + where +
                             "): " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") ||
            !obj["id"].is_string() || !obj["text"].is_string()) {
            throw ParseError("line " + std::to_string(line_no) + " (" + where +
                             ") must be an object with string fields \"id\" and \"text\"");
        }
        RawDocument doc{obj["id"].get<std::string>(), obj["text"].get<std::string>()};
        if (!seen.insert(doc.doc_id).second) {
            throw ParseError("duplicate document id \"" + doc.doc_id + "\" at line " +
                             std::to_string(line_no));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

/// One document per `.txt` file, id = file stem, lexicographic by file name.
inline std::vector<RawDocument> ingest_txt_dir(std::filesystem::path const& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw Error("not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (auto const& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".txt" && !entry.is_directory()) {
            files.push_back(entry.path());
        }
    }
    std::ranges::sort(files, [](fs::path const& a, fs::path const& b) {
        return a.filename().string() < b.filename().string();
    });
    std::vector<RawDocument> docs;
    docs.reserve(files.size());
    for (auto const& file : files) {
        docs.push_back({file.stem().string(), detail::read_file(file)});
    }
    return docs;
}

/// Reads the body text of every <document> record from NYSK-style XML.
/// Records are numbered "0", "1", ... in document order.
inline std::vector<RawDocument> parse_nysk_xml(std::string_view xml, std::string_view record_tag = "document",
                                               std::string_view text_tag = "text")
{
    auto texts = detail::XmlRecordScanner(xml, record_tag, text_tag).run();
    std::vector<RawDocument> docs;
    docs.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        docs.push_back({std::to_string(i), std::move(texts[i])});
    }
    return docs;
}

inline std::vector<RawDocument> ingest_nysk_xml(std::filesystem::path const& path)
{
    auto const content = detail::read_file(path);
    try {
        return parse_nysk_xml(content);
    } catch (ParseError const& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Whitespace split, then per token: non-ASCII removal, lowercasing,
/// punctuation stripping, integer-to-words, stopword removal, normalizer.
/// A token is also dropped when its normalized form is a stopword.
inline Document preprocess(RawDocument const& raw, PipelineConfig const& cfg)
{
    Document doc{raw.doc_id, {}};
    auto keep = [&](std::string token) {
        if (token.empty() || cfg.stopwords.contains(token)) {
            return;
        }
        if (cfg.normalizer == Normalizer::simple_suffix) {
            token = detail::simple_suffix(std::move(token));
            if (cfg.stopwords.contains(token)) {
                return;
            }
        }
        doc.tokens.push_back(std::move(token));
    };
    for (auto piece : detail::split_whitespace(raw.text)) {
        if (cfg.strip_non_ascii && !detail::is_ascii(piece)) {
            continue;
        }
        std::string token(piece);
        detail::to_lower_ascii(token);
        detail::strip_chars(token, cfg.punctuation);
        if (token.empty()) {
            continue;
        }
        if (cfg.number_to_words) {
            if (auto value = detail::parse_unsigned(token)) {
                for (auto& word : detail::number_to_words(*value)) {
                    keep(std::move(word));
                }
                continue;
            }
        }
        keep(std::move(token));
    }
    return doc;
}

inline std::vector<Document> preprocess_all(std::vector<RawDocument> const& raw, PipelineConfig const& cfg)
{
    std::vector<Document> docs;
    docs.reserve(raw.size());
    for (auto const& r : raw) {
        docs.push_back(preprocess(r, cfg));
    }
    return docs;
}

}  // namespace hgtidf
