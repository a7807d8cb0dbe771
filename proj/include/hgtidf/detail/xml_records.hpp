#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hgtidf/error.hpp"

namespace hgtidf::detail {

// Minimal non-validating XML scanner. It checks tag balance and lexical
// well-formedness, and collects the character data of every <text_tag>
// element nested in a <record_tag> element. DTDs are skipped, not
// interpreted; undeclared entity references are kept verbatim.
class XmlRecordScanner {
  public:
    XmlRecordScanner(std::string_view input, std::string_view record_tag, std::string_view text_tag)
        : in_(input), record_tag_(record_tag), text_tag_(text_tag)
    {}

    std::vector<std::string> run()
    {
        bool seen_root = false;
        while (pos_ < in_.size()) {
            if (in_[pos_] == '<') {
                markup(seen_root);
            } else {
                character_data();
            }
        }
        if (!stack_.empty()) {
            fail("unexpected end of input, unclosed <" + stack_.back() + ">");
        }
        if (!seen_root) {
            fail("no root element");
        }
        return std::move(records_);
    }

  private:
    [[noreturn]] void fail(std::string const& what) const { fail_at(pos_, what); }

    [[noreturn]] static void fail_at(std::size_t offset, std::string const& what)
    {
        throw ParseError("XML parse error at byte offset " + std::to_string(offset) + ": " + what);
    }

    bool starts_with(std::string_view s) const { return in_.substr(pos_).starts_with(s); }

    std::size_t find_or_fail(std::string_view terminator, std::string const& what) const
    {
        auto const at = in_.find(terminator, pos_);
        if (at == std::string_view::npos) {
            fail_at(in_.size(), what);
        }
        return at;
    }

    static bool is_name_char(char c)
    {
        auto const u = static_cast<unsigned char>(c);
        return std::isalnum(u) != 0 || c == '_' || c == '-' || c == '.' || c == ':' || u >= 0x80;
    }

    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

    std::string read_name()
    {
        auto const start = pos_;
        while (pos_ < in_.size() && is_name_char(in_[pos_])) {
            ++pos_;
        }
        if (pos_ == start) {
            fail("expected element name");
        }
        return std::string(in_.substr(start, pos_ - start));
    }

    void skip_space()
    {
        while (pos_ < in_.size() && is_space(in_[pos_])) {
            ++pos_;
        }
    }

    bool capturing() const { return capture_depth_ != 0; }

    void markup(bool& seen_root)
    {
        if (starts_with("<?")) {
            pos_ = find_or_fail("?>", "unterminated processing instruction") + 2;
        } else if (starts_with("<!--")) {
            pos_ = find_or_fail("-->", "unterminated comment") + 3;
        } else if (starts_with("<![CDATA[")) {
            if (stack_.empty()) {
                fail("CDATA outside the root element");
            }
            auto const start = pos_ + 9;
            pos_ = start;
            auto const end = find_or_fail("]]>", "unterminated CDATA section");
            if (capturing()) {
                current_text_.append(in_.substr(start, end - start));
            }
            pos_ = end + 3;
        } else if (starts_with("<!")) {
            skip_declaration();
        } else if (starts_with("</")) {
            auto const at = pos_;
            pos_ += 2;
            auto name = read_name();
            skip_space();
            if (pos_ >= in_.size() || in_[pos_] != '>') {
                fail_at(pos_ >= in_.size() ? in_.size() : pos_, "expected '>' in end tag");
            }
            ++pos_;
            if (stack_.empty() || stack_.back() != name) {
                fail_at(at, "mismatched end tag </" + name + ">");
            }
            close_element(name, at);
        } else {
            auto const at = pos_;
            ++pos_;
            auto name = read_name();
            bool self_closing = false;
            while (true) {
                skip_space();
                if (pos_ >= in_.size()) {
                    fail_at(in_.size(), "unterminated start tag <" + name + ">");
                }
                if (in_[pos_] == '>') {
                    ++pos_;
                    break;
                }
                if (starts_with("/>")) {
                    pos_ += 2;
                    self_closing = true;
                    break;
                }
                attribute();
            }
            if (stack_.empty()) {
                if (seen_root) {
                    fail_at(at, "more than one root element");
                }
                seen_root = true;
            }
            open_element(name, at);
            if (self_closing) {
                close_element(name, at);
            }
        }
    }

    void attribute()
    {
        read_name();
        skip_space();
        if (pos_ >= in_.size() || in_[pos_] != '=') {
            fail("expected '=' after attribute name");
        }
        ++pos_;
        skip_space();
        if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\'')) {
            fail("expected quoted attribute value");
        }
        char const quote = in_[pos_++];
        auto const end = in_.find(quote, pos_);
        if (end == std::string_view::npos) {
            fail_at(in_.size(), "unterminated attribute value");
        }
        pos_ = end + 1;
    }

    void skip_declaration()
    {
        int bracket = 0;
        for (pos_ += 2; pos_ < in_.size(); ++pos_) {
            char const c = in_[pos_];
            if (c == '[') {
                ++bracket;
            } else if (c == ']') {
                --bracket;
            } else if (c == '>' && bracket <= 0) {
                ++pos_;
                return;
            }
        }
        fail_at(in_.size(), "unterminated declaration");
    }

    void open_element(std::string const& name, std::size_t at)
    {
        if (name == record_tag_) {
            if (in_record_) {
                fail_at(at, "nested <" + name + "> record");
            }
            in_record_ = true;
            record_has_text_ = false;
            current_text_.clear();
            record_depth_ = stack_.size() + 1;
        } else if (name == text_tag_ && in_record_ && !capturing()) {
            if (record_has_text_) {
                current_text_.push_back(' ');
            }
            record_has_text_ = true;
            capture_depth_ = stack_.size() + 1;
        }
        stack_.push_back(name);
    }

    void close_element(std::string const& name, std::size_t at)
    {
        if (capturing() && stack_.size() == capture_depth_) {
            capture_depth_ = 0;
        }
        if (in_record_ && stack_.size() == record_depth_ && name == record_tag_) {
            if (!record_has_text_) {
                fail_at(at, "record " + std::to_string(records_.size()) + " has no <" +
                                std::string(text_tag_) + "> element");
            }
            records_.push_back(std::move(current_text_));
            current_text_.clear();
            in_record_ = false;
        }
        stack_.pop_back();
    }

    void character_data()
    {
        auto const start = pos_;
        auto end = in_.find('<', pos_);
        if (end == std::string_view::npos) {
            end = in_.size();
        }
        auto const raw = in_.substr(start, end - start);
        if (stack_.empty()) {
            for (char c : raw) {
                if (!is_space(c)) {
                    fail("character data outside the root element");
                }
            }
        } else if (capturing()) {
            decode_into(raw, start, current_text_);
        }
        pos_ = end;
    }

    static void append_utf8(std::uint32_t cp, std::string& out)
    {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    static void decode_into(std::string_view raw, std::size_t base, std::string& out)
    {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            auto const semi = raw.find(';', i);
            if (semi == std::string_view::npos) {
                fail_at(base + i, "unterminated entity reference");
            }
            auto const name = raw.substr(i + 1, semi - i - 1);
            if (name == "amp") {
                out.push_back('&');
            } else if (name == "lt") {
                out.push_back('<');
            } else if (name == "gt") {
                out.push_back('>');
            } else if (name == "quot") {
                out.push_back('"');
            } else if (name == "apos") {
                out.push_back('\'');
            } else if (name.starts_with('#')) {
                bool const hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
                auto const digits = name.substr(hex ? 2 : 1);
                std::uint32_t cp = 0;
                if (digits.empty() || digits.size() > 8) {
                    fail_at(base + i, "bad character reference");
                }
                for (char c : digits) {
                    int d = -1;
                    if (c >= '0' && c <= '9') {
                        d = c - '0';
                    } else if (hex && c >= 'a' && c <= 'f') {
                        d = c - 'a' + 10;
                    } else if (hex && c >= 'A' && c <= 'F') {
                        d = c - 'A' + 10;
                    }
                    if (d < 0) {
                        fail_at(base + i, "bad character reference");
                    }
                    cp = cp * (hex ? 16U : 10U) + static_cast<std::uint32_t>(d);
                }
                if (cp > 0x10FFFF) {
                    fail_at(base + i, "character reference out of range");
                }
                append_utf8(cp, out);
            } else {
                out.append(raw.substr(i, semi - i + 1));
            }
            i = semi;
        }
    }

    std::string_view in_;
    std::string_view record_tag_;
    std::string_view text_tag_;
    std::size_t pos_ = 0;
    std::vector<std::string> stack_;
    std::vector<std::string> records_;
    std::string current_text_;
    bool in_record_ = false;
    bool record_has_text_ = false;
    std::size_t record_depth_ = 0;
    std::size_t capture_depth_ = 0;
};

}  // namespace hgtidf::detail
