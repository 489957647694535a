#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "error.hpp"

namespace rarm::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0; ///< 1-based line where the record starts
};

/// RFC 4180 record reader. Quoted fields may contain commas, doubled quotes and
/// line breaks. A trailing '\r' before '\n' is dropped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::optional<Record> next() {
        Record rec;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        bool any = false;
        rec.line = line_ + 1;
        int ch;
        while ((ch = in_.get()) != std::char_traits<char>::eof()) {
            any = true;
            const char c = static_cast<char>(ch);
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        in_quotes = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(c);
                }
                continue;
            }
            if (c == '"') {
                if (!field.empty() || field_was_quoted) {
                    throw ParseError(line_ + 1, "unexpected quote inside unquoted field");
                }
                in_quotes = true;
                field_was_quoted = true;
            } else if (c == ',') {
                rec.fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
            } else if (c == '\n') {
                ++line_;
                if (!field.empty() && field.back() == '\r' && !field_was_quoted) field.pop_back();
                rec.fields.push_back(std::move(field));
                return rec;
            } else if (c == '\r' && in_.peek() == '\n') {
                // swallowed; the '\n' ends the record
            } else {
                if (field_was_quoted) throw ParseError(line_ + 1, "characters after closing quote");
                field.push_back(c);
            }
        }
        if (in_quotes) throw ParseError(rec.line, "unterminated quoted field");
        if (!any) return std::nullopt;
        ++line_;
        rec.fields.push_back(std::move(field));
        return rec;
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

inline bool is_blank(const Record& r) { return r.fields.size() == 1 && r.fields[0].empty(); }

/// Quotes a field when it holds a comma, quote, or line break.
inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return std::to_string(v);
    return std::string(buf, ptr);
}

/// Fixed notation with `digits` decimals.
inline std::string format_fixed(double v, int digits) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    if (ec != std::errc{}) return std::to_string(v);
    return std::string(buf, ptr);
}

} // namespace rarm::csv
