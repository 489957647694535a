#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "context.hpp"
#include "csv.hpp"
#include "error.hpp"

namespace rarm {

/// Reads the pair-list format: one `tid,item` record per line, optional
/// `tid,item` header, blank lines ignored.
inline Context read_context(std::istream& in) {
    csv::Reader reader(in);
    ContextBuilder builder;
    bool first = true;
    while (auto rec = reader.next()) {
        if (csv::is_blank(*rec)) continue;
        if (first) {
            first = false;
            if (rec->fields.size() == 2 && rec->fields[0] == "tid" && rec->fields[1] == "item") continue;
        }
        if (rec->fields.size() != 2) {
            throw ParseError(rec->line, "expected 2 fields (tid,item), got " + std::to_string(rec->fields.size()));
        }
        if (rec->fields[0].empty() || rec->fields[1].empty()) {
            throw ParseError(rec->line, "empty tid or item");
        }
        builder.add(rec->fields[0], rec->fields[1]);
    }
    if (builder.object_count() == 0) throw EmptyContextError("context has no (tid,item) pairs");
    return std::move(builder).build();
}

inline Context load_context(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open context file " + path.string());
    return read_context(in);
}

/// Writes the pair-list format with a header. Objects without items cannot be
/// represented and are omitted.
inline void write_context(std::ostream& out, const Context& c) {
    out << "tid,item\n";
    for (Tid t = 0; t < c.m(); ++t) {
        for (ItemId i : c.object(t)) out << csv::escape(c.tid_name(t)) << ',' << csv::escape(c.item_name(i)) << '\n';
    }
}

/// One ground-truth object name per line; surrounding whitespace trimmed,
/// blank lines skipped.
inline std::vector<std::string> read_labels(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r\n");
        out.push_back(line.substr(b, e - b + 1));
    }
    return out;
}

inline std::vector<std::string> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file " + path.string());
    return read_labels(in);
}

/// Converts a 0/1 matrix export (header: object column then one column per
/// item) into pair-list records. Any value other than "", "0", "0.0" or
/// "false" counts as present.
inline void convert_matrix_csv(std::istream& in, std::ostream& out) {
    csv::Reader reader(in);
    auto header = reader.next();
    while (header && csv::is_blank(*header)) header = reader.next();
    if (!header) throw EmptyContextError("matrix export is empty");
    if (header->fields.size() < 2) throw ParseError(header->line, "matrix header needs an object column and at least one item");
    out << "tid,item\n";
    while (auto rec = reader.next()) {
        if (csv::is_blank(*rec)) continue;
        if (rec->fields.size() != header->fields.size()) {
            throw ParseError(rec->line, "expected " + std::to_string(header->fields.size()) + " fields, got " +
                                            std::to_string(rec->fields.size()));
        }
        const auto& tid = rec->fields[0];
        if (tid.empty()) throw ParseError(rec->line, "empty object identifier");
        for (std::size_t k = 1; k < rec->fields.size(); ++k) {
            const auto& v = rec->fields[k];
            if (v.empty() || v == "0" || v == "0.0" || v == "false") continue;
            out << csv::escape(tid) << ',' << csv::escape(header->fields[k]) << '\n';
        }
    }
}

/// Converts basket records (`tid,item1,item2,...`) into pair-list records.
inline void convert_basket_csv(std::istream& in, std::ostream& out) {
    csv::Reader reader(in);
    out << "tid,item\n";
    while (auto rec = reader.next()) {
        if (csv::is_blank(*rec)) continue;
        const auto& tid = rec->fields[0];
        if (tid.empty()) throw ParseError(rec->line, "empty object identifier");
        for (std::size_t k = 1; k < rec->fields.size(); ++k) {
            if (rec->fields[k].empty()) continue;
            out << csv::escape(tid) << ',' << csv::escape(rec->fields[k]) << '\n';
        }
    }
}

/// Writes `content` to `path` through a sibling temporary file and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << content;
        out.flush();
        if (!out) throw IoError("short write to " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place: " + path.string());
    }
}

} // namespace rarm
