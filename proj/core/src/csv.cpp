#include "skewguard/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace skewguard {

namespace {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

[[noreturn]] void parse_fail(std::size_t row, std::size_t col, const std::string& what) {
    raise(Errc::ParseError,
          what + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")");
}

// RFC-4180 tokenizer; quoted fields may contain separators and newlines.
RawTable read_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open '" + path.string() + "' for reading");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    RawTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t row = 1, col = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        ++col;
    };
    auto end_record = [&] {
        end_field();
        if (table.header.empty())
            table.header = std::move(record);
        else {
            if (record.size() != table.header.size())
                parse_fail(row, record.size(),
                           "expected " + std::to_string(table.header.size()) + " fields, got " +
                               std::to_string(record.size()));
            table.rows.push_back(std::move(record));
        }
        record.clear();
        ++row;
        col = 1;
    };

    std::size_t i = 0;
    const std::size_t len = text.size();
    bool any_char = false;
    while (i < len) {
        const char c = text[i];
        any_char = true;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < len && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field.push_back(c);
                ++i;
            }
        } else if (c == '"') {
            if (!field.empty()) parse_fail(row, col, "quote inside unquoted field");
            in_quotes = true;
            field_was_quoted = true;
            ++i;
        } else if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < len && text[i + 1] == '\n') ++i;
            ++i;
            // tolerate a trailing newline at EOF
            if (i >= len) return table;
        } else {
            field.push_back(c);
            ++i;
        }
    }
    if (in_quotes) parse_fail(row, col, "unterminated quoted field");
    if (any_char && (!field.empty() || !record.empty() || field_was_quoted)) end_record();
    if (table.header.empty()) raise(Errc::ParseError, "missing header row");
    return table;
}

double parse_numeric(const std::string& s, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        parse_fail(row, col, "cannot parse '" + s + "' as a number");
    return v;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(Errc::IoError, "cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) raise(Errc::IoError, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) raise(Errc::IoError, "rename to '" + path.string() + "' failed: " + ec.message());
}

Dataset read_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
    const RawTable raw = read_raw(path);
    const std::size_t ncols = raw.header.size();

    std::unordered_map<std::string, std::size_t> col_of;
    for (std::size_t j = 0; j < ncols; ++j) {
        if (col_of.count(raw.header[j]))
            raise(Errc::ParseError, "duplicate column name '" + raw.header[j] + "'");
        col_of[raw.header[j]] = j;
    }
    // the spec's CLI contract reports a missing label column as NonBinaryLabel
    if (!col_of.count(options.label_column))
        raise(Errc::NonBinaryLabel, "label column '" + options.label_column + "' not found");
    for (const auto& c : options.categorical_columns)
        if (!col_of.count(c)) raise(Errc::ParseError, "categorical column '" + c + "' not found");
    for (const auto& c : options.log1p_columns)
        if (!col_of.count(c)) raise(Errc::ParseError, "log1p column '" + c + "' not found");

    const std::size_t label_idx = col_of[options.label_column];
    Dataset d;
    d.label_name = options.label_column;

    std::vector<std::size_t> numeric_idx, cat_idx;
    std::vector<bool> log1p_col(ncols, false);
    for (const auto& c : options.log1p_columns) log1p_col[col_of[c]] = true;
    for (std::size_t j = 0; j < ncols; ++j) {
        const std::string& name = raw.header[j];
        if (j == label_idx || contains(options.drop_columns, name)) continue;
        if (contains(options.categorical_columns, name)) {
            cat_idx.push_back(j);
            d.cat_names.push_back(name);
        } else {
            numeric_idx.push_back(j);
            d.feature_names.push_back(log1p_col[j] ? "log1p_" + name : name);
        }
    }

    const std::size_t n = raw.rows.size();
    d.X = Matrix(n, numeric_idx.size());
    d.y.resize(n);
    d.cat_codes.assign(cat_idx.size(), {});
    d.cat_dicts.assign(cat_idx.size(), {});
    std::vector<std::unordered_map<std::string, int>> dict_lookup(cat_idx.size());

    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = raw.rows[i];
        const std::size_t file_row = i + 2;  // 1-based, header is row 1
        for (std::size_t k = 0; k < numeric_idx.size(); ++k) {
            const std::size_t j = numeric_idx[k];
            if (rec[j].empty())
                raise(Errc::MissingValue, "empty value at row " + std::to_string(file_row) +
                                              ", column '" + raw.header[j] + "'");
            double v = parse_numeric(rec[j], file_row, j + 1);
            if (log1p_col[j]) v = std::log1p(v);
            d.X(i, k) = v;
        }
        for (std::size_t k = 0; k < cat_idx.size(); ++k) {
            const std::size_t j = cat_idx[k];
            if (rec[j].empty())
                raise(Errc::MissingValue, "empty value at row " + std::to_string(file_row) +
                                              ", column '" + raw.header[j] + "'");
            auto [it, inserted] =
                dict_lookup[k].try_emplace(rec[j], static_cast<int>(d.cat_dicts[k].size()));
            if (inserted) d.cat_dicts[k].push_back(rec[j]);
            d.cat_codes[k].push_back(it->second);
        }
        const std::string& lab = rec[label_idx];
        if (lab == "0")
            d.y[i] = 0;
        else if (lab == "1")
            d.y[i] = 1;
        else
            raise(Errc::NonBinaryLabel, "label '" + lab + "' at row " + std::to_string(file_row) +
                                            " is not 0 or 1");
    }
    return d;
}

void write_csv(const Dataset& d, const std::filesystem::path& path,
               const CsvWriteOptions& options) {
    std::string out;
    for (std::size_t j = 0; j < d.p(); ++j) {
        if (j) out += ',';
        out += quote_if_needed(d.feature_names[j]);
    }
    for (std::size_t c = 0; c < d.q(); ++c) {
        if (d.p() + c) out += ',';
        out += quote_if_needed(d.cat_names[c]);
    }
    if (d.p() + d.q() > 0) out += ',';
    out += quote_if_needed(d.label_name);
    if (options.provenance_column) out += ",synthetic";
    out += '\n';

    for (std::size_t i = 0; i < d.n(); ++i) {
        for (std::size_t j = 0; j < d.p(); ++j) {
            if (j) out += ',';
            out += format_double(d.X(i, j));
        }
        for (std::size_t c = 0; c < d.q(); ++c) {
            if (d.p() + c) out += ',';
            out += quote_if_needed(d.cat_dicts[c][d.cat_codes[c][i]]);
        }
        if (d.p() + d.q() > 0) out += ',';
        out += (d.y[i] ? '1' : '0');
        if (options.provenance_column) {
            out += ',';
            out += (!d.synthetic.empty() && d.synthetic[i]) ? '1' : '0';
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

}  // namespace skewguard
