// Copyright 2026 The thzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "thz/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thz/errors.hpp"

namespace thz {

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    if (fields.size() != header_.size())
        throw ShapeMismatch("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header_.size()));
    rows_.push_back(fields);
}

std::string CsvWriter::str() const
{
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i)
                out << ',';
            out << csv_escape(fields[i]);
        }
        out << "\r\n";
    };
    emit(header_);
    for (const auto& r : rows_)
        emit(r);
    return out.str();
}

void CsvWriter::write_file(const std::string& path, const std::optional<std::string>& comment) const
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw ValueError("cannot write '" + path + "'");
        if (comment)
            out << "# " << *comment << "\r\n";
        out << str();
        if (!out)
            throw ValueError("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string csv_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string csv_int(long long value)
{
    return std::to_string(value);
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name)
            return i;
    }
    throw ValueError("CSV has no column '" + name + "'");
}

CsvTable parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool at_line_start = true;
    bool skipping_comment = false;

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (skipping_comment) {
            if (c == '\n') {
                skipping_comment = false;
                at_line_start = true;
            }
            continue;
        }
        if (at_line_start && records.empty() && c == '#') {
            skipping_comment = true;
            continue;
        }
        at_line_start = false;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            // swallowed; '\n' terminates
        } else if (c == '\n') {
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            at_line_start = true;
        } else {
            field += c;
        }
    }
    if (!field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }

    CsvTable table;
    if (records.empty())
        return table;
    table.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != table.header.size())
            throw ValueError("CSV record " + std::to_string(i) + " has the wrong field count");
        table.rows.push_back(std::move(records[i]));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValueError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

} // namespace thz
