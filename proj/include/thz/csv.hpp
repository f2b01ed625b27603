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

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace thz {

// RFC-4180 writer. Doubles use %.17g so a reader recovers the exact value.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void row(const std::vector<std::string>& fields);
    std::string str() const;

    /// Writes to <path>.tmp and renames, so a failed run never leaves a partial file.
    /// An optional comment line ("# ...") is placed before the header.
    void write_file(const std::string& path, const std::optional<std::string>& comment = {}) const;

    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string csv_double(double value);
std::string csv_int(long long value);
std::string csv_escape(const std::string& field);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

/// Parses RFC-4180 text; lines starting with '#' before the header are skipped.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

} // namespace thz
