#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eam::csv {

using Record = std::vector<std::string>;

/// A parsed record and the 1-based line it started on.
struct NumberedRecord {
    Record fields;
    std::size_t line = 0;
};

/// RFC-4180 reader: quoted fields may contain commas, doubled quotes and line
/// breaks. Accepts LF or CRLF. Blank lines are skipped.
std::vector<NumberedRecord> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Writes one record terminated by CRLF, as RFC-4180 prescribes.
void write_record(std::ostream& out, const Record& record);

}  // namespace eam::csv
