#include "eam/csv.hpp"

#include <ostream>
#include <stdexcept>

namespace eam::csv {

std::vector<NumberedRecord> parse(std::string_view text) {
    std::vector<NumberedRecord> out;
    NumberedRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) {
            out.push_back(std::move(current));
        }
        current = NumberedRecord{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) {
                    throw std::runtime_error("csv: stray quote on line " + std::to_string(line));
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                end_record();
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) {
        throw std::runtime_error("csv: unterminated quoted field starting before line " +
                                 std::to_string(line));
    }
    if (field_started || !field.empty() || !current.fields.empty()) {
        end_record();
    }
    return out;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, const Record& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << escape(record[i]);
    }
    out << "\r\n";
}

}  // namespace eam::csv
