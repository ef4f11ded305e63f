#include "dpht/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "dpht/error.hpp"

namespace dpht {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line, const std::string& column) {
    double value = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        parse_error(line, "column '" + column + "': '" + std::string(field) + "' is not a number");
    }
    if (!std::isfinite(value)) parse_error(line, "column '" + column + "': value must be finite");
    return value;
}

std::vector<std::string> default_columns(InputFormat format) {
    switch (format) {
        case InputFormat::grouped: return {"group", "value"};
        case InputFormat::paired: return {"u", "v"};
        case InputFormat::single: return {"value"};
    }
    return {};
}

}  // namespace

const char* to_string(InputFormat format) noexcept {
    switch (format) {
        case InputFormat::grouped: return "grouped";
        case InputFormat::paired: return "paired";
        case InputFormat::single: return "single";
    }
    return "unknown";
}

std::optional<InputFormat> parse_input_format(std::string_view name) noexcept {
    if (name == "grouped") return InputFormat::grouped;
    if (name == "paired") return InputFormat::paired;
    if (name == "single") return InputFormat::single;
    return std::nullopt;
}

Dataset parse_csv(std::istream& in, const InputSpec& spec, GroupLabels* labels) {
    const std::vector<std::string> wanted = spec.columns.empty() ? default_columns(spec.format) : spec.columns;
    if (wanted.size() != default_columns(spec.format).size()) {
        throw Error(ErrorCode::invalid_parameter,
                    std::string(to_string(spec.format)) + " input needs " +
                        std::to_string(default_columns(spec.format).size()) + " column names");
    }

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        have_header = !trim(line).empty();
    }
    if (!have_header) throw Error(ErrorCode::parse, "input is empty (expected a header row)");

    const auto header = split_fields(line);
    std::vector<std::size_t> index;
    for (const auto& name : wanted) {
        std::size_t found = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) found = i;
        }
        if (found == header.size()) parse_error(line_no, "header has no column '" + name + "'");
        index.push_back(found);
    }

    std::vector<std::vector<double>> groups;
    std::map<std::string, std::size_t, std::less<>> group_index;
    std::vector<std::string> order;
    std::vector<Pair> pairs;
    std::vector<double> values;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            parse_error(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(fields.size()));
        }
        switch (spec.format) {
            case InputFormat::grouped: {
                const std::string_view label = fields[index[0]];
                if (label.empty()) parse_error(line_no, "empty group label");
                const double x = parse_number(fields[index[1]], line_no, wanted[1]);
                auto it = group_index.find(label);
                if (it == group_index.end()) {
                    it = group_index.emplace(std::string(label), groups.size()).first;
                    order.emplace_back(label);
                    groups.emplace_back();
                }
                groups[it->second].push_back(x);
                break;
            }
            case InputFormat::paired:
                pairs.push_back({parse_number(fields[index[0]], line_no, wanted[0]),
                                 parse_number(fields[index[1]], line_no, wanted[1])});
                break;
            case InputFormat::single: values.push_back(parse_number(fields[index[0]], line_no, wanted[0])); break;
        }
    }

    switch (spec.format) {
        case InputFormat::grouped: {
            if (spec.declared_groups) {
                if (*spec.declared_groups < groups.size()) {
                    throw Error(ErrorCode::invalid_input, "file has " + std::to_string(groups.size()) +
                                                              " groups but only " +
                                                              std::to_string(*spec.declared_groups) + " were declared");
                }
                groups.resize(*spec.declared_groups);
            }
            if (labels) labels->labels = order;
            return GroupedSample(std::move(groups));
        }
        case InputFormat::paired: return PairedSample(std::move(pairs));
        case InputFormat::single: return BoundedSample(std::move(values));
    }
    throw Error(ErrorCode::invalid_parameter, "unknown input format");
}

Dataset ingest(const InputSpec& spec, GroupLabels* labels) {
    std::ifstream in(spec.path);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + spec.path + "'");
    return parse_csv(in, spec, labels);
}

}  // namespace dpht
