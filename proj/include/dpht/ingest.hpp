#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "dpht/samples.hpp"

namespace dpht {

enum class InputFormat { grouped, paired, single };

const char* to_string(InputFormat format) noexcept;
std::optional<InputFormat> parse_input_format(std::string_view name) noexcept;

struct InputSpec {
    std::string path;
    InputFormat format = InputFormat::grouped;
    // Header names to read; empty uses the defaults (group,value | u,v | value).
    std::vector<std::string> columns;
    // Number of valid groups when some have no observations in the file.
    std::optional<std::size_t> declared_groups;
};

struct GroupLabels {
    std::vector<std::string> labels;  // index -> label, first-appearance order
};

// Comma-separated text with a header row. Group labels become indices in
// order of first appearance.
Dataset parse_csv(std::istream& in, const InputSpec& spec, GroupLabels* labels = nullptr);
Dataset ingest(const InputSpec& spec, GroupLabels* labels = nullptr);

}  // namespace dpht
