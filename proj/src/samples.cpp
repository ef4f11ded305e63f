#include "dpht/samples.hpp"

#include <cmath>
#include <string>

#include "dpht/error.hpp"

namespace dpht {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid input";
        case ErrorCode::invalid_parameter: return "invalid parameter";
        case ErrorCode::degenerate: return "degenerate input";
        case ErrorCode::parse: return "parse error";
        case ErrorCode::range: return "range error";
        case ErrorCode::io: return "i/o error";
    }
    return "unknown error";
}

GroupedSample::GroupedSample(std::vector<std::vector<double>> groups) : groups_(std::move(groups)) {
    if (groups_.size() < 2) {
        throw Error(ErrorCode::invalid_input, "a grouped sample needs at least 2 groups");
    }
    for (const auto& group : groups_) {
        for (const double x : group) {
            if (!std::isfinite(x)) throw Error(ErrorCode::invalid_input, "observations must be finite");
        }
        size_ += group.size();
    }
    if (size_ < 2) {
        throw Error(ErrorCode::invalid_input, "a grouped sample needs at least 2 observations");
    }
}

std::vector<double> GroupedSample::pooled() const {
    std::vector<double> out;
    out.reserve(size_);
    for (const auto& group : groups_) out.insert(out.end(), group.begin(), group.end());
    return out;
}

PairedSample::PairedSample(std::vector<Pair> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw Error(ErrorCode::invalid_input, "a paired sample needs at least 1 row");
    for (const Pair& row : rows_) {
        if (!std::isfinite(row.u) || !std::isfinite(row.v)) {
            throw Error(ErrorCode::invalid_input, "observations must be finite");
        }
    }
}

std::vector<double> PairedSample::differences() const {
    std::vector<double> d;
    d.reserve(rows_.size());
    for (const Pair& row : rows_) d.push_back(row.difference());
    return d;
}

BoundedSample::BoundedSample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw Error(ErrorCode::invalid_input, "the t-test needs at least 2 observations");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double x = values_[i];
        if (!std::isfinite(x)) throw Error(ErrorCode::invalid_input, "observations must be finite");
        if (x < -1.0 || x > 1.0) {
            throw Error(ErrorCode::range, "value " + std::to_string(x) + " at index " + std::to_string(i) +
                                              " is outside [-1, 1]; rescale the data before running the t-test");
        }
    }
}

}  // namespace dpht
