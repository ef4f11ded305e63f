#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace dpht {

// Continuous observations split into g groups. Groups may be empty as long as
// g >= 2 and the total size is at least 2.
class GroupedSample {
public:
    explicit GroupedSample(std::vector<std::vector<double>> groups);

    const std::vector<std::vector<double>>& groups() const noexcept { return groups_; }
    std::size_t group_count() const noexcept { return groups_.size(); }
    std::size_t size() const noexcept { return size_; }
    std::size_t group_size(std::size_t i) const { return groups_.at(i).size(); }

    // Observations in group order: group 0 first, then group 1, ...
    std::vector<double> pooled() const;

private:
    std::vector<std::vector<double>> groups_;
    std::size_t size_ = 0;
};

struct Pair {
    double u = 0.0;
    double v = 0.0;

    double difference() const noexcept { return v - u; }
};

class PairedSample {
public:
    explicit PairedSample(std::vector<Pair> rows);

    const std::vector<Pair>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::vector<double> differences() const;

private:
    std::vector<Pair> rows_;
};

// Observations pre-scaled into [-1, 1], as the t-test sensitivities require.
class BoundedSample {
public:
    explicit BoundedSample(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

using Dataset = std::variant<GroupedSample, PairedSample, BoundedSample>;

}  // namespace dpht
