#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "abcfs/feature_mask.hpp"

namespace abcfs {

/// 1 = malware (positive class), 0 = benign.
using Label = std::uint8_t;

/// Dense row-major feature matrix with binary labels.
///
/// Immutable after construction. Each row remembers its index in the dataset
/// it was originally loaded from (`source_rows`), so partitions derived from
/// the same parent can be checked for overlap.
class Dataset
{
public:
    Dataset() = default;

    /// Validates every invariant and throws DataError on violation. When
    /// `source_rows` is empty, rows are numbered 0..n-1.
    Dataset(std::vector<double> features,
            std::size_t n_features,
            std::vector<Label> labels,
            std::vector<std::string> feature_names,
            std::vector<std::size_t> source_rows = {});

    std::size_t n_samples() const noexcept { return labels_.size(); }
    std::size_t n_features() const noexcept { return n_features_; }

    std::span<const double> row(std::size_t i) const
    {
        return {features_.data() + i * n_features_, n_features_};
    }
    double at(std::size_t r, std::size_t c) const { return features_[r * n_features_ + c]; }

    std::span<const double> features() const noexcept { return features_; }
    std::span<const Label> labels() const noexcept { return labels_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    std::span<const std::size_t> source_rows() const noexcept { return source_rows_; }

    std::size_t count_label(Label label) const noexcept;
    std::size_t positives() const noexcept { return count_label(1); }
    std::size_t negatives() const noexcept { return count_label(0); }

    /// Rows in the given order. Subsets may be single-class, so this skips the
    /// both-classes check that the public constructor applies.
    Dataset select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    struct Unchecked {};
    Dataset(Unchecked,
            std::vector<double> features,
            std::size_t n_features,
            std::vector<Label> labels,
            std::vector<std::string> feature_names,
            std::vector<std::size_t> source_rows);

    std::vector<double> features_;
    std::size_t n_features_ = 0;
    std::vector<Label> labels_;
    std::vector<std::string> feature_names_;
    std::vector<std::size_t> source_rows_;
};

struct SplitSpec
{
    double train_fraction = 0.7;
    bool stratified = true;
    std::uint64_t seed = 0;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

/// Row indices (into the split dataset) of each partition, ascending.
struct SplitIndices
{
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct Split
{
    Dataset train;
    Dataset test;
};

/// Either a column name or a zero-based column index.
using ColumnRef = std::variant<std::string, std::size_t>;

/// Reads a comma-separated file with a header row.
///
/// Accepted label encodings (case-insensitive): 0/1, B/S, benign/malware.
/// The label column is removed from the features; the remaining columns keep
/// their file order.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column);

/// Writes the dataset with the label column appended last. Values use the
/// shortest representation that parses back to the same double.
void write_csv(const Dataset& d, const std::filesystem::path& path, const std::string& label_column = "class");

/// Per class c with n_c rows, round(train_fraction * n_c) rows go to train.
/// Non-stratified splits apply the same rule to the whole shuffled row set.
SplitIndices split_indices(std::span<const Label> labels, const SplitSpec& spec);
Split stratified_split(const Dataset& d, const SplitSpec& spec);

/// Keeps the columns selected by `mask` in their original order.
Dataset project(const Dataset& d, const FeatureMask& mask);

/// Binary dataset whose label is the majority vote of the `informative`
/// columns, flipped with probability `noise_rate`. Remaining columns are
/// fair coin flips. With an even number of informative columns, tied draws
/// are redrawn.
Dataset generate_synthetic(std::size_t n_samples,
                           std::size_t n_features,
                           std::span<const std::size_t> informative,
                           double noise_rate,
                           std::uint64_t seed);

}  // namespace abcfs
