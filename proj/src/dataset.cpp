#include "abcfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "abcfs/errors.hpp"
#include "abcfs/random.hpp"

namespace abcfs {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_double(std::string_view s, double& out)
{
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::optional<Label> parse_label(std::string_view cell)
{
    const std::string v = lower(cell);
    if (v == "b" || v == "benign") {
        return Label{0};
    }
    if (v == "s" || v == "malware") {
        return Label{1};
    }
    double x = 0.0;
    if (parse_double(v, x)) {
        if (x == 0.0) {
            return Label{0};
        }
        if (x == 1.0) {
            return Label{1};
        }
    }
    return std::nullopt;
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset::Dataset(Unchecked,
                 std::vector<double> features,
                 std::size_t n_features,
                 std::vector<Label> labels,
                 std::vector<std::string> feature_names,
                 std::vector<std::size_t> source_rows)
    : features_(std::move(features)),
      n_features_(n_features),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      source_rows_(std::move(source_rows))
{
}

Dataset::Dataset(std::vector<double> features,
                 std::size_t n_features,
                 std::vector<Label> labels,
                 std::vector<std::string> feature_names,
                 std::vector<std::size_t> source_rows)
    : Dataset(Unchecked{}, std::move(features), n_features, std::move(labels), std::move(feature_names),
              std::move(source_rows))
{
    if (n_features_ == 0) {
        throw DataError("dataset needs at least one feature column");
    }
    if (features_.size() != labels_.size() * n_features_) {
        throw DataError("feature matrix size " + std::to_string(features_.size()) + " does not match " +
                        std::to_string(labels_.size()) + " labels x " + std::to_string(n_features_) + " features");
    }
    if (feature_names_.size() != n_features_) {
        throw DataError("expected " + std::to_string(n_features_) + " feature names, got " +
                        std::to_string(feature_names_.size()));
    }
    if (labels_.size() < 2) {
        throw DataError("dataset needs at least two samples");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] > 1) {
            throw DataError("label at row " + std::to_string(i) + " is not 0 or 1");
        }
    }
    if (positives() == 0 || negatives() == 0) {
        throw DataError("dataset contains a single class");
    }
    if (source_rows_.empty()) {
        source_rows_.resize(labels_.size());
        std::iota(source_rows_.begin(), source_rows_.end(), std::size_t{0});
    } else if (source_rows_.size() != labels_.size()) {
        throw DataError("source row count does not match sample count");
    }
}

std::size_t Dataset::count_label(Label label) const noexcept
{
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const
{
    std::vector<double> features;
    features.reserve(rows.size() * n_features_);
    std::vector<Label> labels;
    labels.reserve(rows.size());
    std::vector<std::size_t> sources;
    sources.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= n_samples()) {
            throw DataError("row index " + std::to_string(r) + " out of range");
        }
        const auto src = row(r);
        features.insert(features.end(), src.begin(), src.end());
        labels.push_back(labels_[r]);
        sources.push_back(source_rows_[r]);
    }
    return Dataset(Unchecked{}, std::move(features), n_features_, std::move(labels), feature_names_, std::move(sources));
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("'" + path.string() + "' is empty");
    }
    const auto header = split_fields(line);

    std::size_t label_idx = header.size();
    if (const auto* name = std::get_if<std::string>(&label_column)) {
        const auto it = std::find(header.begin(), header.end(), std::string_view(*name));
        std::size_t index = 0;
        const auto* end = name->data() + name->size();
        if (it != header.end()) {
            label_idx = static_cast<std::size_t>(it - header.begin());
        } else if (auto [ptr, ec] = std::from_chars(name->data(), end, index);
                   !name->empty() && ec == std::errc{} && ptr == end && index < header.size()) {
            // A bare number that is not a header name selects by position.
            label_idx = index;
        } else {
            throw DataError("label column '" + *name + "' not found in header of '" + path.string() + "'");
        }
    } else {
        label_idx = std::get<std::size_t>(label_column);
        if (label_idx >= header.size()) {
            throw DataError("label column index " + std::to_string(label_idx) + " out of range for " +
                            std::to_string(header.size()) + " columns");
        }
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_idx) {
            names.emplace_back(header[c]);
        }
    }
    const std::size_t n_features = names.size();

    std::vector<double> features;
    std::vector<Label> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_fields(line);
        if (cells.size() != header.size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_idx) {
                const auto label = parse_label(cells[c]);
                if (!label) {
                    throw DataError(path.string() + ":" + std::to_string(line_no) + ": label '" +
                                    std::string(cells[c]) + "' is not one of 0/1, B/S, benign/malware");
                }
                labels.push_back(*label);
                continue;
            }
            double value = 0.0;
            if (!parse_double(cells[c], value)) {
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": column " + std::to_string(c) +
                                " ('" + std::string(header[c]) + "'): cannot parse '" + std::string(cells[c]) +
                                "' as a number");
            }
            features.push_back(value);
        }
    }

    try {
        return Dataset(std::move(features), n_features, std::move(labels), std::move(names));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path, const std::string& label_column)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    for (const auto& name : d.feature_names()) {
        out << name << ',';
    }
    out << label_column << '\n';
    for (std::size_t r = 0; r < d.n_samples(); ++r) {
        for (double v : d.row(r)) {
            out << format_double(v) << ',';
        }
        out << static_cast<int>(d.labels()[r]) << '\n';
    }
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

SplitIndices split_indices(std::span<const Label> labels, const SplitSpec& spec)
{
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ConfigError({"train_fraction must lie in (0,1)"});
    }
    Rng rng(spec.seed);
    SplitIndices out;

    auto take = [&](std::vector<std::size_t> pool) {
        std::shuffle(pool.begin(), pool.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(pool.size())));
        out.train.insert(out.train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), pool.begin() + static_cast<std::ptrdiff_t>(n_train), pool.end());
    };

    if (spec.stratified) {
        for (Label c : {Label{0}, Label{1}}) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] == c) {
                    pool.push_back(i);
                }
            }
            take(std::move(pool));
        }
    } else {
        std::vector<std::size_t> pool(labels.size());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        take(std::move(pool));
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());

    for (const auto* part : {&out.train, &out.test}) {
        bool has[2] = {false, false};
        for (std::size_t i : *part) {
            has[labels[i]] = true;
        }
        if (!has[0] || !has[1]) {
            throw DataError("train_fraction " + format_double(spec.train_fraction) + " leaves a class empty in the " +
                            (part == &out.train ? "train" : "test") + " partition");
        }
    }
    return out;
}

Split stratified_split(const Dataset& d, const SplitSpec& spec)
{
    const auto idx = split_indices(d.labels(), spec);
    return {d.select_rows(idx.train), d.select_rows(idx.test)};
}

Dataset project(const Dataset& d, const FeatureMask& mask)
{
    if (mask.size() != d.n_features()) {
        throw DataError("mask length " + std::to_string(mask.size()) + " does not match " +
                        std::to_string(d.n_features()) + " features");
    }
    const auto cols = mask.indices();
    if (cols.empty()) {
        throw DataError("cannot project onto an empty feature mask");
    }
    std::vector<double> features;
    features.reserve(d.n_samples() * cols.size());
    for (std::size_t r = 0; r < d.n_samples(); ++r) {
        const auto src = d.row(r);
        for (std::size_t c : cols) {
            features.push_back(src[c]);
        }
    }
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (std::size_t c : cols) {
        names.push_back(d.feature_names()[c]);
    }
    std::vector<Label> labels(d.labels().begin(), d.labels().end());
    std::vector<std::size_t> sources(d.source_rows().begin(), d.source_rows().end());
    return Dataset(std::move(features), cols.size(), std::move(labels), std::move(names), std::move(sources));
}

Dataset generate_synthetic(std::size_t n_samples,
                           std::size_t n_features,
                           std::span<const std::size_t> informative,
                           double noise_rate,
                           std::uint64_t seed)
{
    std::vector<std::string> violations;
    if (n_samples < 4) {
        violations.push_back("n_samples must be at least 4");
    }
    if (n_features == 0) {
        violations.push_back("n_features must be at least 1");
    }
    if (informative.empty()) {
        violations.push_back("informative feature set must not be empty");
    }
    for (std::size_t i : informative) {
        if (i >= n_features) {
            violations.push_back("informative index " + std::to_string(i) + " out of range [0, " +
                                 std::to_string(n_features) + ")");
        }
    }
    std::vector<std::size_t> inf(informative.begin(), informative.end());
    std::sort(inf.begin(), inf.end());
    if (std::adjacent_find(inf.begin(), inf.end()) != inf.end()) {
        violations.push_back("informative indices must be distinct");
    }
    if (!(noise_rate >= 0.0 && noise_rate < 0.5)) {
        violations.push_back("noise_rate must lie in [0, 0.5)");
    }
    if (!violations.empty()) {
        throw ConfigError(std::move(violations));
    }

    std::vector<bool> is_informative(n_features, false);
    for (std::size_t i : inf) {
        is_informative[i] = true;
    }

    Rng rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution flip(noise_rate);

    std::vector<double> features(n_samples * n_features);
    std::vector<Label> labels(n_samples);
    // Redraw the whole set on the (rare) single-class outcome.
    while (true) {
        for (std::size_t r = 0; r < n_samples; ++r) {
            double* row = features.data() + r * n_features;
            std::size_t ones = 0;
            do {
                ones = 0;
                for (std::size_t c : inf) {
                    const bool bit = coin(rng);
                    row[c] = bit ? 1.0 : 0.0;
                    ones += bit ? 1 : 0;
                }
            } while (2 * ones == inf.size());
            for (std::size_t c = 0; c < n_features; ++c) {
                if (!is_informative[c]) {
                    row[c] = coin(rng) ? 1.0 : 0.0;
                }
            }
            Label y = 2 * ones > inf.size() ? 1 : 0;
            if (flip(rng)) {
                y = static_cast<Label>(1 - y);
            }
            labels[r] = y;
        }
        const auto pos = std::count(labels.begin(), labels.end(), Label{1});
        if (pos > 0 && static_cast<std::size_t>(pos) < n_samples) {
            break;
        }
    }

    std::vector<std::string> names;
    names.reserve(n_features);
    for (std::size_t c = 0; c < n_features; ++c) {
        names.push_back("f" + std::to_string(c));
    }
    return Dataset(std::move(features), n_features, std::move(labels), std::move(names));
}

}  // namespace abcfs
