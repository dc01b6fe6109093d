#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abcfs {

/// Fixed-length selection indicator over the original feature columns.
/// Bit i set means column i is part of the subset.
class FeatureMask
{
public:
    FeatureMask() = default;
    explicit FeatureMask(std::size_t size, bool value = false);

    static FeatureMask from_indices(std::size_t size, std::span<const std::size_t> indices);
    /// Parses a string of '0'/'1' characters; character i is bit i.
    static FeatureMask from_string(std::string_view bits);

    std::size_t size() const noexcept { return size_; }
    bool test(std::size_t i) const;
    void set(std::size_t i, bool value = true);
    void reset(std::size_t i) { set(i, false); }
    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }

    std::vector<std::size_t> indices() const;
    std::string to_string() const;

    std::span<const std::uint64_t> words() const noexcept { return words_; }

    friend bool operator==(const FeatureMask&, const FeatureMask&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

struct FeatureMaskHash
{
    std::size_t operator()(const FeatureMask& mask) const noexcept;
};

}  // namespace abcfs
