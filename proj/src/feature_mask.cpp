#include "abcfs/feature_mask.hpp"

#include <bit>
#include <stdexcept>

namespace abcfs {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

}  // namespace

FeatureMask::FeatureMask(std::size_t size, bool value)
    : size_(size), words_(word_count(size), value ? ~std::uint64_t{0} : 0)
{
    // Keep padding bits zero so equality and hashing only see real bits.
    if (value && size_ % kWordBits != 0) {
        words_.back() &= (std::uint64_t{1} << (size_ % kWordBits)) - 1;
    }
}

FeatureMask FeatureMask::from_indices(std::size_t size, std::span<const std::size_t> indices)
{
    FeatureMask mask(size);
    for (std::size_t i : indices) {
        mask.set(i);
    }
    return mask;
}

FeatureMask FeatureMask::from_string(std::string_view bits)
{
    FeatureMask mask(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            mask.set(i);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("feature mask string may contain only '0' and '1'");
        }
    }
    return mask;
}

bool FeatureMask::test(std::size_t i) const
{
    if (i >= size_) {
        throw std::out_of_range("feature mask index out of range");
    }
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void FeatureMask::set(std::size_t i, bool value)
{
    if (i >= size_) {
        throw std::out_of_range("feature mask index out of range");
    }
    const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
    if (value) {
        words_[i / kWordBits] |= bit;
    } else {
        words_[i / kWordBits] &= ~bit;
    }
}

std::size_t FeatureMask::count() const noexcept
{
    std::size_t total = 0;
    for (auto w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

std::vector<std::size_t> FeatureMask::indices() const
{
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::size_t i = 0; i < size_; ++i) {
        if (test(i)) {
            out.push_back(i);
        }
    }
    return out;
}

std::string FeatureMask::to_string() const
{
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (test(i)) {
            out[i] = '1';
        }
    }
    return out;
}

std::size_t FeatureMaskHash::operator()(const FeatureMask& mask) const noexcept
{
    // FNV-1a over the words plus the length.
    std::uint64_t h = 0xcbf29ce484222325ULL ^ mask.size();
    for (auto w : mask.words()) {
        h ^= w;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

}  // namespace abcfs
