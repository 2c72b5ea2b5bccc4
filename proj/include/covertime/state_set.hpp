#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace covertime {

// Subset of a chain's state space as a fixed-width bitset. Width is the
// number of states of the chain the set refers to; set operations require
// matching widths.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t width)
        : width_(width), blocks_((width + 63) / 64, 0) {}

    static StateSet full(std::size_t width) {
        StateSet s(width);
        for (std::size_t i = 0; i < width; ++i) s.set(i);
        return s;
    }

    static StateSet of(std::size_t width, std::initializer_list<std::size_t> members) {
        StateSet s(width);
        for (std::size_t i : members) s.set(i);
        return s;
    }

    std::size_t width() const { return width_; }

    bool test(std::size_t i) const {
        assert(i < width_);
        return (blocks_[i / 64] >> (i % 64)) & 1u;
    }

    void set(std::size_t i) {
        assert(i < width_);
        blocks_[i / 64] |= std::uint64_t{1} << (i % 64);
    }

    std::size_t count() const {
        std::size_t total = 0;
        for (std::uint64_t block : blocks_) total += std::popcount(block);
        return total;
    }

    bool empty() const {
        for (std::uint64_t block : blocks_)
            if (block != 0) return false;
        return true;
    }

    bool is_full() const { return count() == width_; }

    // true iff other is a subset of *this
    bool contains(const StateSet& other) const {
        assert(width_ == other.width_);
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            if ((other.blocks_[b] & ~blocks_[b]) != 0) return false;
        return true;
    }

    StateSet& operator|=(const StateSet& other) {
        assert(width_ == other.width_);
        for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] |= other.blocks_[b];
        return *this;
    }

    friend StateSet operator|(StateSet lhs, const StateSet& rhs) {
        lhs |= rhs;
        return lhs;
    }

    bool operator==(const StateSet&) const = default;

    // set bit indices in ascending order
    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            std::uint64_t block = blocks_[b];
            while (block != 0) {
                const int bit = std::countr_zero(block);
                out.push_back(b * 64 + static_cast<std::size_t>(bit));
                block &= block - 1;
            }
        }
        return out;
    }

    std::size_t hash() const {
        std::size_t h = width_ * 0x9e3779b97f4a7c15ull;
        for (std::uint64_t block : blocks_) {
            h ^= block + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    std::size_t width_ = 0;
    std::vector<std::uint64_t> blocks_;
};

}  // namespace covertime
