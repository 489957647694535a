#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "idset.hpp"

namespace rarm {

/// Fixed-width dense bitmap over object ids, used for vertical support counting.
class Bitmap {
public:
    Bitmap() = default;
    explicit Bitmap(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    static Bitmap from_tidset(const Tidset& tids, std::size_t bits) {
        Bitmap b(bits);
        for (Tid t : tids) b.words_[t >> 6] |= std::uint64_t{1} << (t & 63);
        return b;
    }

    std::size_t bits() const noexcept { return bits_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    /// |a & b| without materializing the intersection.
    friend std::size_t intersection_count(const Bitmap& a, const Bitmap& b) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k) c += static_cast<std::size_t>(std::popcount(a.words_[k] & b.words_[k]));
        return c;
    }

    friend Bitmap operator&(const Bitmap& a, const Bitmap& b) {
        Bitmap out(a.bits_);
        for (std::size_t k = 0; k < a.words_.size(); ++k) out.words_[k] = a.words_[k] & b.words_[k];
        return out;
    }

    /// Calls fn(tid) for each set bit, ascending.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                const int b = std::countr_zero(w);
                fn(static_cast<Tid>(k * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    Tidset to_tidset() const {
        std::vector<Tid> out;
        for_each([&](Tid t) { out.push_back(t); });
        return Tidset::from_sorted(std::move(out));
    }

private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace rarm
