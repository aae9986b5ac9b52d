#pragma once

// Dense zero-one matrices with rows packed into 64-bit words.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spsing/errors.hpp"

namespace spsing {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + kWordBits - 1) / kWordBits; }

/// Mask of the valid bits in the last word of a row of `bits` logical bits.
constexpr Word tail_mask(std::size_t bits) noexcept {
    std::size_t r = bits % kWordBits;
    return r == 0 ? ~Word{0} : (Word{1} << r) - 1;
}

/// Packed vector over GF(2). Padding bits beyond size() are always zero.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(std::size_t bits) : bits_(bits), words_(words_for(bits), 0) {}

    std::size_t size() const noexcept { return bits_; }

    bool get(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
    void set(std::size_t i, bool value = true) noexcept {
        Word bit = Word{1} << (i % kWordBits);
        if (value) {
            words_[i / kWordBits] |= bit;
        } else {
            words_[i / kWordBits] &= ~bit;
        }
    }
    void flip(std::size_t i) noexcept { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

    BitVector& operator^=(const BitVector& other) noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

    std::size_t count() const noexcept {
        std::size_t total = 0;
        for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
        return total;
    }
    bool none() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
    }

    std::span<const Word> words() const noexcept { return words_; }
    std::span<Word> words() noexcept { return words_; }

    std::string to_string() const {
        std::string s(bits_, '0');
        for (std::size_t i = 0; i < bits_; ++i) {
            if (get(i)) s[i] = '1';
        }
        return s;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;
    friend auto operator<=>(const BitVector&, const BitVector&) = default;

  private:
    std::size_t bits_ = 0;
    std::vector<Word> words_;
};

/// Dense zero-one matrix. Row i occupies words [i*stride, (i+1)*stride).
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    static BitMatrix ones(std::size_t rows, std::size_t cols) {
        BitMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            auto r = m.row(i);
            std::fill(r.begin(), r.end(), ~Word{0});
            if (!r.empty()) r.back() &= tail_mask(cols);
        }
        return m;
    }

    /// Builds from strings of '0'/'1'; all strings must have equal length.
    static BitMatrix from_rows(std::span<const std::string_view> rows) {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        BitMatrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) {
                throw Error(ErrorKind::DimensionMismatch, "ragged row " + std::to_string(i));
            }
            for (std::size_t j = 0; j < cols; ++j) {
                char ch = rows[i][j];
                if (ch == '1') {
                    m.set(i, j);
                } else if (ch != '0') {
                    throw Error(ErrorKind::ParseError, "entry must be 0 or 1");
                }
            }
        }
        return m;
    }
    static BitMatrix from_rows(std::initializer_list<std::string_view> rows) {
        return from_rows(std::span<const std::string_view>(rows.begin(), rows.size()));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t stride() const noexcept { return stride_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    bool get(std::size_t i, std::size_t j) const noexcept {
        return (data_[i * stride_ + j / kWordBits] >> (j % kWordBits)) & 1U;
    }
    void set(std::size_t i, std::size_t j, bool value = true) noexcept {
        Word& w = data_[i * stride_ + j / kWordBits];
        Word bit = Word{1} << (j % kWordBits);
        w = value ? (w | bit) : (w & ~bit);
    }

    std::span<Word> row(std::size_t i) noexcept { return {data_.data() + i * stride_, stride_}; }
    std::span<const Word> row(std::size_t i) const noexcept { return {data_.data() + i * stride_, stride_}; }

    BitVector row_vector(std::size_t i) const {
        BitVector v(cols_);
        std::copy(row(i).begin(), row(i).end(), v.words().begin());
        return v;
    }

    std::size_t row_weight(std::size_t i) const noexcept {
        std::size_t total = 0;
        for (Word w : row(i)) total += static_cast<std::size_t>(std::popcount(w));
        return total;
    }

    std::size_t count_ones() const noexcept {
        std::size_t total = 0;
        for (Word w : data_) total += static_cast<std::size_t>(std::popcount(w));
        return total;
    }

    BitMatrix transpose() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            auto r = row(i);
            for (std::size_t w = 0; w < stride_; ++w) {
                Word bits = r[w];
                while (bits != 0) {
                    std::size_t j = w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
                    t.set(j, i);
                    bits &= bits - 1;
                }
            }
        }
        return t;
    }

    /// First `count` rows as a new matrix.
    BitMatrix top_rows(std::size_t count) const {
        BitMatrix out(count, cols_);
        std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(count * stride_), out.data_.begin());
        return out;
    }

    /// One string of '0'/'1' per row.
    std::vector<std::string> to_strings() const {
        std::vector<std::string> out;
        out.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::string s(cols_, '0');
            for (std::size_t j = 0; j < cols_; ++j) {
                if (get(i, j)) s[j] = '1';
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> data_;
};

}  // namespace spsing
