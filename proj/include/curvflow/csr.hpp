#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace curvflow {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

// Compressed sparse row matrix. Column indices within a row are sorted and
// unique; the diagonal is always stored (possibly as an explicit zero).
class CsrMatrix {
public:
    CsrMatrix() = default;

    // Duplicates are summed.
    static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> entries);

    std::size_t rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    double diagonal(std::size_t i) const noexcept { return values_[diag_pos_[i]]; }
    std::vector<double> diagonal() const;

    // Entry lookup by binary search; zero when not stored.
    double at(std::size_t i, std::size_t j) const noexcept;

    std::vector<double> multiply(std::span<const double> x) const;

private:
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
    std::vector<std::size_t> diag_pos_;
};

}  // namespace curvflow
