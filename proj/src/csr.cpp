#include "curvflow/csr.hpp"

#include <algorithm>

#include "curvflow/errors.hpp"
#include "curvflow/kernels.hpp"

namespace curvflow {

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::vector<Triplet> entries)
{
    for (std::size_t i = 0; i < n; ++i)
        entries.push_back({i, i, 0.0});
    for (const auto& e : entries)
        if (e.row >= n || e.col >= n)
            throw SizeMismatch("triplet index out of range");

    // Stable, so mirrored duplicates are summed in the same order and S stays
    // exactly symmetric.
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix m;
    m.row_ptr_.assign(n + 1, 0);
    m.diag_pos_.assign(n, 0);
    for (std::size_t k = 0; k < entries.size();) {
        const auto row = entries[k].row;
        const auto col = entries[k].col;
        double sum = 0.0;
        for (; k < entries.size() && entries[k].row == row && entries[k].col == col; ++k)
            sum += entries[k].value;
        if (row == col)
            m.diag_pos_[row] = m.values_.size();
        m.col_idx_.push_back(col);
        m.values_.push_back(sum);
        ++m.row_ptr_[row + 1];
    }
    for (std::size_t i = 0; i < n; ++i)
        m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(rows());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = diagonal(i);
    return d;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const noexcept
{
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j)
        return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != rows())
        throw SizeMismatch("matrix-vector size mismatch");
    std::vector<double> y(rows());
    kernels::par::spmv(*this, x, y);
    return y;
}

}  // namespace curvflow
