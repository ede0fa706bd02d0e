#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdplr {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace detail

/// Sparse symmetric matrix. Only the upper triangle (row <= col) is stored;
/// every off-diagonal entry implies its mirror. Construction folds duplicate
/// (row, col) triplets by summation and compiles a row-indexed form of the
/// full symmetric pattern for matvec.
class SparseSym {
public:
    SparseSym() = default;

    SparseSym(int n, std::vector<Triplet> triplets) : n_(n) {
        detail::require(n >= 0, "SparseSym: negative dimension");
        for (auto& t : triplets) {
            detail::require(t.row >= 0 && t.row < n && t.col >= 0 && t.col < n,
                            "SparseSym: index out of range");
            if (t.row > t.col) std::swap(t.row, t.col);
        }
        std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        // fold duplicates
        for (const auto& t : triplets) {
            if (!entries_.empty() && entries_.back().row == t.row && entries_.back().col == t.col)
                entries_.back().value += t.value;
            else
                entries_.push_back(t);
        }
        compile();
    }

    static SparseSym identity(int n) {
        std::vector<Triplet> t(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = {i, i, 1.0};
        return SparseSym(n, std::move(t));
    }

    int n() const { return n_; }
    std::size_t nnz() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Deduplicated upper-triangle triplets, sorted by (row, col).
    const std::vector<Triplet>& entries() const { return entries_; }

    /// y = S x, treating S as full symmetric.
    void multiply(const double* x, double* y) const {
        std::fill(y, y + n_, 0.0);
        accumulate_multiply(x, y, 1.0);
    }

    /// y += coeff * S x.
    void accumulate_multiply(const double* x, double* y, double coeff) const {
        for (int i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (std::size_t k = row_ptr_[static_cast<std::size_t>(i)];
                 k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
                acc += csr_val_[k] * x[csr_col_[k]];
            y[i] += coeff * acc;
        }
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        detail::require(static_cast<int>(x.size()) == n_, "SparseSym::multiply: dimension mismatch");
        std::vector<double> y(static_cast<std::size_t>(n_));
        multiply(x.data(), y.data());
        return y;
    }

    /// Frobenius norm with mirrored off-diagonal entries counted twice.
    double frobenius_norm() const {
        double acc = 0.0;
        for (const auto& e : entries_) {
            const double w = e.row == e.col ? 1.0 : 2.0;
            acc += w * e.value * e.value;
        }
        return std::sqrt(acc);
    }

private:
    void compile() {
        row_ptr_.assign(static_cast<std::size_t>(n_) + 1, 0);
        std::size_t full = 0;
        for (const auto& e : entries_) full += e.row == e.col ? 1u : 2u;
        csr_col_.resize(full);
        csr_val_.resize(full);
        for (const auto& e : entries_) {
            ++row_ptr_[static_cast<std::size_t>(e.row) + 1];
            if (e.row != e.col) ++row_ptr_[static_cast<std::size_t>(e.col) + 1];
        }
        for (int i = 0; i < n_; ++i)
            row_ptr_[static_cast<std::size_t>(i) + 1] += row_ptr_[static_cast<std::size_t>(i)];
        std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
        for (const auto& e : entries_) {
            csr_col_[cursor[static_cast<std::size_t>(e.row)]] = e.col;
            csr_val_[cursor[static_cast<std::size_t>(e.row)]++] = e.value;
            if (e.row != e.col) {
                csr_col_[cursor[static_cast<std::size_t>(e.col)]] = e.row;
                csr_val_[cursor[static_cast<std::size_t>(e.col)]++] = e.value;
            }
        }
    }

    int n_ = 0;
    std::vector<Triplet> entries_;       // upper triangle, deduplicated
    std::vector<std::size_t> row_ptr_;   // full symmetric pattern
    std::vector<int> csr_col_;
    std::vector<double> csr_val_;
};

/// Dense n-by-r factor Y with X = Y Yᵀ implicit. Column-major storage.
struct Factor {
    int n = 0;
    int r = 0;
    std::vector<double> data;  // n*r, column-major

    Factor() = default;
    Factor(int n_, int r_) : n(n_), r(r_), data(static_cast<std::size_t>(n_) * r_, 0.0) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(j) * n + i]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(j) * n + i]; }

    double* col(int j) { return data.data() + static_cast<std::size_t>(j) * n; }
    const double* col(int j) const { return data.data() + static_cast<std::size_t>(j) * n; }

    double frobenius_norm() const {
        return std::sqrt(std::inner_product(data.begin(), data.end(), data.begin(), 0.0));
    }

    double row_dot(int i, int j) const {
        double acc = 0.0;
        for (int k = 0; k < r; ++k)
            acc += data[static_cast<std::size_t>(k) * n + i] * data[static_cast<std::size_t>(k) * n + j];
        return acc;
    }

    /// dot(row_i(*this), row_j(other)); factors must share n and r.
    double row_dot_with(int i, const Factor& other, int j) const {
        double acc = 0.0;
        for (int k = 0; k < r; ++k)
            acc += data[static_cast<std::size_t>(k) * n + i] *
                   other.data[static_cast<std::size_t>(k) * n + j];
        return acc;
    }

    void add_scaled_row(int dest, const Factor& src, int src_row, double coeff) {
        for (int k = 0; k < r; ++k)
            data[static_cast<std::size_t>(k) * n + dest] +=
                coeff * src.data[static_cast<std::size_t>(k) * n + src_row];
    }

    void scale(double a) {
        for (auto& v : data) v *= a;
    }
};

inline std::vector<double> spmv(const SparseSym& S, const std::vector<double>& x) {
    return S.multiply(x);
}

inline double fro_norm(const SparseSym& S) { return S.frobenius_norm(); }

/// <S, Y Yᵀ> without forming Y Yᵀ.
inline double gram_inner(const SparseSym& S, const Factor& Y) {
    detail::require(S.n() == Y.n, "gram_inner: dimension mismatch");
    double acc = 0.0;
    for (const auto& e : S.entries()) {
        const double w = e.row == e.col ? 1.0 : 2.0;
        acc += w * e.value * Y.row_dot(e.row, e.col);
    }
    return acc;
}

/// <S, U Wᵀ> for symmetric S (equals <S, W Uᵀ>).
inline double gram_cross(const SparseSym& S, const Factor& U, const Factor& W) {
    detail::require(S.n() == U.n && S.n() == W.n && U.r == W.r, "gram_cross: dimension mismatch");
    double acc = 0.0;
    for (const auto& e : S.entries()) {
        if (e.row == e.col)
            acc += e.value * U.row_dot_with(e.row, W, e.row);
        else
            acc += e.value *
                   (U.row_dot_with(e.row, W, e.col) + U.row_dot_with(e.col, W, e.row));
    }
    return acc;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace sdplr
