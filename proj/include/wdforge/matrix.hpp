#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polynomial.hpp"

namespace wdforge {

/// Dense matrix over a Field, row-major, exact arithmetic throughout.
class Matrix {
  public:
    Matrix(FieldPtr f, int rows, int cols)
        : field_(std::move(f)), rows_(rows), cols_(cols),
          e_(static_cast<size_t>(rows) * cols, FieldElem::zero(field_)) {
        if (rows < 0 || cols < 0) fail(Err::InvalidInput, "negative matrix dimension");
    }

    static Matrix identity(const FieldPtr& f, int n) {
        Matrix m(f, n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = FieldElem::one(f);
        return m;
    }

    static Matrix scalar(const FieldPtr& f, int n, const FieldElem& c) {
        Matrix m(f, n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = c;
        return m;
    }

    const FieldPtr& field() const { return field_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    FieldElem& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const FieldElem& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    bool is_square() const { return rows_ == cols_; }

    bool is_zero() const {
        for (const auto& x : e_)
            if (!x.is_zero()) return false;
        return true;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.require_shape(b.rows_, b.cols_);
        Matrix r = a;
        for (size_t i = 0; i < r.e_.size(); ++i) r.e_[i] = r.e_[i] + b.e_[i];
        return r;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.require_shape(b.rows_, b.cols_);
        Matrix r = a;
        for (size_t i = 0; i < r.e_.size(); ++i) r.e_[i] = r.e_[i] - b.e_[i];
        return r;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) fail(Err::InvalidInput, "matrix product shape mismatch");
        Matrix r(a.field_, a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const FieldElem& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < b.cols_; ++j)
                    r.at(i, j) = r.at(i, j) + aik * b.at(k, j);
            }
        return r;
    }

    friend Matrix operator*(const FieldElem& s, const Matrix& a) {
        Matrix r = a;
        for (auto& x : r.e_) x = s * x;
        return r;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    Matrix transpose() const {
        Matrix r(field_, cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    Matrix pow(unsigned long e) const {
        if (!is_square()) fail(Err::InvalidInput, "power of a non-square matrix");
        Matrix base = *this;
        Matrix r = identity(field_, rows_);
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    bool is_nilpotent() const {
        if (!is_square()) return false;
        return pow(static_cast<unsigned long>(rows_)).is_zero();
    }

    /// In-place reduced row echelon form; returns the pivot column indices.
    std::vector<int> rref_in_place() {
        std::vector<int> pivots;
        int r = 0;
        for (int c = 0; c < cols_ && r < rows_; ++c) {
            int p = -1;
            for (int i = r; i < rows_; ++i)
                if (!at(i, c).is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) continue;
            if (p != r)
                for (int j = 0; j < cols_; ++j) std::swap(at(p, j), at(r, j));
            FieldElem inv = at(r, c).inv();
            for (int j = c; j < cols_; ++j) at(r, j) = inv * at(r, j);
            for (int i = 0; i < rows_; ++i) {
                if (i == r || at(i, c).is_zero()) continue;
                FieldElem t = at(i, c);
                for (int j = c; j < cols_; ++j) at(i, j) = at(i, j) - t * at(r, j);
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    int rank() const {
        Matrix m = *this;
        return static_cast<int>(m.rref_in_place().size());
    }

    FieldElem det() const {
        if (!is_square()) fail(Err::InvalidInput, "determinant of a non-square matrix");
        Matrix m = *this;
        FieldElem d = FieldElem::one(field_);
        for (int c = 0; c < cols_; ++c) {
            int p = -1;
            for (int i = c; i < rows_; ++i)
                if (!m.at(i, c).is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) return FieldElem::zero(field_);
            if (p != c) {
                for (int j = 0; j < cols_; ++j) std::swap(m.at(p, j), m.at(c, j));
                d = -d;
            }
            d = d * m.at(c, c);
            FieldElem inv = m.at(c, c).inv();
            for (int i = c + 1; i < rows_; ++i) {
                if (m.at(i, c).is_zero()) continue;
                FieldElem t = inv * m.at(i, c);
                for (int j = c; j < cols_; ++j) m.at(i, j) = m.at(i, j) - t * m.at(c, j);
            }
        }
        return d;
    }

    Matrix inverse() const {
        if (!is_square()) fail(Err::SingularMatrix, "inverse of a non-square matrix");
        Matrix aug = hconcat(*this, identity(field_, rows_));
        std::vector<int> pivots = aug.rref_in_place();
        if (static_cast<int>(pivots.size()) != rows_ || (rows_ > 0 && pivots.back() >= rows_))
            fail(Err::SingularMatrix, "matrix is singular");
        Matrix r(field_, rows_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < rows_; ++j) r.at(i, j) = aug.at(i, rows_ + j);
        return r;
    }

    /// Basis of the right kernel, as columns of a cols() x nullity matrix.
    Matrix kernel_basis() const {
        Matrix m = *this;
        std::vector<int> pivots = m.rref_in_place();
        std::vector<bool> is_pivot(cols_, false);
        for (int c : pivots) is_pivot[c] = true;
        int nullity = cols_ - static_cast<int>(pivots.size());
        Matrix k(field_, cols_, nullity);
        int out = 0;
        for (int c = 0; c < cols_; ++c) {
            if (is_pivot[c]) continue;
            k.at(c, out) = FieldElem::one(field_);
            for (size_t pi = 0; pi < pivots.size(); ++pi) {
                // Row pi has its pivot at column pivots[pi]; the free column c
                // contributes -m(pi, c) there.
                k.at(pivots[pi], out) = -m.at(static_cast<int>(pi), c);
            }
            ++out;
        }
        return k;
    }

    /// Any solution X of (*this) * X = B, or nullopt when inconsistent.
    std::optional<Matrix> solve(const Matrix& B) const {
        if (B.rows_ != rows_) fail(Err::InvalidInput, "solve shape mismatch");
        Matrix aug = hconcat(*this, B);
        std::vector<int> pivots = aug.rref_in_place();
        for (int c : pivots)
            if (c >= cols_) return std::nullopt;
        Matrix x(field_, cols_, B.cols_);
        for (size_t pi = 0; pi < pivots.size(); ++pi)
            for (int j = 0; j < B.cols_; ++j)
                x.at(pivots[pi], j) = aug.at(static_cast<int>(pi), cols_ + j);
        return x;
    }

    static Matrix hconcat(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_) fail(Err::InvalidInput, "hconcat shape mismatch");
        Matrix r(a.field_, a.rows_, a.cols_ + b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
            for (int j = 0; j < b.cols_; ++j) r.at(i, a.cols_ + j) = b.at(i, j);
        }
        return r;
    }

    static Matrix block_diag(const Matrix& a, const Matrix& b) {
        Matrix r(a.field_, a.rows_ + b.rows_, a.cols_ + b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
        for (int i = 0; i < b.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) r.at(a.rows_ + i, a.cols_ + j) = b.at(i, j);
        return r;
    }

    Matrix col(int j) const {
        Matrix r(field_, rows_, 1);
        for (int i = 0; i < rows_; ++i) r.at(i, 0) = at(i, j);
        return r;
    }

    Matrix cols_from(const std::vector<int>& idx) const {
        Matrix r(field_, rows_, static_cast<int>(idx.size()));
        for (size_t j = 0; j < idx.size(); ++j)
            for (int i = 0; i < rows_; ++i) r.at(i, static_cast<int>(j)) = at(i, idx[j]);
        return r;
    }

    /// Characteristic polynomial det(x*I - M), monic, via similarity
    /// reduction to Hessenberg form followed by the minor recurrence. Valid
    /// in any characteristic (no division by integer constants).
    Poly char_poly() const {
        if (!is_square()) fail(Err::InvalidInput, "characteristic polynomial of a non-square matrix");
        int n = rows_;
        if (n == 0) return Poly::one(field_);
        Matrix h = *this;
        for (int j = 0; j + 2 < n; ++j) {
            int p = -1;
            for (int i = j + 1; i < n; ++i)
                if (!h.at(i, j).is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) continue;
            if (p != j + 1) {
                for (int c = 0; c < n; ++c) std::swap(h.at(p, c), h.at(j + 1, c));
                for (int r = 0; r < n; ++r) std::swap(h.at(r, p), h.at(r, j + 1));
            }
            FieldElem inv = h.at(j + 1, j).inv();
            for (int i = j + 2; i < n; ++i) {
                if (h.at(i, j).is_zero()) continue;
                FieldElem t = h.at(i, j) * inv;
                for (int c = 0; c < n; ++c) h.at(i, c) = h.at(i, c) - t * h.at(j + 1, c);
                for (int r = 0; r < n; ++r) h.at(r, j + 1) = h.at(r, j + 1) + t * h.at(r, i);
            }
        }
        // p_0 = 1, p_m = (x - h[m-1][m-1]) p_{m-1}
        //             - sum_i h[i-1][m-1] (prod_{j=i..m-2} h[j+1][j]) p_{i-1}.
        std::vector<Poly> p;
        p.push_back(Poly::one(field_));
        Poly x = Poly::x(field_);
        for (int m = 1; m <= n; ++m) {
            Poly pm = (x - Poly::constant(h.at(m - 1, m - 1))) * p[m - 1];
            FieldElem prod = FieldElem::one(field_);
            for (int i = m - 1; i >= 1; --i) {
                prod = prod * h.at(i, i - 1);
                pm = pm - Poly::constant(h.at(i - 1, m - 1) * prod) * p[i - 1];
            }
            p.push_back(pm);
        }
        return p[n];
    }

    std::string str() const {
        std::string s = "[";
        for (int i = 0; i < rows_; ++i) {
            if (i) s += "; ";
            for (int j = 0; j < cols_; ++j) {
                if (j) s += ", ";
                s += at(i, j).str();
            }
        }
        return s + "]";
    }

  private:
    void require_shape(int r, int c) const {
        if (rows_ != r || cols_ != c) fail(Err::InvalidInput, "matrix shape mismatch");
    }

    FieldPtr field_;
    int rows_, cols_;
    std::vector<FieldElem> e_;
};

// ---------------------------------------------------------------------------
// Subspace utilities. Subspaces of F^n are represented by matrices whose
// columns span them; bases produced here are column-reduced, so equal
// subspaces get equal representatives.
// ---------------------------------------------------------------------------

/// Column-reduced basis of the column space.
inline Matrix column_space_basis(const Matrix& m) {
    Matrix t = m.transpose();
    std::vector<int> pivots = t.rref_in_place();
    Matrix r(m.field(), m.rows(), static_cast<int>(pivots.size()));
    for (size_t i = 0; i < pivots.size(); ++i)
        for (int j = 0; j < m.rows(); ++j) r.at(j, static_cast<int>(i)) = t.at(static_cast<int>(i), j);
    return r;
}

/// span(a) <= span(b), columns as generators.
inline bool subspace_leq(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) fail(Err::InvalidInput, "subspace ambient mismatch");
    return Matrix::hconcat(b, a).rank() == b.rank();
}

inline bool subspace_eq(const Matrix& a, const Matrix& b) {
    return subspace_leq(a, b) && subspace_leq(b, a);
}

/// Basis of span(a) intersected with span(b).
inline Matrix intersect_subspaces(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) fail(Err::InvalidInput, "subspace ambient mismatch");
    if (a.cols() == 0 || b.cols() == 0) return Matrix(a.field(), a.rows(), 0);
    Matrix neg_b = FieldElem::from_integer(a.field(), -1) * b;
    Matrix stacked = Matrix::hconcat(a, neg_b);
    Matrix k = stacked.kernel_basis();
    // Kernel vectors (u; v) satisfy a*u = b*v; the intersection is a * {u}.
    Matrix u(a.field(), a.cols(), k.cols());
    for (int i = 0; i < a.cols(); ++i)
        for (int j = 0; j < k.cols(); ++j) u.at(i, j) = k.at(i, j);
    return column_space_basis(a * u);
}

/// Image of a subspace under a linear map.
inline Matrix apply_to_subspace(const Matrix& m, const Matrix& space) {
    return column_space_basis(m * space);
}

}  // namespace wdforge
