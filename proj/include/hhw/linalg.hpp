#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hhw {

class SingularPivotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Square matrix with kl sub- and ku super-diagonals, stored row-major by band:
/// entry (row, row + off) lives at data[row * (kl + ku + 1) + kl + off].
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t kl() const { return kl_; }
    [[nodiscard]] std::size_t ku() const { return ku_; }
    [[nodiscard]] std::size_t width() const { return kl_ + ku_ + 1; }

    [[nodiscard]] bool in_band(std::size_t row, std::size_t col) const {
        return col + kl_ >= row && col <= row + ku_;
    }
    /// Zero for entries outside the band.
    [[nodiscard]] double operator()(std::size_t row, std::size_t col) const;
    /// Throws std::out_of_range outside the band.
    double& at(std::size_t row, std::size_t col);
    void add(std::size_t row, std::size_t col, double value) { at(row, col) += value; }

    [[nodiscard]] std::span<double> data() { return data_; }
    [[nodiscard]] std::span<const double> data() const { return data_; }

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
    [[nodiscard]] double max_abs() const;

private:
    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::vector<double> data_;
};

/// In-band LU factors (no pivoting) of a BandedMatrix; L has unit diagonal.
///
/// Factorization refuses pivots smaller than 1e-14 times the max-norm of the
/// input and throws SingularPivotError.
class BandedLU {
public:
    BandedLU() = default;
    explicit BandedLU(const BandedMatrix& a);

    /// Factor I - scale * a, reusing this object's storage.
    void factor_shifted(const BandedMatrix& a, double scale);
    /// Factor I - scale * (a + weight * b) where a and b share the band shape.
    void factor_shifted(const BandedMatrix& a, const BandedMatrix& b, double weight, double scale);

    [[nodiscard]] std::size_t size() const { return n_; }
    void solve_in_place(std::span<double> x) const;
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

private:
    void reshape(std::size_t n, std::size_t kl, std::size_t ku);
    void factor_stored(double max_norm);

    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::vector<double> lu_;
};

BandedLU band_factor(const BandedMatrix& a);
std::vector<double> band_solve(const BandedLU& lu, std::span<const double> rhs);

/// One banded matrix per grid line. Line l covers the global indices
/// start(l) + p * stride for p = 0 .. length-1.
class LineOperator {
public:
    LineOperator() = default;
    /// Lines are enumerated by (outer, inner) with start = inner * inner_step + outer * outer_step.
    LineOperator(std::size_t length, std::size_t stride, std::size_t inner_count,
                 std::size_t inner_step, std::size_t outer_count, std::size_t outer_step,
                 std::size_t kl, std::size_t ku);

    [[nodiscard]] std::size_t line_count() const { return lines_.size(); }
    [[nodiscard]] std::size_t length() const { return length_; }
    [[nodiscard]] std::size_t stride() const { return stride_; }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }
    [[nodiscard]] std::size_t start(std::size_t line) const { return starts_[line]; }

    [[nodiscard]] BandedMatrix& line(std::size_t l) { return lines_[l]; }
    [[nodiscard]] const BandedMatrix& line(std::size_t l) const { return lines_[l]; }

    /// y += alpha * A x
    void apply_add(std::span<const double> x, std::span<double> y, double alpha = 1.0) const;
    /// Entry of the full operator at global (row, col).
    [[nodiscard]] double entry(std::size_t row, std::size_t col) const;

    /// True when the other operator has the same line layout.
    [[nodiscard]] bool same_layout(const LineOperator& other) const;

private:
    std::size_t length_ = 0;
    std::size_t stride_ = 0;
    std::size_t dimension_ = 0;
    std::vector<std::size_t> starts_;
    std::vector<BandedMatrix> lines_;
};

/// LU factors of I - scale * A for every line of a LineOperator.
class LineFactors {
public:
    void factor(const LineOperator& a, double scale);
    void factor(const LineOperator& a, const LineOperator& b, double weight, double scale);
    /// Solves (I - scale * A) x = rhs line by line, overwriting x.
    void solve_in_place(std::span<double> x) const;
    [[nodiscard]] bool empty() const { return lus_.empty(); }

private:
    const LineOperator* layout_ = nullptr;
    std::vector<BandedLU> lus_;
};

/// Sparse matrix assembled from (row, col, value) triplets, compressed by row
/// with ascending columns and duplicates summed on finalize().
class SparseOperator {
public:
    SparseOperator() = default;
    explicit SparseOperator(std::size_t n) : n_(n) {}

    void add(std::size_t row, std::size_t col, double value);
    void finalize();

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t nonzeros() const { return values_.size(); }
    [[nodiscard]] bool finalized() const { return finalized_; }

    /// y += alpha * A x. Requires finalize().
    void apply_add(std::span<const double> x, std::span<double> y, double alpha = 1.0) const;

    [[nodiscard]] std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    [[nodiscard]] std::span<const std::size_t> columns() const { return cols_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Scalar combination alpha * this + beta * other (both finalized).
    [[nodiscard]] SparseOperator combined(double alpha, const SparseOperator& other,
                                          double beta) const;

private:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    std::size_t n_ = 0;
    bool finalized_ = false;
    std::vector<Triplet> pending_;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

std::vector<double> sparse_apply(const SparseOperator& op, std::span<const double> x);

}  // namespace hhw
