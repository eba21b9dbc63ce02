#include "hhw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hhw {

namespace {
constexpr double kPivotTolerance = 1e-14;
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), data_(n * (kl + ku + 1), 0.0) {}

double BandedMatrix::operator()(std::size_t row, std::size_t col) const {
    if (!in_band(row, col)) {
        return 0.0;
    }
    return data_[row * width() + kl_ + col - row];
}

double& BandedMatrix::at(std::size_t row, std::size_t col) {
    if (row >= n_ || col >= n_ || !in_band(row, col)) {
        throw std::out_of_range("BandedMatrix::at: (" + std::to_string(row) + ", " +
                                std::to_string(col) + ") outside the band");
    }
    return data_[row * width() + kl_ + col - row];
}

void BandedMatrix::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) {
        throw std::invalid_argument("BandedMatrix::apply: dimension mismatch");
    }
    const std::size_t w = width();
    for (std::size_t row = 0; row < n_; ++row) {
        const std::size_t lo = row >= kl_ ? row - kl_ : 0;
        const std::size_t hi = std::min(n_ - 1, row + ku_);
        const double* band = &data_[row * w + kl_ - row];
        double acc = 0.0;
        for (std::size_t col = lo; col <= hi; ++col) {
            acc += band[col] * x[col];
        }
        y[row] = acc;
    }
}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(n_);
    apply(x, y);
    return y;
}

double BandedMatrix::max_abs() const {
    double m = 0.0;
    for (double a : data_) {
        m = std::max(m, std::abs(a));
    }
    return m;
}

BandedLU::BandedLU(const BandedMatrix& a) {
    reshape(a.size(), a.kl(), a.ku());
    std::copy(a.data().begin(), a.data().end(), lu_.begin());
    factor_stored(a.max_abs());
}

void BandedLU::reshape(std::size_t n, std::size_t kl, std::size_t ku) {
    n_ = n;
    kl_ = kl;
    ku_ = ku;
    lu_.resize(n * (kl + ku + 1));
}

void BandedLU::factor_shifted(const BandedMatrix& a, double scale) {
    reshape(a.size(), a.kl(), a.ku());
    const auto src = a.data();
    const std::size_t w = kl_ + ku_ + 1;
    double max_norm = 0.0;
    for (std::size_t row = 0; row < n_; ++row) {
        for (std::size_t b = 0; b < w; ++b) {
            const std::size_t idx = row * w + b;
            double value = -scale * src[idx];
            if (b == kl_) {
                value += 1.0;
            }
            lu_[idx] = value;
            max_norm = std::max(max_norm, std::abs(value));
        }
    }
    factor_stored(max_norm);
}

void BandedLU::factor_shifted(const BandedMatrix& a, const BandedMatrix& b, double weight,
                              double scale) {
    if (a.size() != b.size() || a.kl() != b.kl() || a.ku() != b.ku()) {
        throw std::invalid_argument("BandedLU::factor_shifted: band shapes differ");
    }
    reshape(a.size(), a.kl(), a.ku());
    const auto sa = a.data();
    const auto sb = b.data();
    const std::size_t w = kl_ + ku_ + 1;
    double max_norm = 0.0;
    for (std::size_t row = 0; row < n_; ++row) {
        for (std::size_t k = 0; k < w; ++k) {
            const std::size_t idx = row * w + k;
            double value = -scale * (sa[idx] + weight * sb[idx]);
            if (k == kl_) {
                value += 1.0;
            }
            lu_[idx] = value;
            max_norm = std::max(max_norm, std::abs(value));
        }
    }
    factor_stored(max_norm);
}

void BandedLU::factor_stored(double max_norm) {
    const std::size_t w = kl_ + ku_ + 1;
    const double tol = kPivotTolerance * max_norm;
    auto el = [&](std::size_t row, std::size_t col) -> double& {
        return lu_[row * w + kl_ + col - row];
    };
    for (std::size_t k = 0; k < n_; ++k) {
        const double pivot = el(k, k);
        if (!(std::abs(pivot) >= tol) || pivot == 0.0) {
            throw SingularPivotError("BandedLU: pivot " + std::to_string(pivot) + " at row " +
                                     std::to_string(k) + " below tolerance");
        }
        const std::size_t row_hi = std::min(n_ - 1, k + kl_);
        const std::size_t col_hi = std::min(n_ - 1, k + ku_);
        for (std::size_t i = k + 1; i <= row_hi; ++i) {
            const double l = el(i, k) / pivot;
            el(i, k) = l;
            if (l == 0.0) {
                continue;
            }
            for (std::size_t j = k + 1; j <= col_hi; ++j) {
                el(i, j) -= l * el(k, j);
            }
        }
    }
}

void BandedLU::solve_in_place(std::span<double> x) const {
    if (x.size() != n_) {
        throw std::invalid_argument("BandedLU::solve: dimension mismatch");
    }
    const std::size_t w = kl_ + ku_ + 1;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t lo = i >= kl_ ? i - kl_ : 0;
        const double* row = &lu_[i * w + kl_ - i];
        double acc = x[i];
        for (std::size_t j = lo; j < i; ++j) {
            acc -= row[j] * x[j];
        }
        x[i] = acc;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const std::size_t hi = std::min(n_ - 1, ii + ku_);
        const double* row = &lu_[ii * w + kl_ - ii];
        double acc = x[ii];
        for (std::size_t j = ii + 1; j <= hi; ++j) {
            acc -= row[j] * x[j];
        }
        x[ii] = acc / row[ii];
    }
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

BandedLU band_factor(const BandedMatrix& a) { return BandedLU(a); }

std::vector<double> band_solve(const BandedLU& lu, std::span<const double> rhs) {
    return lu.solve(rhs);
}

LineOperator::LineOperator(std::size_t length, std::size_t stride, std::size_t inner_count,
                           std::size_t inner_step, std::size_t outer_count,
                           std::size_t outer_step, std::size_t kl, std::size_t ku)
    : length_(length), stride_(stride), dimension_(length * inner_count * outer_count) {
    starts_.reserve(inner_count * outer_count);
    for (std::size_t o = 0; o < outer_count; ++o) {
        for (std::size_t in = 0; in < inner_count; ++in) {
            starts_.push_back(in * inner_step + o * outer_step);
        }
    }
    lines_.assign(starts_.size(), BandedMatrix(length, kl, ku));
}

void LineOperator::apply_add(std::span<const double> x, std::span<double> y, double alpha) const {
    if (x.size() != dimension_ || y.size() != dimension_) {
        throw std::invalid_argument("LineOperator::apply_add: dimension mismatch");
    }
    std::vector<double> xl(length_);
    std::vector<double> yl(length_);
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const std::size_t s0 = starts_[l];
        for (std::size_t p = 0; p < length_; ++p) {
            xl[p] = x[s0 + p * stride_];
        }
        lines_[l].apply(xl, yl);
        for (std::size_t p = 0; p < length_; ++p) {
            y[s0 + p * stride_] += alpha * yl[p];
        }
    }
}

double LineOperator::entry(std::size_t row, std::size_t col) const {
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const std::size_t s0 = starts_[l];
        if (row < s0 || col < s0) {
            continue;
        }
        const std::size_t dr = row - s0;
        const std::size_t dc = col - s0;
        if (dr % stride_ != 0 || dc % stride_ != 0) {
            continue;
        }
        const std::size_t pr = dr / stride_;
        const std::size_t pc = dc / stride_;
        if (pr < length_ && pc < length_) {
            return lines_[l](pr, pc);
        }
    }
    return 0.0;
}

bool LineOperator::same_layout(const LineOperator& other) const {
    return length_ == other.length_ && stride_ == other.stride_ && starts_ == other.starts_;
}

void LineFactors::factor(const LineOperator& a, double scale) {
    layout_ = &a;
    lus_.resize(a.line_count());
    for (std::size_t l = 0; l < a.line_count(); ++l) {
        lus_[l].factor_shifted(a.line(l), scale);
    }
}

void LineFactors::factor(const LineOperator& a, const LineOperator& b, double weight,
                         double scale) {
    if (!a.same_layout(b)) {
        throw std::invalid_argument("LineFactors::factor: operators have different layouts");
    }
    layout_ = &a;
    lus_.resize(a.line_count());
    for (std::size_t l = 0; l < a.line_count(); ++l) {
        lus_[l].factor_shifted(a.line(l), b.line(l), weight, scale);
    }
}

void LineFactors::solve_in_place(std::span<double> x) const {
    if (layout_ == nullptr || x.size() != layout_->dimension()) {
        throw std::invalid_argument("LineFactors::solve_in_place: dimension mismatch");
    }
    const std::size_t len = layout_->length();
    const std::size_t stride = layout_->stride();
    std::vector<double> buf(len);
    for (std::size_t l = 0; l < lus_.size(); ++l) {
        const std::size_t s0 = layout_->start(l);
        for (std::size_t p = 0; p < len; ++p) {
            buf[p] = x[s0 + p * stride];
        }
        lus_[l].solve_in_place(buf);
        for (std::size_t p = 0; p < len; ++p) {
            x[s0 + p * stride] = buf[p];
        }
    }
}

void SparseOperator::add(std::size_t row, std::size_t col, double value) {
    if (row >= n_ || col >= n_) {
        throw std::out_of_range("SparseOperator::add: index outside the matrix");
    }
    if (finalized_) {
        throw std::logic_error("SparseOperator::add: operator already finalized");
    }
    pending_.push_back({row, col, value});
}

void SparseOperator::finalize() {
    std::stable_sort(pending_.begin(), pending_.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_offsets_.assign(n_ + 1, 0);
    cols_.clear();
    values_.clear();
    for (std::size_t t = 0; t < pending_.size();) {
        const std::size_t row = pending_[t].row;
        const std::size_t col = pending_[t].col;
        double sum = 0.0;
        while (t < pending_.size() && pending_[t].row == row && pending_[t].col == col) {
            sum += pending_[t].value;
            ++t;
        }
        cols_.push_back(col);
        values_.push_back(sum);
        row_offsets_[row + 1]++;
    }
    for (std::size_t r = 0; r < n_; ++r) {
        row_offsets_[r + 1] += row_offsets_[r];
    }
    pending_.clear();
    pending_.shrink_to_fit();
    finalized_ = true;
}

void SparseOperator::apply_add(std::span<const double> x, std::span<double> y,
                               double alpha) const {
    if (!finalized_) {
        throw std::logic_error("SparseOperator::apply_add: finalize() first");
    }
    if (x.size() != n_ || y.size() != n_) {
        throw std::invalid_argument("SparseOperator::apply_add: dimension mismatch");
    }
    for (std::size_t row = 0; row < n_; ++row) {
        double acc = 0.0;
        for (std::size_t p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p) {
            acc += values_[p] * x[cols_[p]];
        }
        y[row] += alpha * acc;
    }
}

SparseOperator SparseOperator::combined(double alpha, const SparseOperator& other,
                                        double beta) const {
    if (!finalized_ || !other.finalized_ || n_ != other.n_) {
        throw std::invalid_argument("SparseOperator::combined: incompatible operands");
    }
    SparseOperator out(n_);
    for (std::size_t row = 0; row < n_; ++row) {
        for (std::size_t p = row_offsets_[row]; p < row_offsets_[row + 1]; ++p) {
            out.add(row, cols_[p], alpha * values_[p]);
        }
        for (std::size_t p = other.row_offsets_[row]; p < other.row_offsets_[row + 1]; ++p) {
            out.add(row, other.cols_[p], beta * other.values_[p]);
        }
    }
    out.finalize();
    return out;
}

std::vector<double> sparse_apply(const SparseOperator& op, std::span<const double> x) {
    std::vector<double> y(op.size(), 0.0);
    op.apply_add(x, y);
    return y;
}

}  // namespace hhw
