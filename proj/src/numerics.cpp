#include "bioheat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bioheat/errors.hpp"

namespace bioheat {

SparseOperator SparseOperator::from_triplets(int n, std::vector<Triplet> entries) {
    if (n < 0) throw ValidationError("sparse operator: negative dimension");
    for (const Triplet& t : entries) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw ValidationError("sparse operator: triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseOperator op;
    op.n_ = n;
    op.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    op.columns_.reserve(entries.size());
    op.values_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < entries.size() && entries[j].row == entries[i].row &&
               entries[j].col == entries[i].col) {
            sum += entries[j].value;
            ++j;
        }
        op.columns_.push_back(entries[i].col);
        op.values_.push_back(sum);
        op.row_offsets_[static_cast<std::size_t>(entries[i].row) + 1]++;
        i = j;
    }
    for (int r = 0; r < n; ++r) op.row_offsets_[r + 1] += op.row_offsets_[r];
    return op;
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
        throw ValidationError("sparse operator: size mismatch in multiply");
    for (int r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            acc += values_[k] * x[columns_[k]];
        y[r] = acc;
    }
}

std::vector<double> SparseOperator::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r)
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            if (columns_[k] == r) d[r] = values_[k];
    return d;
}

double SparseOperator::entry(int row, int col) const {
    if (row < 0 || row >= n_ || col < 0 || col >= n_) return 0.0;
    for (int k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k)
        if (columns_[k] == col) return values_[k];
    return 0.0;
}

bool SparseOperator::matches_transpose(double rel_tol) const {
    double scale = 0.0;
    for (double v : values_) scale = std::max(scale, std::abs(v));
    for (int r = 0; r < n_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (std::abs(values_[k] - entry(columns_[k], r)) > rel_tol * scale) return false;
        }
    }
    return true;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void remove_mean(std::span<double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

}  // namespace

std::vector<double> cg_solve(const SparseOperator& a, std::span<const double> rhs,
                             const CgOptions& opt, CgInfo* info,
                             std::span<const double> initial_guess) {
    const int n = a.size();
    if (static_cast<int>(rhs.size()) != n)
        throw ValidationError("cg_solve: right-hand side size mismatch");
    if (!initial_guess.empty() && static_cast<int>(initial_guess.size()) != n)
        throw ValidationError("cg_solve: initial guess size mismatch");

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    if (info) *info = {};
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    if (rhs_norm == 0.0 || n == 0) return x;

    std::vector<double> inv_diag;
    bool use_jacobi = opt.jacobi;
    if (use_jacobi) {
        inv_diag = a.diagonal();
        for (double& d : inv_diag) {
            if (d <= 0.0) {
                use_jacobi = false;
                break;
            }
            d = 1.0 / d;
        }
    }

    if (!initial_guess.empty()) std::copy(initial_guess.begin(), initial_guess.end(), x.begin());

    std::vector<double> r(static_cast<std::size_t>(n));
    a.multiply(x, r);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    if (opt.project_constants) remove_mean(r);

    std::vector<double> z(static_cast<std::size_t>(n));
    auto apply_precond = [&](std::span<const double> in, std::span<double> out) {
        if (use_jacobi)
            for (int i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
        else
            std::copy(in.begin(), in.end(), out.begin());
    };

    apply_precond(r, z);
    std::vector<double> p = z;
    std::vector<double> ap(static_cast<std::size_t>(n));
    double rz = dot(r, z);
    double res = std::sqrt(dot(r, r)) / rhs_norm;

    const long cap = static_cast<long>(opt.max_iter_factor) * std::max(n, 1);
    long iter = 0;
    while (res > opt.tol) {
        if (iter >= cap || !std::isfinite(res)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "cg_solve: no convergence after %ld iterations (residual %.3e)", iter,
                          res);
            throw SolverError(buf);
        }
        a.multiply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0 || !std::isfinite(pap))
            throw SolverError("cg_solve: operator not positive definite on the Krylov space");
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (opt.project_constants) remove_mean(r);
        apply_precond(r, z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz_next;
        res = std::sqrt(dot(r, r)) / rhs_norm;
        ++iter;
    }

    if (opt.project_constants) remove_mean(x);
    if (info) {
        info->iterations = static_cast<int>(iter);
        info->residual = res;
    }
    return x;
}

double convolve_trapezoid(const KernelSamples& kernel, std::span<const double> history,
                          double history_dt, std::size_t upto) {
    if (kernel.dt <= 0.0) throw ValidationError("convolve_trapezoid: kernel step must be positive");
    const double rel = std::abs(history_dt - kernel.dt) / kernel.dt;
    if (rel > 1e-12) throw ValidationError("convolve_trapezoid: time-step mismatch");
    if (upto >= kernel.values.size() || upto >= history.size())
        throw ValidationError("convolve_trapezoid: index past sampled range");
    if (upto == 0) return 0.0;
    double sum = 0.5 * (kernel.values[upto] * history[0] + kernel.values[0] * history[upto]);
    for (std::size_t j = 1; j < upto; ++j) sum += kernel.values[upto - j] * history[j];
    return sum * kernel.dt;
}

void convolve_trapezoid_fields(const KernelSamples& kernel,
                               const std::vector<std::vector<double>>& history, std::size_t upto,
                               std::span<double> out) {
    if (kernel.dt <= 0.0) throw ValidationError("convolve_trapezoid: kernel step must be positive");
    if (upto >= kernel.values.size() || upto >= history.size())
        throw ValidationError("convolve_trapezoid: index past sampled range");
    std::fill(out.begin(), out.end(), 0.0);
    if (upto == 0) return;
    for (std::size_t j = 0; j <= upto; ++j) {
        const double w = (j == 0 || j == upto) ? 0.5 : 1.0;
        const double k = w * kernel.values[upto - j] * kernel.dt;
        const std::vector<double>& field = history[j];
        if (field.size() != out.size())
            throw ValidationError("convolve_trapezoid: field size mismatch in history");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += k * field[i];
    }
}

}  // namespace bioheat
