#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bioheat {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

// Compressed-row sparse matrix. Assembly sums duplicate triplets; columns are
// sorted within each row so traversal order (and hence floating-point
// reduction order) is fixed.
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(int n, std::vector<Triplet> entries);

    int size() const { return n_; }
    std::size_t nonzeros() const { return values_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> diagonal() const;
    double entry(int row, int col) const;  // 0 when the slot is absent
    bool matches_transpose(double rel_tol = 1e-14) const;

    std::span<const int> row_offsets() const { return row_offsets_; }
    std::span<const int> columns() const { return columns_; }
    std::span<const double> values() const { return values_; }

private:
    int n_ = 0;
    std::vector<int> row_offsets_;  // size n+1
    std::vector<int> columns_;
    std::vector<double> values_;
};

struct CgOptions {
    double tol = 1e-10;        // relative residual target, |r| / |b|
    int max_iter_factor = 50;  // iteration cap = factor * unknowns
    bool project_constants = false;
    bool jacobi = true;
};

struct CgInfo {
    int iterations = 0;
    double residual = 0.0;  // final relative residual
};

// Conjugate gradients for symmetric positive (semi-)definite operators.
// With project_constants the residual is deflated against the constant vector
// every iteration and the returned solution has zero mean; use this for
// periodic problems whose operator annihilates constants. Throws SolverError
// when the iteration cap is reached.
std::vector<double> cg_solve(const SparseOperator& a, std::span<const double> rhs,
                             const CgOptions& opt = {}, CgInfo* info = nullptr,
                             std::span<const double> initial_guess = {});

// Scalar time series sampled on the uniform grid t_k = k * dt.
struct KernelSamples {
    double dt = 0.0;
    std::vector<double> values;
};

// Trapezoid-rule convolution sum_{j=0..upto} w_j kernel[upto-j] history[j] dt
// with end weights 1/2; upto = 0 gives the empty integral 0.
double convolve_trapezoid(const KernelSamples& kernel, std::span<const double> history,
                          double history_dt, std::size_t upto);

// History of fields: accumulates the convolution at index `upto` into `out`.
void convolve_trapezoid_fields(const KernelSamples& kernel,
                               const std::vector<std::vector<double>>& history,
                               std::size_t upto, std::span<double> out);

}  // namespace bioheat
