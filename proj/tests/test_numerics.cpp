#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "bioheat/errors.hpp"
#include "bioheat/numerics.hpp"
#include "support/oracles.hpp"

using namespace bioheat;

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
    SparseOperator op = SparseOperator::from_triplets(
        3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {2, 1, -1.0}, {1, 1, 3.0}});
    CHECK(op.size() == 3);
    CHECK(op.entry(0, 2) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(op.entry(0, 0) == 2.0);
    CHECK(op.entry(0, 1) == 0.0);
    CHECK(op.entry(2, 1) == -1.0);
    const auto cols = op.columns();
    const auto offs = op.row_offsets();
    for (int r = 0; r < 3; ++r)
        for (int k = offs[r] + 1; k < offs[r + 1]; ++k)
            CHECK(cols[static_cast<std::size_t>(k - 1)] < cols[static_cast<std::size_t>(k)]);
}

TEST_CASE("multiply agrees with the dense product") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Triplet> entries;
    const int n = 9;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if ((r + 2 * c) % 3 == 0) entries.push_back({r, c, dist(gen)});
    SparseOperator op = SparseOperator::from_triplets(n, entries);
    const oracle::Dense dense = oracle::dense_from(op);

    std::vector<double> x(n), y(n, 0.0);
    for (double& v : x) v = dist(gen);
    op.multiply(x, y);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
            s += dense[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                 x[static_cast<std::size_t>(c)];
        CHECK(y[static_cast<std::size_t>(r)] == doctest::Approx(s).epsilon(1e-13));
    }
}

TEST_CASE("cg matches dense elimination on a random SPD system") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 12;
    // A = B^T B + n I is SPD with a modest condition number.
    oracle::Dense b(n, std::vector<double>(n));
    for (auto& row : b)
        for (double& v : row) v = dist(gen);
    std::vector<Triplet> entries;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double s = (r == c) ? static_cast<double>(n) : 0.0;
            for (int k = 0; k < n; ++k)
                s += b[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] *
                     b[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
            entries.push_back({r, c, s});
        }
    SparseOperator op = SparseOperator::from_triplets(n, entries);

    std::vector<double> rhs(n);
    for (double& v : rhs) v = dist(gen);
    CgOptions opt;
    opt.tol = 1e-13;
    const std::vector<double> x = cg_solve(op, rhs, opt);
    const std::vector<double> ref = oracle::dense_solve(oracle::dense_from(op), rhs);
    CHECK(oracle::max_abs_diff(x, ref) < 1e-10);
}

TEST_CASE("cg nullspace projection returns the zero-mean solution") {
    // Periodic 1D Laplacian ring: singular, constants in the nullspace.
    const int n = 8;
    std::vector<Triplet> entries;
    for (int r = 0; r < n; ++r) {
        entries.push_back({r, r, 2.0});
        entries.push_back({r, (r + 1) % n, -1.0});
        entries.push_back({r, (r + n - 1) % n, -1.0});
    }
    SparseOperator op = SparseOperator::from_triplets(n, entries);

    std::vector<double> rhs(n, 0.0);
    rhs[0] = 1.0;
    rhs[4] = -1.0;  // compatible: zero mean
    CgOptions opt;
    opt.tol = 1e-12;
    opt.project_constants = true;
    const std::vector<double> x = cg_solve(op, rhs, opt);

    double mean = 0.0;
    for (double v : x) mean += v;
    CHECK(std::abs(mean) < 1e-12);

    std::vector<double> back(n, 0.0);
    op.multiply(x, back);
    CHECK(oracle::max_abs_diff(back, rhs) < 1e-10);
}

TEST_CASE("cg throws when the iteration cap is hit") {
    SparseOperator op = SparseOperator::from_triplets(2, {{0, 0, 1.0}, {1, 1, 2.0}});
    CgOptions opt;
    opt.max_iter_factor = 0;
    CHECK_THROWS_AS(cg_solve(op, std::vector<double>{1.0, 1.0}, opt), SolverError);
}

TEST_CASE("trapezoid convolution reproduces the exponential closed form") {
    // (e^{-a .} * e^{-b .})(t) = (e^{-bt} - e^{-at}) / (a - b)
    const double a = 3.0, b = 1.0, dt = 1e-3;
    const int steps = 800;
    KernelSamples kernel;
    kernel.dt = dt;
    std::vector<double> history(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        kernel.values.push_back(std::exp(-a * k * dt));
        history[static_cast<std::size_t>(k)] = std::exp(-b * k * dt);
    }
    CHECK(convolve_trapezoid(kernel, history, dt, 0) == 0.0);
    for (int k : {1, 200, 800}) {
        const double t = k * dt;
        const double exact = (std::exp(-b * t) - std::exp(-a * t)) / (a - b);
        const double got = convolve_trapezoid(kernel, history, dt, static_cast<std::size_t>(k));
        CHECK(got == doctest::Approx(exact).epsilon(5e-6));
    }
}

TEST_CASE("field convolution matches the scalar path componentwise") {
    KernelSamples kernel;
    kernel.dt = 0.1;
    kernel.values = {1.0, 0.5, 0.25, 0.125};
    std::vector<std::vector<double>> fields = {
        {1.0, -2.0}, {0.5, 1.0}, {2.0, 0.0}, {-1.0, 3.0}};
    std::vector<double> out(2, 0.0);
    convolve_trapezoid_fields(kernel, fields, 3, out);
    for (int comp = 0; comp < 2; ++comp) {
        std::vector<double> hist;
        for (const auto& f : fields) hist.push_back(f[static_cast<std::size_t>(comp)]);
        CHECK(out[static_cast<std::size_t>(comp)] ==
              doctest::Approx(convolve_trapezoid(kernel, hist, 0.1, 3)).epsilon(1e-14));
    }
}
