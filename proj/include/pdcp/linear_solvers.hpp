#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdcp {

/// Thrown when a linear or penalty solve cannot be completed.
struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tridiagonal matrix of order n.
/// diag[i]  = A(i, i)          for i in [0, n)
/// lower[i] = A(i + 1, i)      for i in [0, n-1)
/// upper[i] = A(i, i + 1)      for i in [0, n-1)
struct TridiagonalMatrix {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    std::size_t n() const { return diag.size(); }
    void validate() const;
};

/// Thomas algorithm. Throws SolveError on a zero pivot.
std::vector<double> solve_tridiagonal(const TridiagonalMatrix& a,
                                      const std::vector<double>& rhs);

/// Square sparse matrix in CSR with sorted, duplicate-free column indices per
/// row. Rows may be empty.
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<int> row_ptr;  // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    /// y = A*x
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;

    /// Entry lookup by binary search; 0 if not stored.
    double at(std::size_t row, std::size_t col) const;

    std::size_t nnz() const { return vals.size(); }
    void validate() const;

    /// Builds CSR from per-row (col, value) lists; each row list must be
    /// sorted by column and free of duplicates.
    static SparseMatrix from_rows(std::size_t n,
                                  const std::vector<std::vector<std::pair<int, double>>>& rows);
};

/// Zero-fill incomplete LU factors sharing the matrix sparsity pattern.
/// Unit-lower L and upper U are packed into one CSR copy of the pattern.
struct Ilu0Factors {
    SparseMatrix lu;
    std::vector<int> diag_index;  // position of the diagonal entry in each row
    double diagonal_shift = 0.0;  // 0 unless the shifted retry was needed

    /// z = (LU)^{-1} r
    void apply(const std::vector<double>& r, std::vector<double>& z) const;
};

/// ILU(0) in natural row order. Every row must store its diagonal. On a zero
/// pivot the factorization is retried once with the diagonal shifted by
/// 1e-12 * max|diag|; a second failure throws SolveError.
Ilu0Factors ilu0_factor(const SparseMatrix& a);

struct BicgstabReport {
    int iterations = 0;
    double relative_residual = 0.0;  // true residual ||b - A*x|| / ||b||
    bool converged = false;
};

struct BicgstabOptions {
    double tolerance = 1e-15;  // on the relative true residual
    int max_iterations = 0;    // 0 means 10 * n
};

/// Preconditioned BiCGSTAB with a fixed shadow residual (the initial
/// residual). Fully deterministic: no randomness, fixed evaluation order.
/// Convergence is declared only after the unpreconditioned true residual
/// passes the tolerance. rhs = 0 returns x = 0 in zero iterations. On an
/// exact breakdown the iteration restarts once from the current iterate with
/// a fresh shadow residual; a second breakdown throws SolveError.
/// A nullptr preconditioner runs the unpreconditioned iteration. An empty
/// initial guess starts from zero.
std::pair<std::vector<double>, BicgstabReport> bicgstab(
    const SparseMatrix& a, const std::vector<double>& rhs,
    const std::vector<double>& initial_guess, const Ilu0Factors* precond,
    const BicgstabOptions& options);

/// Left-scales each equation of a*x = b by the reciprocal of its row's max
/// absolute entry; zero rows are left untouched. The solution is unchanged,
/// but the relative-residual stopping test of bicgstab becomes meaningful
/// per row when penalty terms inflate a few rows (and b) by orders of
/// magnitude. Without this, a "converged" solve of a penalized system can
/// carry absolute errors far above the penalty iteration's displacement
/// tolerance.
void equilibrate_rows(SparseMatrix& a, std::vector<double>& b);

/// Assembles the coupled two-stage system
///   [ I - dt/2 A + diag(p)    dt/2 A - diag(q)   ]
///   [ -dt/2 A + diag(p)       I - dt/2 A + diag(q)]
/// of order 2n from the order-n operator A and stagewise penalty diagonals.
/// Exact zeros arising off the main diagonals are dropped; both main
/// diagonals are always stored.
SparseMatrix assemble_lobatto_block(const SparseMatrix& a, double dt,
                                    const std::vector<double>& p,
                                    const std::vector<double>& q);

}  // namespace pdcp
