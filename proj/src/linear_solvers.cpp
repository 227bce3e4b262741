#include "pdcp/linear_solvers.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <utility>

namespace pdcp {

void TridiagonalMatrix::validate() const {
    std::size_t n = diag.size();
    if (n == 0) throw std::invalid_argument("TridiagonalMatrix: empty");
    if (lower.size() + 1 != n || upper.size() + 1 != n)
        throw std::invalid_argument("TridiagonalMatrix: band lengths must be n-1");
}

std::vector<double> solve_tridiagonal(const TridiagonalMatrix& a,
                                      const std::vector<double>& rhs) {
    a.validate();
    std::size_t n = a.n();
    if (rhs.size() != n) throw std::invalid_argument("solve_tridiagonal: rhs size mismatch");

    std::vector<double> c(n - 1), d(n), x(n);
    double piv = a.diag[0];
    if (!(std::abs(piv) > 0.0)) throw SolveError("solve_tridiagonal: zero pivot at row 0");
    if (n > 1) c[0] = a.upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = a.diag[i] - a.lower[i - 1] * c[i - 1];
        if (!(std::abs(piv) > 0.0))
            throw SolveError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
        if (i + 1 < n) c[i] = a.upper[i] / piv;
        d[i] = (rhs[i] - a.lower[i - 1] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

void SparseMatrix::validate() const {
    if (row_ptr.size() != n + 1) throw std::invalid_argument("SparseMatrix: row_ptr size");
    if (row_ptr.front() != 0 || row_ptr.back() != static_cast<int>(vals.size()) ||
        cols.size() != vals.size())
        throw std::invalid_argument("SparseMatrix: inconsistent storage sizes");
    for (std::size_t i = 0; i < n; ++i) {
        if (row_ptr[i] > row_ptr[i + 1]) throw std::invalid_argument("SparseMatrix: row_ptr order");
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (cols[k] < 0 || cols[k] >= static_cast<int>(n))
                throw std::invalid_argument("SparseMatrix: column out of range");
            if (k > row_ptr[i] && cols[k] <= cols[k - 1])
                throw std::invalid_argument("SparseMatrix: columns not strictly increasing");
        }
    }
}

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    if (x.size() != n) throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
    auto first = cols.begin() + row_ptr[row];
    auto last = cols.begin() + row_ptr[row + 1];
    auto it = std::lower_bound(first, last, static_cast<int>(col));
    if (it == last || *it != static_cast<int>(col)) return 0.0;
    return vals[it - cols.begin()];
}

SparseMatrix SparseMatrix::from_rows(
    std::size_t n, const std::vector<std::vector<std::pair<int, double>>>& rows) {
    if (rows.size() != n) throw std::invalid_argument("SparseMatrix::from_rows: row count");
    SparseMatrix a;
    a.n = n;
    a.row_ptr.resize(n + 1, 0);
    std::size_t nnz = 0;
    for (auto& r : rows) nnz += r.size();
    a.cols.reserve(nnz);
    a.vals.reserve(nnz);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& [col, val] : rows[i]) {
            a.cols.push_back(col);
            a.vals.push_back(val);
        }
        a.row_ptr[i + 1] = static_cast<int>(a.cols.size());
    }
    a.validate();
    return a;
}

namespace {

// Single ILU(0) sweep over a copy of the pattern; returns false on a zero
// (or non-finite) pivot.
bool try_ilu0(const SparseMatrix& a, double shift, Ilu0Factors& out) {
    std::size_t n = a.n;
    out.lu = a;
    out.diag_index.assign(n, -1);
    out.diagonal_shift = shift;

    std::vector<int> pos(n, -1);  // scatter: column -> index in current row
    auto& lu = out.lu;
    for (std::size_t i = 0; i < n; ++i) {
        int row_begin = lu.row_ptr[i];
        int row_end = lu.row_ptr[i + 1];
        for (int idx = row_begin; idx < row_end; ++idx) {
            pos[lu.cols[idx]] = idx;
            if (lu.cols[idx] == static_cast<int>(i) && shift != 0.0) lu.vals[idx] += shift;
        }
        for (int idx = row_begin; idx < row_end; ++idx) {
            int k = lu.cols[idx];
            if (k >= static_cast<int>(i)) break;
            double pivot = lu.vals[out.diag_index[k]];
            if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot)) return false;
            double factor = lu.vals[idx] / pivot;
            lu.vals[idx] = factor;
            for (int jdx = out.diag_index[k] + 1; jdx < lu.row_ptr[k + 1]; ++jdx) {
                int target = pos[lu.cols[jdx]];
                if (target >= 0) lu.vals[target] -= factor * lu.vals[jdx];
            }
        }
        out.diag_index[i] = pos[i];
        double pivot = lu.vals[out.diag_index[i]];
        for (int idx = row_begin; idx < row_end; ++idx) pos[lu.cols[idx]] = -1;
        if (!(std::abs(pivot) > 0.0) || !std::isfinite(pivot)) return false;
    }
    return true;
}

}  // namespace

Ilu0Factors ilu0_factor(const SparseMatrix& a) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) {
        bool has_diag = false;
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            if (a.cols[k] == static_cast<int>(i)) {
                has_diag = true;
                max_diag = std::max(max_diag, std::abs(a.vals[k]));
            }
        if (!has_diag)
            throw std::invalid_argument("ilu0_factor: row " + std::to_string(i) +
                                        " has no stored diagonal");
    }

    Ilu0Factors f;
    if (try_ilu0(a, 0.0, f)) return f;
    double shift = 1e-12 * max_diag;
    if (try_ilu0(a, shift, f)) return f;
    throw SolveError("ilu0_factor: zero pivot persisted after diagonal shift");
}

void Ilu0Factors::apply(const std::vector<double>& r, std::vector<double>& z) const {
    std::size_t n = lu.n;
    z.resize(n);
    // L has unit diagonal; its strict lower part occupies the columns < i.
    for (std::size_t i = 0; i < n; ++i) {
        double s = r[i];
        for (int k = lu.row_ptr[i]; k < diag_index[i]; ++k) s -= lu.vals[k] * z[lu.cols[k]];
        z[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = z[i];
        for (int k = diag_index[i] + 1; k < lu.row_ptr[i + 1]; ++k) s -= lu.vals[k] * z[lu.cols[k]];
        z[i] = s / lu.vals[diag_index[i]];
    }
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::pair<std::vector<double>, BicgstabReport> bicgstab(
    const SparseMatrix& a, const std::vector<double>& rhs,
    const std::vector<double>& initial_guess, const Ilu0Factors* precond,
    const BicgstabOptions& options) {
    std::size_t n = a.n;
    if (rhs.size() != n) throw std::invalid_argument("bicgstab: rhs size mismatch");
    if (!initial_guess.empty() && initial_guess.size() != n)
        throw std::invalid_argument("bicgstab: initial guess size mismatch");

    BicgstabReport report;
    std::vector<double> x = initial_guess.empty() ? std::vector<double>(n, 0.0) : initial_guess;

    double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        report.converged = true;
        return {std::vector<double>(n, 0.0), report};
    }

    int max_iter = options.max_iterations > 0 ? options.max_iterations : 10 * static_cast<int>(n);

    std::vector<double> r(n), tmp(n);
    auto true_residual = [&](const std::vector<double>& xc, std::vector<double>& out) {
        a.multiply(xc, tmp);
        for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] - tmp[i];
        return norm2(out) / bnorm;
    };
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (precond)
            precond->apply(in, out);
        else
            out = in;
    };

    report.relative_residual = true_residual(x, r);
    if (report.relative_residual < options.tolerance) {
        report.converged = true;
        return {x, report};
    }

    std::vector<double> rhat = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), phat(n), shat(n), s(n), t(n);
    double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
    int restarts = 0;

    auto restart = [&]() -> bool {  // true if already converged at restart
        if (restarts++ > 0) throw SolveError("bicgstab: repeated breakdown");
        report.relative_residual = true_residual(x, r);
        if (report.relative_residual < options.tolerance) return true;
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        rho_prev = alpha = omega = 1.0;
        return false;
    };

    for (int iter = 1; iter <= max_iter; ++iter) {
        report.iterations = iter;
        double rho = dot(rhat, r);
        if (std::abs(rho) < DBL_MIN || std::abs(omega) < DBL_MIN) {
            if (restart()) {
                report.converged = true;
                return {x, report};
            }
            rho = dot(rhat, r);
            if (std::abs(rho) < DBL_MIN) throw SolveError("bicgstab: breakdown after restart");
        }
        double beta = (rho / rho_prev) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        precondition(p, phat);
        a.multiply(phat, v);
        double rhat_v = dot(rhat, v);
        if (std::abs(rhat_v) < DBL_MIN) {
            if (restart()) {
                report.converged = true;
                return {x, report};
            }
            continue;
        }
        alpha = rho / rhat_v;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = r[i] - alpha * v[i];
            x[i] += alpha * phat[i];
        }
        if (norm2(s) / bnorm < options.tolerance) {
            report.relative_residual = true_residual(x, r);
            if (report.relative_residual < options.tolerance) {
                report.converged = true;
                return {x, report};
            }
        }
        precondition(s, shat);
        a.multiply(shat, t);
        double tt = dot(t, t);
        if (!(tt > 0.0)) {
            if (restart()) {
                report.converged = true;
                return {x, report};
            }
            continue;
        }
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        if (norm2(r) / bnorm < options.tolerance) {
            report.relative_residual = true_residual(x, r);
            if (report.relative_residual < options.tolerance) {
                report.converged = true;
                return {x, report};
            }
        }
        rho_prev = rho;
    }

    report.relative_residual = true_residual(x, r);
    report.converged = report.relative_residual < options.tolerance;
    return {x, report};
}

void equilibrate_rows(SparseMatrix& a, std::vector<double>& b) {
    if (b.size() != a.n)
        throw std::invalid_argument("equilibrate_rows: rhs size mismatch");
    for (std::size_t l = 0; l < a.n; ++l) {
        double m = 0.0;
        for (int idx = a.row_ptr[l]; idx < a.row_ptr[l + 1]; ++idx)
            m = std::max(m, std::abs(a.vals[idx]));
        if (m == 0.0) continue;
        double s = 1.0 / m;
        for (int idx = a.row_ptr[l]; idx < a.row_ptr[l + 1]; ++idx) a.vals[idx] *= s;
        b[l] *= s;
    }
}

SparseMatrix assemble_lobatto_block(const SparseMatrix& a, double dt,
                                    const std::vector<double>& p,
                                    const std::vector<double>& q) {
    std::size_t n = a.n;
    if (p.size() != n || q.size() != n)
        throw std::invalid_argument("assemble_lobatto_block: penalty diagonal size mismatch");

    // Emits scale*A(l,:) + diag_add*e_l into out, columns shifted by offset.
    auto append_block = [&](std::vector<std::pair<int, double>>& out, std::size_t l, double scale,
                            double diag_add, int offset, bool keep_diag) {
        bool diag_emitted = false;
        for (int idx = a.row_ptr[l]; idx < a.row_ptr[l + 1]; ++idx) {
            int j = a.cols[idx];
            if (!diag_emitted && j > static_cast<int>(l)) {
                if (diag_add != 0.0 || keep_diag)
                    out.emplace_back(offset + static_cast<int>(l), diag_add);
                diag_emitted = true;
            }
            double v = scale * a.vals[idx];
            if (j == static_cast<int>(l)) {
                v += diag_add;
                diag_emitted = true;
                if (v != 0.0 || keep_diag) out.emplace_back(offset + j, v);
            } else if (v != 0.0) {
                out.emplace_back(offset + j, v);
            }
        }
        if (!diag_emitted && (diag_add != 0.0 || keep_diag))
            out.emplace_back(offset + static_cast<int>(l), diag_add);
    };

    double h = 0.5 * dt;
    int nn = static_cast<int>(n);
    std::vector<std::vector<std::pair<int, double>>> rows(2 * n);
    for (std::size_t l = 0; l < n; ++l) {
        append_block(rows[l], l, -h, 1.0 + p[l], 0, true);        // I - dt/2 A + P
        append_block(rows[l], l, h, -q[l], nn, false);            // dt/2 A - Q
        append_block(rows[n + l], l, -h, p[l], 0, false);         // -dt/2 A + P
        append_block(rows[n + l], l, -h, 1.0 + q[l], nn, true);   // I - dt/2 A + Q
    }
    return SparseMatrix::from_rows(2 * n, rows);
}

}  // namespace pdcp
