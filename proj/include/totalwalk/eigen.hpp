// eigen.hpp: cyclic-Jacobi eigensolver for dense real symmetric matrices,
// with eigenvalues grouped into distinct levels.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "format.hpp"
#include "matrix.hpp"

namespace totalwalk {

// Spectrum of a symmetric matrix, grouped by distinct eigenvalue.
// Row k of `vectors` is the k-th eigenvector; rows are ordered level-major,
// level l occupying rows [offsets[l], offsets[l+1]). values[0] > values[1] > ...
struct EigenSystem {
    std::vector<double> values;
    std::vector<int> multiplicities;
    Matrix vectors;  // empty when only eigenvalues were requested
    std::vector<int> offsets;

    int dimension() const {
        int d = 0;
        for (int m : multiplicities) d += m;
        return d;
    }
    int level_count() const { return static_cast<int>(values.size()); }
    bool has_vectors() const { return !vectors.empty(); }

    const double* vector(int k) const { return vectors.row(k); }

    int level_of_row(int k) const {
        for (int l = 0; l + 1 < static_cast<int>(offsets.size()); ++l)
            if (k < offsets[l + 1]) return l;
        throw std::invalid_argument("eigensystem: row out of range");
    }

    // P_l x
    std::vector<double> project(int level, const std::vector<double>& x) const {
        if (level < 0 || level >= level_count()) throw std::invalid_argument("projector: level out of range");
        if (!has_vectors()) throw std::invalid_argument("projector: eigenvectors not computed");
        if (x.size() != vectors.cols()) throw std::invalid_argument("projector: dimension mismatch");
        std::vector<double> y(x.size(), 0.0);
        for (int k = offsets[level]; k < offsets[level + 1]; ++k) {
            const double* v = vectors.row(k);
            double c = 0;
            for (std::size_t i = 0; i < x.size(); ++i) c += v[i] * x[i];
            for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * v[i];
        }
        return y;
    }
};

inline std::vector<double> projector_apply(const EigenSystem& es, int level, const std::vector<double>& x) {
    return es.project(level, x);
}

struct JacobiOptions {
    double tol = 1e-12;       // convergence: off-diagonal Frobenius <= tol * ||A||_F
    int max_sweeps = 100;
    double group_tol = 1e-8;  // distinct levels: |phi - phi'| <= group_tol * max(1, ||A||_F)
    bool compute_vectors = true;
};

namespace detail {

inline void jacobi_rotate_rows(double* __restrict rp, double* __restrict rq, std::size_t len, double c,
                               double s) {
    for (std::size_t j = 0; j < len; ++j) {
        const double x = rp[j], y = rq[j];
        rp[j] = c * x - s * y;
        rq[j] = s * x + c * y;
    }
}

// Cyclic Jacobi maintaining only the upper triangle (the lower one goes
// stale); returns unsorted eigenvalues on the diagonal and, optionally,
// eigenvectors as rows of vt. For the rotation in the (p, q) plane each
// symmetric pair (A[p][j], A[q][j]) is read from whichever triangle half
// stores it, cutting memory traffic in half against a mirrored update.
inline void jacobi_sweep_loop(Matrix& a, Matrix* vt, double tol_abs, int max_sweeps, double norm) {
    const std::size_t n = a.rows();
    if (n < 2) return;
    const double skip_tol = tol_abs / static_cast<double>(n);
    double* const base = a.row(0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        off = std::sqrt(2.0 * off);
        if (off <= tol_abs || norm == 0.0) return;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= skip_tol) {
                    a(p, q) = 0.0;
                    continue;
                }
                const double app = a(p, p), aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a(p, q) = 0.0;
                double* cp = base + p;  // column p, touched as a(j, p) for j < p
                double* cq = base + q;
                for (std::size_t j = 0; j < p; ++j) {
                    const double x = cp[j * n], y = cq[j * n];
                    cp[j * n] = c * x - s * y;
                    cq[j * n] = s * x + c * y;
                }
                double* rp = a.row(p);
                for (std::size_t j = p + 1; j < q; ++j) {
                    const double x = rp[j], y = cq[j * n];
                    rp[j] = c * x - s * y;
                    cq[j * n] = s * x + c * y;
                }
                jacobi_rotate_rows(a.row(p) + q + 1, a.row(q) + q + 1, n - q - 1, c, s);
                if (vt) jacobi_rotate_rows(vt->row(p), vt->row(q), n, c, s);
            }
        }
    }
    throw std::runtime_error("jacobi eigensolver: no convergence within sweep cap");
}

// First entry that is nonzero relative to the vector's largest component is
// made positive; fixes the overall sign deterministically.
inline void fix_sign(double* v, std::size_t n) {
    double amax = 0;
    for (std::size_t i = 0; i < n; ++i) amax = std::max(amax, std::fabs(v[i]));
    if (amax == 0) return;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(v[i]) > 1e-12 * amax) {
            if (v[i] < 0)
                for (std::size_t j = 0; j < n; ++j) v[j] = -v[j];
            return;
        }
    }
}

}  // namespace detail

// Group raw eigenpairs into an EigenSystem: sort by value descending, merge
// values closer than group_tol_abs, use each group's mean as the level value.
// `rows` may be empty (values-only); otherwise row k belongs to raw_values[k].
inline EigenSystem group_eigenpairs(const std::vector<double>& raw_values, const Matrix& rows,
                                    double group_tol_abs) {
    const std::size_t n = raw_values.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        if (raw_values[i] != raw_values[j]) return raw_values[i] > raw_values[j];
        return i < j;
    });

    EigenSystem es;
    if (!rows.empty()) {
        es.vectors = Matrix(rows.rows(), rows.cols());
        for (std::size_t k = 0; k < n; ++k) {
            const double* src = rows.row(order[k]);
            std::copy(src, src + rows.cols(), es.vectors.row(k));
            detail::fix_sign(es.vectors.row(k), rows.cols());
        }
    }

    es.offsets.push_back(0);
    std::size_t k = 0;
    while (k < n) {
        std::size_t j = k;
        double sum = 0;
        while (j < n && (j == k || raw_values[order[j - 1]] - raw_values[order[j]] <= group_tol_abs)) {
            sum += raw_values[order[j]];
            ++j;
        }
        es.values.push_back(sum / static_cast<double>(j - k));
        es.multiplicities.push_back(static_cast<int>(j - k));
        es.offsets.push_back(static_cast<int>(j));
        k = j;
    }
    return es;
}

inline EigenSystem symmetric_eig(const Matrix& a, const JacobiOptions& opts = {}) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eig: matrix not square");
    const double norm = frobenius_norm(a);
    if (!is_symmetric(a, opts.tol * std::max(1.0, norm)))
        throw std::invalid_argument("symmetric_eig: matrix not symmetric within tolerance");

    Matrix work = a;
    Matrix vt;
    if (opts.compute_vectors) vt = Matrix::identity(a.rows());
    detail::jacobi_sweep_loop(work, opts.compute_vectors ? &vt : nullptr, opts.tol * norm, opts.max_sweeps,
                              norm);

    std::vector<double> raw(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) raw[i] = work(i, i);
    return group_eigenpairs(raw, vt, opts.group_tol * std::max(1.0, norm));
}

inline EigenSystem symmetric_eig(const IntMatrix& a, const JacobiOptions& opts = {}) {
    return symmetric_eig(to_double(a), opts);
}

inline std::string eigensystem_to_json(const EigenSystem& es, bool include_basis = false) {
    JsonWriter w;
    w.begin_object();
    w.key("values").array(es.values);
    w.key("multiplicities").array(es.multiplicities);
    if (include_basis && es.has_vectors()) {
        w.key("basis").begin_array();
        for (double x : es.vectors.data()) w.value(x);
        w.end_array();
    }
    w.end_object();
    return w.str();
}

}  // namespace totalwalk
