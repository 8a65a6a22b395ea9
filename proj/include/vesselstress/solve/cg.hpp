#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/parallel.hpp"
#include "vesselstress/solve/csr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

namespace vesselstress {

struct CgOptions {
    double rel_tol = 1e-8;
    /// Defaults to 10 sqrt(n) + 1000.
    std::optional<std::size_t> max_iter;
    int threads = 1;
};

struct SolveResult {
    std::vector<double> u;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    double seconds = 0.0;
};

namespace detail {

inline constexpr std::size_t kDotBlock = 4096;

/// Dot product summed per fixed-size block, blocks added in index order.
/// The result is the same for every thread count.
inline double dot(std::span<const double> a, std::span<const double> b, int threads) {
    const std::size_t nb = (a.size() + kDotBlock - 1) / kDotBlock;
    std::vector<double> partial(nb, 0.0);
    parallel_ranges(nb, threads, [&](std::size_t lo, std::size_t hi, int) {
        for (std::size_t blk = lo; blk < hi; ++blk) {
            const std::size_t end = std::min(a.size(), (blk + 1) * kDotBlock);
            double s = 0.0;
            for (std::size_t i = blk * kDotBlock; i < end; ++i) s += a[i] * b[i];
            partial[blk] = s;
        }
    });
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

}  // namespace detail

/// z = M^-1 r for a symmetric positive definite M.
///
/// A preconditioner that streams K anyway may also return K z from the same
/// pass: fused_matrix() then names that K and apply_fused() fills kz.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
    virtual const CsrMatrix* fused_matrix() const { return nullptr; }
    virtual void apply_fused(std::span<const double> r, std::span<double> z, std::span<double> /*kz*/) const {
        apply(r, z);
    }
};

class JacobiPreconditioner final : public Preconditioner {
public:
    explicit JacobiPreconditioner(const CsrMatrix& K) : inv_diag_(K.diagonal()) {
        for (std::size_t i = 0; i < inv_diag_.size(); ++i) {
            if (!(inv_diag_[i] > 0.0)) fail(ErrorCode::ZeroDiagonal, "row " + std::to_string(i));
            inv_diag_[i] = 1.0 / inv_diag_[i];
        }
    }
    void apply(std::span<const double> r, std::span<double> z) const override {
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
    }

private:
    std::vector<double> inv_diag_;
};

/// Preconditioned conjugate gradients for symmetric positive definite K.
/// Converged when ||F - K u||_2 <= rel_tol ||F||_2, checked on the true residual.
inline SolveResult solve_cg(const CsrMatrix& K, std::span<const double> F, const Preconditioner& M,
                            const CgOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = K.rows;
    const int threads = std::max(1, opt.threads);
    const std::size_t max_iter =
        opt.max_iter.value_or(static_cast<std::size_t>(10.0 * std::sqrt(static_cast<double>(n))) + 1000);

    SolveResult res;
    res.u.assign(n, 0.0);
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    const double norm_f = std::sqrt(detail::dot(F, F, threads));
    if (n == 0 || norm_f == 0.0) {
        res.seconds = elapsed();
        return res;
    }

    std::vector<double> r(F.begin(), F.end()), z(n), p(n), q(n);
    auto& x = res.u;
    // With a fused preconditioner q = K p follows from K z without its own pass.
    const bool fused = M.fused_matrix() == &K;
    std::vector<double> kz(fused ? n : 0);
    auto precondition = [&] {
        if (fused) M.apply_fused(r, z, kz);
        else M.apply(r, z);
    };
    auto new_direction = [&](double beta) {
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        if (fused) {
            for (std::size_t i = 0; i < n; ++i) q[i] = kz[i] + beta * q[i];
        } else {
            K.multiply(p, q, threads);
        }
    };
    precondition();
    double rz = detail::dot(r, z, threads);
    new_direction(0.0);
    double rel = 1.0;
    std::deque<double> tail;

    while (true) {
        if (res.iterations >= max_iter) {
            std::ostringstream msg;
            msg << "no convergence after " << res.iterations << " iterations; residual tail:";
            for (double v : tail) msg << ' ' << v;
            res.relative_residual = rel;
            throw Error(ErrorCode::SolverDiverged, msg.str());
        }
        const double pq = detail::dot(p, q, threads);
        if (!(pq > 0.0)) fail(ErrorCode::SolverDiverged, "non-positive curvature p'Kp = " + std::to_string(pq));
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        ++res.iterations;
        rel = std::sqrt(detail::dot(r, r, threads)) / norm_f;
        tail.push_back(rel);
        if (tail.size() > 8) tail.pop_front();

        if (rel <= opt.rel_tol) {
            // Confirm on the true residual; restart from it if recursion drifted.
            K.multiply(x, q, threads);
            for (std::size_t i = 0; i < n; ++i) r[i] = F[i] - q[i];
            rel = std::sqrt(detail::dot(r, r, threads)) / norm_f;
            if (rel <= opt.rel_tol) break;
            precondition();
            rz = detail::dot(r, z, threads);
            new_direction(0.0);
            continue;
        }
        precondition();
        const double rz_new = detail::dot(r, z, threads);
        const double beta = rz_new / rz;
        rz = rz_new;
        new_direction(beta);
    }
    res.relative_residual = rel;
    res.seconds = elapsed();
    return res;
}

/// Jacobi-preconditioned conjugate gradients.
inline SolveResult solve_cg(const CsrMatrix& K, std::span<const double> F, const CgOptions& opt = {}) {
    const JacobiPreconditioner M(K);
    return solve_cg(K, F, M, opt);
}

}  // namespace vesselstress
