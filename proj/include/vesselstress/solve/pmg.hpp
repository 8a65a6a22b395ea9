#pragma once

#include "vesselstress/core/error.hpp"
#include "vesselstress/core/parallel.hpp"
#include "vesselstress/mesh/mesh.hpp"
#include "vesselstress/solve/cg.hpp"
#include "vesselstress/solve/csr.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#ifdef VESSELSTRESS_WITH_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace vesselstress {

/// Two-level p-multigrid preconditioner for quadratic meshes.
///
/// Smoother: one forward Gauss-Seidel sweep before and one backward sweep
/// after the coarse correction, which keeps the preconditioner symmetric.
/// Coarse space: linear (vertex) interpolation, midside values being the
/// mean of the edge ends. The Galerkin coarse operator P^T K P is factored
/// once by sparse Cholesky.
///
/// K is held by reference and must outlive the preconditioner. apply() uses
/// internal scratch buffers and is not safe to call concurrently.
class PMultigridPreconditioner final : public Preconditioner {
public:
    PMultigridPreconditioner(const CsrMatrix& K, const Mesh& mesh, std::span<const std::int64_t> free_dofs,
                             int threads = 1)
        : K_(K) {
        const std::size_t n = K.rows;
        if (free_dofs.size() != n) fail(ErrorCode::ConfigInvalid, "free DOF map does not match the system size");

        diag_pos_.resize(n);
        inv_diag_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto b = K.col.begin() + K.row_ptr[i], e = K.col.begin() + K.row_ptr[i + 1];
            auto it = std::lower_bound(b, e, static_cast<std::int32_t>(i));
            const double d = (it != e && *it == static_cast<std::int32_t>(i)) ? K.val[it - K.col.begin()] : 0.0;
            if (!(d > 0.0)) fail(ErrorCode::ZeroDiagonal, "row " + std::to_string(i));
            diag_pos_[i] = it - K.col.begin();
            inv_diag_[i] = 1.0 / d;
        }

        build_prolongation(mesh, free_dofs);
        factor_coarse(threads);
        res_.resize(n);
        rc_.resize(nc_);
    }

    std::size_t coarse_size() const { return nc_; }

    void apply(std::span<const double> r, std::span<double> x) const override { run(r, x, {}); }

    const CsrMatrix* fused_matrix() const override { return &K_; }

    /// Also returns kz = K x, gathered during the backward sweep from the
    /// upper triangle (K is symmetric).
    void apply_fused(std::span<const double> r, std::span<double> x, std::span<double> kz) const override {
        run(r, x, kz);
    }

private:
    void run(std::span<const double> r, std::span<double> x, std::span<double> kz) const {
        const std::size_t n = K_.rows;
        const auto& rp = K_.row_ptr;
        const auto& col = K_.col;
        const auto& val = K_.val;

        // Forward sweep from zero. The residual r - Kx left behind is minus the
        // strictly upper part applied to x; by symmetry it is gathered from the
        // lower entries of later rows while they are still in cache.
        std::fill(res_.begin(), res_.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = r[i];
            for (std::int64_t k = rp[i]; k < diag_pos_[i]; ++k) s -= val[k] * x[col[k]];
            const double xi = s * inv_diag_[i];
            x[i] = xi;
            for (std::int64_t k = rp[i]; k < diag_pos_[i]; ++k) res_[col[k]] -= val[k] * xi;
        }

        std::fill(rc_.begin(), rc_.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (int t = 0; t < 2; ++t)
                if (pc_[i][t] >= 0) rc_[pc_[i][t]] += pw_[i][t] * res_[i];
        const Eigen::VectorXd ec = coarse_->solve(Eigen::Map<const Eigen::VectorXd>(rc_.data(), nc_));
        for (std::size_t i = 0; i < n; ++i)
            for (int t = 0; t < 2; ++t)
                if (pc_[i][t] >= 0) x[i] += pw_[i][t] * ec[pc_[i][t]];

        if (kz.empty()) {
            for (std::size_t ii = n; ii-- > 0;) {
                double s = r[ii];
                for (std::int64_t k = rp[ii]; k < rp[ii + 1]; ++k) s -= val[k] * x[col[k]];
                x[ii] += s * inv_diag_[ii];
            }
            return;
        }
        // Rows above ii are final once ii is reached, so each upper entry
        // contributes to both of its rows of K x.
        std::fill(kz.begin(), kz.end(), 0.0);
        for (std::size_t ii = n; ii-- > 0;) {
            double s = r[ii];
            for (std::int64_t k = rp[ii]; k < rp[ii + 1]; ++k) s -= val[k] * x[col[k]];
            const double xi = x[ii] + s * inv_diag_[ii];
            x[ii] = xi;
            double acc = val[diag_pos_[ii]] * xi;
            for (std::int64_t k = diag_pos_[ii] + 1; k < rp[ii + 1]; ++k) {
                acc += val[k] * x[col[k]];
                kz[col[k]] += val[k] * xi;
            }
            kz[ii] += acc;
        }
    }

    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
#ifdef VESSELSTRESS_WITH_CHOLMOD
    using CoarseSolver = Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower>;
#else
    using CoarseSolver = Eigen::SimplicialLDLT<SpMat, Eigen::Lower>;
#endif

    void build_prolongation(const Mesh& mesh, std::span<const std::int64_t> free_dofs) {
        const std::size_t nn = mesh.nodes.size();
        std::vector<char> is_vertex(nn, 0);
        std::vector<std::array<NodeId, 2>> parents(nn, {-1, -1});
        for (const auto& el : mesh.elements) {
            for (int c = 0; c < 4; ++c) is_vertex[el[c]] = 1;
            if (mesh.order != MeshOrder::Quadratic) continue;
            for (int k = 0; k < 6; ++k) parents[el[4 + k]] = {el[tet::kEdges[k][0]], el[tet::kEdges[k][1]]};
        }

        // Coarse unknowns: free DOFs of vertex nodes, in fine order.
        std::vector<std::int32_t> coarse_of_full(3 * nn, -1);
        nc_ = 0;
        for (std::size_t i = 0; i < free_dofs.size(); ++i)
            if (is_vertex[free_dofs[i] / 3]) coarse_of_full[free_dofs[i]] = static_cast<std::int32_t>(nc_++);

        pc_.assign(free_dofs.size(), {-1, -1});
        pw_.assign(free_dofs.size(), {0.0, 0.0});
        for (std::size_t i = 0; i < free_dofs.size(); ++i) {
            const std::int64_t d = free_dofs[i];
            const std::int64_t node = d / 3;
            const int axis = static_cast<int>(d % 3);
            if (is_vertex[node]) {
                pc_[i] = {coarse_of_full[d], -1};
                pw_[i] = {1.0, 0.0};
            } else if (parents[node][0] >= 0) {
                for (int t = 0; t < 2; ++t) {
                    pc_[i][t] = coarse_of_full[3 * static_cast<std::int64_t>(parents[node][t]) + axis];
                    pw_[i][t] = 0.5;
                }
            }
        }
    }

    void factor_coarse(int threads) {
        const std::size_t n = K_.rows;
        // Transpose of P: for each coarse unknown, the fine rows feeding it.
        std::vector<std::int64_t> tp(nc_ + 1, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (int t = 0; t < 2; ++t)
                if (pc_[i][t] >= 0) ++tp[pc_[i][t] + 1];
        for (std::size_t c = 0; c < nc_; ++c) tp[c + 1] += tp[c];
        std::vector<std::int32_t> trow(tp[nc_]);
        std::vector<double> tw(tp[nc_]);
        {
            std::vector<std::int64_t> fill(tp.begin(), tp.end() - 1);
            for (std::size_t i = 0; i < n; ++i)
                for (int t = 0; t < 2; ++t)
                    if (pc_[i][t] >= 0) {
                        trow[fill[pc_[i][t]]] = static_cast<std::int32_t>(i);
                        tw[fill[pc_[i][t]]++] = pw_[i][t];
                    }
        }

        // Row c of P^T K P, lower triangle only; rows are independent.
        std::vector<std::vector<std::int32_t>> row_cols(nc_);
        std::vector<std::vector<double>> row_vals(nc_);
        parallel_ranges(nc_, threads, [&](std::size_t lo, std::size_t hi, int) {
            std::vector<double> acc(nc_, 0.0);
            std::vector<char> seen(nc_, 0);
            std::vector<std::int32_t> touched;
            for (std::size_t c = lo; c < hi; ++c) {
                touched.clear();
                for (std::int64_t a = tp[c]; a < tp[c + 1]; ++a) {
                    const std::int32_t i = trow[a];
                    const double wi = tw[a];
                    for (std::int64_t k = K_.row_ptr[i]; k < K_.row_ptr[i + 1]; ++k) {
                        const std::int32_t j = K_.col[k];
                        for (int t = 0; t < 2; ++t) {
                            const std::int32_t c2 = pc_[j][t];
                            if (c2 < 0 || static_cast<std::size_t>(c2) < c) continue;
                            if (!seen[c2]) {
                                seen[c2] = 1;
                                touched.push_back(c2);
                            }
                            acc[c2] += wi * pw_[j][t] * K_.val[k];
                        }
                    }
                }
                std::sort(touched.begin(), touched.end());
                row_cols[c] = touched;
                row_vals[c].resize(touched.size());
                for (std::size_t q = 0; q < touched.size(); ++q) {
                    row_vals[c][q] = acc[touched[q]];
                    acc[touched[q]] = 0.0;
                    seen[touched[q]] = 0;
                }
            }
        });

        // Upper rows of a symmetric matrix are the lower columns: fill CSC directly.
        SpMat Ac(static_cast<int>(nc_), static_cast<int>(nc_));
        std::size_t nnz = 0;
        for (const auto& rc : row_cols) nnz += rc.size();
        Ac.resizeNonZeros(static_cast<Eigen::Index>(nnz));
        int* outer = Ac.outerIndexPtr();
        outer[0] = 0;
        std::size_t pos = 0;
        for (std::size_t c = 0; c < nc_; ++c) {
            for (std::size_t q = 0; q < row_cols[c].size(); ++q, ++pos) {
                Ac.innerIndexPtr()[pos] = row_cols[c][q];
                Ac.valuePtr()[pos] = row_vals[c][q];
            }
            std::vector<std::int32_t>().swap(row_cols[c]);
            std::vector<double>().swap(row_vals[c]);
            outer[c + 1] = static_cast<int>(pos);
        }

        coarse_ = std::make_unique<CoarseSolver>();
        coarse_->compute(Ac);
        if (coarse_->info() != Eigen::Success)
            fail(ErrorCode::SolverDiverged, "coarse factorization failed (operator not positive definite)");
    }

    const CsrMatrix& K_;
    std::vector<std::int64_t> diag_pos_;
    std::vector<double> inv_diag_;
    std::size_t nc_ = 0;
    std::vector<std::array<std::int32_t, 2>> pc_;
    std::vector<std::array<double, 2>> pw_;
    std::unique_ptr<CoarseSolver> coarse_;
    mutable std::vector<double> res_;
    mutable std::vector<double> rc_;
};

}  // namespace vesselstress
