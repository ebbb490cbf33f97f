#pragma once
//
// Project     : hmlr
// File        : dense.hpp
// Description : instrumented dense kernels used at tree leaves
//

#include <hmlr/types.hpp>

namespace hmlr {

enum class Side { lower, upper };

constexpr double default_pivot_tol = 1e-14;

//
// unpivoted LR factorization M = L·R with unit-diagonal L.
// counts (n-l) divisions and 2(n-l)^2 multiply/adds per elimination step,
// n/6·(4n^2-3n-1) in total.
//
struct LRFactors
{
    Matrix l;   // unit lower triangular (diagonal stored)
    Matrix r;   // upper triangular
};

LRFactors dense_lr ( const Matrix & m, double pivot_tol, FlopCounter & fc );

// in-place variant: w is overwritten by the compact factorization
// (multipliers strictly below the diagonal, R on and above)
void dense_lr_inplace ( Matrix & w, double pivot_tol, FlopCounter & fc );

//
// triangular solve (T or T^*)·X = Y with ell right-hand sides.
// the lower side assumes a unit diagonal (never read, no divisions);
// the upper side divides by the stored diagonal.
// counts as executed: ell·n·(n-1) for the lower side, ell·n^2 for the upper.
//
Matrix dense_solve_triangular ( Side side, bool transposed, const Matrix & t,
                                const Matrix & y, double pivot_tol, FlopCounter & fc );

// in-place on the right-hand side; t may hold a compact factorization,
// only the relevant triangle is read
void solve_triangular_inplace ( Side side, bool transposed, const Matrix & t,
                                Eigen::Ref<Matrix> y, double pivot_tol, FlopCounter & fc );

//
// inverse of a triangular matrix, n/6·(2n^2+4) operations
// (1 + (n-l) + (n-l)^2 per column). result is a full square matrix with
// explicit unit diagonal for the lower side; input may be compact.
//
Matrix dense_invert_triangular ( Side side, const Matrix & t, double pivot_tol, FlopCounter & fc );

//
// product R·L of an upper and a unit-diagonal lower triangular matrix,
// n/6·(4n^2-3n-1) operations ((n-l) + 2(n-l)^2 per step)
//
Matrix dense_rl_product ( const Matrix & r, const Matrix & l, FlopCounter & fc );

//
// thin Householder factorization B = Q·R with isometric Q (rows(B) × q)
// and upper trapezoidal R (q × cols(B)), q = min(rows, cols).
// rank deficiency is permitted, R may be singular.
//
struct ThinQR
{
    Matrix q;
    Matrix r;
};

ThinQR thin_qr ( const Matrix & b, FlopCounter & fc );

//
// singular value decomposition W = U·diag(sigma)·V^* of a small matrix
// with rows >= cols, by one-sided Jacobi; singular values sorted descending
//
struct SVDResult
{
    Matrix u;
    Vector sigma;
    Matrix v;
};

SVDResult jacobi_svd ( const Matrix & w, FlopCounter & fc );

//
// low-rank truncation M ≈ C·D^*: thin QR of the long side, SVD of the
// small core, keep min(max_rank, #{sigma_i > rel_tol·sigma_1}) columns
//
struct LowRankFactors
{
    Matrix c;
    Matrix d;
};

constexpr double default_trunc_tol = 1e-12;

LowRankFactors truncate_lowrank ( const Matrix & m, Index max_rank, double rel_tol,
                                  FlopCounter & fc );

//
// counted product helpers (first write of a fresh result is an assignment,
// accumulation counts one add per term)
//

// c = a·b
Matrix mul_to ( const Matrix & a, const Matrix & b, FlopCounter & fc );

// c += a·b
void mul_add ( Eigen::Ref<Matrix> c, const Eigen::Ref<const Matrix> & a,
               const Eigen::Ref<const Matrix> & b, FlopCounter & fc );

// c -= a·b
void mul_sub ( Eigen::Ref<Matrix> c, const Eigen::Ref<const Matrix> & a,
               const Eigen::Ref<const Matrix> & b, FlopCounter & fc );

}// namespace hmlr
