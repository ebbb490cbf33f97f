#pragma once
//
// Project     : hmlr
// File        : triangular.hpp
// Description : triangular solves, LR factorization and inversion
//

#include <hmlr/hmatrix.hpp>

namespace hmlr {

//
// triangular H-matrix: blocks on the wrong side of the diagonal are absent,
// dense diagonal leaves hold the full triangle (unit diagonal stored for the
// lower side). the solve and inversion routines below only ever read the
// triangle they belong to, so a matrix holding a compact LR factorization
// serves as both factors at once.
//
struct TriangularHMatrix
{
    HMatrix  h;
    Side     side;

    TriangularHMatrix ( const ClusterTree & ct, const BlockTree & bt, Index k, double eps,
                        Side side_ )
        : h( ct, bt, k, eps,
             side_ == Side::lower ? HMatrix::Shape::lower : HMatrix::Shape::upper )
        , side( side_ )
    {}
};

//
// triangular solves with dense right-hand sides, in place on y:
// (T or T^*)·X = Y over the diagonal block of cluster t. `tri` is the
// matrix holding the factor, `diag` its node for block (t,t).
//
void tri_solve_vectors ( Side side, bool transposed,
                         const HMatrix & tri, const HMatrix::Node & diag,
                         Eigen::Ref<Matrix> y, double pivot_tol, FlopCounter & fc );

// spec-level wrapper: y is consumed, x receives the solution (x may be y)
void solve_matrix ( Side factor, bool transposed, int t, const TriangularHMatrix & tri,
                    Matrix & y, Matrix & x, FlopCounter & fc,
                    double pivot_tol = default_pivot_tol );

//
// triangular solves with H-matrix right-hand sides, in place on the region
// zn of the H-matrix z:
//   llsolve/rlsolve:  T|_{t×t}·X|_{t×s} = Y|_{t×s}
//   lrsolve/rrsolve:  X|_{s×t}·T|_{t×t} = Y|_{s×t}
// admissible leaves are solved on one factor only, no truncation occurs
//
void llsolve ( const HMatrix & tri, const HMatrix::Node & diag,
               HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc );
void rlsolve ( const HMatrix & tri, const HMatrix::Node & diag,
               HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc );
void lrsolve ( const HMatrix & tri, const HMatrix::Node & diag,
               HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc );
void rrsolve ( const HMatrix & tri, const HMatrix::Node & diag,
               HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc );

// spec-level wrappers: solve into x after copying the right-hand side
// region from y (y and x may be the same matrix)
void hsolve_left ( Side factor, int t, int s, const TriangularHMatrix & tri,
                   HMatrix & y, HMatrix & x, FlopCounter & fc,
                   double pivot_tol = default_pivot_tol );
void hsolve_right ( Side factor, int s, int t, const TriangularHMatrix & tri,
                    HMatrix & y, HMatrix & x, FlopCounter & fc,
                    double pivot_tol = default_pivot_tol );

//
// blockwise LR factorization G = L·R. G is consumed: its off-diagonal
// blocks feed the solves and its diagonal blocks are overwritten by Schur
// complements.
//
void lrdecomp ( HMatrix & g, TriangularHMatrix & l, TriangularHMatrix & r,
                FlopCounter & fc, double pivot_tol = default_pivot_tol );

//
// triangular inversion: lt ≈ l^{-1}, rt ≈ r^{-1}
//
void linvert ( const TriangularHMatrix & l, TriangularHMatrix & lt,
               FlopCounter & fc, double pivot_tol = default_pivot_tol );
void rinvert ( const TriangularHMatrix & r, TriangularHMatrix & rt,
               FlopCounter & fc, double pivot_tol = default_pivot_tol );

//
// inversion from precomputed factors: gt ≈ (l·r)^{-1} = rt·lt
//
void lrinvert ( const TriangularHMatrix & l, const TriangularHMatrix & r,
                const TriangularHMatrix & lt, const TriangularHMatrix & rt,
                HMatrix & gt, FlopCounter & fc, double pivot_tol = default_pivot_tol );

//
// overwrite g by an approximation of its inverse without allocating a
// second H-matrix: factorize in place, then interleave the triangular
// inversions with the triangular products
//
void invert_inplace ( HMatrix & g, FlopCounter & fc, double pivot_tol = default_pivot_tol );

}// namespace hmlr
