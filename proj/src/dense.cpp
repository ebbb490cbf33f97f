//
// Project     : hmlr
// File        : dense.cpp
// Description : instrumented dense kernels used at tree leaves
//

#include <hmlr/dense.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hmlr {

namespace {

// square roots are tallied as one multiplication
inline double
counted_sqrt ( double x, FlopCounter & fc )
{
    fc.mults += 1;
    return std::sqrt( x );
}

inline void
check_square ( const Matrix & m, const char * who )
{
    if ( m.rows() != m.cols() )
        throw DimensionMismatch( std::string( who ) + ": matrix not square" );
}

}// namespace

//////////////////////////////////////////////////////////////////////
//
// LR factorization
//
//////////////////////////////////////////////////////////////////////

void
dense_lr_inplace ( Matrix & w, double pivot_tol, FlopCounter & fc )
{
    check_square( w, "dense_lr" );

    const Index   n     = w.rows();
    const double  scale = ( n > 0 ? w.cwiseAbs().maxCoeff() : 0.0 );
    const double  ref   = ( scale > 0.0 ? scale : 1.0 );

    for ( Index l = 0; l < n; ++l )
    {
        const double  pivot = w( l, l );

        if ( std::abs( pivot ) < pivot_tol * ref )
            throw PivotBreakdown( "dense_lr: pivot " + std::to_string( l ) + " below tolerance" );

        for ( Index i = l+1; i < n; ++i )
        {
            w( i, l ) /= pivot;
            fc.divs += 1;
        }

        for ( Index i = l+1; i < n; ++i )
        {
            const double  lil = w( i, l );

            for ( Index j = l+1; j < n; ++j )
            {
                w( i, j ) -= lil * w( l, j );
                fc.mults += 1;
                fc.adds  += 1;
            }
        }
    }
}

LRFactors
dense_lr ( const Matrix & m, double pivot_tol, FlopCounter & fc )
{
    Matrix  w = m;

    dense_lr_inplace( w, pivot_tol, fc );

    const Index  n = w.rows();
    LRFactors    f;

    f.l = Matrix::Zero( n, n );
    f.r = Matrix::Zero( n, n );

    for ( Index i = 0; i < n; ++i )
    {
        f.l( i, i ) = 1.0;
        for ( Index j = 0;   j < i; ++j ) f.l( i, j ) = w( i, j );
        for ( Index j = i; j < n; ++j )   f.r( i, j ) = w( i, j );
    }

    return f;
}

//////////////////////////////////////////////////////////////////////
//
// triangular solves
//
//////////////////////////////////////////////////////////////////////

void
solve_triangular_inplace ( Side side, bool transposed, const Matrix & t,
                           Eigen::Ref<Matrix> y, double pivot_tol, FlopCounter & fc )
{
    check_square( t, "dense_solve_triangular" );

    const Index  n   = t.rows();
    const Index  ell = y.cols();

    if ( y.rows() != n )
        throw DimensionMismatch( "dense_solve_triangular: row count mismatch" );

    if ( side == Side::upper )
    {
        for ( Index i = 0; i < n; ++i )
            if ( std::abs( t( i, i ) ) < pivot_tol )
                throw SingularDiagonal( "dense_solve_triangular: diagonal entry below tolerance" );
    }

    for ( Index c = 0; c < ell; ++c )
    {
        if (( side == Side::lower ) && ! transposed )
        {
            // forward substitution, unit diagonal
            for ( Index i = 0; i < n; ++i )
            {
                double  acc = y( i, c );

                for ( Index m = 0; m < i; ++m )
                {
                    acc -= t( i, m ) * y( m, c );
                    fc.mults += 1;
                    fc.adds  += 1;
                }
                y( i, c ) = acc;
            }
        }
        else if (( side == Side::lower ) && transposed )
        {
            // L^* X = Y, backward substitution, unit diagonal
            for ( Index i = n-1; i >= 0; --i )
            {
                double  acc = y( i, c );

                for ( Index m = i+1; m < n; ++m )
                {
                    acc -= t( m, i ) * y( m, c );
                    fc.mults += 1;
                    fc.adds  += 1;
                }
                y( i, c ) = acc;
            }
        }
        else if (( side == Side::upper ) && ! transposed )
        {
            // backward substitution
            for ( Index i = n-1; i >= 0; --i )
            {
                double  acc = y( i, c );

                for ( Index m = i+1; m < n; ++m )
                {
                    acc -= t( i, m ) * y( m, c );
                    fc.mults += 1;
                    fc.adds  += 1;
                }
                y( i, c ) = acc / t( i, i );
                fc.divs += 1;
            }
        }
        else
        {
            // R^* X = Y, forward substitution
            for ( Index i = 0; i < n; ++i )
            {
                double  acc = y( i, c );

                for ( Index m = 0; m < i; ++m )
                {
                    acc -= t( m, i ) * y( m, c );
                    fc.mults += 1;
                    fc.adds  += 1;
                }
                y( i, c ) = acc / t( i, i );
                fc.divs += 1;
            }
        }
    }
}

Matrix
dense_solve_triangular ( Side side, bool transposed, const Matrix & t,
                         const Matrix & y, double pivot_tol, FlopCounter & fc )
{
    Matrix  x = y;

    solve_triangular_inplace( side, transposed, t, x, pivot_tol, fc );
    return x;
}

//////////////////////////////////////////////////////////////////////
//
// triangular inversion
//
//////////////////////////////////////////////////////////////////////

Matrix
dense_invert_triangular ( Side side, const Matrix & t, double pivot_tol, FlopCounter & fc )
{
    check_square( t, "dense_invert_triangular" );

    const Index  n   = t.rows();
    Matrix       inv = Matrix::Zero( n, n );

    if ( side == Side::upper )
    {
        for ( Index i = 0; i < n; ++i )
            if ( std::abs( t( i, i ) ) < pivot_tol )
                throw SingularDiagonal( "dense_invert_triangular: diagonal entry below tolerance" );

        // column-wise backward substitution for R·inv = I
        for ( Index j = 0; j < n; ++j )
        {
            inv( j, j ) = 1.0 / t( j, j );
            fc.divs += 1;

            for ( Index i = j-1; i >= 0; --i )
            {
                double  acc = 0.0;

                for ( Index m = i+1; m <= j; ++m )
                {
                    acc += t( i, m ) * inv( m, j );
                    fc.mults += 1;
                    if ( m > i+1 ) fc.adds += 1;
                }
                inv( i, j ) = -acc / t( i, i );
                fc.divs += 1;
            }
        }
    }
    else
    {
        // unit diagonal: the stored diagonal is never read
        for ( Index j = 0; j < n; ++j )
        {
            inv( j, j ) = 1.0 / 1.0;
            fc.divs += 1;

            for ( Index i = j+1; i < n; ++i )
            {
                double  acc = 0.0;

                for ( Index m = j; m < i; ++m )
                {
                    acc += t( i, m ) * inv( m, j );
                    fc.mults += 1;
                    if ( m > j ) fc.adds += 1;
                }
                inv( i, j ) = -acc / 1.0;
                fc.divs += 1;
            }
        }
    }

    return inv;
}

//////////////////////////////////////////////////////////////////////
//
// product of precomputed triangular inverses
//
//////////////////////////////////////////////////////////////////////

Matrix
dense_rl_product ( const Matrix & r, const Matrix & l, FlopCounter & fc )
{
    check_square( r, "dense_rl_product" );
    check_square( l, "dense_rl_product" );

    if ( r.rows() != l.rows() )
        throw DimensionMismatch( "dense_rl_product: size mismatch" );

    const Index  n = r.rows();
    Matrix       g( n, n );

    // leading partition: G22 = R2·L2 stays a pure subproblem, so row/column
    // l of the product only involve entries with indices >= l
    for ( Index l0 = 0; l0 < n; ++l0 )
    {
        // diagonal entry: r_ll + sum_{m>l} r_lm·l_ml
        double  acc = r( l0, l0 );

        for ( Index m = l0+1; m < n; ++m )
        {
            acc += r( l0, m ) * l( m, l0 );
            fc.mults += 1;
            fc.adds  += 1;
        }

        // column l below the diagonal: sum_{m>=i} r_im·l_ml
        for ( Index i = l0+1; i < n; ++i )
        {
            double  s = 0.0;

            for ( Index m = i; m < n; ++m )
            {
                s += r( i, m ) * l( m, l0 );
                fc.mults += 1;
                if ( m > i ) fc.adds += 1;
            }
            g( i, l0 ) = s;
        }

        // row l right of the diagonal: r_lj + sum_{m>j} r_lm·l_mj
        for ( Index j = l0+1; j < n; ++j )
        {
            double  s = r( l0, j );

            for ( Index m = j+1; m < n; ++m )
            {
                s += r( l0, m ) * l( m, j );
                fc.mults += 1;
                fc.adds  += 1;
            }
            g( l0, j ) = s;
        }

        g( l0, l0 ) = acc;
    }

    return g;
}

//////////////////////////////////////////////////////////////////////
//
// thin Householder QR
//
//////////////////////////////////////////////////////////////////////

ThinQR
thin_qr ( const Matrix & b, FlopCounter & fc )
{
    const Index  n = b.rows();
    const Index  m = b.cols();
    const Index  q = std::min( n, m );

    Matrix  w = b;
    Matrix  vs   = Matrix::Zero( n, q );   // reflector vectors
    Vector  beta = Vector::Zero( q );

    for ( Index j = 0; j < q; ++j )
    {
        // norm of the pivot column below the diagonal
        double  sq = 0.0;

        for ( Index i = j; i < n; ++i )
        {
            sq += w( i, j ) * w( i, j );
            fc.mults += 1;
            if ( i > j ) fc.adds += 1;
        }

        if ( sq == 0.0 )
            continue;   // zero column, identity reflector

        const double  sigma = counted_sqrt( sq, fc );
        const double  x0    = w( j, j );
        const double  alpha = ( x0 >= 0.0 ? -sigma : sigma );  // sign avoiding cancellation

        for ( Index i = j; i < n; ++i )
            vs( i, j ) = w( i, j );
        vs( j, j ) = x0 - alpha;
        fc.adds += 1;

        double  vtv = 0.0;

        for ( Index i = j; i < n; ++i )
        {
            vtv += vs( i, j ) * vs( i, j );
            fc.mults += 1;
            if ( i > j ) fc.adds += 1;
        }

        beta( j ) = 2.0 / vtv;
        fc.mults += 1;
        fc.divs  += 1;

        w( j, j ) = alpha;
        for ( Index i = j+1; i < n; ++i )
            w( i, j ) = 0.0;

        // apply the reflector to the remaining columns
        for ( Index c = j+1; c < m; ++c )
        {
            double  dot = 0.0;

            for ( Index i = j; i < n; ++i )
            {
                dot += vs( i, j ) * w( i, c );
                fc.mults += 1;
                if ( i > j ) fc.adds += 1;
            }

            const double  s = beta( j ) * dot;
            fc.mults += 1;

            for ( Index i = j; i < n; ++i )
            {
                w( i, c ) -= s * vs( i, j );
                fc.mults += 1;
                fc.adds  += 1;
            }
        }
    }

    ThinQR  res;

    res.r = Matrix::Zero( q, m );
    for ( Index i = 0; i < q; ++i )
        for ( Index j = i; j < m; ++j )
            res.r( i, j ) = w( i, j );

    // backward accumulation of the thin Q
    res.q = Matrix::Zero( n, q );
    for ( Index c = 0; c < q; ++c )
        res.q( c, c ) = 1.0;

    for ( Index j = q-1; j >= 0; --j )
    {
        if ( beta( j ) == 0.0 )
            continue;

        for ( Index c = j; c < q; ++c )
        {
            double  dot = 0.0;

            for ( Index i = j; i < n; ++i )
            {
                dot += vs( i, j ) * res.q( i, c );
                fc.mults += 1;
                if ( i > j ) fc.adds += 1;
            }

            const double  s = beta( j ) * dot;
            fc.mults += 1;

            for ( Index i = j; i < n; ++i )
            {
                res.q( i, c ) -= s * vs( i, j );
                fc.mults += 1;
                fc.adds  += 1;
            }
        }
    }

    return res;
}

//////////////////////////////////////////////////////////////////////
//
// one-sided Jacobi SVD
//
//////////////////////////////////////////////////////////////////////

SVDResult
jacobi_svd ( const Matrix & w0, FlopCounter & fc )
{
    const Index  p = w0.rows();
    const Index  q = w0.cols();

    if ( p < q )
        throw DimensionMismatch( "jacobi_svd: expects rows >= cols" );

    Matrix  w = w0;
    Matrix  v = Matrix::Zero( q, q );

    for ( Index i = 0; i < q; ++i )
        v( i, i ) = 1.0;

    constexpr double  tol        = 1e-15;
    constexpr int     max_sweeps = 42;

    for ( int sweep = 0; sweep < max_sweeps; ++sweep )
    {
        bool  rotated = false;

        for ( Index i = 0; i+1 < q; ++i )
        {
            for ( Index j = i+1; j < q; ++j )
            {
                double  a = 0.0, b2 = 0.0, g = 0.0;

                for ( Index r = 0; r < p; ++r )
                {
                    a  += w( r, i ) * w( r, i );
                    b2 += w( r, j ) * w( r, j );
                    g  += w( r, i ) * w( r, j );
                    fc.mults += 3;
                    if ( r > 0 ) fc.adds += 3;
                }

                fc.mults += 1;
                const double  ref = counted_sqrt( a * b2, fc );

                if (( ref == 0.0 ) || ( std::abs( g ) <= tol * ref ))
                    continue;

                // Jacobi rotation annihilating the (i,j) inner product
                const double  zeta = ( b2 - a ) / ( 2.0 * g );
                fc.adds  += 1;
                fc.mults += 1;
                fc.divs  += 1;

                fc.mults += 1;
                fc.adds  += 1;
                const double  root = counted_sqrt( 1.0 + zeta * zeta, fc );
                const double  tau  = ( zeta >= 0.0 ?  1.0 / (  zeta + root )
                                                   : -1.0 / ( -zeta + root ) );
                fc.adds += 1;
                fc.divs += 1;

                fc.mults += 1;
                fc.adds  += 1;
                const double  c = 1.0 / counted_sqrt( 1.0 + tau * tau, fc );
                fc.divs += 1;
                const double  s = c * tau;
                fc.mults += 1;

                for ( Index r = 0; r < p; ++r )
                {
                    const double  wi = w( r, i );
                    const double  wj = w( r, j );

                    w( r, i ) = c * wi - s * wj;
                    w( r, j ) = s * wi + c * wj;
                    fc.mults += 4;
                    fc.adds  += 2;
                }

                for ( Index r = 0; r < q; ++r )
                {
                    const double  vi = v( r, i );
                    const double  vj = v( r, j );

                    v( r, i ) = c * vi - s * vj;
                    v( r, j ) = s * vi + c * vj;
                    fc.mults += 4;
                    fc.adds  += 2;
                }

                rotated = true;
            }
        }

        if ( ! rotated )
            break;
    }

    SVDResult  res;

    res.sigma = Vector::Zero( q );
    res.u     = Matrix::Zero( p, q );

    for ( Index j = 0; j < q; ++j )
    {
        double  sq = 0.0;

        for ( Index r = 0; r < p; ++r )
        {
            sq += w( r, j ) * w( r, j );
            fc.mults += 1;
            if ( r > 0 ) fc.adds += 1;
        }

        const double  s = counted_sqrt( sq, fc );

        res.sigma( j ) = s;

        if ( s > 0.0 )
        {
            for ( Index r = 0; r < p; ++r )
            {
                res.u( r, j ) = w( r, j ) / s;
                fc.divs += 1;
            }
        }
    }

    // sort singular values descending
    std::vector<Index>  perm( q );

    std::iota( perm.begin(), perm.end(), Index(0) );
    std::stable_sort( perm.begin(), perm.end(),
                      [&res] ( Index x, Index y ) { return res.sigma( x ) > res.sigma( y ); } );

    SVDResult  sorted;

    sorted.sigma = Vector::Zero( q );
    sorted.u     = Matrix::Zero( p, q );
    sorted.v     = Matrix::Zero( q, q );

    for ( Index j = 0; j < q; ++j )
    {
        sorted.sigma( j ) = res.sigma( perm[ j ] );
        sorted.u.col( j ) = res.u.col( perm[ j ] );
        sorted.v.col( j ) = v.col( perm[ j ] );
    }

    return sorted;
}

//////////////////////////////////////////////////////////////////////
//
// low-rank truncation
//
//////////////////////////////////////////////////////////////////////

LowRankFactors
truncate_lowrank ( const Matrix & m, Index max_rank, double rel_tol, FlopCounter & fc )
{
    require( max_rank >= 0, "truncate_lowrank: max_rank must be >= 0" );
    require( rel_tol >= 0.0, "truncate_lowrank: rel_tol must be >= 0" );

    const bool    flip = ( m.rows() < m.cols() );
    const Matrix  w    = ( flip ? Matrix( m.transpose() ) : m );

    const auto  qr  = thin_qr( w, fc );                 // w = Q·R, R is small
    const auto  svd = jacobi_svd( Matrix( qr.r.transpose() ), fc );

    // w = Q·R = Q·(V·diag(sigma)·U^*)^* with R^T = U·diag·V^*
    const Index   b      = qr.r.rows();
    const double  sigma1 = ( b > 0 ? svd.sigma( 0 ) : 0.0 );
    Index         kept   = 0;

    while (( kept < std::min( max_rank, b ) ) && ( svd.sigma( kept ) > rel_tol * sigma1 ))
        ++kept;

    // left factor carries the singular values
    Matrix  us = svd.v.leftCols( kept );

    for ( Index j = 0; j < kept; ++j )
        for ( Index i = 0; i < b; ++i )
        {
            us( i, j ) *= svd.sigma( j );
            fc.mults += 1;
        }

    LowRankFactors  res;
    const Matrix    cw = mul_to( qr.q, us, fc );
    const Matrix    dw = svd.u.leftCols( kept );

    if ( flip ) { res.c = dw; res.d = cw; }
    else        { res.c = cw; res.d = dw; }

    return res;
}

//////////////////////////////////////////////////////////////////////
//
// counted product helpers
//
//////////////////////////////////////////////////////////////////////

Matrix
mul_to ( const Matrix & a, const Matrix & b, FlopCounter & fc )
{
    if ( a.cols() != b.rows() )
        throw DimensionMismatch( "mul_to: inner dimension mismatch" );

    const Index  k = a.cols();

    if ( k == 0 )
        return Matrix::Zero( a.rows(), b.cols() );

    fc.mults += a.rows() * b.cols() * k;
    fc.adds  += a.rows() * b.cols() * ( k - 1 );

    Matrix  c( a.rows(), b.cols() );

    c.noalias() = a * b;
    return c;
}

void
mul_add ( Eigen::Ref<Matrix> c, const Eigen::Ref<const Matrix> & a,
          const Eigen::Ref<const Matrix> & b, FlopCounter & fc )
{
    if (( a.cols() != b.rows() ) || ( c.rows() != a.rows() ) || ( c.cols() != b.cols() ))
        throw DimensionMismatch( "mul_add: dimension mismatch" );

    fc.mults += a.rows() * b.cols() * a.cols();
    fc.adds  += a.rows() * b.cols() * a.cols();

    c.noalias() += a * b;
}

void
mul_sub ( Eigen::Ref<Matrix> c, const Eigen::Ref<const Matrix> & a,
          const Eigen::Ref<const Matrix> & b, FlopCounter & fc )
{
    if (( a.cols() != b.rows() ) || ( c.rows() != a.rows() ) || ( c.cols() != b.cols() ))
        throw DimensionMismatch( "mul_sub: dimension mismatch" );

    fc.mults += a.rows() * b.cols() * a.cols();
    fc.adds  += a.rows() * b.cols() * a.cols();

    c.noalias() -= a * b;
}

}// namespace hmlr
