//
// Project     : hmlr
// File        : triangular.cpp
// Description : triangular solves, LR factorization and inversion
//

#include <hmlr/triangular.hpp>

namespace hmlr {

namespace {

inline const Cluster &
diag_cluster ( const HMatrix & h, const HMatrix::Node & nd )
{
    return h.cluster_tree().cluster( h.block_tree().block( nd.block ).row );
}

inline HMatrix::Node &
child_checked ( HMatrix::Node & nd, int i, int j, const char * who )
{
    auto *  c = nd.child( i, j );

    if ( c == nullptr )
        throw StructureViolation( std::string( who ) + ": missing block" );
    return *c;
}

inline const HMatrix::Node &
child_checked ( const HMatrix::Node & nd, int i, int j, const char * who )
{
    const auto *  c = nd.child( i, j );

    if ( c == nullptr )
        throw StructureViolation( std::string( who ) + ": missing block" );
    return *c;
}

}// namespace

//////////////////////////////////////////////////////////////////////
//
// solves with dense right-hand sides
//
//////////////////////////////////////////////////////////////////////

void
tri_solve_vectors ( Side side, bool transposed,
                    const HMatrix & tri, const HMatrix::Node & diag,
                    Eigen::Ref<Matrix> y, double pivot_tol, FlopCounter & fc )
{
    if ( diag.is_dense() )
    {
        solve_triangular_inplace( side, transposed, *diag.dense, y, pivot_tol, fc );
        return;
    }

    if ( diag.is_lowrank() )
        throw StructureViolation( "tri_solve_vectors: diagonal block is admissible" );

    const auto &  tc = diag_cluster( tri, diag );
    const auto &  t1 = tri.cluster_tree().cluster( tc.sons[0] );
    const auto &  t2 = tri.cluster_tree().cluster( tc.sons[1] );

    auto  y1 = y.middleRows( 0, t1.size() );
    auto  y2 = y.middleRows( t1.size(), t2.size() );

    const auto  v1 = MatrixView::of( Eigen::Ref<const Matrix>( y1 ) );
    const auto  v2 = MatrixView::of( Eigen::Ref<const Matrix>( y2 ) );

    if (( side == Side::lower ) && ! transposed )
    {
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 0, 0, "lsolve" ), y1, pivot_tol, fc );
        addeval( -1.0, tri, child_checked( diag, 1, 0, "lsolve" ), v1, y2, fc );
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 1, 1, "lsolve" ), y2, pivot_tol, fc );
    }
    else if (( side == Side::lower ) && transposed )
    {
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 1, 1, "lsolvetrans" ), y2, pivot_tol, fc );
        addevaltrans( -1.0, tri, child_checked( diag, 1, 0, "lsolvetrans" ), v2, y1, fc );
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 0, 0, "lsolvetrans" ), y1, pivot_tol, fc );
    }
    else if (( side == Side::upper ) && ! transposed )
    {
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 1, 1, "rsolve" ), y2, pivot_tol, fc );
        addeval( -1.0, tri, child_checked( diag, 0, 1, "rsolve" ), v2, y1, fc );
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 0, 0, "rsolve" ), y1, pivot_tol, fc );
    }
    else
    {
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 0, 0, "rsolvetrans" ), y1, pivot_tol, fc );
        addevaltrans( -1.0, tri, child_checked( diag, 0, 1, "rsolvetrans" ), v1, y2, fc );
        tri_solve_vectors( side, transposed, tri, child_checked( diag, 1, 1, "rsolvetrans" ), y2, pivot_tol, fc );
    }
}

void
solve_matrix ( Side factor, bool transposed, int t, const TriangularHMatrix & tri,
               Matrix & y, Matrix & x, FlopCounter & fc, double pivot_tol )
{
    const auto *  diag = tri.h.node( t, t );

    if ( diag == nullptr )
        throw StructureViolation( "solve_matrix: diagonal block not in the tree" );

    tri_solve_vectors( factor, transposed, tri.h, *diag, y, pivot_tol, fc );

    if ( &x != &y )
        x = y;
}

//////////////////////////////////////////////////////////////////////
//
// solves with H-matrix right-hand sides (in place on the region zn)
//
//////////////////////////////////////////////////////////////////////

void
llsolve ( const HMatrix & tri, const HMatrix::Node & diag,
          HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc )
{
    if ( zn.is_lowrank() )
    {
        tri_solve_vectors( Side::lower, false, tri, diag, zn.lowrank->a, pivot_tol, fc );
    }
    else if ( zn.is_dense() )
    {
        tri_solve_vectors( Side::lower, false, tri, diag, *zn.dense, pivot_tol, fc );
    }
    else
    {
        for ( int j = 0; j < 2; ++j )
        {
            auto &  z1 = child_checked( zn, 0, j, "llsolve" );
            auto &  z2 = child_checked( zn, 1, j, "llsolve" );

            llsolve( tri, child_checked( diag, 0, 0, "llsolve" ), z, z1, pivot_tol, fc );
            addmul_nodes( -1.0, tri, child_checked( diag, 1, 0, "llsolve" ), z, z1, z, z2, fc );
            llsolve( tri, child_checked( diag, 1, 1, "llsolve" ), z, z2, pivot_tol, fc );
        }
    }
}

void
rlsolve ( const HMatrix & tri, const HMatrix::Node & diag,
          HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc )
{
    if ( zn.is_lowrank() )
    {
        tri_solve_vectors( Side::upper, false, tri, diag, zn.lowrank->a, pivot_tol, fc );
    }
    else if ( zn.is_dense() )
    {
        tri_solve_vectors( Side::upper, false, tri, diag, *zn.dense, pivot_tol, fc );
    }
    else
    {
        for ( int j = 0; j < 2; ++j )
        {
            auto &  z1 = child_checked( zn, 0, j, "rlsolve" );
            auto &  z2 = child_checked( zn, 1, j, "rlsolve" );

            rlsolve( tri, child_checked( diag, 1, 1, "rlsolve" ), z, z2, pivot_tol, fc );
            addmul_nodes( -1.0, tri, child_checked( diag, 0, 1, "rlsolve" ), z, z2, z, z1, fc );
            rlsolve( tri, child_checked( diag, 0, 0, "rlsolve" ), z, z1, pivot_tol, fc );
        }
    }
}

void
lrsolve ( const HMatrix & tri, const HMatrix::Node & diag,
          HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc )
{
    if ( zn.is_lowrank() )
    {
        tri_solve_vectors( Side::lower, true, tri, diag, zn.lowrank->b, pivot_tol, fc );
    }
    else if ( zn.is_dense() )
    {
        Matrix  tmp = zn.dense->transpose();

        tri_solve_vectors( Side::lower, true, tri, diag, tmp, pivot_tol, fc );
        *zn.dense = tmp.transpose();
    }
    else
    {
        for ( int i = 0; i < 2; ++i )
        {
            auto &  z1 = child_checked( zn, i, 0, "lrsolve" );
            auto &  z2 = child_checked( zn, i, 1, "lrsolve" );

            lrsolve( tri, child_checked( diag, 1, 1, "lrsolve" ), z, z2, pivot_tol, fc );
            addmul_nodes( -1.0, z, z2, tri, child_checked( diag, 1, 0, "lrsolve" ), z, z1, fc );
            lrsolve( tri, child_checked( diag, 0, 0, "lrsolve" ), z, z1, pivot_tol, fc );
        }
    }
}

void
rrsolve ( const HMatrix & tri, const HMatrix::Node & diag,
          HMatrix & z, HMatrix::Node & zn, double pivot_tol, FlopCounter & fc )
{
    if ( zn.is_lowrank() )
    {
        tri_solve_vectors( Side::upper, true, tri, diag, zn.lowrank->b, pivot_tol, fc );
    }
    else if ( zn.is_dense() )
    {
        Matrix  tmp = zn.dense->transpose();

        tri_solve_vectors( Side::upper, true, tri, diag, tmp, pivot_tol, fc );
        *zn.dense = tmp.transpose();
    }
    else
    {
        for ( int i = 0; i < 2; ++i )
        {
            auto &  z1 = child_checked( zn, i, 0, "rrsolve" );
            auto &  z2 = child_checked( zn, i, 1, "rrsolve" );

            rrsolve( tri, child_checked( diag, 0, 0, "rrsolve" ), z, z1, pivot_tol, fc );
            addmul_nodes( -1.0, z, z1, tri, child_checked( diag, 0, 1, "rrsolve" ), z, z2, fc );
            rrsolve( tri, child_checked( diag, 1, 1, "rrsolve" ), z, z2, pivot_tol, fc );
        }
    }
}

void
hsolve_left ( Side factor, int t, int s, const TriangularHMatrix & tri,
              HMatrix & y, HMatrix & x, FlopCounter & fc, double pivot_tol )
{
    const auto *  diag = tri.h.node( t, t );
    auto *        xn   = x.node( t, s );

    if (( diag == nullptr ) || ( xn == nullptr ))
        throw StructureViolation( "hsolve_left: block not in the tree" );

    if ( &x != &y )
    {
        const auto *  yn = y.node( t, s );

        if ( yn == nullptr )
            throw StructureViolation( "hsolve_left: right-hand side block not in the tree" );
        copy_region( *yn, *xn );
    }

    if ( factor == Side::lower ) llsolve( tri.h, *diag, x, *xn, pivot_tol, fc );
    else                         rlsolve( tri.h, *diag, x, *xn, pivot_tol, fc );
}

void
hsolve_right ( Side factor, int s, int t, const TriangularHMatrix & tri,
               HMatrix & y, HMatrix & x, FlopCounter & fc, double pivot_tol )
{
    const auto *  diag = tri.h.node( t, t );
    auto *        xn   = x.node( s, t );

    if (( diag == nullptr ) || ( xn == nullptr ))
        throw StructureViolation( "hsolve_right: block not in the tree" );

    if ( &x != &y )
    {
        const auto *  yn = y.node( s, t );

        if ( yn == nullptr )
            throw StructureViolation( "hsolve_right: right-hand side block not in the tree" );
        copy_region( *yn, *xn );
    }

    if ( factor == Side::lower ) lrsolve( tri.h, *diag, x, *xn, pivot_tol, fc );
    else                         rrsolve( tri.h, *diag, x, *xn, pivot_tol, fc );
}

//////////////////////////////////////////////////////////////////////
//
// LR factorization
//
//////////////////////////////////////////////////////////////////////

namespace {

void
lrdecomp_rec ( HMatrix & g, HMatrix::Node & gn,
               HMatrix & l, HMatrix::Node & ln,
               HMatrix & r, HMatrix::Node & rn,
               double pivot_tol, FlopCounter & fc )
{
    if ( gn.is_dense() )
    {
        Matrix  w = *gn.dense;

        dense_lr_inplace( w, pivot_tol, fc );

        const Index  n = w.rows();

        ln.dense = Matrix::Zero( n, n );
        rn.dense = Matrix::Zero( n, n );

        for ( Index i = 0; i < n; ++i )
        {
            ( *ln.dense )( i, i ) = 1.0;
            for ( Index j = 0; j < i; ++j ) ( *ln.dense )( i, j ) = w( i, j );
            for ( Index j = i; j < n; ++j ) ( *rn.dense )( i, j ) = w( i, j );
        }
        return;
    }

    if ( gn.is_lowrank() )
        throw StructureViolation( "lrdecomp: diagonal block is admissible" );

    auto &  g11 = child_checked( gn, 0, 0, "lrdecomp" );
    auto &  g12 = child_checked( gn, 0, 1, "lrdecomp" );
    auto &  g21 = child_checked( gn, 1, 0, "lrdecomp" );
    auto &  g22 = child_checked( gn, 1, 1, "lrdecomp" );
    auto &  l11 = child_checked( ln, 0, 0, "lrdecomp" );
    auto &  l21 = child_checked( ln, 1, 0, "lrdecomp" );
    auto &  l22 = child_checked( ln, 1, 1, "lrdecomp" );
    auto &  r11 = child_checked( rn, 0, 0, "lrdecomp" );
    auto &  r12 = child_checked( rn, 0, 1, "lrdecomp" );
    auto &  r22 = child_checked( rn, 1, 1, "lrdecomp" );

    lrdecomp_rec( g, g11, l, l11, r, r11, pivot_tol, fc );

    // L11·R12 = G12 and L21·R11 = G21
    copy_region( g12, r12 );
    llsolve( l, l11, r, r12, pivot_tol, fc );

    copy_region( g21, l21 );
    rrsolve( r, r11, l, l21, pivot_tol, fc );

    // Schur complement G22 <- G22 - L21·R12
    addmul_nodes( -1.0, l, l21, r, r12, g, g22, fc );

    lrdecomp_rec( g, g22, l, l22, r, r22, pivot_tol, fc );
}

}// namespace

void
lrdecomp ( HMatrix & g, TriangularHMatrix & l, TriangularHMatrix & r,
           FlopCounter & fc, double pivot_tol )
{
    if (( l.side != Side::lower ) || ( r.side != Side::upper ))
        throw InvalidArgument( "lrdecomp: factor sides are fixed to lower/upper" );

    lrdecomp_rec( g, g.root(), l.h, l.h.root(), r.h, r.h.root(), pivot_tol, fc );
}

//////////////////////////////////////////////////////////////////////
//
// triangular inversion
//
//////////////////////////////////////////////////////////////////////

namespace {

void
linvert_rec ( const HMatrix & l, const HMatrix::Node & ln,
              HMatrix & lt, HMatrix::Node & ltn,
              double pivot_tol, FlopCounter & fc )
{
    if ( ln.is_dense() )
    {
        ltn.dense = dense_invert_triangular( Side::lower, *ln.dense, pivot_tol, fc );
        return;
    }

    const auto &  l11  = child_checked( ln, 0, 0, "linvert" );
    const auto &  l21  = child_checked( ln, 1, 0, "linvert" );
    const auto &  l22  = child_checked( ln, 1, 1, "linvert" );
    auto &        lt11 = child_checked( ltn, 0, 0, "linvert" );
    auto &        lt21 = child_checked( ltn, 1, 0, "linvert" );
    auto &        lt22 = child_checked( ltn, 1, 1, "linvert" );

    // Lt21 = -L22^{-1}·L21·L11^{-1}
    copy_region( l21, lt21 );
    negate_region( lt21 );
    llsolve( l, l22, lt, lt21, pivot_tol, fc );
    lrsolve( l, l11, lt, lt21, pivot_tol, fc );

    linvert_rec( l, l11, lt, lt11, pivot_tol, fc );
    linvert_rec( l, l22, lt, lt22, pivot_tol, fc );
}

void
rinvert_rec ( const HMatrix & r, const HMatrix::Node & rn,
              HMatrix & rt, HMatrix::Node & rtn,
              double pivot_tol, FlopCounter & fc )
{
    if ( rn.is_dense() )
    {
        rtn.dense = dense_invert_triangular( Side::upper, *rn.dense, pivot_tol, fc );
        return;
    }

    const auto &  r11  = child_checked( rn, 0, 0, "rinvert" );
    const auto &  r12  = child_checked( rn, 0, 1, "rinvert" );
    const auto &  r22  = child_checked( rn, 1, 1, "rinvert" );
    auto &        rt11 = child_checked( rtn, 0, 0, "rinvert" );
    auto &        rt12 = child_checked( rtn, 0, 1, "rinvert" );
    auto &        rt22 = child_checked( rtn, 1, 1, "rinvert" );

    // Rt12 = -R11^{-1}·R12·R22^{-1}
    copy_region( r12, rt12 );
    negate_region( rt12 );
    rlsolve( r, r11, rt, rt12, pivot_tol, fc );
    rrsolve( r, r22, rt, rt12, pivot_tol, fc );

    rinvert_rec( r, r11, rt, rt11, pivot_tol, fc );
    rinvert_rec( r, r22, rt, rt22, pivot_tol, fc );
}

}// namespace

void
linvert ( const TriangularHMatrix & l, TriangularHMatrix & lt,
          FlopCounter & fc, double pivot_tol )
{
    linvert_rec( l.h, l.h.root(), lt.h, lt.h.root(), pivot_tol, fc );
}

void
rinvert ( const TriangularHMatrix & r, TriangularHMatrix & rt,
          FlopCounter & fc, double pivot_tol )
{
    rinvert_rec( r.h, r.h.root(), rt.h, rt.h.root(), pivot_tol, fc );
}

//////////////////////////////////////////////////////////////////////
//
// inversion using the factorization
//
//////////////////////////////////////////////////////////////////////

namespace {

void
lrinvert_rec ( const HMatrix & l, const HMatrix::Node & ln,
               const HMatrix & r, const HMatrix::Node & rn,
               const HMatrix & lt, const HMatrix::Node & ltn,
               const HMatrix & rt, const HMatrix::Node & rtn,
               HMatrix & gt, HMatrix::Node & gtn,
               double pivot_tol, FlopCounter & fc )
{
    if ( gtn.is_dense() )
    {
        // product of the precomputed leaf inverses
        gtn.dense = dense_rl_product( *rtn.dense, *ltn.dense, fc );
        return;
    }

    if ( gtn.is_lowrank() )
        throw StructureViolation( "lrinvert: diagonal block is admissible" );

    const auto &  l11  = child_checked( ln, 0, 0, "lrinvert" );
    const auto &  l22  = child_checked( ln, 1, 1, "lrinvert" );
    const auto &  r11  = child_checked( rn, 0, 0, "lrinvert" );
    const auto &  r22  = child_checked( rn, 1, 1, "lrinvert" );
    const auto &  lt21 = child_checked( ltn, 1, 0, "lrinvert" );
    const auto &  rt12 = child_checked( rtn, 0, 1, "lrinvert" );
    auto &        gt11 = child_checked( gtn, 0, 0, "lrinvert" );
    auto &        gt12 = child_checked( gtn, 0, 1, "lrinvert" );
    auto &        gt21 = child_checked( gtn, 1, 0, "lrinvert" );
    auto &        gt22 = child_checked( gtn, 1, 1, "lrinvert" );

    lrinvert_rec( l, l11, r, r11, lt, child_checked( ltn, 0, 0, "lrinvert" ),
                  rt, child_checked( rtn, 0, 0, "lrinvert" ), gt, gt11, pivot_tol, fc );

    // Gt11 += Rt12·Lt21
    addmul_nodes( 1.0, rt, rt12, lt, lt21, gt, gt11, fc );

    // Gt12 = Rt12·L22^{-1}
    copy_region( rt12, gt12 );
    lrsolve( l, l22, gt, gt12, pivot_tol, fc );

    // Gt21 = R22^{-1}·Lt21
    copy_region( lt21, gt21 );
    rlsolve( r, r22, gt, gt21, pivot_tol, fc );

    lrinvert_rec( l, l22, r, r22, lt, child_checked( ltn, 1, 1, "lrinvert" ),
                  rt, child_checked( rtn, 1, 1, "lrinvert" ), gt, gt22, pivot_tol, fc );
}

}// namespace

void
lrinvert ( const TriangularHMatrix & l, const TriangularHMatrix & r,
           const TriangularHMatrix & lt, const TriangularHMatrix & rt,
           HMatrix & gt, FlopCounter & fc, double pivot_tol )
{
    lrinvert_rec( l.h, l.h.root(), r.h, r.h.root(),
                  lt.h, lt.h.root(), rt.h, rt.h.root(),
                  gt, gt.root(), pivot_tol, fc );
}

//////////////////////////////////////////////////////////////////////
//
// in-place inversion
//
//////////////////////////////////////////////////////////////////////

namespace {

// factorize in place: diagonal dense leaves end up holding the compact LR
// factorization, off-diagonal blocks the triangular factors
void
lrdecomp_inplace_rec ( HMatrix & g, HMatrix::Node & gn, double pivot_tol, FlopCounter & fc )
{
    if ( gn.is_dense() )
    {
        dense_lr_inplace( *gn.dense, pivot_tol, fc );
        return;
    }

    if ( gn.is_lowrank() )
        throw StructureViolation( "invert_inplace: diagonal block is admissible" );

    auto &  g11 = child_checked( gn, 0, 0, "invert_inplace" );
    auto &  g12 = child_checked( gn, 0, 1, "invert_inplace" );
    auto &  g21 = child_checked( gn, 1, 0, "invert_inplace" );
    auto &  g22 = child_checked( gn, 1, 1, "invert_inplace" );

    lrdecomp_inplace_rec( g, g11, pivot_tol, fc );

    // G12 <- R12 with L11·R12 = G12, G21 <- L21 with L21·R11 = G21
    llsolve( g, g11, g, g12, pivot_tol, fc );
    rrsolve( g, g11, g, g21, pivot_tol, fc );

    addmul_nodes( -1.0, g, g21, g, g12, g, g22, fc );

    lrdecomp_inplace_rec( g, g22, pivot_tol, fc );
}

// invert the factored matrix in place
void
invert_factored_rec ( HMatrix & g, HMatrix::Node & gn, double pivot_tol, FlopCounter & fc )
{
    if ( gn.is_dense() )
    {
        const Matrix  lt = dense_invert_triangular( Side::lower, *gn.dense, pivot_tol, fc );
        const Matrix  rt = dense_invert_triangular( Side::upper, *gn.dense, pivot_tol, fc );

        *gn.dense = dense_rl_product( rt, lt, fc );
        return;
    }

    auto &  g11 = child_checked( gn, 0, 0, "invert_inplace" );
    auto &  g12 = child_checked( gn, 0, 1, "invert_inplace" );
    auto &  g21 = child_checked( gn, 1, 0, "invert_inplace" );
    auto &  g22 = child_checked( gn, 1, 1, "invert_inplace" );

    // G21 <- Lt21 = -L22^{-1}·L21·L11^{-1}
    negate_region( g21 );
    llsolve( g, g22, g, g21, pivot_tol, fc );
    lrsolve( g, g11, g, g21, pivot_tol, fc );

    // G12 <- Rt12 = -R11^{-1}·R12·R22^{-1}
    negate_region( g12 );
    rlsolve( g, g11, g, g12, pivot_tol, fc );
    rrsolve( g, g22, g, g12, pivot_tol, fc );

    // G11 <- (G0)_11 factor inverse, then add Rt12·Lt21
    invert_factored_rec( g, g11, pivot_tol, fc );
    addmul_nodes( 1.0, g, g12, g, g21, g, g11, fc );

    // off-diagonal blocks become the inverse blocks
    rlsolve( g, g22, g, g21, pivot_tol, fc );   // R22^{-1}·Lt21
    lrsolve( g, g22, g, g12, pivot_tol, fc );   // Rt12·L22^{-1}

    invert_factored_rec( g, g22, pivot_tol, fc );
}

}// namespace

void
invert_inplace ( HMatrix & g, FlopCounter & fc, double pivot_tol )
{
    lrdecomp_inplace_rec( g, g.root(), pivot_tol, fc );
    invert_factored_rec( g, g.root(), pivot_tol, fc );
}

}// namespace hmlr
