//
// Project     : hmlr
// File        : test_hmatrix.cpp
// Description : unit tests for H-matrix storage and base arithmetic
//

#include <doctest.h>

#include <hmlr/generators.hpp>
#include <hmlr/hmatrix.hpp>
#include <hmlr/work_model.hpp>

using namespace hmlr;

namespace {

struct Setup
{
    ClusterTree  ct;
    BlockTree    bt;

    Setup ( Index n, Index rho, Admissibility adm = Admissibility::weak() )
        : ct( build_cluster_tree( n, rho ) )
        , bt( build_block_tree( ct, adm ) )
    {}
};

// dense matrix of global rank r, deterministic
Matrix
lowrank_matrix ( Index n, Index r, std::uint64_t seed )
{
    const Matrix  a = random_uniform( n, r, seed );
    const Matrix  b = random_uniform( n, r, seed + 1 );

    return a * b.transpose();
}

void
check_rank_cap ( const HMatrix::Node & nd, Index k )
{
    if ( nd.is_lowrank() )
        CHECK( nd.lowrank->rank() <= k );

    for ( int i = 0; i < 4; ++i )
        if ( nd.son[ i ] )
            check_rank_cap( *nd.son[ i ], k );
}

void
check_same_structure ( const HMatrix::Node & a, const HMatrix::Node & b )
{
    CHECK( a.block == b.block );
    CHECK( a.is_lowrank() == b.is_lowrank() );
    CHECK( a.is_dense() == b.is_dense() );

    for ( int i = 0; i < 4; ++i )
    {
        CHECK( bool( a.son[ i ] ) == bool( b.son[ i ] ) );
        if ( a.son[ i ] )
            check_same_structure( *a.son[ i ], *b.son[ i ] );
    }
}

}// namespace

TEST_CASE( "from_dense zero matrix" )
{
    Setup        s( 16, 2 );
    FlopCounter  fc;
    const auto   h = from_dense( Matrix::Zero( 16, 16 ), s.ct, s.bt, 4, 0.0, fc );

    CHECK( h.max_stored_rank() == 0 );
    CHECK( to_dense( h ).norm() == 0.0 );
}

TEST_CASE( "from_dense identity with weak tree" )
{
    Setup        s( 16, 2 );
    FlopCounter  fc;
    const auto   h = from_dense( Matrix::Identity( 16, 16 ), s.ct, s.bt, 4, 0.0, fc );

    // off-diagonal admissible leaves have rank zero
    CHECK( h.max_stored_rank() == 0 );
    CHECK( ( to_dense( h ) - Matrix::Identity( 16, 16 ) ).norm() == 0.0 );
}

TEST_CASE( "from_dense rejects bad input" )
{
    Setup        s( 8, 2 );
    FlopCounter  fc;

    CHECK_THROWS_AS( from_dense( Matrix::Zero( 4, 4 ), s.ct, s.bt, 2, 0.0, fc ),
                     DimensionMismatch );

    Matrix  bad = Matrix::Zero( 8, 8 );

    bad( 1, 1 ) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS( from_dense( bad, s.ct, s.bt, 2, 0.0, fc ), InvalidArgument );
}

TEST_CASE( "from_dense logkernel compression error" )
{
    ProblemSpec  spec;

    spec.n = 64; spec.rho = 8; spec.generator = Generator::logkernel;

    Setup        s( 64, 8, Admissibility::weak() );
    FlopCounter  fc;
    const auto   m = generate( spec );
    const auto   h = from_dense( m, s.ct, s.bt, 8, 0.0, fc );

    CHECK( ( to_dense( h ) - m ).norm() <= 1e-3 * m.norm() );
}

TEST_CASE( "to_dense on an all-dense tree is a bit-identical copy" )
{
    Setup        s( 12, 12 );
    const auto   m = random_uniform( 12, 12, 4 );
    FlopCounter  fc;
    const auto   h = from_dense( m, s.ct, s.bt, 2, 0.0, fc );

    CHECK( ( to_dense( h ) - m ).norm() == 0.0 );
}

TEST_CASE( "recompression of an H-matrix is idempotent" )
{
    Setup        s( 32, 4 );
    FlopCounter  fc;
    const auto   h1 = from_dense( lowrank_matrix( 32, 3, 9 ), s.ct, s.bt, 8, 0.0, fc );
    const auto   m1 = to_dense( h1 );
    const auto   h2 = from_dense( m1, s.ct, s.bt, 8, 0.0, fc );

    CHECK( ( to_dense( h2 ) - m1 ).norm() <= 1e-12 * m1.norm() );
}

TEST_CASE( "addeval" )
{
    Setup        s( 8, 2 );
    FlopCounter  fc;
    const auto   m = generate( { 8, 2, Admissibility::weak(), 2, 0.0,
                                 Generator::diagdom, 3, 1.0 } );
    const auto   h = from_dense( m, s.ct, s.bt, 2, 0.0, fc );
    const auto   y = random_uniform( 8, 3, 5 );
    const int    g = s.ct.root_id();

    SUBCASE( "alpha = 0 leaves the target unchanged" )
    {
        Matrix  x = random_uniform( 8, 3, 6 );
        Matrix  x0 = x;

        addeval( 0.0, g, g, h, y, x, fc );
        CHECK( ( x - x0 ).norm() == 0.0 );
    }

    SUBCASE( "identity acts as addition" )
    {
        Setup        si( 4, 4 );
        FlopCounter  fci;
        const auto   hi = from_dense( Matrix::Identity( 4, 4 ), si.ct, si.bt, 1, 0.0, fci );
        const auto   yi = random_uniform( 4, 2, 7 );
        Matrix       xi = random_uniform( 4, 2, 8 );
        const Matrix x0 = xi;

        addeval( 1.0, si.ct.root_id(), si.ct.root_id(), hi, yi, xi, fci );
        CHECK( ( xi - ( x0 + yi ) ).norm() <= 1e-14 );
    }

    SUBCASE( "matches the dense oracle" )
    {
        const auto  hd = to_dense( h );

        for ( const double alpha : { 1.0, -1.0, 2.5 } )
        {
            Matrix        x  = random_uniform( 8, 3, 9 );
            const Matrix  x0 = x;

            addeval( alpha, g, g, h, y, x, fc );
            CHECK( ( x - ( x0 + alpha * hd * y ) ).norm()
                   <= 1e-12 * hd.norm() * y.norm() );
        }
    }

    SUBCASE( "dimension checks" )
    {
        Matrix  x = Matrix::Zero( 7, 3 );

        CHECK_THROWS_AS( addeval( 1.0, g, g, h, y, x, fc ), DimensionMismatch );
    }
}

TEST_CASE( "addevaltrans" )
{
    Setup        s( 8, 2 );
    FlopCounter  fc;
    const auto   m = generate( { 8, 2, Admissibility::weak(), 2, 0.0,
                                 Generator::diagdom, 4, 1.0 } );
    const auto   h = from_dense( m, s.ct, s.bt, 2, 0.0, fc );
    const auto   y = random_uniform( 8, 2, 5 );
    const int    g = s.ct.root_id();

    SUBCASE( "alpha = 0" )
    {
        Matrix  x = random_uniform( 8, 2, 6 );
        Matrix  x0 = x;

        addevaltrans( 0.0, g, g, h, y, x, fc );
        CHECK( ( x - x0 ).norm() == 0.0 );
    }

    SUBCASE( "symmetric dense leaf agrees with addeval" )
    {
        Setup         ss( 4, 4 );
        Matrix        sym = random_uniform( 4, 4, 11 );

        sym = ( sym + sym.transpose() ).eval();

        FlopCounter  fcs;
        const auto   hs = from_dense( sym, ss.ct, ss.bt, 1, 0.0, fcs );
        const auto   ys = random_uniform( 4, 2, 12 );
        Matrix       x1 = Matrix::Zero( 4, 2 );
        Matrix       x2 = Matrix::Zero( 4, 2 );

        addeval( 1.0, ss.ct.root_id(), ss.ct.root_id(), hs, ys, x1, fcs );
        addevaltrans( 1.0, ss.ct.root_id(), ss.ct.root_id(), hs, ys, x2, fcs );
        CHECK( ( x1 - x2 ).norm() <= 1e-13 * x1.norm() );
    }

    SUBCASE( "matches the transposed dense oracle" )
    {
        const auto  hd = to_dense( h );

        for ( const double alpha : { 1.0, -1.0, 0.5 } )
        {
            Matrix        x  = random_uniform( 8, 2, 13 );
            const Matrix  x0 = x;

            addevaltrans( alpha, g, g, h, y, x, fc );
            CHECK( ( x - ( x0 + alpha * hd.transpose() * y ) ).norm()
                   <= 1e-12 * hd.norm() * y.norm() );
        }
    }
}

TEST_CASE( "update" )
{
    Setup        s( 32, 4 );
    FlopCounter  fc;
    const auto   m = generate( { 32, 4, Admissibility::weak(), 8, 0.0,
                                 Generator::diagdom, 5, 1.0 } );
    const int    g = s.ct.root_id();

    SUBCASE( "zero update leaves the matrix unchanged" )
    {
        auto          h  = from_dense( m, s.ct, s.bt, 8, 0.0, fc );
        const Matrix  h0 = to_dense( h );
        const Matrix  a  = Matrix::Zero( 32, 2 );
        const Matrix  b  = Matrix::Zero( 32, 2 );

        update( g, g, a, b, h, fc );
        CHECK( ( to_dense( h ) - h0 ).norm() <= 1e-12 * h0.norm() );
    }

    SUBCASE( "rank-1 update below the cap is exact" )
    {
        auto          h  = from_dense( lowrank_matrix( 32, 2, 21 ), s.ct, s.bt, 8, 0.0, fc );
        const Matrix  h0 = to_dense( h );
        const Matrix  a  = random_uniform( 32, 1, 22 );
        const Matrix  b  = random_uniform( 32, 1, 23 );

        update( g, g, a, b, h, fc );
        CHECK( ( to_dense( h ) - ( h0 + a * b.transpose() ) ).norm()
               <= 1e-12 * ( h0.norm() + a.norm() * b.norm() ) );
    }

    SUBCASE( "rank-3 update matches the dense oracle" )
    {
        auto          h  = from_dense( m, s.ct, s.bt, 8, 0.0, fc );
        const Matrix  h0 = to_dense( h );
        const Matrix  a  = random_uniform( 32, 3, 24 );
        const Matrix  b  = random_uniform( 32, 3, 25 );

        update( g, g, a, b, h, fc );

        // the oracle re-compresses the dense sum per block with the same
        // rank bound; here all diagonal blocks are dense and admissible
        // blocks of the sum keep rank <= k, so the update is exact
        FlopCounter  fo;
        const auto   ref = from_dense( Matrix( h0 + a * b.transpose() ), s.ct, s.bt, 8, 0.0, fo );

        CHECK( ( to_dense( h ) - to_dense( ref ) ).norm()
               <= 1e-10 * to_dense( ref ).norm() );
    }

    SUBCASE( "rank cap holds after updates" )
    {
        auto  h = from_dense( m, s.ct, s.bt, 4, 0.0, fc );

        for ( int round = 0; round < 3; ++round )
        {
            const Matrix  a = random_uniform( 32, 3, 30 + round );
            const Matrix  b = random_uniform( 32, 3, 40 + round );

            update( g, g, a, b, h, fc );
        }

        check_rank_cap( h.root(), 4 );
    }
}

TEST_CASE( "merge" )
{
    Setup        s( 16, 4 );
    const auto & ct = s.ct;
    const int    t  = ct.root().sons[0];
    const int    r  = ct.root().sons[1];
    const auto & tc = ct.cluster( t );
    const auto & rc = ct.cluster( r );
    FlopCounter  fc;

    const auto  sub_rows = [&] ( int c, int which ) {
        return ct.cluster( ct.cluster( c ).sons[ which ] ).size();
    };

    SUBCASE( "zero grid merges to rank zero" )
    {
        LowRankGrid  grid;

        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
                grid( i, j ) = LowRank::zero( sub_rows( t, i ), sub_rows( r, j ) );

        const auto  res = merge( ct, t, r, grid, 4, 0.0, fc );

        CHECK( res.rank() == 0 );
    }

    SUBCASE( "grid of joint rank one merges exactly" )
    {
        // all four blocks are restrictions of one rank-one matrix
        const Matrix  a = random_uniform( tc.size(), 1, 51 );
        const Matrix  b = random_uniform( rc.size(), 1, 52 );

        LowRankGrid  grid;
        Index        ro = 0;

        for ( int i = 0; i < 2; ++i )
        {
            Index  co = 0;

            for ( int j = 0; j < 2; ++j )
            {
                grid( i, j ) = LowRank{ a.middleRows( ro, sub_rows( t, i ) ),
                                        b.middleRows( co, sub_rows( r, j ) ) };
                co += sub_rows( r, j );
            }
            ro += sub_rows( t, i );
        }

        const auto  res = merge( ct, t, r, grid, 4, default_trunc_tol, fc );

        CHECK( res.rank() == 1 );
        CHECK( ( res.a * res.b.transpose() - a * b.transpose() ).norm()
               <= 1e-12 * ( a.norm() * b.norm() ) );
    }

    SUBCASE( "random grid with joint rank below the cap merges exactly" )
    {
        const Index  k = 8;
        LowRankGrid  grid;
        Matrix       ref = Matrix::Zero( tc.size(), rc.size() );
        Index        ro  = 0;

        for ( int i = 0; i < 2; ++i )
        {
            Index  co = 0;

            for ( int j = 0; j < 2; ++j )
            {
                const Matrix  a = random_uniform( sub_rows( t, i ), 2, 60 + 2*i + j );
                const Matrix  b = random_uniform( sub_rows( r, j ), 2, 70 + 2*i + j );

                grid( i, j ) = LowRank{ a, b };
                ref.block( ro, co, sub_rows( t, i ), sub_rows( r, j ) ) = a * b.transpose();
                co += sub_rows( r, j );
            }
            ro += sub_rows( t, i );
        }

        const auto  res = merge( ct, t, r, grid, k, 0.0, fc );

        CHECK( res.rank() <= k );
        CHECK( ( res.a * res.b.transpose() - ref ).norm() <= 1e-10 * ref.norm() );
    }

    SUBCASE( "merge at a leaf position is a structure violation" )
    {
        const auto   ct1 = build_cluster_tree( 4, 4 );
        LowRankGrid  grid;

        CHECK_THROWS_AS( merge( ct1, ct1.root_id(), ct1.root_id(), grid, 2, 0.0, fc ),
                         StructureViolation );
    }

    SUBCASE( "merge cost stays below the model term" )
    {
        const Index    k = 4;
        WorkConstants  wc;
        LowRankGrid    grid;

        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
                grid( i, j ) = LowRank{ random_uniform( sub_rows( t, i ), k, 80 + 2*i + j ),
                                        random_uniform( sub_rows( r, j ), k, 90 + 2*i + j ) };

        FlopCounter  fm;

        merge( ct, t, r, grid, k, 0.0, fm );

        const wide  bound = wide( wc.c_mg() ) * k * k * ( tc.size() + rc.size() );

        CHECK( wide( fm.total() ) <= bound );
    }
}

TEST_CASE( "addmul" )
{
    const Index  n = 32;
    Setup        s( n, 4 );
    const int    g = s.ct.root_id();
    FlopCounter  fc;

    SUBCASE( "zero right factor leaves the target unchanged" )
    {
        const auto    x  = from_dense( generate( { n, 4, Admissibility::weak(), 4, 0.0,
                                                   Generator::diagdom, 6, 1.0 } ),
                                       s.ct, s.bt, 4, 0.0, fc );
        const auto    y  = from_dense( Matrix::Zero( n, n ), s.ct, s.bt, 4, 0.0, fc );
        auto          z  = from_dense( lowrank_matrix( n, 2, 31 ), s.ct, s.bt, 4, 0.0, fc );
        const Matrix  z0 = to_dense( z );

        addmul( 1.0, g, g, g, x, y, z, fc );
        CHECK( ( to_dense( z ) - z0 ).norm() <= 1e-12 * z0.norm() );
    }

    SUBCASE( "identity left factor adds the right factor" )
    {
        const auto    x  = from_dense( Matrix::Identity( n, n ), s.ct, s.bt, 4, 0.0, fc );
        const auto    y  = from_dense( lowrank_matrix( n, 2, 33 ), s.ct, s.bt, 4, 0.0, fc );
        auto          z  = from_dense( lowrank_matrix( n, 2, 35 ), s.ct, s.bt, 4, 0.0, fc );
        const Matrix  z0 = to_dense( z );
        const Matrix  yd = to_dense( y );

        addmul( 1.0, g, g, g, x, y, z, fc );
        CHECK( ( to_dense( z ) - ( z0 + yd ) ).norm() <= 1e-10 * ( z0.norm() + yd.norm() ) );
    }

    SUBCASE( "truncation-free multiplication matches the dense oracle" )
    {
        // global rank-1 factors keep every intermediate rank far below k
        const auto    x  = from_dense( lowrank_matrix( n, 1, 41 ), s.ct, s.bt, 8, 0.0, fc );
        const auto    y  = from_dense( lowrank_matrix( n, 1, 43 ), s.ct, s.bt, 8, 0.0, fc );
        auto          z  = from_dense( lowrank_matrix( n, 1, 45 ), s.ct, s.bt, 8, 0.0, fc );
        const Matrix  xd = to_dense( x );
        const Matrix  yd = to_dense( y );
        const Matrix  z0 = to_dense( z );

        for ( const double alpha : { 1.0, -2.0 } )
        {
            const Matrix  before = to_dense( z );

            addmul( alpha, g, g, g, x, y, z, fc );
            CHECK( ( to_dense( z ) - ( before + alpha * xd * yd ) ).norm()
                   <= 1e-10 * ( before.norm() + xd.norm() * yd.norm() ) );
        }

        check_rank_cap( z.root(), 8 );
    }

    SUBCASE( "eps-driven truncation error is proportional to eps" )
    {
        // rank caps never bind (k = leaf size bound), so every dropped
        // singular value is below eps relative to its block
        const double  eps = 1e-8;
        const auto    m1  = generate( { n, 4, Admissibility::weak(), 4, 0.0,
                                        Generator::logkernel, 0, 1.0 } );
        const auto    m2  = generate( { n, 4, Admissibility::weak(), 4, 0.0,
                                        Generator::diagdom, 7, 1.0 } );
        const auto    x   = from_dense( m1, s.ct, s.bt, n, eps, fc );
        const auto    y   = from_dense( m2, s.ct, s.bt, n, eps, fc );
        auto          z   = from_dense( Matrix::Zero( n, n ), s.ct, s.bt, n, eps, fc );
        const Matrix  xd  = to_dense( x );
        const Matrix  yd  = to_dense( y );

        addmul( 1.0, g, g, g, x, y, z, fc );
        CHECK( ( to_dense( z ) - xd * yd ).norm() <= 50.0 * eps * xd.norm() * yd.norm() );
    }

    SUBCASE( "structure is preserved" )
    {
        const auto  x = from_dense( lowrank_matrix( n, 2, 51 ), s.ct, s.bt, 4, 0.0, fc );
        auto        z = from_dense( lowrank_matrix( n, 2, 53 ), s.ct, s.bt, 4, 0.0, fc );
        const auto  ref = HMatrix( z );

        addmul( -1.0, g, g, g, x, x, z, fc );
        check_same_structure( z.root(), ref.root() );
        check_rank_cap( z.root(), 4 );
    }

    SUBCASE( "missing blocks are rejected" )
    {
        const auto  x = from_dense( Matrix::Identity( n, n ), s.ct, s.bt, 4, 0.0, fc );
        auto        z = from_dense( Matrix::Identity( n, n ), s.ct, s.bt, 4, 0.0, fc );

        // (3, 5) is not a block of the tree
        CHECK_THROWS_AS( addmul( 1.0, 3, 5, g, x, x, z, fc ), StructureViolation );
    }
}

TEST_CASE( "per-call cost domination on randomized instances" )
{
    const Index    n = 64;
    const Index    k = 4;
    WorkConstants  wc;

    for ( const auto & adm : { Admissibility::weak(), Admissibility::eta_condition( 1.0 ) } )
    {
        Setup        s( n, 4, adm );
        FlopCounter  fc0;
        const auto   m = generate( { n, 4, adm, k, 0.0, Generator::logkernel, 0, 1.0 } );
        const auto   h = from_dense( m, s.ct, s.bt, k, 0.0, fc0 );
        WorkModel    wm( s.bt, k, wc );

        // addeval / addevaltrans on every block of the tree
        for ( int id = 0; id < s.bt.n_blocks(); ++id )
        {
            const auto &  b  = s.bt.block( id );
            const Index   nt = s.ct.cluster( b.row ).size();
            const Index   ns = s.ct.cluster( b.col ).size();
            const Index   ell = 3;
            const auto    y  = random_uniform( ns, ell, 100 + id );
            Matrix        x  = Matrix::Zero( nt, ell );
            FlopCounter   fc;

            addeval( 1.5, b.row, b.col, h, y, x, fc );
            CHECK( wide( fc.total() ) <= wm.w_ev( b.row, b.col, ell ) );

            const auto   yt = random_uniform( nt, ell, 200 + id );
            Matrix       xt = Matrix::Zero( ns, ell );
            FlopCounter  fct;

            addevaltrans( 1.5, b.row, b.col, h, yt, xt, fct );
            CHECK( wide( fct.total() ) <= wm.w_ev( b.row, b.col, ell ) );
        }

        // update on a sample of blocks
        for ( const int id : { 0, 1, s.bt.n_blocks() / 2, s.bt.n_blocks() - 1 } )
        {
            const auto &  b   = s.bt.block( id );
            const Index   nt  = s.ct.cluster( b.row ).size();
            const Index   ns  = s.ct.cluster( b.col ).size();
            const Index   ell = 2;
            auto          hu  = HMatrix( h );
            auto *        nd  = hu.node( b.row, b.col );
            FlopCounter   fc;

            REQUIRE( nd != nullptr );
            update( hu, *nd, MatrixView::of( random_uniform( nt, ell, 300 + id ) ),
                    MatrixView::of( random_uniform( ns, ell, 400 + id ) ), fc );
            CHECK( wide( fc.total() ) <= wm.w_up( b.row, b.col, ell ) );
        }

        // addmul at the root triple
        {
            auto         z = HMatrix( h );
            FlopCounter  fc;
            const int    g = s.ct.root_id();

            addmul( 1.0, g, g, g, h, h, z, fc );
            CHECK( wide( fc.total() ) <= wm.w_mm( g, g, g ) );
        }
    }
}
