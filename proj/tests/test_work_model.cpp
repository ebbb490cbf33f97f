//
// Project     : hmlr
// File        : test_work_model.cpp
// Description : unit tests for the work recurrences and bound checks
//

#include <doctest.h>

#include <hmlr/work_model.hpp>

using namespace hmlr;

namespace {

//
// independent, memo-free recursive evaluation of the recurrences
//
struct Oracle
{
    const BlockTree &    bt;
    const ClusterTree &  ct;
    Index                k;
    WorkConstants        consts;

    Oracle ( const BlockTree & bt_, Index k_, WorkConstants c )
        : bt( bt_ ), ct( bt_.cluster_tree() ), k( k_ ), consts( c )
    {}

    wide
    ev ( int t, int s, Index ell ) const
    {
        const auto &  b  = bt.block( bt.find( t, s ) );
        const wide    nt = ct.cluster( t ).size();
        const wide    ns = ct.cluster( s ).size();

        if ( b.kind == BlockKind::admissible_leaf )
            return 2 * wide( ell ) * wide( k ) * ( nt + ns );
        if ( b.kind == BlockKind::inadmissible_leaf )
            return wide( ell ) * ( 2 * nt * ns + std::min( nt, ns ) );

        wide  w = 0;

        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
                w += ev( ct.cluster( t ).sons[ i ], ct.cluster( s ).sons[ j ], ell );
        return w;
    }

    wide
    up ( int t, int s, Index ell ) const
    {
        const wide  nt = ct.cluster( t ).size();
        const wide  ns = ct.cluster( s ).size();
        const int   id = bt.find( t, s );

        if ( id < 0 )
            return wide( consts.c_ad ) * wide( k + ell ) * wide( k + ell ) * ( nt + ns );

        const auto &  b = bt.block( id );

        if ( b.kind == BlockKind::admissible_leaf )
            return wide( consts.c_ad ) * wide( k + ell ) * wide( k + ell ) * ( nt + ns );
        if ( b.kind == BlockKind::inadmissible_leaf )
            return 2 * wide( ell ) * nt * ns;

        wide  w = 0;

        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
                w += up( ct.cluster( t ).sons[ i ], ct.cluster( s ).sons[ j ], ell );
        return w;
    }

    Index
    local_rank ( const Block & b ) const
    {
        if ( b.kind == BlockKind::admissible_leaf )
            return k;
        return std::min( ct.cluster( b.row ).size(), ct.cluster( b.col ).size() );
    }

    wide
    mm ( int t, int s, int r ) const
    {
        const auto &  ts = bt.block( bt.find( t, s ) );
        const auto &  sr = bt.block( bt.find( s, r ) );

        if ( ts.is_leaf() )
            return ev( s, r, local_rank( ts ) ) + up( t, r, local_rank( ts ) );
        if ( sr.is_leaf() )
            return ev( t, s, local_rank( sr ) ) + up( t, r, local_rank( sr ) );

        wide  w = wide( consts.c_mg() ) * wide( k ) * wide( k )
                  * ( wide( ct.cluster( t ).size() ) + wide( ct.cluster( r ).size() ) );

        for ( int i = 0; i < 2; ++i )
            for ( int l = 0; l < 2; ++l )
                for ( int j = 0; j < 2; ++j )
                    w += mm( ct.cluster( t ).sons[ i ], ct.cluster( s ).sons[ l ],
                             ct.cluster( r ).sons[ j ] );
        return w;
    }

    wide
    ls ( int t, Index ell ) const
    {
        const auto &  c = ct.cluster( t );

        if ( c.is_leaf() )
            return wide( ell ) * wide( c.size() ) * wide( c.size() );
        return ls( c.sons[0], ell ) + ls( c.sons[1], ell ) + ev( c.sons[1], c.sons[0], ell );
    }

    wide
    rs ( int t, Index ell ) const
    {
        const auto &  c = ct.cluster( t );

        if ( c.is_leaf() )
            return wide( ell ) * wide( c.size() ) * wide( c.size() );
        return rs( c.sons[0], ell ) + rs( c.sons[1], ell ) + ev( c.sons[0], c.sons[1], ell );
    }

    wide
    ll ( int t, int s ) const
    {
        const auto &  b = bt.block( bt.find( t, s ) );

        if ( b.kind == BlockKind::admissible_leaf )
            return ls( t, k );
        if ( b.kind == BlockKind::inadmissible_leaf )
            return ls( t, ct.cluster( s ).size() );

        const auto &  tc = ct.cluster( t );
        wide          w  = 0;

        for ( int j = 0; j < 2; ++j )
        {
            const int  sj = ct.cluster( s ).sons[ j ];

            w += ll( tc.sons[0], sj ) + ll( tc.sons[1], sj ) + mm( tc.sons[1], tc.sons[0], sj );
        }
        return w;
    }

    wide
    rl ( int t, int s ) const
    {
        const auto &  b = bt.block( bt.find( t, s ) );

        if ( b.kind == BlockKind::admissible_leaf )
            return rs( t, k );
        if ( b.kind == BlockKind::inadmissible_leaf )
            return rs( t, ct.cluster( s ).size() );

        const auto &  tc = ct.cluster( t );
        wide          w  = 0;

        for ( int j = 0; j < 2; ++j )
        {
            const int  sj = ct.cluster( s ).sons[ j ];

            w += rl( tc.sons[0], sj ) + rl( tc.sons[1], sj ) + mm( tc.sons[0], tc.sons[1], sj );
        }
        return w;
    }

    wide
    lr ( int s, int t ) const
    {
        const auto &  b = bt.block( bt.find( s, t ) );

        if ( b.kind == BlockKind::admissible_leaf )
            return rs( t, k );
        if ( b.kind == BlockKind::inadmissible_leaf )
            return rs( t, ct.cluster( s ).size() );

        const auto &  tc = ct.cluster( t );
        wide          w  = 0;

        for ( int i = 0; i < 2; ++i )
        {
            const int  si = ct.cluster( s ).sons[ i ];

            w += lr( si, tc.sons[0] ) + lr( si, tc.sons[1] ) + mm( si, tc.sons[1], tc.sons[0] );
        }
        return w;
    }

    wide
    rr ( int s, int t ) const
    {
        const auto &  b = bt.block( bt.find( s, t ) );

        if ( b.kind == BlockKind::admissible_leaf )
            return ls( t, k );
        if ( b.kind == BlockKind::inadmissible_leaf )
            return ls( t, ct.cluster( s ).size() );

        const auto &  tc = ct.cluster( t );
        wide          w  = 0;

        for ( int i = 0; i < 2; ++i )
        {
            const int  si = ct.cluster( s ).sons[ i ];

            w += rr( si, tc.sons[0] ) + rr( si, tc.sons[1] ) + mm( si, tc.sons[0], tc.sons[1] );
        }
        return w;
    }

    wide
    dc ( int t ) const
    {
        const auto &  c = ct.cluster( t );

        if ( c.is_leaf() )
            return dense_lr_count( c.size() );

        const int  t1 = c.sons[0], t2 = c.sons[1];

        return dc( t1 ) + dc( t2 ) + ll( t1, t2 ) + rr( t2, t1 ) + mm( t2, t1, t2 );
    }

    wide
    li ( int t ) const
    {
        const auto &  c = ct.cluster( t );

        if ( c.is_leaf() )
            return dense_inv_count( c.size() );

        const int  t1 = c.sons[0], t2 = c.sons[1];

        return ll( t2, t1 ) + lr( t2, t1 ) + li( t1 ) + li( t2 );
    }

    wide
    ri ( int t ) const
    {
        const auto &  c = ct.cluster( t );

        if ( c.is_leaf() )
            return dense_inv_count( c.size() );

        const int  t1 = c.sons[0], t2 = c.sons[1];

        return rl( t1, t2 ) + rr( t1, t2 ) + ri( t1 ) + ri( t2 );
    }

    wide
    in ( int t ) const
    {
        const auto &  c = ct.cluster( t );

        if ( c.is_leaf() )
            return dense_lr_count( c.size() );

        const int  t1 = c.sons[0], t2 = c.sons[1];

        return in( t1 ) + in( t2 ) + mm( t1, t2, t1 ) + lr( t1, t2 ) + rl( t2, t1 );
    }
};

int
leaf_cluster_of_size ( const ClusterTree & ct, Index size )
{
    for ( int id = 0; id < ct.n_clusters(); ++id )
        if ( ct.cluster( id ).is_leaf() && ( ct.cluster( id ).size() == size ) )
            return id;
    return -1;
}

}// namespace

TEST_CASE( "w_ev formula values" )
{
    const auto  ct = build_cluster_tree( 8, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::weak() );
    WorkModel   wm( bt, 1, WorkConstants{} );

    // inadmissible 2x2 diagonal leaf with one column: 1·(2·4+2) = 10
    const int  leaf = leaf_cluster_of_size( ct, 2 );

    REQUIRE( leaf >= 0 );
    CHECK( wm.w_ev( leaf, leaf, 1 ) == 10 );

    // admissible 4x4 leaf with k = 1: 2·1·1·8 = 16
    const auto &  root = ct.root();

    CHECK( wm.w_ev( root.sons[0], root.sons[1], 1 ) == 16 );

    // root of the 13-block tree: 4·10 + 2·16 + 4·8 = 104
    CHECK( wm.w_ev( ct.root_id(), ct.root_id(), 1 ) == 104 );

    CHECK_THROWS_AS( wm.w_ev( 3, 5, 1 ), StructureViolation );
}

TEST_CASE( "w_up formula values" )
{
    const auto  ct = build_cluster_tree( 8, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::weak() );

    WorkConstants  unit;

    unit.c_ad = 1;

    WorkModel  wm( bt, 1, unit );

    // inadmissible 2x2 leaf, two columns: 2·2·2·2 = 16
    const int  leaf = leaf_cluster_of_size( ct, 2 );

    CHECK( wm.w_up( leaf, leaf, 2 ) == 16 );

    // admissible 4x4 leaf, k = 1, ell = 1, C_ad = 1: 1·(1+1)^2·8 = 32
    const auto &  root = ct.root();

    CHECK( wm.w_up( root.sons[0], root.sons[1], 1 ) == 32 );

    // non-leaf value is the sum over sons
    Oracle  orc( bt, 1, unit );

    CHECK( wm.w_up( ct.root_id(), ct.root_id(), 3 ) == orc.up( ct.root_id(), ct.root_id(), 3 ) );
}

TEST_CASE( "w_mm leaf branch by hand" )
{
    // single diagonal 2x2 leaf inside the n=8 tree: k_tt = 2 and
    // W_mm(t,t,t) = W_ev(t,t,2) + W_up(t,t,2) = 20 + 16 = 36
    const auto  ct = build_cluster_tree( 8, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::weak() );
    WorkModel   wm( bt, 1, WorkConstants{} );
    const int   leaf = leaf_cluster_of_size( ct, 2 );

    CHECK( wm.w_ev( leaf, leaf, 2 ) == 20 );
    CHECK( wm.w_up( leaf, leaf, 2 ) == 16 );
    CHECK( wm.w_mm( leaf, leaf, leaf ) == 36 );
}

TEST_CASE( "w_mm on a single-cluster tree reduces to ev + up" )
{
    for ( const Index n : { 1, 3, 8 } )
    {
        const auto  ct = build_cluster_tree( n, 8 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        WorkModel   wm( bt, 2, WorkConstants{} );
        const int   g = ct.root_id();

        CHECK( wm.w_mm( g, g, g ) == wm.w_ev( g, g, n ) + wm.w_up( g, g, n ) );
    }
}

TEST_CASE( "w_mm equals the memo-free oracle" )
{
    for ( const Index n : { 8, 16, 32 } )
        for ( const auto & adm : { Admissibility::weak(), Admissibility::eta_condition( 1.0 ) } )
        {
            const auto  ct = build_cluster_tree( n, 2 );
            const auto  bt = build_block_tree( ct, adm );
            WorkModel   wm( bt, 2, WorkConstants{} );
            Oracle      orc( bt, 2, WorkConstants{} );
            const int   g = ct.root_id();

            CHECK( wm.w_mm( g, g, g ) == orc.mm( g, g, g ) );
        }
}

TEST_CASE( "w_solve_vectors values" )
{
    // leaf of size 3 with two columns: (18, 18)
    {
        const auto  ct = build_cluster_tree( 3, 4 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        WorkModel   wm( bt, 1, WorkConstants{} );

        const auto  [ wls, wrs ] = wm.w_solve_vectors( ct.root_id(), 2 );

        CHECK( wls == 18 );
        CHECK( wrs == 18 );
    }

    // n=8 weak tree, ell = 1, k = 1: both 48, sum below W_ev(root,root,1) = 104
    {
        const auto  ct = build_cluster_tree( 8, 2 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        WorkModel   wm( bt, 1, WorkConstants{} );

        const auto  [ wls, wrs ] = wm.w_solve_vectors( ct.root_id(), 1 );

        CHECK( wls == 48 );
        CHECK( wrs == 48 );
        CHECK( wls + wrs <= wm.w_ev( ct.root_id(), ct.root_id(), 1 ) );
    }

    // single-leaf tree: ell·n^2 each
    {
        const auto  ct = build_cluster_tree( 6, 8 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        WorkModel   wm( bt, 1, WorkConstants{} );

        const auto  [ wls, wrs ] = wm.w_solve_vectors( ct.root_id(), 3 );

        CHECK( wls == 3 * 36 );
        CHECK( wrs == 3 * 36 );
    }
}

TEST_CASE( "w_solve_h leaf values" )
{
    const auto  ct = build_cluster_tree( 8, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::weak() );
    WorkModel   wm( bt, 1, WorkConstants{} );

    // admissible leaf: (W_ls(t,k), W_rs(t,k), W_rs(t,k), W_ls(t,k))
    {
        const auto &  root = ct.root();
        const auto    sw   = wm.w_solve_h( root.sons[0], root.sons[1] );

        const auto  [ wls, wrs ] = wm.w_solve_vectors( root.sons[0], 1 );

        CHECK( sw.ll == wls );
        CHECK( sw.rl == wrs );
        CHECK( sw.lr == wrs );
        CHECK( sw.rr == wls );
    }

    // inadmissible 2x2 leaf: every component is 2·4 = 8
    {
        const int   leaf = leaf_cluster_of_size( ct, 2 );
        const auto  sw   = wm.w_solve_h( leaf, leaf );

        CHECK( sw.ll == 8 );
        CHECK( sw.rl == 8 );
        CHECK( sw.lr == 8 );
        CHECK( sw.rr == 8 );
    }
}

TEST_CASE( "w_solve_h equals the memo-free oracle and the solve lemma holds" )
{
    const auto  ct = build_cluster_tree( 32, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::eta_condition( 1.0 ) );
    WorkModel   wm( bt, 2, WorkConstants{} );
    Oracle      orc( bt, 2, WorkConstants{} );

    for ( int id = 0; id < bt.n_blocks(); ++id )
    {
        const auto &  b  = bt.block( id );
        const auto    sw = wm.w_solve_h( b.row, b.col );

        // the third and fourth component belong to the transposed block (s,t)
        CHECK( sw.ll == orc.ll( b.row, b.col ) );
        CHECK( sw.rl == orc.rl( b.row, b.col ) );
        CHECK( sw.lr == orc.lr( b.col, b.row ) );
        CHECK( sw.rr == orc.rr( b.col, b.row ) );

        // forward and backward solve lemma
        CHECK( sw.ll + sw.rl <= wm.w_mm( b.row, b.row, b.col ) );
        CHECK( sw.lr + sw.rr <= wm.w_mm( b.col, b.row, b.row ) );
    }
}

TEST_CASE( "w_factor_invert leaf values" )
{
    {
        const auto  ct = build_cluster_tree( 2, 2 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        WorkModel   wm( bt, 1, WorkConstants{} );

        const auto  w = wm.w_factor_invert( ct.root_id() );

        CHECK( w.dc == 3 );
        CHECK( w.li == 4 );
        CHECK( w.ri == 4 );
        CHECK( w.in == 3 );
        CHECK( w.dc + w.li + w.ri + w.in == 14 );
        CHECK( wm.w_mm( 0, 0, 0 ) == 36 );
        CHECK( w.dc + w.li + w.ri + w.in <= wm.w_mm( 0, 0, 0 ) );
    }
    {
        const auto  ct = build_cluster_tree( 1, 1 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        WorkModel   wm( bt, 1, WorkConstants{} );

        const auto  w = wm.w_factor_invert( ct.root_id() );

        CHECK( w.dc == 0 );
        CHECK( w.li == 1 );
        CHECK( w.ri == 1 );
        CHECK( w.in == 0 );
    }
}

TEST_CASE( "dense base-case identity" )
{
    // for leaves: W_dc + W_li + W_ri + W_in = n/6·(12n^2 - 6n + 6) <= 2n^3
    for ( wide n = 1; n <= 64; ++n )
    {
        const wide  sum = 2 * dense_lr_count( n ) + 2 * dense_inv_count( n );

        CHECK( sum == n * ( 12*n*n - 6*n + 6 ) / 6 );
        CHECK( sum <= 2 * n * n * n );
    }
}

TEST_CASE( "w_factor_invert equals the memo-free oracle" )
{
    const auto  ct = build_cluster_tree( 16, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::weak() );
    WorkModel   wm( bt, 2, WorkConstants{} );
    Oracle      orc( bt, 2, WorkConstants{} );

    for ( int t = 0; t < ct.n_clusters(); ++t )
    {
        const auto  w = wm.w_factor_invert( t );

        CHECK( w.dc == orc.dc( t ) );
        CHECK( w.li == orc.li( t ) );
        CHECK( w.ri == orc.ri( t ) );
        CHECK( w.in == orc.in( t ) );
    }
}

TEST_CASE( "product tree" )
{
    // single-leaf block tree: one node
    {
        const auto  ct = build_cluster_tree( 4, 4 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        const auto  pt = build_product_tree( bt );

        CHECK( pt.n_nodes() == 1 );
        CHECK( pt.root().is_leaf );
    }

    // n=8 weak tree: membership and sanity bound
    {
        const auto  ct = build_cluster_tree( 8, 2 );
        const auto  bt = build_block_tree( ct, Admissibility::weak() );
        const auto  pt = build_product_tree( bt );

        for ( int id = 0; id < pt.n_nodes(); ++id )
        {
            const auto &  nd = pt.node( id );

            CHECK( bt.contains( nd.t, nd.s ) );
            CHECK( bt.contains( nd.s, nd.r ) );

            // leaf condition
            const bool  leaf = bt.block( bt.find( nd.t, nd.s ) ).is_leaf()
                            || bt.block( bt.find( nd.s, nd.r ) ).is_leaf();

            CHECK( nd.is_leaf == leaf );
        }

        // at most C_sp successors r per block (t,s)
        const int  csp = sparsity_constant( bt );

        CHECK( pt.n_nodes() <= bt.n_blocks() * csp );
    }
}

TEST_CASE( "mm_upper_bound values" )
{
    // n=8 weak, k=1: measured C_sp = 2, p = 2, khat = 2, so the bound at
    // the root is C_mm·4·9·4·24
    const auto  ct = build_cluster_tree( 8, 2 );
    const auto  bt = build_block_tree( ct, Admissibility::weak() );
    WorkModel   wm( bt, 1, WorkConstants{} );
    const int   g = ct.root_id();

    CHECK( wm.csp() == 2 );
    CHECK( wm.depth() == 2 );
    CHECK( wm.khat() == 2 );

    const wide  expected = wide( wm.constants().c_mm() ) * 4 * 9 * 4 * 24;

    CHECK( wm.mm_upper_bound( g, g, g ) == expected );
    CHECK( wm.w_mm( g, g, g ) <= wm.mm_upper_bound( g, g, g ) );
}

TEST_CASE( "mm_upper_bound degenerate single-leaf tree" )
{
    const Index  n  = 8;
    const auto   ct = build_cluster_tree( n, 8 );
    const auto   bt = build_block_tree( ct, Admissibility::weak() );
    WorkModel    wm( bt, 2, WorkConstants{} );
    const int    g = ct.root_id();

    CHECK( wm.csp() == 1 );
    CHECK( wm.depth() == 0 );
    CHECK( wm.khat() == n );
    CHECK( wm.w_mm( g, g, g ) <= wm.mm_upper_bound( g, g, g ) );
}

TEST_CASE( "verify_all on tiny and hand-checked trees" )
{
    {
        const auto  ct  = build_cluster_tree( 1, 1 );
        const auto  bt  = build_block_tree( ct, Admissibility::weak() );
        const auto  rep = verify_all( bt, 1, WorkConstants{}, default_ell_range( bt, 1 ) );

        CHECK( rep.total_violations() == 0 );
        CHECK( rep.checks.size() == 8 );
    }
    {
        const auto  ct  = build_cluster_tree( 8, 2 );
        const auto  bt  = build_block_tree( ct, Admissibility::weak() );
        const auto  rep = verify_all( bt, 1, WorkConstants{}, default_ell_range( bt, 1 ) );

        CHECK( rep.total_violations() == 0 );

        for ( const auto & c : rep.checks )
        {
            CHECK( c.passed() );
            CHECK( c.checks > 0 );
            CHECK( c.max_ratio <= 1.0 );
        }
    }
}

TEST_CASE( "verify_all determinism" )
{
    const auto  ct = build_cluster_tree( 64, 4 );
    const auto  bt = build_block_tree( ct, Admissibility::eta_condition( 1.0 ) );

    const auto  r1 = verify_all( bt, 4, WorkConstants{}, default_ell_range( bt, 4 ) );
    const auto  r2 = verify_all( bt, 4, WorkConstants{}, default_ell_range( bt, 4 ) );

    REQUIRE( r1.checks.size() == r2.checks.size() );

    for ( size_t i = 0; i < r1.checks.size(); ++i )
    {
        CHECK( r1.checks[i].checks == r2.checks[i].checks );
        CHECK( r1.checks[i].violations == r2.checks[i].violations );
        CHECK( r1.checks[i].max_ratio == r2.checks[i].max_ratio );
    }
}

TEST_CASE( "wide integer helpers" )
{
    CHECK( to_string( wide( 0 ) ) == "0" );
    CHECK( to_string( wide( 123456789 ) ) == "123456789" );
    CHECK( to_string( -wide( 42 ) ) == "-42" );

    const wide  big = wide( 1 ) << 100;

    CHECK( to_string( big ) == "1267650600228229401496703205376" );
    CHECK_THROWS_AS( checked_mul( big, big ), Error );
}
