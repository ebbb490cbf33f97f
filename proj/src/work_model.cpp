//
// Project     : hmlr
// File        : work_model.cpp
// Description : exact integer work recurrences and bound verification
//

#include <hmlr/work_model.hpp>

#include <algorithm>
#include <set>

namespace hmlr {

wide
checked_add ( wide a, wide b )
{
    wide  r;

    if ( __builtin_add_overflow( a, b, &r ) )
        throw Error( "work model: 128-bit integer overflow in addition" );
    return r;
}

wide
checked_mul ( wide a, wide b )
{
    wide  r;

    if ( __builtin_mul_overflow( a, b, &r ) )
        throw Error( "work model: 128-bit integer overflow in multiplication" );
    return r;
}

std::string
to_string ( wide v )
{
    if ( v == 0 )
        return "0";

    const bool  neg = ( v < 0 );
    std::string s;

    while ( v != 0 )
    {
        const int  digit = int( neg ? -( v % 10 ) : ( v % 10 ) );

        s.insert( s.begin(), char( '0' + digit ) );
        v /= 10;
    }

    if ( neg )
        s.insert( s.begin(), '-' );
    return s;
}

double
to_double ( wide v )
{
    return double( v );
}

wide
dense_lr_count ( wide n )
{
    return n * ( 4*n*n - 3*n - 1 ) / 6;
}

wide
dense_inv_count ( wide n )
{
    return n * ( 2*n*n + 4 ) / 6;
}

//////////////////////////////////////////////////////////////////////
//
// product tree
//
//////////////////////////////////////////////////////////////////////

ProductTree
build_product_tree ( const BlockTree & bt )
{
    const auto & ct = bt.cluster_tree();
    ProductTree  pt;

    auto  make_node = [&] ( int t, int s, int r ) -> int
    {
        const int  bts = bt.find( t, s );
        const int  bsr = bt.find( s, r );

        if (( bts < 0 ) || ( bsr < 0 ))
            throw StructureViolation( "product tree: block pair not in the block tree" );

        ProductNode  nd;

        nd.t   = t;
        nd.s   = s;
        nd.r   = r;
        nd.bts = bts;
        nd.bsr = bsr;
        nd.is_leaf = bt.block( bts ).is_leaf() || bt.block( bsr ).is_leaf();

        pt.nodes_.push_back( nd );
        return int( pt.nodes_.size() ) - 1;
    };

    const int  g = ct.root_id();

    make_node( g, g, g );

    std::vector<int>  todo{ 0 };

    while ( ! todo.empty() )
    {
        const int  id = todo.back();

        todo.pop_back();

        if ( pt.nodes_[ id ].is_leaf )
            continue;

        const auto &  tc = ct.cluster( pt.nodes_[ id ].t );
        const auto &  sc = ct.cluster( pt.nodes_[ id ].s );
        const auto &  rc = ct.cluster( pt.nodes_[ id ].r );

        for ( int i = 0; i < 2; ++i )
            for ( int l = 0; l < 2; ++l )
                for ( int j = 0; j < 2; ++j )
                {
                    const int  sid = make_node( tc.sons[ i ], sc.sons[ l ], rc.sons[ j ] );

                    pt.nodes_[ id ].sons[ 4*i + 2*l + j ] = sid;
                    todo.push_back( sid );
                }
    }

    return pt;
}

//////////////////////////////////////////////////////////////////////
//
// work model
//
//////////////////////////////////////////////////////////////////////

namespace {

inline std::uint64_t
pack2 ( int a, Index b )
{
    return ( std::uint64_t( std::uint32_t( a ) ) << 32 ) | std::uint32_t( b );
}

inline std::uint64_t
pack3 ( int a, int b, Index c )
{
    // cluster ids and column counts stay far below 2^21 at the scales
    // this model is used for
    return ( std::uint64_t( a ) << 42 ) | ( std::uint64_t( b ) << 21 ) | std::uint64_t( c );
}

}// namespace

WorkModel::WorkModel ( const BlockTree & bt, Index k, WorkConstants consts )
    : bt_( &bt )
    , ct_( &bt.cluster_tree() )
    , k_( k )
    , consts_( consts )
{
    require( k >= 1, "work model: rank k must be >= 1" );

    csp_  = sparsity_constant( bt );
    p_    = ct_->depth();
    khat_ = max_leaf_rank( bt, k );

    const int  nb = bt.n_blocks();
    const int  nc = ct_->n_clusters();

    ll_.assign( nb, 0 ); rl_.assign( nb, 0 ); lr_.assign( nb, 0 ); rr_.assign( nb, 0 );
    ll_done_.assign( nb, 0 ); rl_done_.assign( nb, 0 ); lr_done_.assign( nb, 0 ); rr_done_.assign( nb, 0 );
    dc_.assign( nc, 0 ); li_.assign( nc, 0 ); ri_.assign( nc, 0 ); in_.assign( nc, 0 );
    fi_done_.assign( nc, 0 );
}

Index
WorkModel::local_rank ( const Block & b ) const
{
    if ( b.kind == BlockKind::admissible_leaf )
        return k_;
    return std::min( ct_->cluster( b.row ).size(), ct_->cluster( b.col ).size() );
}

wide
WorkModel::w_ev_block ( int block_id, Index ell )
{
    const auto  key = pack2( block_id, ell );
    const auto  it  = ev_memo_.find( key );

    if ( it != ev_memo_.end() )
        return it->second;

    const auto &  b  = bt_->block( block_id );
    const wide    nt = ct_->cluster( b.row ).size();
    const wide    ns = ct_->cluster( b.col ).size();
    wide          w  = 0;

    switch ( b.kind )
    {
        case BlockKind::admissible_leaf :
            w = checked_mul( checked_mul( 2 * wide( ell ), wide( k_ ) ), nt + ns );
            break;

        case BlockKind::inadmissible_leaf :
            w = checked_mul( wide( ell ), 2 * nt * ns + std::min( nt, ns ) );
            break;

        case BlockKind::subdivided :
            for ( int i = 0; i < 4; ++i )
                w = checked_add( w, w_ev_block( b.sons[ i ], ell ) );
            break;
    }

    ev_memo_.emplace( key, w );
    return w;
}

wide
WorkModel::w_ev ( int t, int s, Index ell )
{
    const int  id = bt_->find( t, s );

    if ( id < 0 )
        throw StructureViolation( "w_ev: block not in the tree" );
    return w_ev_block( id, ell );
}

wide
WorkModel::w_up ( int t, int s, Index ell )
{
    const auto  key = pack3( t, s, ell );
    const auto  it  = up_memo_.find( key );

    if ( it != up_memo_.end() )
        return it->second;

    const wide  nt = ct_->cluster( t ).size();
    const wide  ns = ct_->cluster( s ).size();
    const int   id = bt_->find( t, s );
    wide        w  = 0;

    if ( id < 0 )
    {
        // outside the tree: a single truncated update on a temporary block
        w = checked_mul( checked_mul( wide( consts_.c_ad ),
                                      wide( k_ + ell ) * wide( k_ + ell ) ), nt + ns );
    }
    else
    {
        const auto &  b = bt_->block( id );

        switch ( b.kind )
        {
            case BlockKind::admissible_leaf :
                w = checked_mul( checked_mul( wide( consts_.c_ad ),
                                              wide( k_ + ell ) * wide( k_ + ell ) ), nt + ns );
                break;

            case BlockKind::inadmissible_leaf :
                w = checked_mul( 2 * wide( ell ), nt * ns );
                break;

            case BlockKind::subdivided :
                for ( int i = 0; i < 2; ++i )
                    for ( int j = 0; j < 2; ++j )
                        w = checked_add( w, w_up( ct_->cluster( t ).sons[ i ],
                                                  ct_->cluster( s ).sons[ j ], ell ) );
                break;
        }
    }

    up_memo_.emplace( key, w );
    return w;
}

wide
WorkModel::w_mm_blocks ( int bts, int bsr )
{
    const auto  key = pack2( bts, bsr );
    const auto  it  = mm_memo_.find( key );

    if ( it != mm_memo_.end() )
        return it->second;

    const auto &  ts = bt_->block( bts );
    const auto &  sr = bt_->block( bsr );

    if ( ts.col != sr.row )
        throw StructureViolation( "w_mm: blocks do not share the middle cluster" );

    wide  w = 0;

    if ( ts.is_leaf() )
    {
        const Index  kts = local_rank( ts );

        w = checked_add( w_ev_block( bsr, kts ), w_up( ts.row, sr.col, kts ) );
    }
    else if ( sr.is_leaf() )
    {
        const Index  ksr = local_rank( sr );

        w = checked_add( w_ev_block( bts, ksr ), w_up( ts.row, sr.col, ksr ) );
    }
    else
    {
        const wide  nt = ct_->cluster( ts.row ).size();
        const wide  nr = ct_->cluster( sr.col ).size();

        w = checked_mul( wide( consts_.c_mg() ) * wide( k_ ) * wide( k_ ), nt + nr );

        for ( int i = 0; i < 2; ++i )
            for ( int l = 0; l < 2; ++l )
                for ( int j = 0; j < 2; ++j )
                    w = checked_add( w, w_mm_blocks( ts.son( i, l ), sr.son( l, j ) ) );
    }

    mm_memo_.emplace( key, w );
    return w;
}

wide
WorkModel::w_mm ( int t, int s, int r )
{
    const int  bts = bt_->find( t, s );
    const int  bsr = bt_->find( s, r );

    if (( bts < 0 ) || ( bsr < 0 ))
        throw StructureViolation( "w_mm: block pair not in the tree" );
    return w_mm_blocks( bts, bsr );
}

std::pair<wide, wide>
WorkModel::w_solve_vectors ( int t, Index ell )
{
    const auto &  tc  = ct_->cluster( t );
    const auto    key = pack2( t, ell );

    {
        const auto  itl = ls_memo_.find( key );
        const auto  itr = rs_memo_.find( key );

        if (( itl != ls_memo_.end() ) && ( itr != rs_memo_.end() ))
            return { itl->second, itr->second };
    }

    wide  wls = 0;
    wide  wrs = 0;

    if ( tc.is_leaf() )
    {
        wls = wrs = checked_mul( wide( ell ), wide( tc.size() ) * wide( tc.size() ) );
    }
    else
    {
        const auto  [ l1, r1 ] = w_solve_vectors( tc.sons[0], ell );
        const auto  [ l2, r2 ] = w_solve_vectors( tc.sons[1], ell );

        wls = checked_add( checked_add( l1, l2 ), w_ev( tc.sons[1], tc.sons[0], ell ) );
        wrs = checked_add( checked_add( r1, r2 ), w_ev( tc.sons[0], tc.sons[1], ell ) );
    }

    ls_memo_.emplace( key, wls );
    rs_memo_.emplace( key, wrs );
    return { wls, wrs };
}

//
// forward solve L·X = Y on block (t,s): leaf terms are dense solves on the
// low-rank factor (k columns) or the nearfield block (|s| columns)
//
wide
WorkModel::w_ll ( int block_id )
{
    if ( ll_done_[ block_id ] )
        return ll_[ block_id ];

    const auto &  b = bt_->block( block_id );
    wide          w = 0;

    if ( b.kind == BlockKind::admissible_leaf )
        w = w_solve_vectors( b.row, k_ ).first;
    else if ( b.kind == BlockKind::inadmissible_leaf )
        w = w_solve_vectors( b.row, ct_->cluster( b.col ).size() ).first;
    else
    {
        const auto &  tc = ct_->cluster( b.row );

        for ( int j = 0; j < 2; ++j )
        {
            const int  sj = ct_->cluster( b.col ).sons[ j ];

            w = checked_add( w, w_ll( b.son( 0, j ) ) );
            w = checked_add( w, w_ll( b.son( 1, j ) ) );
            w = checked_add( w, w_mm( tc.sons[1], tc.sons[0], sj ) );
        }
    }

    ll_[ block_id ]      = w;
    ll_done_[ block_id ] = 1;
    return w;
}

wide
WorkModel::w_rl ( int block_id )
{
    if ( rl_done_[ block_id ] )
        return rl_[ block_id ];

    const auto &  b = bt_->block( block_id );
    wide          w = 0;

    if ( b.kind == BlockKind::admissible_leaf )
        w = w_solve_vectors( b.row, k_ ).second;
    else if ( b.kind == BlockKind::inadmissible_leaf )
        w = w_solve_vectors( b.row, ct_->cluster( b.col ).size() ).second;
    else
    {
        const auto &  tc = ct_->cluster( b.row );

        for ( int j = 0; j < 2; ++j )
        {
            const int  sj = ct_->cluster( b.col ).sons[ j ];

            w = checked_add( w, w_rl( b.son( 0, j ) ) );
            w = checked_add( w, w_rl( b.son( 1, j ) ) );
            w = checked_add( w, w_mm( tc.sons[0], tc.sons[1], sj ) );
        }
    }

    rl_[ block_id ]      = w;
    rl_done_[ block_id ] = 1;
    return w;
}

//
// right solve X·L = Y on block (s,t): the triangular cluster is the column,
// leaf terms are transposed solves (same cost as the forward ones)
//
wide
WorkModel::w_lr ( int block_id )
{
    if ( lr_done_[ block_id ] )
        return lr_[ block_id ];

    const auto &  b = bt_->block( block_id );
    wide          w = 0;

    if ( b.kind == BlockKind::admissible_leaf )
        w = w_solve_vectors( b.col, k_ ).second;
    else if ( b.kind == BlockKind::inadmissible_leaf )
        w = w_solve_vectors( b.col, ct_->cluster( b.row ).size() ).second;
    else
    {
        const auto &  tc = ct_->cluster( b.col );

        for ( int i = 0; i < 2; ++i )
        {
            const int  si = ct_->cluster( b.row ).sons[ i ];

            w = checked_add( w, w_lr( b.son( i, 0 ) ) );
            w = checked_add( w, w_lr( b.son( i, 1 ) ) );
            w = checked_add( w, w_mm( si, tc.sons[1], tc.sons[0] ) );
        }
    }

    lr_[ block_id ]      = w;
    lr_done_[ block_id ] = 1;
    return w;
}

wide
WorkModel::w_rr ( int block_id )
{
    if ( rr_done_[ block_id ] )
        return rr_[ block_id ];

    const auto &  b = bt_->block( block_id );
    wide          w = 0;

    if ( b.kind == BlockKind::admissible_leaf )
        w = w_solve_vectors( b.col, k_ ).first;
    else if ( b.kind == BlockKind::inadmissible_leaf )
        w = w_solve_vectors( b.col, ct_->cluster( b.row ).size() ).first;
    else
    {
        const auto &  tc = ct_->cluster( b.col );

        for ( int i = 0; i < 2; ++i )
        {
            const int  si = ct_->cluster( b.row ).sons[ i ];

            w = checked_add( w, w_rr( b.son( i, 0 ) ) );
            w = checked_add( w, w_rr( b.son( i, 1 ) ) );
            w = checked_add( w, w_mm( si, tc.sons[0], tc.sons[1] ) );
        }
    }

    rr_[ block_id ]      = w;
    rr_done_[ block_id ] = 1;
    return w;
}

WorkModel::SolveWork
WorkModel::w_solve_h ( int t, int s )
{
    const int  bts = bt_->find( t, s );
    const int  bst = bt_->find( s, t );

    if (( bts < 0 ) || ( bst < 0 ))
        throw StructureViolation( "w_solve_h: block not in the tree" );

    return { w_ll( bts ), w_rl( bts ), w_lr( bst ), w_rr( bst ) };
}

wide
WorkModel::w_dc ( int t )
{
    if ( ! fi_done_[ t ] )
        w_factor_invert( t );
    return dc_[ t ];
}

wide WorkModel::w_li ( int t ) { if ( ! fi_done_[ t ] ) w_factor_invert( t ); return li_[ t ]; }
wide WorkModel::w_ri ( int t ) { if ( ! fi_done_[ t ] ) w_factor_invert( t ); return ri_[ t ]; }
wide WorkModel::w_in ( int t ) { if ( ! fi_done_[ t ] ) w_factor_invert( t ); return in_[ t ]; }

WorkModel::FactorWork
WorkModel::w_factor_invert ( int t )
{
    if ( fi_done_[ t ] )
        return { dc_[ t ], li_[ t ], ri_[ t ], in_[ t ] };

    const auto &  tc = ct_->cluster( t );
    FactorWork    w{};

    if ( tc.is_leaf() )
    {
        const wide  n = tc.size();

        w.dc = dense_lr_count( n );
        w.li = dense_inv_count( n );
        w.ri = dense_inv_count( n );
        w.in = dense_lr_count( n );
    }
    else
    {
        const int  t1 = tc.sons[0];
        const int  t2 = tc.sons[1];

        const auto  w1 = w_factor_invert( t1 );
        const auto  w2 = w_factor_invert( t2 );

        const int  b12 = bt_->find( t1, t2 );
        const int  b21 = bt_->find( t2, t1 );

        if (( b12 < 0 ) || ( b21 < 0 ))
            throw StructureViolation( "w_factor_invert: off-diagonal block missing" );

        w.dc = checked_add( checked_add( w1.dc, w2.dc ),
               checked_add( checked_add( w_ll( b12 ), w_rr( b21 ) ),
                            w_mm( t2, t1, t2 ) ) );

        w.li = checked_add( checked_add( w1.li, w2.li ),
                            checked_add( w_ll( b21 ), w_lr( b21 ) ) );

        w.ri = checked_add( checked_add( w1.ri, w2.ri ),
                            checked_add( w_rl( b12 ), w_rr( b12 ) ) );

        w.in = checked_add( checked_add( w1.in, w2.in ),
               checked_add( checked_add( w_lr( b12 ), w_rl( b21 ) ),
                            w_mm( t1, t2, t1 ) ) );
    }

    dc_[ t ] = w.dc;
    li_[ t ] = w.li;
    ri_[ t ] = w.ri;
    in_[ t ] = w.in;
    fi_done_[ t ] = 1;
    return w;
}

wide
WorkModel::mm_upper_bound ( int t, int s, int r ) const
{
    const wide  sizes = wide( ct_->cluster( t ).size() )
                      + wide( ct_->cluster( s ).size() )
                      + wide( ct_->cluster( r ).size() );
    const wide  csp   = csp_;
    const wide  pp1   = p_ + 1;
    const wide  kh    = khat_;

    return checked_mul( checked_mul( wide( consts_.c_mm() ), csp * csp ),
                        checked_mul( pp1 * pp1, checked_mul( kh * kh, sizes ) ) );
}

//////////////////////////////////////////////////////////////////////
//
// verification driver
//
//////////////////////////////////////////////////////////////////////

std::vector<Index>
default_ell_range ( const BlockTree & bt, Index k )
{
    std::set<Index>  ells;

    for ( Index l = 1; l <= 2*k; ++l )
        ells.insert( l );

    const auto &  ct = bt.cluster_tree();

    for ( int c = 0; c < ct.n_clusters(); ++c )
        ells.insert( ct.cluster( c ).size() );

    return { ells.begin(), ells.end() };
}

namespace {

void
tally ( CheckResult & cr, wide lhs, wide rhs )
{
    cr.checks += 1;

    if ( lhs > rhs )
        cr.violations += 1;

    if ( rhs > 0 )
        cr.max_ratio = std::max( cr.max_ratio, to_double( lhs ) / to_double( rhs ) );
}

}// namespace

VerifyReport
verify_all ( const BlockTree & bt, Index k, WorkConstants consts,
             const std::vector<Index> & ell_range )
{
    const auto &  ct = bt.cluster_tree();
    WorkModel     wm( bt, k, consts );
    VerifyReport  rep;

    // (i) solving linear systems: W_ls + W_rs <= W_ev(t,t,ell)
    {
        CheckResult  cr{ "lemma_solve_vectors" };

        for ( int t = 0; t < ct.n_clusters(); ++t )
            for ( const auto ell : ell_range )
            {
                const auto  [ wls, wrs ] = wm.w_solve_vectors( t, ell );

                tally( cr, checked_add( wls, wrs ), wm.w_ev( t, t, ell ) );
            }

        rep.checks.push_back( cr );
    }

    // (ii) forward and backward solves:
    // W_ll + W_rl <= W_mm(t,t,s) and W_lr + W_rr <= W_mm(s,t,t)
    {
        CheckResult  fw{ "lemma_forward_solves" };
        CheckResult  bw{ "lemma_backward_solves" };

        for ( int id = 0; id < bt.n_blocks(); ++id )
        {
            const auto &  b = bt.block( id );

            tally( fw, checked_add( wm.w_ll( id ), wm.w_rl( id ) ),
                       wm.w_mm( b.row, b.row, b.col ) );
            tally( bw, checked_add( wm.w_lr( id ), wm.w_rr( id ) ),
                       wm.w_mm( b.row, b.col, b.col ) );
        }

        rep.checks.push_back( fw );
        rep.checks.push_back( bw );
    }

    // (iii) combined complexity: W_dc + W_li + W_ri + W_in <= W_mm(t,t,t)
    {
        CheckResult  cr{ "theorem_combined_complexity" };

        for ( int t = 0; t < ct.n_clusters(); ++t )
        {
            const auto  w   = wm.w_factor_invert( t );
            const wide  lhs = checked_add( checked_add( w.dc, w.li ),
                                           checked_add( w.ri, w.in ) );

            tally( cr, lhs, wm.w_mm( t, t, t ) );
        }

        rep.checks.push_back( cr );
    }

    // (iv) matrix multiplication: W_mm <= C_mm·C_sp^2·(p+1)^2·khat^2·(|t|+|s|+|r|)
    const auto  pt = build_product_tree( bt );

    {
        CheckResult  cr{ "theorem_matrix_multiplication" };

        for ( int id = 0; id < pt.n_nodes(); ++id )
        {
            const auto &  nd = pt.node( id );

            tally( cr, wm.w_mm_blocks( nd.bts, nd.bsr ),
                       wm.mm_upper_bound( nd.t, nd.s, nd.r ) );
        }

        rep.checks.push_back( cr );
    }

    // (v) descendant-sum bounds
    {
        CheckResult  cb{ "cluster_bound" };
        const wide   pp1 = ct.depth() + 1;

        // postorder size sums per cluster
        std::vector<wide>  csum( ct.n_clusters(), 0 );

        for ( int t = ct.n_clusters() - 1; t >= 0; --t )
        {
            const auto &  c = ct.cluster( t );

            csum[ t ] = c.size();
            if ( ! c.is_leaf() )
                csum[ t ] = checked_add( csum[ t ],
                                         checked_add( csum[ c.sons[0] ], csum[ c.sons[1] ] ) );
        }

        for ( int t = 0; t < ct.n_clusters(); ++t )
            tally( cb, csum[ t ], pp1 * wide( ct.cluster( t ).size() ) );

        rep.checks.push_back( cb );

        CheckResult  bb{ "block_bound" };
        const wide   csp = sparsity_constant( bt );

        std::vector<wide>  brow( bt.n_blocks(), 0 );
        std::vector<wide>  bcol( bt.n_blocks(), 0 );

        for ( int id = bt.n_blocks() - 1; id >= 0; --id )
        {
            const auto &  b = bt.block( id );

            brow[ id ] = ct.cluster( b.row ).size();
            bcol[ id ] = ct.cluster( b.col ).size();

            if ( ! b.is_leaf() )
                for ( int i = 0; i < 4; ++i )
                {
                    brow[ id ] = checked_add( brow[ id ], brow[ b.sons[ i ] ] );
                    bcol[ id ] = checked_add( bcol[ id ], bcol[ b.sons[ i ] ] );
                }
        }

        for ( int id = 0; id < bt.n_blocks(); ++id )
        {
            const auto &  b = bt.block( id );

            tally( bb, brow[ id ], csp * pp1 * wide( ct.cluster( b.row ).size() ) );
            tally( bb, bcol[ id ], csp * pp1 * wide( ct.cluster( b.col ).size() ) );
        }

        rep.checks.push_back( bb );

        CheckResult  pb{ "product_bound" };

        std::vector<wide>  pt_t( pt.n_nodes(), 0 );
        std::vector<wide>  pt_s( pt.n_nodes(), 0 );
        std::vector<wide>  pt_r( pt.n_nodes(), 0 );

        for ( int id = pt.n_nodes() - 1; id >= 0; --id )
        {
            const auto &  nd = pt.node( id );

            pt_t[ id ] = ct.cluster( nd.t ).size();
            pt_s[ id ] = ct.cluster( nd.s ).size();
            pt_r[ id ] = ct.cluster( nd.r ).size();

            if ( ! nd.is_leaf )
                for ( int i = 0; i < 8; ++i )
                {
                    pt_t[ id ] = checked_add( pt_t[ id ], pt_t[ nd.sons[ i ] ] );
                    pt_s[ id ] = checked_add( pt_s[ id ], pt_s[ nd.sons[ i ] ] );
                    pt_r[ id ] = checked_add( pt_r[ id ], pt_r[ nd.sons[ i ] ] );
                }
        }

        for ( int id = 0; id < pt.n_nodes(); ++id )
        {
            const auto &  nd = pt.node( id );

            tally( pb, pt_t[ id ], csp * csp * pp1 * wide( ct.cluster( nd.t ).size() ) );
            tally( pb, pt_s[ id ], csp * csp * pp1 * wide( ct.cluster( nd.s ).size() ) );
            tally( pb, pt_r[ id ], csp * csp * pp1 * wide( ct.cluster( nd.r ).size() ) );
        }

        rep.checks.push_back( pb );
    }

    return rep;
}

}// namespace hmlr
