//
// Project     : hmlr
// File        : block_tree.cpp
// Description : block trees over cluster pairs with pluggable admissibility
//

#include <hmlr/block_tree.hpp>

#include <algorithm>

namespace hmlr {

namespace {

bool
is_admissible ( const ClusterTree & ct, const Admissibility & adm, const Cluster & t, const Cluster & s )
{
    if ( t.id == s.id )
        return false;   // diagonal blocks are never admissible

    if ( adm.kind == Admissibility::Kind::weak )
        return ( t.hi <= s.lo ) || ( s.hi <= t.lo );

    // interval condition on the unit-interval embedding
    const double  n     = double( ct.n() );
    const double  diam  = double( std::max( t.size(), s.size() ) ) / n;
    const double  gap   = ( t.hi <= s.lo ? double( s.lo - t.hi )
                          : s.hi <= t.lo ? double( t.lo - s.hi )
                          : 0.0 ) / n;

    return diam <= adm.eta * gap;
}

}// namespace

BlockTree
build_block_tree ( const ClusterTree & ct, const Admissibility & adm )
{
    BlockTree  bt;

    bt.ct_  = &ct;
    bt.adm_ = adm;

    // iterative construction, parent before sons
    struct Task { int t, s, level, slot; };

    std::vector<Task>  stack;

    auto  make_block = [&] ( int t, int s, int level ) -> int
    {
        const int     id = int( bt.blocks_.size() );
        const auto &  tc = ct.cluster( t );
        const auto &  sc = ct.cluster( s );
        Block         b;

        b.id    = id;
        b.row   = t;
        b.col   = s;
        b.level = level;

        if ( is_admissible( ct, adm, tc, sc ) )
            b.kind = BlockKind::admissible_leaf;
        else if ( tc.is_leaf() || sc.is_leaf() )
            b.kind = BlockKind::inadmissible_leaf;
        else
            b.kind = BlockKind::subdivided;

        bt.blocks_.push_back( b );
        bt.index_.emplace( BlockTree::key( t, s ), id );
        return id;
    };

    make_block( ct.root_id(), ct.root_id(), 0 );

    std::vector<int>  todo{ 0 };

    while ( ! todo.empty() )
    {
        const int  id = todo.back();

        todo.pop_back();

        if ( bt.blocks_[ id ].kind != BlockKind::subdivided )
            continue;

        const auto &  tc = ct.cluster( bt.blocks_[ id ].row );
        const auto &  sc = ct.cluster( bt.blocks_[ id ].col );

        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
            {
                const int  sid = make_block( tc.sons[ i ], sc.sons[ j ], bt.blocks_[ id ].level + 1 );

                bt.blocks_[ id ].sons[ 2*i + j ] = sid;
                todo.push_back( sid );
            }
    }

    return bt;
}

int
sparsity_constant ( const BlockTree & bt )
{
    const auto &      ct = bt.cluster_tree();
    std::vector<int>  per_row( ct.n_clusters(), 0 );
    std::vector<int>  per_col( ct.n_clusters(), 0 );

    for ( int id = 0; id < bt.n_blocks(); ++id )
    {
        per_row[ bt.block( id ).row ] += 1;
        per_col[ bt.block( id ).col ] += 1;
    }

    int  csp = 0;

    for ( int c = 0; c < ct.n_clusters(); ++c )
        csp = std::max( { csp, per_row[ c ], per_col[ c ] } );

    return csp;
}

std::vector<std::pair<int, int>>
block_descendants ( const BlockTree & bt, int t, int s )
{
    std::vector<std::pair<int, int>>  out;

    const int  id = bt.find( t, s );

    if ( id < 0 )
    {
        out.emplace_back( t, s );   // pairs outside the tree have no sons
        return out;
    }

    std::vector<int>  stack{ id };

    while ( ! stack.empty() )
    {
        const auto &  b = bt.block( stack.back() );

        stack.pop_back();
        out.emplace_back( b.row, b.col );

        if ( ! b.is_leaf() )
            for ( int k = 3; k >= 0; --k )
                stack.push_back( b.sons[ k ] );
    }

    return out;
}

Index
max_leaf_rank ( const BlockTree & bt, Index k )
{
    const auto &  ct   = bt.cluster_tree();
    Index         khat = k;

    for ( int id = 0; id < bt.n_blocks(); ++id )
    {
        const auto &  b = bt.block( id );

        if ( b.kind == BlockKind::inadmissible_leaf )
            khat = std::max( khat, std::min( ct.cluster( b.row ).size(), ct.cluster( b.col ).size() ) );
    }

    return khat;
}

}// namespace hmlr
