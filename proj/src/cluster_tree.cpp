//
// Project     : hmlr
// File        : cluster_tree.cpp
// Description : binary cluster trees over contiguous index ranges
//

#include <hmlr/cluster_tree.hpp>

namespace hmlr {

namespace {

int
build_rec ( ClusterTree & ct, std::vector<Cluster> & cs, Index lo, Index hi, int level, Index rho, int & depth )
{
    const int  id = int( cs.size() );

    cs.push_back( Cluster{ id, lo, hi, level, { -1, -1 } } );
    depth = std::max( depth, level );

    const Index  size = hi - lo;

    if ( size > rho )
    {
        const Index  mid = lo + ( size + 1 ) / 2;   // ceil split, left-heavy

        const int  s0 = build_rec( ct, cs, lo, mid, level+1, rho, depth );
        const int  s1 = build_rec( ct, cs, mid, hi, level+1, rho, depth );

        cs[ id ].sons = { s0, s1 };
    }

    return id;
}

}// namespace

ClusterTree
build_cluster_tree ( Index n, Index rho )
{
    if ( n < 1 )   throw InvalidArgument( "build_cluster_tree: n must be >= 1" );
    if ( rho < 1 ) throw InvalidArgument( "build_cluster_tree: rho must be >= 1" );

    ClusterTree  ct;

    ct.n_    = n;
    ct.rho_  = rho;
    ct.root_ = build_rec( ct, ct.clusters_, 0, n, 0, rho, ct.depth_ );

    return ct;
}

std::vector<int>
descendants ( const ClusterTree & ct, int t )
{
    std::vector<int>  out;
    std::vector<int>  stack{ ct.cluster( t ).id };

    while ( ! stack.empty() )
    {
        const int  id = stack.back();

        stack.pop_back();
        out.push_back( id );

        const auto &  c = ct.cluster( id );

        if ( ! c.is_leaf() )
        {
            stack.push_back( c.sons[1] );
            stack.push_back( c.sons[0] );
        }
    }

    return out;
}

TreeStats
tree_stats ( const ClusterTree & ct )
{
    TreeStats  st;

    st.depth = ct.depth();

    for ( int id = 0; id < ct.n_clusters(); ++id )
    {
        const auto &  c = ct.cluster( id );

        if ( c.is_leaf() )
        {
            st.leaf_count    += 1;
            st.max_leaf_size  = std::max( st.max_leaf_size, c.size() );
        }
    }

    return st;
}

}// namespace hmlr
