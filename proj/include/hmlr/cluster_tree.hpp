#pragma once
//
// Project     : hmlr
// File        : cluster_tree.hpp
// Description : binary cluster trees over contiguous index ranges
//

#include <hmlr/types.hpp>

#include <array>
#include <vector>

namespace hmlr {

//
// cluster: contiguous index range [lo,hi) at some level; either a leaf or
// two ordered sons whose ranges partition the parent (all indices of the
// first son precede those of the second)
//
struct Cluster
{
    int    id    = -1;
    Index  lo    = 0;
    Index  hi    = 0;
    int    level = 0;
    std::array<int, 2>  sons{ -1, -1 };

    Index  size () const noexcept { return hi - lo; }
    bool   is_leaf () const noexcept { return sons[0] < 0; }
};

//
// binary cluster tree with leaf size bound rho; a cluster is a leaf iff
// its range has at most rho indices. index i carries the point (i+0.5)/n
// on the unit interval for admissibility purposes.
//
class ClusterTree
{
public:
    const Cluster &  cluster ( int id ) const
    {
        if (( id < 0 ) || ( size_t(id) >= clusters_.size() ))
            throw UnknownCluster( "cluster id out of range" );
        return clusters_[ id ];
    }

    const Cluster &  root () const { return clusters_[ root_ ]; }

    int     root_id () const noexcept { return root_; }
    int     n_clusters () const noexcept { return int( clusters_.size() ); }
    Index   n () const noexcept { return n_; }
    Index   rho () const noexcept { return rho_; }
    int     depth () const noexcept { return depth_; }

    // unit-interval coordinate of index i
    double  point ( Index i ) const noexcept { return ( double(i) + 0.5 ) / double( n_ ); }

    friend ClusterTree build_cluster_tree ( Index n, Index rho );

private:
    std::vector<Cluster>  clusters_;
    int    root_  = 0;
    Index  n_     = 0;
    Index  rho_   = 0;
    int    depth_ = 0;
};

// balanced bisection: a cluster of size s > rho splits at lo + ceil(s/2)
ClusterTree build_cluster_tree ( Index n, Index rho );

// {t} and all clusters below t
std::vector<int> descendants ( const ClusterTree & ct, int t );

struct TreeStats
{
    int    depth         = 0;
    int    leaf_count    = 0;
    Index  max_leaf_size = 0;
};

TreeStats tree_stats ( const ClusterTree & ct );

}// namespace hmlr
