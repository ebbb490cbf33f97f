#pragma once
//
// Project     : hmlr
// File        : block_tree.hpp
// Description : block trees over cluster pairs with pluggable admissibility
//

#include <hmlr/cluster_tree.hpp>

#include <array>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hmlr {

enum class BlockKind
{
    admissible_leaf,
    inadmissible_leaf,
    subdivided
};

//
// admissibility condition: "weak" marks every pair of disjoint ranges as
// admissible; "eta" uses the interval condition
// max(diam t, diam s) <= eta·dist(t, s) on the unit-interval embedding
//
struct Admissibility
{
    enum class Kind { weak, eta };

    Kind    kind = Kind::weak;
    double  eta  = 1.0;

    static Admissibility weak () { return { Kind::weak, 0.0 }; }

    static Admissibility
    eta_condition ( double eta )
    {
        if ( ! ( eta > 0.0 ) )
            throw InvalidArgument( "admissibility: eta must be > 0" );
        return { Kind::eta, eta };
    }
};

struct Block
{
    int        id   = -1;
    int        row  = -1;      // cluster t
    int        col  = -1;      // cluster s
    BlockKind  kind = BlockKind::inadmissible_leaf;
    int        level = 0;
    std::array<int, 4>  sons{ -1, -1, -1, -1 };   // son(i,j) at 2i+j

    bool  is_leaf () const noexcept { return kind != BlockKind::subdivided; }
    int   son ( int i, int j ) const noexcept { return sons[ 2*i + j ]; }
};

//
// block tree for a cluster tree: leaves partition the product index set,
// diagonal blocks are never admissible, every inadmissible leaf has a
// cluster leaf as row or column
//
class BlockTree
{
public:
    const Block &  block ( int id ) const { return blocks_[ id ]; }
    const Block &  root () const { return blocks_[ 0 ]; }

    int  n_blocks () const noexcept { return int( blocks_.size() ); }

    // id of block (t,s), or -1 if the pair is not in the tree
    int
    find ( int t, int s ) const
    {
        const auto  it = index_.find( key( t, s ) );

        return ( it == index_.end() ? -1 : it->second );
    }

    bool  contains ( int t, int s ) const { return find( t, s ) >= 0; }

    const ClusterTree &   cluster_tree () const noexcept { return *ct_; }
    const Admissibility & admissibility () const noexcept { return adm_; }

    friend BlockTree build_block_tree ( const ClusterTree & ct, const Admissibility & adm );

private:
    static std::uint64_t
    key ( int t, int s ) noexcept
    {
        return ( std::uint64_t( std::uint32_t( t ) ) << 32 ) | std::uint32_t( s );
    }

    const ClusterTree *  ct_ = nullptr;
    Admissibility        adm_;
    std::vector<Block>   blocks_;
    std::unordered_map<std::uint64_t, int>  index_;
};

BlockTree build_block_tree ( const ClusterTree & ct, const Admissibility & adm );

// max over clusters of row-wise and column-wise block counts
int sparsity_constant ( const BlockTree & bt );

// desc(t,s): the subtree below (t,s) if the pair is in the tree,
// otherwise the singleton {(t,s)}
std::vector<std::pair<int, int>> block_descendants ( const BlockTree & bt, int t, int s );

// bound on the local rank of leaf blocks:
// max(k, largest min(|t|,|s|) over inadmissible leaves)
Index max_leaf_rank ( const BlockTree & bt, Index k );

}// namespace hmlr
