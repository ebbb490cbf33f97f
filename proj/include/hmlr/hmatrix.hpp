#pragma once
//
// Project     : hmlr
// File        : hmatrix.hpp
// Description : H-matrix storage and the base arithmetic operations
//

#include <hmlr/block_tree.hpp>
#include <hmlr/dense.hpp>

#include <array>
#include <memory>
#include <optional>

namespace hmlr {

//
// factorized admissible block A·B^*
//
struct LowRank
{
    Matrix a;   // |t| × r
    Matrix b;   // |s| × r

    Index  rank () const noexcept { return a.cols(); }

    static LowRank
    zero ( Index rows, Index cols )
    {
        return { Matrix::Zero( rows, 0 ), Matrix::Zero( cols, 0 ) };
    }
};

//
// block-tree shaped matrix: admissible leaves hold low-rank factor pairs,
// inadmissible leaves dense nearfield blocks, subdivided blocks a 2×2 grid
// of children. triangular matrices use the same storage with the blocks on
// the wrong side of the diagonal left out (null children).
//
class HMatrix
{
public:
    struct Node
    {
        int  block = -1;
        std::optional<LowRank>  lowrank;
        std::optional<Matrix>   dense;
        std::array<std::unique_ptr<Node>, 4>  son;

        bool  is_lowrank () const noexcept { return lowrank.has_value(); }
        bool  is_dense () const noexcept { return dense.has_value(); }
        bool  is_leaf () const noexcept { return is_lowrank() || is_dense(); }

        Node *        child ( int i, int j ) noexcept { return son[ 2*i + j ].get(); }
        const Node *  child ( int i, int j ) const noexcept { return son[ 2*i + j ].get(); }
    };

    enum class Shape { full, lower, upper };

    // zero-valued matrix over the given block tree
    HMatrix ( const ClusterTree & ct, const BlockTree & bt, Index k, double eps,
              Shape shape = Shape::full );

    HMatrix ( const HMatrix & other );
    HMatrix ( HMatrix && )                   = default;
    HMatrix &  operator= ( HMatrix && )      = default;
    HMatrix &  operator= ( const HMatrix & ) = delete;

    Node &        root () noexcept { return *root_; }
    const Node &  root () const noexcept { return *root_; }

    // node of block (t,s); null if the block is absent from this matrix
    Node *        node ( int t, int s );
    const Node *  node ( int t, int s ) const;

    Index   max_rank () const noexcept { return k_; }
    double  eps () const noexcept { return eps_; }
    Shape   shape () const noexcept { return shape_; }

    const ClusterTree &  cluster_tree () const noexcept { return *ct_; }
    const BlockTree &    block_tree () const noexcept { return *bt_; }

    Index  rows () const noexcept { return ct_->n(); }

    // largest rank over the admissible leaves
    Index  max_stored_rank () const;

private:
    const ClusterTree *  ct_;
    const BlockTree *    bt_;
    Index                k_;
    double               eps_;
    Shape                shape_;
    std::unique_ptr<Node>     root_;
    std::vector<Node *>       by_block_;

    std::unique_ptr<Node>  build_zero ( int block_id );
    void                   reindex ( Node * nd );
};

//
// compression / reassembly
//

// compress a dense matrix: admissible leaves are truncated to rank <= k
// with relative tolerance eps, inadmissible leaves copy entries
HMatrix from_dense ( const Matrix & m, const ClusterTree & ct, const BlockTree & bt,
                     Index k, double eps, FlopCounter & fc );

// exact leaf-wise reassembly
Matrix to_dense ( const HMatrix & g );
Matrix to_dense_block ( const HMatrix & g, const HMatrix::Node & nd );

//
// base arithmetic
//

// X += alpha·G|_{t×s}·Y with Y: |s|×l, X: |t|×l
void addeval ( double alpha, const HMatrix & g, const HMatrix::Node & nd,
               MatrixView y, Eigen::Ref<Matrix> x, FlopCounter & fc );
void addeval ( double alpha, int t, int s, const HMatrix & g,
               const Matrix & y, Matrix & x, FlopCounter & fc );

// X += alpha·(G|_{t×s})^*·Y with Y: |t|×l, X: |s|×l
void addevaltrans ( double alpha, const HMatrix & g, const HMatrix::Node & nd,
                    MatrixView y, Eigen::Ref<Matrix> x, FlopCounter & fc );
void addevaltrans ( double alpha, int t, int s, const HMatrix & g,
                    const Matrix & y, Matrix & x, FlopCounter & fc );

// truncated low-rank update of one factored block
void update_lowrank ( LowRank & lr, MatrixView a, MatrixView b,
                      Index k, double eps, FlopCounter & fc );

// G|_{t×s} += A·B^* (exact on dense leaves, truncated on admissible ones)
void update ( HMatrix & g, HMatrix::Node & nd, MatrixView a, MatrixView b, FlopCounter & fc );
void update ( int t, int s, const Matrix & a, const Matrix & b, HMatrix & g, FlopCounter & fc );

//
// merge a 2×2 grid of low-rank blocks over sons(t)×sons(r) into one block of
// rank <= k: per block row, thin QR of the B factors and sequential
// right-to-left rank-k reductions of the reduced matrix; the same procedure
// then joins the row results column-wise
//
struct LowRankGrid
{
    std::array<LowRank, 4>  sub;   // (i,j) at 2i+j

    LowRank &        operator() ( int i, int j ) noexcept { return sub[ 2*i + j ]; }
    const LowRank &  operator() ( int i, int j ) const noexcept { return sub[ 2*i + j ]; }
};

LowRank merge ( const ClusterTree & ct, int t, int r, const LowRankGrid & grid,
                Index k, double eps, FlopCounter & fc );

// single horizontal merge [A_1 B_1^*, ..., A_m B_m^*] -> rank <= k
LowRank merge_row ( const std::vector<const LowRank *> & blocks, Index k, double eps,
                    FlopCounter & fc );

//
// Z|_{t×r} += alpha·X|_{t×s}·Y|_{s×r} with truncation; recursion over son
// triples, splitting and re-merging low-rank destinations as needed
//
void addmul ( double alpha, int t, int s, int r,
              const HMatrix & x, const HMatrix & y, HMatrix & z, FlopCounter & fc );

// node-level form used by the triangular algorithms; the destination node
// may belong to the same matrix as the sources as long as the regions are
// disjoint
void addmul_nodes ( double alpha, const HMatrix & x, const HMatrix::Node & xn,
                    const HMatrix & y, const HMatrix::Node & yn,
                    HMatrix & z, HMatrix::Node & zn, FlopCounter & fc );

//
// structural helpers
//

// deep copy of the payloads below src into dst (isomorphic regions)
void copy_region ( const HMatrix::Node & src, HMatrix::Node & dst );

// flip the sign of every payload below nd (sign flips are not counted)
void negate_region ( HMatrix::Node & nd );

}// namespace hmlr
