//
// Project     : hmlr
// File        : hmatrix.cpp
// Description : H-matrix storage and the base arithmetic operations
//

#include <hmlr/hmatrix.hpp>

#include <algorithm>

namespace hmlr {

namespace {

inline const Cluster &
row_cluster ( const HMatrix & h, const HMatrix::Node & nd )
{
    return h.cluster_tree().cluster( h.block_tree().block( nd.block ).row );
}

inline const Cluster &
col_cluster ( const HMatrix & h, const HMatrix::Node & nd )
{
    return h.cluster_tree().cluster( h.block_tree().block( nd.block ).col );
}

// z = a^T·b, counted
Matrix
mulT_to ( const Matrix & a, const Eigen::Ref<const Matrix> & b, FlopCounter & fc )
{
    const Index  k = a.rows();

    if ( k == 0 )
        return Matrix::Zero( a.cols(), b.cols() );

    fc.mults += a.cols() * b.cols() * k;
    fc.adds  += a.cols() * b.cols() * ( k - 1 );

    Matrix  z( a.cols(), b.cols() );

    z.noalias() = a.transpose() * b;
    return z;
}

// x += a^T·b, counted
void
mulT_add ( Eigen::Ref<Matrix> x, const Matrix & a, const Eigen::Ref<const Matrix> & b,
           FlopCounter & fc )
{
    fc.mults += a.cols() * b.cols() * a.rows();
    fc.adds  += a.cols() * b.cols() * a.rows();

    x.noalias() += a.transpose() * b;
}

// scale z by alpha; sign flips are free, general scaling counts one
// multiplication per entry
void
scale_counted ( Matrix & z, double alpha, FlopCounter & fc )
{
    if ( alpha == 1.0 )
        return;

    if ( alpha == -1.0 )
    {
        z = -z;
        return;
    }

    z *= alpha;
    fc.mults += z.size();
}

}// namespace

//////////////////////////////////////////////////////////////////////
//
// construction
//
//////////////////////////////////////////////////////////////////////

HMatrix::HMatrix ( const ClusterTree & ct, const BlockTree & bt, Index k, double eps, Shape shape )
    : ct_( &ct )
    , bt_( &bt )
    , k_( k )
    , eps_( eps )
    , shape_( shape )
{
    require( k >= 1, "HMatrix: rank bound k must be >= 1" );
    require( eps >= 0.0, "HMatrix: truncation tolerance must be >= 0" );

    by_block_.assign( bt.n_blocks(), nullptr );
    root_ = build_zero( bt.root().id );
}

std::unique_ptr<HMatrix::Node>
HMatrix::build_zero ( int block_id )
{
    const auto &  b  = bt_->block( block_id );
    const auto &  tc = ct_->cluster( b.row );
    const auto &  sc = ct_->cluster( b.col );

    // triangular storage leaves out the blocks on the wrong side
    if (( shape_ == Shape::lower ) && ( tc.hi <= sc.lo ))
        return nullptr;
    if (( shape_ == Shape::upper ) && ( sc.hi <= tc.lo ))
        return nullptr;

    auto  nd = std::make_unique<Node>();

    nd->block = block_id;

    switch ( b.kind )
    {
        case BlockKind::admissible_leaf :
            nd->lowrank = LowRank::zero( tc.size(), sc.size() );
            break;

        case BlockKind::inadmissible_leaf :
            nd->dense = Matrix::Zero( tc.size(), sc.size() );
            break;

        case BlockKind::subdivided :
            for ( int i = 0; i < 4; ++i )
                nd->son[ i ] = build_zero( b.sons[ i ] );
            break;
    }

    by_block_[ block_id ] = nd.get();
    return nd;
}

namespace {

std::unique_ptr<HMatrix::Node>
clone_node ( const HMatrix::Node & src )
{
    auto  nd = std::make_unique<HMatrix::Node>();

    nd->block   = src.block;
    nd->lowrank = src.lowrank;
    nd->dense   = src.dense;

    for ( int i = 0; i < 4; ++i )
        if ( src.son[ i ] )
            nd->son[ i ] = clone_node( *src.son[ i ] );

    return nd;
}

}// namespace

HMatrix::HMatrix ( const HMatrix & other )
    : ct_( other.ct_ )
    , bt_( other.bt_ )
    , k_( other.k_ )
    , eps_( other.eps_ )
    , shape_( other.shape_ )
{
    root_ = clone_node( *other.root_ );
    by_block_.assign( bt_->n_blocks(), nullptr );
    reindex( root_.get() );
}

void
HMatrix::reindex ( Node * nd )
{
    if ( nd == nullptr )
        return;

    by_block_[ nd->block ] = nd;

    for ( int i = 0; i < 4; ++i )
        reindex( nd->son[ i ].get() );
}

HMatrix::Node *
HMatrix::node ( int t, int s )
{
    const int  id = bt_->find( t, s );

    return ( id < 0 ? nullptr : by_block_[ id ] );
}

const HMatrix::Node *
HMatrix::node ( int t, int s ) const
{
    const int  id = bt_->find( t, s );

    return ( id < 0 ? nullptr : by_block_[ id ] );
}

namespace {

Index
max_rank_below ( const HMatrix::Node & nd )
{
    if ( nd.is_lowrank() )
        return nd.lowrank->rank();

    Index  r = 0;

    for ( int i = 0; i < 4; ++i )
        if ( nd.son[ i ] )
            r = std::max( r, max_rank_below( *nd.son[ i ] ) );

    return r;
}

}// namespace

Index
HMatrix::max_stored_rank () const
{
    return max_rank_below( *root_ );
}

//////////////////////////////////////////////////////////////////////
//
// compression / reassembly
//
//////////////////////////////////////////////////////////////////////

namespace {

void
fill_from_dense ( HMatrix & h, HMatrix::Node & nd, const Matrix & m, FlopCounter & fc )
{
    const auto &  tc = row_cluster( h, nd );
    const auto &  sc = col_cluster( h, nd );

    if ( nd.is_dense() )
    {
        *nd.dense = m.block( tc.lo, sc.lo, tc.size(), sc.size() );
    }
    else if ( nd.is_lowrank() )
    {
        const Matrix  sub = m.block( tc.lo, sc.lo, tc.size(), sc.size() );
        const auto    f   = truncate_lowrank( sub, h.max_rank(), h.eps(), fc );

        nd.lowrank->a = f.c;
        nd.lowrank->b = f.d;
    }
    else
    {
        for ( int i = 0; i < 4; ++i )
            fill_from_dense( h, *nd.son[ i ], m, fc );
    }
}

}// namespace

HMatrix
from_dense ( const Matrix & m, const ClusterTree & ct, const BlockTree & bt,
             Index k, double eps, FlopCounter & fc )
{
    if (( m.rows() != ct.n() ) || ( m.cols() != ct.n() ))
        throw DimensionMismatch( "from_dense: matrix size does not match the tree" );
    if ( ! all_finite( m ) )
        throw InvalidArgument( "from_dense: matrix entries must be finite" );

    HMatrix  h( ct, bt, k, eps );

    fill_from_dense( h, h.root(), m, fc );
    return h;
}

namespace {

void
assemble ( const HMatrix & h, const HMatrix::Node & nd, Matrix & m, Index t0, Index s0 )
{
    const auto &  tc = row_cluster( h, nd );
    const auto &  sc = col_cluster( h, nd );

    if ( nd.is_dense() )
        m.block( tc.lo - t0, sc.lo - s0, tc.size(), sc.size() ) = *nd.dense;
    else if ( nd.is_lowrank() )
        m.block( tc.lo - t0, sc.lo - s0, tc.size(), sc.size() ).noalias()
            = nd.lowrank->a * nd.lowrank->b.transpose();
    else
        for ( int i = 0; i < 4; ++i )
            if ( nd.son[ i ] )
                assemble( h, *nd.son[ i ], m, t0, s0 );
}

}// namespace

Matrix
to_dense ( const HMatrix & g )
{
    Matrix  m = Matrix::Zero( g.rows(), g.rows() );

    assemble( g, g.root(), m, 0, 0 );
    return m;
}

Matrix
to_dense_block ( const HMatrix & g, const HMatrix::Node & nd )
{
    const auto &  tc = row_cluster( g, nd );
    const auto &  sc = col_cluster( g, nd );
    Matrix        m  = Matrix::Zero( tc.size(), sc.size() );

    assemble( g, nd, m, tc.lo, sc.lo );
    return m;
}

//////////////////////////////////////////////////////////////////////
//
// matrix times vectors
//
//////////////////////////////////////////////////////////////////////

namespace {

// X += alpha·N·Y for a dense leaf; the scaling by alpha is applied to the
// smaller side
void
dense_addeval ( double alpha, const Matrix & n, MatrixView y, Eigen::Ref<Matrix> x,
                FlopCounter & fc )
{
    const Index  nt = n.rows();
    const Index  ns = n.cols();

    if ( y.is_identity() )
    {
        auto  xb = x.middleCols( y.offset(), ns );

        if ( alpha == 1.0 )       { xb += n;         fc.adds += nt*ns; }
        else if ( alpha == -1.0 ) { xb -= n;         fc.adds += nt*ns; }
        else                      { xb += alpha * n; fc.adds += nt*ns; fc.mults += nt*ns; }
        return;
    }

    const auto   ym  = y.mat();
    const Index  ell = y.cols();

    if (( alpha == 1.0 ) || ( alpha == -1.0 ))
    {
        if ( alpha == 1.0 ) mul_add( x, n, ym, fc );
        else                mul_sub( x, n, ym, fc );
    }
    else if ( ns <= nt )
    {
        Matrix  ys = alpha * ym;

        fc.mults += ell * ns;
        mul_add( x, n, ys, fc );
    }
    else
    {
        Matrix  t = mul_to( n, ym, fc );

        x += alpha * t;
        fc.mults += nt * ell;
        fc.adds  += nt * ell;
    }
}

// X += alpha·N^T·Y
void
dense_addevaltrans ( double alpha, const Matrix & n, MatrixView y, Eigen::Ref<Matrix> x,
                     FlopCounter & fc )
{
    const Index  nt = n.rows();
    const Index  ns = n.cols();

    if ( y.is_identity() )
    {
        auto  xb = x.middleCols( y.offset(), nt );

        if ( alpha == 1.0 )       { xb += n.transpose();         fc.adds += nt*ns; }
        else if ( alpha == -1.0 ) { xb -= n.transpose();         fc.adds += nt*ns; }
        else                      { xb += alpha * n.transpose(); fc.adds += nt*ns; fc.mults += nt*ns; }
        return;
    }

    const auto   ym  = y.mat();
    const Index  ell = y.cols();

    if (( alpha == 1.0 ) || ( alpha == -1.0 ))
    {
        fc.mults += ns * ell * nt;
        fc.adds  += ns * ell * nt;

        if ( alpha == 1.0 ) x.noalias() += n.transpose() * ym;
        else                x.noalias() -= n.transpose() * ym;
    }
    else if ( nt <= ns )
    {
        Matrix  ys = alpha * ym;

        fc.mults += ell * nt;
        mulT_add( x, n, ys, fc );
    }
    else
    {
        Matrix  t = mulT_to( n, ym, fc );

        x += alpha * t;
        fc.mults += ns * ell;
        fc.adds  += ns * ell;
    }
}

}// namespace

void
addeval ( double alpha, const HMatrix & g, const HMatrix::Node & nd,
          MatrixView y, Eigen::Ref<Matrix> x, FlopCounter & fc )
{
    const auto &  tc = row_cluster( g, nd );
    const auto &  sc = col_cluster( g, nd );

    if (( y.rows() != sc.size() ) || ( x.rows() != tc.size() ) || ( y.cols() != x.cols() ))
        throw DimensionMismatch( "addeval: operand sizes do not match the block" );

    if ( nd.is_dense() )
    {
        dense_addeval( alpha, *nd.dense, y, x, fc );
    }
    else if ( nd.is_lowrank() )
    {
        const auto &  lr = *nd.lowrank;

        if ( lr.rank() == 0 )
            return;

        if ( y.is_identity() )
        {
            // B^T·Y has support only in the columns touched by the slice
            Matrix  z = lr.b.transpose();

            scale_counted( z, alpha, fc );
            mul_add( x.middleCols( y.offset(), sc.size() ), lr.a, z, fc );
        }
        else
        {
            Matrix  z = mulT_to( lr.b, y.mat(), fc );

            scale_counted( z, alpha, fc );
            mul_add( x, lr.a, z, fc );
        }
    }
    else
    {
        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
            {
                const auto *  son = nd.child( i, j );

                if ( son == nullptr )
                    throw StructureViolation( "addeval: missing block" );

                const auto &  tcs = row_cluster( g, *son );
                const auto &  scs = col_cluster( g, *son );

                addeval( alpha, g, *son,
                         y.middle_rows( scs.lo - sc.lo, scs.size() ),
                         x.middleRows( tcs.lo - tc.lo, tcs.size() ), fc );
            }
    }
}

void
addevaltrans ( double alpha, const HMatrix & g, const HMatrix::Node & nd,
               MatrixView y, Eigen::Ref<Matrix> x, FlopCounter & fc )
{
    const auto &  tc = row_cluster( g, nd );
    const auto &  sc = col_cluster( g, nd );

    if (( y.rows() != tc.size() ) || ( x.rows() != sc.size() ) || ( y.cols() != x.cols() ))
        throw DimensionMismatch( "addevaltrans: operand sizes do not match the block" );

    if ( nd.is_dense() )
    {
        dense_addevaltrans( alpha, *nd.dense, y, x, fc );
    }
    else if ( nd.is_lowrank() )
    {
        const auto &  lr = *nd.lowrank;

        if ( lr.rank() == 0 )
            return;

        if ( y.is_identity() )
        {
            Matrix  z = lr.a.transpose();

            scale_counted( z, alpha, fc );
            mul_add( x.middleCols( y.offset(), tc.size() ), lr.b, z, fc );
        }
        else
        {
            Matrix  z = mulT_to( lr.a, y.mat(), fc );

            scale_counted( z, alpha, fc );
            mul_add( x, lr.b, z, fc );
        }
    }
    else
    {
        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
            {
                const auto *  son = nd.child( i, j );

                if ( son == nullptr )
                    throw StructureViolation( "addevaltrans: missing block" );

                const auto &  tcs = row_cluster( g, *son );
                const auto &  scs = col_cluster( g, *son );

                addevaltrans( alpha, g, *son,
                              y.middle_rows( tcs.lo - tc.lo, tcs.size() ),
                              x.middleRows( scs.lo - sc.lo, scs.size() ), fc );
            }
    }
}

void
addeval ( double alpha, int t, int s, const HMatrix & g,
          const Matrix & y, Matrix & x, FlopCounter & fc )
{
    const auto *  nd = g.node( t, s );

    if ( nd == nullptr )
        throw StructureViolation( "addeval: block not in the tree" );

    addeval( alpha, g, *nd, MatrixView::of( y ), x, fc );
}

void
addevaltrans ( double alpha, int t, int s, const HMatrix & g,
               const Matrix & y, Matrix & x, FlopCounter & fc )
{
    const auto *  nd = g.node( t, s );

    if ( nd == nullptr )
        throw StructureViolation( "addevaltrans: block not in the tree" );

    addevaltrans( alpha, g, *nd, MatrixView::of( y ), x, fc );
}

//////////////////////////////////////////////////////////////////////
//
// low-rank update
//
//////////////////////////////////////////////////////////////////////

namespace {

// N += A·B^T for a dense (sub-)block
void
dense_update ( Eigen::Ref<Matrix> n, MatrixView a, MatrixView b, FlopCounter & fc )
{
    const Index  nt = n.rows();
    const Index  ns = n.cols();

    if ( a.is_identity() )
    {
        const auto  bm = b.mat();

        for ( Index i = 0; i < nt; ++i )
            for ( Index j = 0; j < ns; ++j )
                n( i, j ) += bm( j, a.offset() + i );

        fc.adds += nt * ns;
    }
    else if ( b.is_identity() )
    {
        const auto  am = a.mat();

        for ( Index i = 0; i < nt; ++i )
            for ( Index j = 0; j < ns; ++j )
                n( i, j ) += am( i, b.offset() + j );

        fc.adds += nt * ns;
    }
    else
    {
        fc.mults += nt * ns * a.cols();
        fc.adds  += nt * ns * a.cols();

        n.noalias() += a.mat() * b.mat().transpose();
    }
}

}// namespace

void
update_lowrank ( LowRank & lr, MatrixView a, MatrixView b,
                 Index k, double eps, FlopCounter & fc )
{
    const Index  ell = a.cols();
    const Index  r   = lr.rank();

    if ( a.rows() != lr.a.rows() || b.rows() != lr.b.rows() || b.cols() != ell )
        throw DimensionMismatch( "update_lowrank: factor sizes do not match" );

    if ( ell == 0 )
        return;

    Matrix  ahat( lr.a.rows(), r + ell );
    Matrix  bhat( lr.b.rows(), r + ell );

    ahat << lr.a, a.materialize();
    bhat << lr.b, b.materialize();

    const auto  qr   = thin_qr( bhat, fc );
    const auto  core = mul_to( ahat, Matrix( qr.r.transpose() ), fc );
    const auto  tl   = truncate_lowrank( core, k, eps, fc );

    lr.a = tl.c;
    lr.b = mul_to( qr.q, tl.d, fc );
}

void
update ( HMatrix & g, HMatrix::Node & nd, MatrixView a, MatrixView b, FlopCounter & fc )
{
    const auto &  tc = row_cluster( g, nd );
    const auto &  sc = col_cluster( g, nd );

    if (( a.rows() != tc.size() ) || ( b.rows() != sc.size() ) || ( a.cols() != b.cols() ))
        throw DimensionMismatch( "update: factor sizes do not match the block" );

    if ( a.cols() == 0 )
        return;

    if ( nd.is_dense() )
    {
        dense_update( *nd.dense, a, b, fc );
    }
    else if ( nd.is_lowrank() )
    {
        update_lowrank( *nd.lowrank, a, b, g.max_rank(), g.eps(), fc );
    }
    else
    {
        for ( int i = 0; i < 2; ++i )
            for ( int j = 0; j < 2; ++j )
            {
                auto *  son = nd.child( i, j );

                if ( son == nullptr )
                    throw StructureViolation( "update: missing block" );

                const auto &  tcs = row_cluster( g, *son );
                const auto &  scs = col_cluster( g, *son );

                update( g, *son,
                        a.middle_rows( tcs.lo - tc.lo, tcs.size() ),
                        b.middle_rows( scs.lo - sc.lo, scs.size() ), fc );
            }
    }
}

void
update ( int t, int s, const Matrix & a, const Matrix & b, HMatrix & g, FlopCounter & fc )
{
    auto *  nd = g.node( t, s );

    if ( nd == nullptr )
        throw StructureViolation( "update: block not in the tree" );

    update( g, *nd, MatrixView::of( a ), MatrixView::of( b ), fc );
}

//////////////////////////////////////////////////////////////////////
//
// merge
//
//////////////////////////////////////////////////////////////////////

LowRank
merge_row ( const std::vector<const LowRank *> & blocks, Index k, double eps,
            FlopCounter & fc )
{
    const int  m = int( blocks.size() );

    require( m >= 1, "merge_row: empty block list" );

    const Index  nt = blocks[ 0 ]->a.rows();

    for ( const auto * b : blocks )
        if ( b->a.rows() != nt )
            throw DimensionMismatch( "merge_row: row sizes differ" );

    // thin QR of every B factor and the reduced matrices G_j = A_j·R_j^T
    std::vector<ThinQR>  qrs( m );
    std::vector<Matrix>  red( m );

    for ( int j = 0; j < m; ++j )
    {
        qrs[ j ] = thin_qr( blocks[ j ]->b, fc );
        red[ j ] = mul_to( blocks[ j ]->a, Matrix( qrs[ j ].r.transpose() ), fc );
    }

    // right-to-left pairwise rank-k reductions; p accumulates the isometry
    // that maps the merged right factor back onto the per-block rows
    Matrix  cur = red[ m-1 ];
    Matrix  p   = Matrix::Identity( cur.cols(), cur.cols() );

    for ( int j = m-2; j >= 0; --j )
    {
        const Index  qj = red[ j ].cols();
        const Index  kc = cur.cols();
        Matrix       w( nt, qj + kc );

        w << red[ j ], cur;

        const auto  tl = truncate_lowrank( w, k, eps, fc );

        cur = tl.c;

        Matrix  pn( qj + p.rows(), tl.d.cols() );

        pn.topRows( qj ) = tl.d.topRows( qj );
        pn.bottomRows( p.rows() ) = mul_to( p, Matrix( tl.d.bottomRows( kc ) ), fc );
        p = pn;
    }

    if ( m == 1 )
    {
        // single block: plain re-truncation
        const auto  tl = truncate_lowrank( cur, k, eps, fc );

        cur = tl.c;
        p   = tl.d;
    }

    // apply the per-block reflections to the accumulated right factor
    Index  total_rows = 0;

    for ( int j = 0; j < m; ++j )
        total_rows += blocks[ j ]->b.rows();

    Matrix  bout( total_rows, cur.cols() );
    Index   row0 = 0;
    Index   q0   = 0;

    for ( int j = 0; j < m; ++j )
    {
        const Index  nsj = blocks[ j ]->b.rows();
        const Index  qj  = qrs[ j ].q.cols();

        bout.middleRows( row0, nsj ) = mul_to( qrs[ j ].q, Matrix( p.middleRows( q0, qj ) ), fc );
        row0 += nsj;
        q0   += qj;
    }

    return { cur, bout };
}

LowRank
merge ( const ClusterTree & ct, int t, int r, const LowRankGrid & grid,
        Index k, double eps, FlopCounter & fc )
{
    const auto &  tc = ct.cluster( t );
    const auto &  rc = ct.cluster( r );

    if ( tc.is_leaf() || rc.is_leaf() )
        throw StructureViolation( "merge: position has no mergeable children" );

    // rows first, then columns
    LowRank  row0 = merge_row( { &grid( 0, 0 ), &grid( 0, 1 ) }, k, eps, fc );
    LowRank  row1 = merge_row( { &grid( 1, 0 ), &grid( 1, 1 ) }, k, eps, fc );

    // vertical join of the two row results, handled as a row merge of the
    // transposed blocks
    LowRank  swapped0{ row0.b, row0.a };
    LowRank  swapped1{ row1.b, row1.a };
    LowRank  joined = merge_row( { &swapped0, &swapped1 }, k, eps, fc );

    return { joined.b, joined.a };
}

//////////////////////////////////////////////////////////////////////
//
// multiplication
//
//////////////////////////////////////////////////////////////////////

namespace {

//
// destination of a multiplication update: a structural node, a temporary
// low-rank block inside a split admissible leaf, or a rectangular view
// into a dense leaf
//
struct MulSlot
{
    HMatrix *        h       = nullptr;
    HMatrix::Node *  node    = nullptr;
    LowRank *        scratch = nullptr;
    Matrix *         dense   = nullptr;
    Index            r0 = 0, c0 = 0, rows = 0, cols = 0;
    Index            k   = 0;
    double           eps = 0.0;

    static MulSlot
    of_node ( HMatrix & h, HMatrix::Node & nd )
    {
        MulSlot  s;

        s.h    = &h;
        s.node = &nd;
        s.k    = h.max_rank();
        s.eps  = h.eps();
        return s;
    }

    bool  is_lowrank_like () const noexcept
    {
        return ( scratch != nullptr ) || (( node != nullptr ) && node->is_lowrank() );
    }

    bool  is_dense_like () const noexcept
    {
        return ( dense != nullptr ) || (( node != nullptr ) && node->is_dense() );
    }

    LowRank &
    lowrank () const
    {
        return ( scratch != nullptr ? *scratch : *node->lowrank );
    }

    Eigen::Ref<Matrix>
    dense_ref () const
    {
        if ( dense != nullptr )
            return dense->block( r0, c0, rows, cols );
        return *node->dense;
    }

    MulSlot
    dense_subview ( Index i0, Index j0, Index nr, Index nc ) const
    {
        MulSlot  s;

        s.k   = k;
        s.eps = eps;

        if ( dense != nullptr )
        {
            s.dense = dense;
            s.r0    = r0 + i0;
            s.c0    = c0 + j0;
        }
        else
        {
            s.dense = &*node->dense;
            s.r0    = i0;
            s.c0    = j0;
        }

        s.rows = nr;
        s.cols = nc;
        return s;
    }
};

void
slot_update ( const MulSlot & slot, MatrixView a, MatrixView b, FlopCounter & fc )
{
    if ( slot.scratch != nullptr )
        update_lowrank( *slot.scratch, a, b, slot.k, slot.eps, fc );
    else if ( slot.dense != nullptr )
    {
        auto  ref = slot.dense_ref();

        dense_update( ref, a, b, fc );
    }
    else
        update( *slot.h, *slot.node, a, b, fc );
}

void
addmul_rec ( double alpha, const HMatrix & x, const HMatrix::Node & xn,
             const HMatrix & y, const HMatrix::Node & yn,
             const MulSlot & slot, FlopCounter & fc )
{
    const auto &  bt  = x.block_tree();
    const auto &  ct  = x.cluster_tree();
    const auto &  bxs = bt.block( xn.block );    // (t,s)
    const auto &  bsr = bt.block( yn.block );    // (s,r)

    if ( bxs.col != bsr.row )
        throw StructureViolation( "addmul: blocks do not share the middle cluster" );

    const auto &  tc = ct.cluster( bxs.row );
    const auto &  sc = ct.cluster( bxs.col );
    const auto &  rc = ct.cluster( bsr.col );

    if ( xn.is_lowrank() )
    {
        // X block is A·B^*: push B through Y^* and update with the A factor
        const auto &  lr = *xn.lowrank;

        if ( lr.rank() == 0 )
            return;

        Matrix  bhat = Matrix::Zero( rc.size(), lr.rank() );

        addevaltrans( alpha, y, yn, MatrixView::of( lr.b ), bhat, fc );
        slot_update( slot, MatrixView::of( lr.a ), MatrixView::of( bhat ), fc );
    }
    else if ( xn.is_dense() )
    {
        if ( tc.size() <= sc.size() )
        {
            const Matrix  ntr = xn.dense->transpose();
            Matrix        bhat = Matrix::Zero( rc.size(), tc.size() );

            addevaltrans( alpha, y, yn, MatrixView::of( ntr ), bhat, fc );
            slot_update( slot, MatrixView::identity( tc.size() ), MatrixView::of( bhat ), fc );
        }
        else
        {
            Matrix  bhat = Matrix::Zero( rc.size(), sc.size() );

            addevaltrans( alpha, y, yn, MatrixView::identity( sc.size() ), bhat, fc );
            slot_update( slot, MatrixView::of( *xn.dense ), MatrixView::of( bhat ), fc );
        }
    }
    else if ( yn.is_lowrank() )
    {
        const auto &  lr = *yn.lowrank;

        if ( lr.rank() == 0 )
            return;

        Matrix  ahat = Matrix::Zero( tc.size(), lr.rank() );

        addeval( alpha, x, xn, MatrixView::of( lr.a ), ahat, fc );
        slot_update( slot, MatrixView::of( ahat ), MatrixView::of( lr.b ), fc );
    }
    else if ( yn.is_dense() )
    {
        if ( rc.size() <= sc.size() )
        {
            Matrix  ahat = Matrix::Zero( tc.size(), rc.size() );

            addeval( alpha, x, xn, MatrixView::of( *yn.dense ), ahat, fc );
            slot_update( slot, MatrixView::of( ahat ), MatrixView::identity( rc.size() ), fc );
        }
        else
        {
            const Matrix  ntr = yn.dense->transpose();
            Matrix        ahat = Matrix::Zero( tc.size(), sc.size() );

            addeval( alpha, x, xn, MatrixView::identity( sc.size() ), ahat, fc );
            slot_update( slot, MatrixView::of( ahat ), MatrixView::of( ntr ), fc );
        }
    }
    else
    {
        // both factors subdivided: recurse over son triples
        const auto  child_xn = [&] ( int i, int l ) -> const HMatrix::Node &
        {
            const auto *  c = xn.child( i, l );

            if ( c == nullptr )
                throw StructureViolation( "addmul: missing block in left factor" );
            return *c;
        };
        const auto  child_yn = [&] ( int l, int j ) -> const HMatrix::Node &
        {
            const auto *  c = yn.child( l, j );

            if ( c == nullptr )
                throw StructureViolation( "addmul: missing block in right factor" );
            return *c;
        };

        if ( slot.is_lowrank_like() )
        {
            // split the destination into temporary blocks per son pair,
            // update them, then merge back into a single rank-k block
            LowRank &    cur = slot.lowrank();
            LowRankGrid  grid;

            for ( int i = 0; i < 2; ++i )
                for ( int j = 0; j < 2; ++j )
                {
                    const auto &  tcs = ct.cluster( tc.sons[ i ] );
                    const auto &  rcs = ct.cluster( rc.sons[ j ] );

                    grid( i, j ) = LowRank{ cur.a.middleRows( tcs.lo - tc.lo, tcs.size() ),
                                            cur.b.middleRows( rcs.lo - rc.lo, rcs.size() ) };
                }

            for ( int i = 0; i < 2; ++i )
                for ( int l = 0; l < 2; ++l )
                    for ( int j = 0; j < 2; ++j )
                    {
                        MulSlot  sub;

                        sub.scratch = &grid( i, j );
                        sub.k       = slot.k;
                        sub.eps     = slot.eps;

                        addmul_rec( alpha, x, child_xn( i, l ), y, child_yn( l, j ), sub, fc );
                    }

            cur = merge( ct, bxs.row, bsr.col, grid, slot.k, slot.eps, fc );
        }
        else if ( slot.is_dense_like() )
        {
            for ( int i = 0; i < 2; ++i )
                for ( int l = 0; l < 2; ++l )
                    for ( int j = 0; j < 2; ++j )
                    {
                        const auto &  tcs = ct.cluster( tc.sons[ i ] );
                        const auto &  rcs = ct.cluster( rc.sons[ j ] );

                        addmul_rec( alpha, x, child_xn( i, l ), y, child_yn( l, j ),
                                    slot.dense_subview( tcs.lo - tc.lo, rcs.lo - rc.lo,
                                                        tcs.size(), rcs.size() ), fc );
                    }
        }
        else
        {
            // structural destination
            for ( int i = 0; i < 2; ++i )
                for ( int l = 0; l < 2; ++l )
                    for ( int j = 0; j < 2; ++j )
                    {
                        auto *  zc = slot.node->child( i, j );

                        if ( zc == nullptr )
                            throw StructureViolation( "addmul: missing destination block" );

                        addmul_rec( alpha, x, child_xn( i, l ), y, child_yn( l, j ),
                                    MulSlot::of_node( *slot.h, *zc ), fc );
                    }
        }
    }
}

}// namespace

void
addmul_nodes ( double alpha, const HMatrix & x, const HMatrix::Node & xn,
               const HMatrix & y, const HMatrix::Node & yn,
               HMatrix & z, HMatrix::Node & zn, FlopCounter & fc )
{
    addmul_rec( alpha, x, xn, y, yn, MulSlot::of_node( z, zn ), fc );
}

void
addmul ( double alpha, int t, int s, int r,
         const HMatrix & x, const HMatrix & y, HMatrix & z, FlopCounter & fc )
{
    const auto *  xn = x.node( t, s );
    const auto *  yn = y.node( s, r );
    auto *        zn = z.node( t, r );

    if (( xn == nullptr ) || ( yn == nullptr ))
        throw StructureViolation( "addmul: factor block not in the tree" );
    if ( zn == nullptr )
        throw StructureViolation( "addmul: destination block not in the tree" );

    addmul_nodes( alpha, x, *xn, y, *yn, z, *zn, fc );
}

//////////////////////////////////////////////////////////////////////
//
// structural helpers
//
//////////////////////////////////////////////////////////////////////

void
copy_region ( const HMatrix::Node & src, HMatrix::Node & dst )
{
    if ( src.block != dst.block )
        throw StructureViolation( "copy_region: regions are not isomorphic" );

    dst.lowrank = src.lowrank;
    dst.dense   = src.dense;

    for ( int i = 0; i < 4; ++i )
    {
        if ( src.son[ i ] && dst.son[ i ] )
            copy_region( *src.son[ i ], *dst.son[ i ] );
        else if ( bool( src.son[ i ] ) != bool( dst.son[ i ] ) )
            throw StructureViolation( "copy_region: regions are not isomorphic" );
    }
}

void
negate_region ( HMatrix::Node & nd )
{
    if ( nd.is_dense() )
        *nd.dense = -*nd.dense;
    else if ( nd.is_lowrank() )
        nd.lowrank->a = -nd.lowrank->a;
    else
        for ( int i = 0; i < 4; ++i )
            if ( nd.son[ i ] )
                negate_region( *nd.son[ i ] );
}

}// namespace hmlr
