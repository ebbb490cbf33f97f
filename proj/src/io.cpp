//
// Project     : hmlr
// File        : io.cpp
// Description : JSON tree dumps and binary H-matrix serialization
//

#include <hmlr/io.hpp>

#include <bit>
#include <cstring>
#include <fstream>

static_assert( std::endian::native == std::endian::little,
               "binary dumps are little-endian; big-endian hosts are unsupported" );

namespace hmlr {

nlohmann::json
tree_to_json ( const ClusterTree & ct )
{
    nlohmann::json  j;

    j[ "n" ]     = ct.n();
    j[ "rho" ]   = ct.rho();
    j[ "depth" ] = ct.depth();
    j[ "root" ]  = ct.root_id();

    auto &  arr = j[ "clusters" ] = nlohmann::json::array();

    for ( int id = 0; id < ct.n_clusters(); ++id )
    {
        const auto &    c = ct.cluster( id );
        nlohmann::json  e;

        e[ "id" ]    = c.id;
        e[ "range" ] = { c.lo, c.hi };
        e[ "level" ] = c.level;
        e[ "sons" ]  = c.is_leaf() ? nlohmann::json::array()
                                   : nlohmann::json::array( { c.sons[0], c.sons[1] } );
        arr.push_back( std::move( e ) );
    }

    return j;
}

nlohmann::json
blocks_to_json ( const BlockTree & bt )
{
    const auto &    ct = bt.cluster_tree();
    nlohmann::json  j;

    j[ "admissibility" ] = to_string( bt.admissibility() );
    if ( bt.admissibility().kind == Admissibility::Kind::eta )
        j[ "eta" ] = bt.admissibility().eta;
    j[ "sparsity_constant" ] = sparsity_constant( bt );

    auto &  arr = j[ "blocks" ] = nlohmann::json::array();

    for ( int id = 0; id < bt.n_blocks(); ++id )
    {
        const auto &    b  = bt.block( id );
        const auto &    tc = ct.cluster( b.row );
        const auto &    sc = ct.cluster( b.col );
        nlohmann::json  e;

        e[ "row" ]  = { tc.lo, tc.hi };
        e[ "col" ]  = { sc.lo, sc.hi };
        e[ "kind" ] = ( b.kind == BlockKind::admissible_leaf   ? "admissible"
                      : b.kind == BlockKind::inadmissible_leaf ? "inadmissible"
                                                               : "subdivided" );
        arr.push_back( std::move( e ) );
    }

    return j;
}

//////////////////////////////////////////////////////////////////////
//
// binary serialization
//
//////////////////////////////////////////////////////////////////////

namespace {

constexpr char          magic[ 4 ]     = { 'H', 'M', 'L', 'R' };
constexpr std::uint32_t format_version = 1;

template < typename T >
void
put ( std::ostream & out, const T & v )
{
    out.write( reinterpret_cast<const char *>( &v ), sizeof( T ) );
}

template < typename T >
T
get ( std::istream & in )
{
    T  v{};

    in.read( reinterpret_cast<char *>( &v ), sizeof( T ) );
    if ( ! in )
        throw Error( "read_hmatrix: truncated stream" );
    return v;
}

void
put_matrix ( std::ostream & out, const Matrix & m )
{
    if ( m.size() > 0 )
        out.write( reinterpret_cast<const char *>( m.data() ),
                   std::streamsize( sizeof( double ) * m.size() ) );
}

Matrix
get_matrix ( std::istream & in, Index rows, Index cols )
{
    Matrix  m( rows, cols );

    if ( m.size() > 0 )
    {
        in.read( reinterpret_cast<char *>( m.data() ),
                 std::streamsize( sizeof( double ) * m.size() ) );
        if ( ! in )
            throw Error( "read_hmatrix: truncated stream" );
    }
    return m;
}

void
collect_leaves ( const HMatrix::Node & nd, std::vector<const HMatrix::Node *> & leaves )
{
    if ( nd.is_leaf() )
        leaves.push_back( &nd );
    else
        for ( int i = 0; i < 4; ++i )
            if ( nd.son[ i ] )
                collect_leaves( *nd.son[ i ], leaves );
}

}// namespace

void
write_hmatrix ( const HMatrix & h, const ProblemSpec & spec, std::ostream & out )
{
    out.write( magic, 4 );
    put( out, format_version );

    put( out, std::uint64_t( spec.n ) );
    put( out, std::uint64_t( spec.rho ) );
    put( out, std::uint8_t( spec.adm.kind == Admissibility::Kind::weak ? 0 : 1 ) );
    put( out, spec.adm.eta );
    put( out, std::uint64_t( h.max_rank() ) );
    put( out, h.eps() );

    std::vector<const HMatrix::Node *>  leaves;

    collect_leaves( h.root(), leaves );
    put( out, std::uint64_t( leaves.size() ) );

    const auto &  ct = h.cluster_tree();
    const auto &  bt = h.block_tree();

    for ( const auto *  nd : leaves )
    {
        const auto &  b  = bt.block( nd->block );
        const auto &  tc = ct.cluster( b.row );
        const auto &  sc = ct.cluster( b.col );

        put( out, std::uint64_t( tc.lo ) );
        put( out, std::uint64_t( tc.hi ) );
        put( out, std::uint64_t( sc.lo ) );
        put( out, std::uint64_t( sc.hi ) );

        if ( nd->is_lowrank() )
        {
            put( out, std::uint8_t( 0 ) );
            put( out, std::uint64_t( nd->lowrank->rank() ) );
            put_matrix( out, nd->lowrank->a );
            put_matrix( out, nd->lowrank->b );
        }
        else
        {
            put( out, std::uint8_t( 1 ) );
            put_matrix( out, *nd->dense );
        }
    }
}

void
write_hmatrix ( const HMatrix & h, const ProblemSpec & spec, const std::string & path )
{
    std::ofstream  out( path, std::ios::binary );

    if ( ! out )
        throw Error( "write_hmatrix: cannot open " + path );
    write_hmatrix( h, spec, out );
}

StoredHMatrix
read_hmatrix ( std::istream & in )
{
    char  m4[ 4 ];

    in.read( m4, 4 );
    if ( ! in || std::memcmp( m4, magic, 4 ) != 0 )
        throw Error( "read_hmatrix: bad magic" );

    if ( get<std::uint32_t>( in ) != format_version )
        throw Error( "read_hmatrix: unsupported format version" );

    StoredHMatrix  st;

    st.spec.n   = Index( get<std::uint64_t>( in ) );
    st.spec.rho = Index( get<std::uint64_t>( in ) );

    const auto  adm_kind = get<std::uint8_t>( in );
    const auto  eta      = get<double>( in );

    st.spec.adm = ( adm_kind == 0 ? Admissibility::weak()
                                  : Admissibility::eta_condition( eta ) );
    st.spec.k   = Index( get<std::uint64_t>( in ) );
    st.spec.eps = get<double>( in );

    st.ct = std::make_unique<ClusterTree>( build_cluster_tree( st.spec.n, st.spec.rho ) );
    st.bt = std::make_unique<BlockTree>( build_block_tree( *st.ct, st.spec.adm ) );
    st.h  = std::make_unique<HMatrix>( *st.ct, *st.bt, st.spec.k, st.spec.eps );

    const auto  nleaves = get<std::uint64_t>( in );

    for ( std::uint64_t i = 0; i < nleaves; ++i )
    {
        const auto  row_lo = Index( get<std::uint64_t>( in ) );
        const auto  row_hi = Index( get<std::uint64_t>( in ) );
        const auto  col_lo = Index( get<std::uint64_t>( in ) );
        const auto  col_hi = Index( get<std::uint64_t>( in ) );
        const auto  kind   = get<std::uint8_t>( in );

        // locate the leaf by descending from the root
        HMatrix::Node *  nd = &st.h->root();

        while ( ! nd->is_leaf() )
        {
            bool  found = false;

            for ( int c = 0; c < 4 && ! found; ++c )
            {
                auto *  son = nd->son[ c ].get();

                if ( son == nullptr )
                    continue;

                const auto &  b  = st.bt->block( son->block );
                const auto &  tc = st.ct->cluster( b.row );
                const auto &  sc = st.ct->cluster( b.col );

                if (( tc.lo <= row_lo ) && ( row_hi <= tc.hi )
                    && ( sc.lo <= col_lo ) && ( col_hi <= sc.hi ))
                {
                    nd    = son;
                    found = true;
                }
            }

            if ( ! found )
                throw Error( "read_hmatrix: leaf does not match the block tree" );
        }

        const Index  nt = row_hi - row_lo;
        const Index  ns = col_hi - col_lo;

        if ( kind == 0 )
        {
            if ( ! nd->is_lowrank() )
                throw Error( "read_hmatrix: leaf kind mismatch" );

            const auto  rank = Index( get<std::uint64_t>( in ) );

            nd->lowrank->a = get_matrix( in, nt, rank );
            nd->lowrank->b = get_matrix( in, ns, rank );
        }
        else
        {
            if ( ! nd->is_dense() )
                throw Error( "read_hmatrix: leaf kind mismatch" );

            *nd->dense = get_matrix( in, nt, ns );
        }
    }

    return st;
}

StoredHMatrix
read_hmatrix ( const std::string & path )
{
    std::ifstream  in( path, std::ios::binary );

    if ( ! in )
        throw Error( "read_hmatrix: cannot open " + path );
    return read_hmatrix( in );
}

}// namespace hmlr
