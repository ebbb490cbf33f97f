//
// Project     : hmlr
// File        : generators.cpp
// Description : deterministic problem generators for the harness
//

#include <hmlr/generators.hpp>

#include <cmath>
#include <random>

namespace hmlr {

Generator
generator_from_string ( const std::string & name )
{
    if ( name == "identity" )    return Generator::identity;
    if ( name == "logkernel" )   return Generator::logkernel;
    if ( name == "diagdom" )     return Generator::diagdom;
    if ( name == "randlowrank" ) return Generator::randlowrank;

    throw InvalidArgument( "unknown generator: " + name );
}

std::string
to_string ( Generator g )
{
    switch ( g )
    {
        case Generator::identity :    return "identity";
        case Generator::logkernel :   return "logkernel";
        case Generator::diagdom :     return "diagdom";
        case Generator::randlowrank : return "randlowrank";
    }
    return "?";
}

std::string
to_string ( const Admissibility & adm )
{
    return ( adm.kind == Admissibility::Kind::weak ? "weak" : "eta" );
}

namespace {

// uniform double in [-1,1), independent of the standard library's
// distribution implementation
struct Uniform
{
    std::mt19937_64  rng;

    explicit Uniform ( std::uint64_t seed ) : rng( seed ) {}

    double
    operator() ()
    {
        const auto  u = rng() >> 11;                      // 53 random bits

        return 2.0 * ( double( u ) * 0x1.0p-53 ) - 1.0;  // [-1,1)
    }
};

void
dominant_diagonal ( Matrix & m, double shift )
{
    const Index  n = m.rows();

    for ( Index i = 0; i < n; ++i )
    {
        double  s = 0.0;

        for ( Index j = 0; j < n; ++j )
            if ( j != i )
                s += std::abs( m( i, j ) );

        m( i, i ) = shift + s;
    }
}

}// namespace

Matrix
random_uniform ( Index rows, Index cols, std::uint64_t seed )
{
    Uniform  u( seed );
    Matrix   m( rows, cols );

    for ( Index i = 0; i < rows; ++i )
        for ( Index j = 0; j < cols; ++j )
            m( i, j ) = u();

    return m;
}

Matrix
generate ( const ProblemSpec & spec )
{
    require( spec.n >= 1, "generate: n must be >= 1" );

    const Index  n = spec.n;
    Matrix       m = Matrix::Zero( n, n );

    switch ( spec.generator )
    {
        case Generator::identity :
        {
            for ( Index i = 0; i < n; ++i )
                m( i, i ) = 1.0 + spec.shift;
            break;
        }

        case Generator::logkernel :
        {
            for ( Index i = 0; i < n; ++i )
                for ( Index j = 0; j < n; ++j )
                    if ( i != j )
                    {
                        const double  xi = ( double(i) + 0.5 ) / double(n);
                        const double  xj = ( double(j) + 0.5 ) / double(n);

                        m( i, j ) = std::log( std::abs( xi - xj ) );
                    }

            dominant_diagonal( m, spec.shift );
            break;
        }

        case Generator::diagdom :
        {
            Uniform  u( spec.seed );

            for ( Index i = 0; i < n; ++i )
                for ( Index j = 0; j < n; ++j )
                    if ( i != j )
                        m( i, j ) = u();

            dominant_diagonal( m, spec.shift );
            break;
        }

        case Generator::randlowrank :
        {
            Uniform      u( spec.seed );
            const Index  r = std::min( spec.k, n );
            Matrix       a( n, r );
            Matrix       b( n, r );

            for ( Index i = 0; i < n; ++i )
                for ( Index j = 0; j < r; ++j )
                    a( i, j ) = u();
            for ( Index i = 0; i < n; ++i )
                for ( Index j = 0; j < r; ++j )
                    b( i, j ) = u();

            m.noalias() = a * b.transpose();

            for ( Index i = 0; i < n; ++i )
                m( i, i ) += spec.shift;
            break;
        }
    }

    return m;
}

}// namespace hmlr
