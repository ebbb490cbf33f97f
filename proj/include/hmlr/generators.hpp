#pragma once
//
// Project     : hmlr
// File        : generators.hpp
// Description : deterministic problem generators for the harness
//

#include <hmlr/block_tree.hpp>

#include <cstdint>
#include <string>

namespace hmlr {

enum class Generator
{
    identity,
    logkernel,
    diagdom,
    randlowrank
};

Generator   generator_from_string ( const std::string & name );
std::string to_string ( Generator g );
std::string to_string ( const Admissibility & adm );

//
// problem description; matrices regenerate byte-identically from
// (generator, seed, n, shift)
//
struct ProblemSpec
{
    Index          n    = 64;
    Index          rho  = 8;
    Admissibility  adm  = Admissibility::weak();
    Index          k    = 4;
    double         eps  = 0.0;
    Generator      generator = Generator::logkernel;
    std::uint64_t  seed  = 1;
    double         shift = 0.0;
};

//
// logkernel: M[i,j] = log|x_i - x_j| off the diagonal with x_i = (i+0.5)/n,
//            diagonal = shift + row sum of absolute off-diagonal entries
// diagdom:   uniform random in [-1,1] off the diagonal, same diagonal rule
// identity:  unit matrix plus shift on the diagonal
// randlowrank: A·B^T of rank min(k,n) plus shift on the diagonal
//
Matrix generate ( const ProblemSpec & spec );

// deterministic uniform [-1,1) entries, independent of the standard
// library's distribution implementation
Matrix random_uniform ( Index rows, Index cols, std::uint64_t seed );

}// namespace hmlr
