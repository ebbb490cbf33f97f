#pragma once
//
// Project     : hmlr
// File        : io.hpp
// Description : JSON tree dumps and binary H-matrix serialization
//

#include <hmlr/generators.hpp>
#include <hmlr/hmatrix.hpp>

#include <json.hpp>

#include <iosfwd>
#include <memory>

namespace hmlr {

nlohmann::json tree_to_json ( const ClusterTree & ct );
nlohmann::json blocks_to_json ( const BlockTree & bt );

//
// leaf-wise binary dump: per leaf the index ranges, kind, rank and factor
// entries as 64-bit little-endian reals. the header carries the problem
// parameters needed to rebuild the trees.
//
void write_hmatrix ( const HMatrix & h, const ProblemSpec & spec, std::ostream & out );
void write_hmatrix ( const HMatrix & h, const ProblemSpec & spec, const std::string & path );

struct StoredHMatrix
{
    ProblemSpec                   spec;
    std::unique_ptr<ClusterTree>  ct;
    std::unique_ptr<BlockTree>    bt;
    std::unique_ptr<HMatrix>      h;
};

StoredHMatrix read_hmatrix ( std::istream & in );
StoredHMatrix read_hmatrix ( const std::string & path );

}// namespace hmlr
