#pragma once
//
// Project     : hmlr
// File        : types.hpp
// Description : scalar/matrix types, operation counter, error hierarchy
//

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hmlr {

using Index = Eigen::Index;

// all dense data is double precision, row-major
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

//
// running tally of floating-point operations; every instrumented kernel
// increments the counter of its caller
//
struct FlopCounter
{
    std::int64_t adds  = 0;
    std::int64_t mults = 0;
    std::int64_t divs  = 0;

    std::int64_t total () const noexcept { return adds + mults + divs; }

    FlopCounter &
    operator+= ( const FlopCounter & other ) noexcept
    {
        adds  += other.adds;
        mults += other.mults;
        divs  += other.divs;
        return *this;
    }
};

//
// error hierarchy
//
struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct PivotBreakdown     : Error { using Error::Error; };
struct SingularDiagonal   : Error { using Error::Error; };
struct DimensionMismatch  : Error { using Error::Error; };
struct InvalidArgument    : Error { using Error::Error; };
struct StructureViolation : Error { using Error::Error; };
struct UnknownCluster     : Error { using Error::Error; };

inline void
require ( bool cond, const char * what )
{
    if ( ! cond )
        throw InvalidArgument( what );
}

inline bool
all_finite ( const Matrix & m )
{
    return m.allFinite();
}

//
// read-only dense operand restricted to a row range; either a view of a
// real matrix or a row slice of an identity (rows [off, off+rows) of I_cols,
// kept implicit so products with it cost next to nothing)
//
class MatrixView
{
public:
    using ConstMap = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

    static MatrixView
    of ( const Matrix & m )
    {
        MatrixView v;
        v.data_   = m.data();
        v.rows_   = m.rows();
        v.cols_   = m.cols();
        v.stride_ = m.outerStride();
        return v;
    }

    static MatrixView
    of ( const Eigen::Ref<const Matrix> & m )
    {
        MatrixView v;
        v.data_   = m.data();
        v.rows_   = m.rows();
        v.cols_   = m.cols();
        v.stride_ = m.outerStride();
        return v;
    }

    static MatrixView
    identity ( Index n )
    {
        MatrixView v;
        v.ident_ = true;
        v.rows_  = n;
        v.cols_  = n;
        v.off_   = 0;
        return v;
    }

    MatrixView
    middle_rows ( Index lo, Index len ) const
    {
        MatrixView v( *this );
        if (( lo < 0 ) || ( len < 0 ) || ( lo + len > rows_ ))
            throw DimensionMismatch( "MatrixView: row restriction out of range" );
        v.rows_ = len;
        if ( ident_ ) v.off_  += lo;
        else          v.data_ += lo * stride_;
        return v;
    }

    Index  rows () const noexcept { return rows_; }
    Index  cols () const noexcept { return cols_; }
    bool   is_identity () const noexcept { return ident_; }
    Index  offset () const noexcept { return off_; }   // row i maps to column off+i

    ConstMap
    mat () const
    {
        return ConstMap( data_, rows_, cols_, Eigen::OuterStride<>( stride_ ) );
    }

    // explicit entries (used when concatenating factors); no flops
    Matrix
    materialize () const
    {
        if ( ! ident_ )
            return mat();

        Matrix m = Matrix::Zero( rows_, cols_ );
        for ( Index i = 0; i < rows_; ++i )
            m( i, off_ + i ) = 1.0;
        return m;
    }

private:
    const double *  data_   = nullptr;
    Index           rows_   = 0;
    Index           cols_   = 0;
    Index           stride_ = 0;
    bool            ident_  = false;
    Index           off_    = 0;
};

}// namespace hmlr
