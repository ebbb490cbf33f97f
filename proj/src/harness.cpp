//
// Project     : hmlr
// File        : harness.cpp
// Description : verification and benchmark drivers
//

#include <hmlr/harness.hpp>

#include <chrono>
#include <sstream>

namespace hmlr {

namespace {

using clock_t_ = std::chrono::steady_clock;

double
ms_since ( clock_t_::time_point t0 )
{
    return std::chrono::duration<double, std::milli>( clock_t_::now() - t0 ).count();
}

double
rel_fro ( const Matrix & err, const Matrix & ref )
{
    const double  nref = ref.norm();

    return ( nref > 0.0 ? err.norm() / nref : err.norm() );
}

}// namespace

bool
RunReport::all_passed () const
{
    if ( status != "ok" )
        return false;

    for ( const auto & d : dominations )
        if ( ! d.ok )
            return false;

    return model_checks.total_violations() == 0;
}

nlohmann::json
RunReport::to_json ( bool with_timings ) const
{
    nlohmann::json  j;

    j[ "schema_version" ] = 1;

    j[ "problem" ] = {
        { "n", spec.n },
        { "leaf_size", spec.rho },
        { "admissibility", to_string( spec.adm ) },
        { "eta", spec.adm.eta },
        { "rank", spec.k },
        { "eps", spec.eps },
        { "generator", to_string( spec.generator ) },
        { "seed", spec.seed },
        { "shift", spec.shift },
    };

    j[ "tree" ] = {
        { "depth", depth },
        { "clusters", clusters },
        { "blocks", blocks },
        { "admissible_leaves", adm_leaves },
        { "inadmissible_leaves", inadm_leaves },
        { "sparsity_constant", csp },
        { "max_leaf_rank", khat },
    };

    j[ "flops" ] = flops;
    j[ "work" ]  = work;
    j[ "mm_bound_ratio" ] = mm_bound_ratio;

    auto &  res = j[ "residuals" ] = nlohmann::json::object();

    for ( const auto & [ name, e ] : residuals )
        res[ name ] = { { "value", e.value }, { "oracle", e.oracle } };

    auto &  dom = j[ "flop_domination" ] = nlohmann::json::array();

    for ( const auto & d : dominations )
        dom.push_back( { { "name", d.name },
                         { "measured", d.measured },
                         { "bound", to_string( d.bound ) },
                         { "ok", d.ok } } );

    auto &  chk = j[ "checks" ] = nlohmann::json::array();

    for ( const auto & c : model_checks.checks )
        chk.push_back( { { "name", c.name },
                         { "checks", c.checks },
                         { "violations", c.violations },
                         { "max_ratio", c.max_ratio },
                         { "passed", c.passed() } } );

    if ( with_timings )
        j[ "timings_ms" ] = timings_ms;

    j[ "status" ] = status;
    if ( ! error.empty() )
        j[ "error" ] = error;

    return j;
}

RunReport
run_verify ( const ProblemSpec & spec, const VerifyOptions & opts )
{
    RunReport  rep;

    rep.spec = spec;

    try
    {
        const auto  t_total = clock_t_::now();

        // problem setup
        auto        t0 = clock_t_::now();
        const auto  m  = generate( spec );
        const auto  ct = build_cluster_tree( spec.n, spec.rho );
        const auto  bt = build_block_tree( ct, spec.adm );

        rep.depth    = ct.depth();
        rep.clusters = ct.n_clusters();
        rep.blocks   = bt.n_blocks();
        rep.csp      = sparsity_constant( bt );
        rep.khat     = max_leaf_rank( bt, spec.k );

        for ( int id = 0; id < bt.n_blocks(); ++id )
        {
            const auto  kind = bt.block( id ).kind;

            if ( kind == BlockKind::admissible_leaf )   rep.adm_leaves += 1;
            if ( kind == BlockKind::inadmissible_leaf ) rep.inadm_leaves += 1;
        }
        rep.timings_ms[ "setup" ] = ms_since( t0 );

        // compression
        t0 = clock_t_::now();

        FlopCounter  fc_comp;
        const auto   h0 = from_dense( m, ct, bt, spec.k, spec.eps, fc_comp );

        rep.flops[ "compress" ] = fc_comp.total();
        rep.timings_ms[ "compress" ] = ms_since( t0 );

        // work model
        WorkModel  wm( bt, spec.k, opts.consts );
        const int  g = ct.root_id();

        const auto  fw      = wm.w_factor_invert( g );
        const wide  w_mm_g  = wm.w_mm( g, g, g );
        const wide  bound_g = wm.mm_upper_bound( g, g, g );

        rep.work[ "w_dc" ] = to_string( fw.dc );
        rep.work[ "w_li" ] = to_string( fw.li );
        rep.work[ "w_ri" ] = to_string( fw.ri );
        rep.work[ "w_in" ] = to_string( fw.in );
        rep.work[ "w_mm_root" ] = to_string( w_mm_g );
        rep.work[ "mm_bound_root" ] = to_string( bound_g );
        rep.mm_bound_ratio = to_double( w_mm_g ) / to_double( bound_g );

        auto  dominate = [&rep] ( const std::string & name, const FlopCounter & fc, wide bound )
        {
            rep.flops[ name ] = fc.total();
            rep.dominations.push_back( { name, fc.total(), bound, wide( fc.total() ) <= bound } );
        };

        // standalone base operations against their work bounds
        t0 = clock_t_::now();
        {
            const Index  ell = std::min<Index>( 2, spec.n );
            const auto   y   = random_uniform( spec.n, ell, spec.seed ^ 0x9e3779b97f4a7c15ull );
            Matrix       x   = Matrix::Zero( spec.n, ell );
            FlopCounter  fc;

            addeval( 2.0, g, g, h0, y, x, fc );
            dominate( "addeval", fc, wm.w_ev( g, g, ell ) );

            Matrix       xt = Matrix::Zero( spec.n, ell );
            FlopCounter  fct;

            addevaltrans( 2.0, g, g, h0, y, xt, fct );
            dominate( "addevaltrans", fct, wm.w_ev( g, g, ell ) );
        }
        {
            const Index  ell = std::min<Index>( spec.k, spec.n );
            const auto   a   = random_uniform( spec.n, ell, spec.seed + 17 );
            const auto   b   = random_uniform( spec.n, ell, spec.seed + 18 );
            HMatrix      hu( h0 );
            FlopCounter  fc;

            update( g, g, a, b, hu, fc );
            dominate( "update", fc, wm.w_up( g, g, ell ) );
        }
        {
            HMatrix      z( h0 );
            FlopCounter  fc;

            addmul( 1.0, g, g, g, h0, h0, z, fc );
            dominate( "addmul", fc, w_mm_g );
        }
        rep.timings_ms[ "base_ops" ] = ms_since( t0 );

        // factorization
        t0 = clock_t_::now();

        HMatrix            gc( h0 );
        TriangularHMatrix  l( ct, bt, spec.k, spec.eps, Side::lower );
        TriangularHMatrix  r( ct, bt, spec.k, spec.eps, Side::upper );
        FlopCounter        fc_dc;

        lrdecomp( gc, l, r, fc_dc, opts.pivot_tol );
        dominate( "lrdecomp", fc_dc, fw.dc );
        rep.timings_ms[ "lrdecomp" ] = ms_since( t0 );

        // dense-right-hand-side solves on the factors
        t0 = clock_t_::now();

        const Index  nrhs = std::min<Index>( 2, spec.n );
        const auto   bmat = random_uniform( spec.n, nrhs, spec.seed + 23 );
        Matrix       xsol = bmat;

        {
            FlopCounter  fc;

            solve_matrix( Side::lower, false, g, l, xsol, xsol, fc, opts.pivot_tol );
            dominate( "lsolve", fc, wm.w_solve_vectors( g, nrhs ).first );
        }
        {
            FlopCounter  fc;

            solve_matrix( Side::upper, false, g, r, xsol, xsol, fc, opts.pivot_tol );
            dominate( "rsolve", fc, wm.w_solve_vectors( g, nrhs ).second );
        }

        Matrix  xtrans = bmat;

        {
            FlopCounter  fc;

            solve_matrix( Side::upper, true, g, r, xtrans, xtrans, fc, opts.pivot_tol );
            dominate( "rsolvetrans", fc, wm.w_solve_vectors( g, nrhs ).second );
        }
        {
            FlopCounter  fc;

            solve_matrix( Side::lower, true, g, l, xtrans, xtrans, fc, opts.pivot_tol );
            dominate( "lsolvetrans", fc, wm.w_solve_vectors( g, nrhs ).first );
        }
        rep.timings_ms[ "solve" ] = ms_since( t0 );

        // solves with H-matrix right-hand sides at the root block
        t0 = clock_t_::now();

        const auto  sw = wm.w_solve_h( g, g );

        HMatrix  xll( h0 );
        HMatrix  xrl( h0 );
        HMatrix  xlr( h0 );
        HMatrix  xrr( h0 );

        {
            FlopCounter  fc;

            hsolve_left( Side::lower, g, g, l, xll, xll, fc, opts.pivot_tol );
            dominate( "llsolve", fc, sw.ll );
        }
        {
            FlopCounter  fc;

            hsolve_left( Side::upper, g, g, r, xrl, xrl, fc, opts.pivot_tol );
            dominate( "rlsolve", fc, sw.rl );
        }
        {
            FlopCounter  fc;

            hsolve_right( Side::lower, g, g, l, xlr, xlr, fc, opts.pivot_tol );
            dominate( "lrsolve", fc, sw.lr );
        }
        {
            FlopCounter  fc;

            hsolve_right( Side::upper, g, g, r, xrr, xrr, fc, opts.pivot_tol );
            dominate( "rrsolve", fc, sw.rr );
        }
        rep.timings_ms[ "hsolve" ] = ms_since( t0 );

        // inversion
        t0 = clock_t_::now();

        TriangularHMatrix  lt( ct, bt, spec.k, spec.eps, Side::lower );
        TriangularHMatrix  rt( ct, bt, spec.k, spec.eps, Side::upper );

        {
            FlopCounter  fc;

            linvert( l, lt, fc, opts.pivot_tol );
            dominate( "linvert", fc, fw.li );
        }
        {
            FlopCounter  fc;

            rinvert( r, rt, fc, opts.pivot_tol );
            dominate( "rinvert", fc, fw.ri );
        }

        HMatrix  gt( ct, bt, spec.k, spec.eps );

        {
            FlopCounter  fc;

            lrinvert( l, r, lt, rt, gt, fc, opts.pivot_tol );
            dominate( "lrinvert", fc, fw.in );
        }
        rep.timings_ms[ "invert" ] = ms_since( t0 );

        t0 = clock_t_::now();

        HMatrix  gip( h0 );

        {
            FlopCounter  fc;
            const wide   total = checked_add( checked_add( fw.dc, fw.li ),
                                              checked_add( fw.ri, fw.in ) );

            invert_inplace( gip, fc, opts.pivot_tol );
            dominate( "invert_inplace", fc, total );
        }
        rep.timings_ms[ "invert_inplace" ] = ms_since( t0 );

        // model checks
        t0 = clock_t_::now();
        rep.model_checks = verify_all( bt, spec.k, opts.consts, default_ell_range( bt, spec.k ) );
        rep.timings_ms[ "model_checks" ] = ms_since( t0 );

        // dense-oracle residuals
        if ( opts.with_dense_oracle )
        {
            t0 = clock_t_::now();

            const Matrix  hd  = to_dense( h0 );
            const Matrix  eye = Matrix::Identity( spec.n, spec.n );

            rep.residuals[ "compression" ] =
                { rel_fro( hd - m, m ), "dense generator matrix, Frobenius" };

            const Matrix  ld = to_dense( l.h );
            const Matrix  rd = to_dense( r.h );

            rep.residuals[ "factorization" ] =
                { rel_fro( ld * rd - hd, hd ), "dense L·R against to_dense(H), Frobenius" };

            const Matrix  gtd  = to_dense( gt );
            const Matrix  gipd = to_dense( gip );

            rep.residuals[ "inverse" ] =
                { ( hd * gtd - eye ).norm(), "‖to_dense(H)·to_dense(inv) - I‖_F" };
            rep.residuals[ "inverse_inplace" ] =
                { ( hd * gipd - eye ).norm(), "‖to_dense(H)·to_dense(inv) - I‖_F" };
            rep.residuals[ "inplace_agreement" ] =
                { rel_fro( gipd - gtd, gtd ), "in-place inverse against pipeline inverse, Frobenius" };

            rep.residuals[ "solve" ] =
                { rel_fro( hd * xsol - bmat, bmat ), "dense residual of L,R solves" };
            rep.residuals[ "solvetrans" ] =
                { rel_fro( hd.transpose() * xtrans - bmat, bmat ),
                  "dense residual of transposed solves" };

            rep.residuals[ "llsolve" ] =
                { rel_fro( ld * to_dense( xll ) - hd, hd ), "dense L·X against to_dense(H)" };
            rep.residuals[ "rlsolve" ] =
                { rel_fro( rd * to_dense( xrl ) - hd, hd ), "dense R·X against to_dense(H)" };
            rep.residuals[ "lrsolve" ] =
                { rel_fro( to_dense( xlr ) * ld - hd, hd ), "dense X·L against to_dense(H)" };
            rep.residuals[ "rrsolve" ] =
                { rel_fro( to_dense( xrr ) * rd - hd, hd ), "dense X·R against to_dense(H)" };

            rep.timings_ms[ "oracle" ] = ms_since( t0 );
        }

        rep.timings_ms[ "total" ] = ms_since( t_total );
    }
    catch ( const std::exception & e )
    {
        rep.status = "error";
        rep.error  = e.what();
    }

    return rep;
}

//////////////////////////////////////////////////////////////////////
//
// benchmark driver
//
//////////////////////////////////////////////////////////////////////

std::string
bench_csv_header ()
{
    return "n,leaf_size,admissibility,eta,rank,eps,generator,seed,shift,"
           "depth,csp,khat,"
           "flops_compress,flops_addmul,flops_lrdecomp,flops_linvert,flops_rinvert,"
           "flops_lrinvert,flops_invert_inplace,"
           "w_mm_root,mm_bound_root,mm_bound_ratio,"
           "resid_factorization,resid_inverse,resid_inplace_agreement,"
           "violations,status";
}

namespace {

std::string
flop_field ( const RunReport & rep, const std::string & name )
{
    const auto  it = rep.flops.find( name );

    return ( it == rep.flops.end() ? "" : std::to_string( it->second ) );
}

std::string
resid_field ( const RunReport & rep, const std::string & name )
{
    const auto  it = rep.residuals.find( name );

    if ( it == rep.residuals.end() )
        return "";

    std::ostringstream  os;

    os.precision( 16 );
    os << it->second.value;
    return os.str();
}

std::string
work_field ( const RunReport & rep, const std::string & name )
{
    const auto  it = rep.work.find( name );

    return ( it == rep.work.end() ? "" : it->second );
}

}// namespace

std::string
bench_csv_row ( const RunReport & rep )
{
    std::ostringstream  os;

    os.precision( 16 );
    os << rep.spec.n << ',' << rep.spec.rho << ','
       << to_string( rep.spec.adm ) << ',' << rep.spec.adm.eta << ','
       << rep.spec.k << ',' << rep.spec.eps << ','
       << to_string( rep.spec.generator ) << ',' << rep.spec.seed << ','
       << rep.spec.shift << ','
       << rep.depth << ',' << rep.csp << ',' << rep.khat << ','
       << flop_field( rep, "compress" ) << ','
       << flop_field( rep, "addmul" ) << ','
       << flop_field( rep, "lrdecomp" ) << ','
       << flop_field( rep, "linvert" ) << ','
       << flop_field( rep, "rinvert" ) << ','
       << flop_field( rep, "lrinvert" ) << ','
       << flop_field( rep, "invert_inplace" ) << ','
       << work_field( rep, "w_mm_root" ) << ','
       << work_field( rep, "mm_bound_root" ) << ','
       << rep.mm_bound_ratio << ','
       << resid_field( rep, "factorization" ) << ','
       << resid_field( rep, "inverse" ) << ','
       << resid_field( rep, "inplace_agreement" ) << ','
       << rep.model_checks.total_violations() << ','
       << rep.status;

    return os.str();
}

std::string
run_bench ( const std::vector<ProblemSpec> & grid, const VerifyOptions & opts )
{
    std::ostringstream  os;

    os << bench_csv_header() << '\n';

    for ( const auto & spec : grid )
        os << bench_csv_row( run_verify( spec, opts ) ) << '\n';

    return os.str();
}

nlohmann::json
run_bench_json ( const std::vector<ProblemSpec> & grid, const VerifyOptions & opts )
{
    nlohmann::json  rows = nlohmann::json::array();

    for ( const auto & spec : grid )
        rows.push_back( run_verify( spec, opts ).to_json() );

    return nlohmann::json{ { "schema_version", 1 }, { "runs", rows } };
}

}// namespace hmlr
