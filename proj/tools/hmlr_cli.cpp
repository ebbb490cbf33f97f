//
// Project     : hmlr
// File        : hmlr_cli.cpp
// Description : command line driver: verify, bench and dump subcommands
//

#include <hmlr/harness.hpp>
#include <hmlr/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct CliOptions
{
    std::vector<hmlr::Index>  ns{ 64 };
    std::vector<hmlr::Index>  rhos{ 8 };
    std::vector<hmlr::Index>  ks{ 4 };
    std::string    adm       = "weak";
    double         eta       = 1.0;
    double         eps       = 0.0;
    std::string    generator = "logkernel";
    std::uint64_t  seed      = 1;
    double         shift     = 0.0;
    std::string    out;
    std::string    format    = "json";
    bool           dump_tree   = false;
    bool           dump_blocks = false;
};

void
add_problem_flags ( CLI::App * app, CliOptions & opt )
{
    app->add_option( "--n", opt.ns, "problem size(s)" )->delimiter( ',' );
    app->add_option( "--leaf-size", opt.rhos, "cluster tree leaf size(s)" )->delimiter( ',' );
    app->add_option( "--rank", opt.ks, "low-rank block rank bound(s)" )->delimiter( ',' );
    app->add_option( "--adm", opt.adm, "admissibility condition" )
        ->check( CLI::IsMember( { "weak", "eta" } ) );
    app->add_option( "--eta", opt.eta, "eta admissibility parameter" );
    app->add_option( "--eps", opt.eps, "truncation tolerance" );
    app->add_option( "--generator", opt.generator, "problem generator" )
        ->check( CLI::IsMember( { "identity", "logkernel", "diagdom", "randlowrank" } ) );
    app->add_option( "--seed", opt.seed, "random seed" );
    app->add_option( "--shift", opt.shift, "value added to the diagonal" );
    app->add_option( "--out", opt.out, "output path (default: stdout)" );
    app->add_option( "--format", opt.format, "report format" )
        ->check( CLI::IsMember( { "json", "csv" } ) );
}

hmlr::Admissibility
make_adm ( const CliOptions & opt )
{
    return ( opt.adm == "weak" ) ? hmlr::Admissibility::weak()
                                 : hmlr::Admissibility::eta_condition( opt.eta );
}

std::vector<hmlr::ProblemSpec>
make_grid ( const CliOptions & opt )
{
    std::vector<hmlr::ProblemSpec>  grid;

    for ( const auto n : opt.ns )
        for ( const auto rho : opt.rhos )
            for ( const auto k : opt.ks )
            {
                hmlr::ProblemSpec  spec;

                spec.n         = n;
                spec.rho       = rho;
                spec.adm       = make_adm( opt );
                spec.k         = k;
                spec.eps       = opt.eps;
                spec.generator = hmlr::generator_from_string( opt.generator );
                spec.seed      = opt.seed;
                spec.shift     = opt.shift;

                grid.push_back( spec );
            }

    return grid;
}

void
emit ( const std::string & text, const std::string & path )
{
    if ( path.empty() )
    {
        std::cout << text << std::endl;
        return;
    }

    std::ofstream  out( path );

    if ( ! out )
        throw hmlr::Error( "cannot open output file: " + path );
    out << text << std::endl;
}

int
cmd_verify ( const CliOptions & opt )
{
    const auto  grid = make_grid( opt );

    if ( grid.size() != 1 )
        throw hmlr::InvalidArgument( "verify expects a single parameter combination" );

    const auto  rep = hmlr::run_verify( grid.front() );

    if ( opt.format == "csv" )
        emit( hmlr::bench_csv_header() + "\n" + hmlr::bench_csv_row( rep ), opt.out );
    else
        emit( rep.to_json().dump( 2 ), opt.out );

    if ( rep.status != "ok" )
        return 2;
    return rep.all_passed() ? 0 : 1;
}

int
cmd_bench ( const CliOptions & opt )
{
    const auto  grid = make_grid( opt );

    if ( opt.format == "json" )
    {
        const auto  j = hmlr::run_bench_json( grid );

        emit( j.dump( 2 ), opt.out );

        for ( const auto & row : j[ "runs" ] )
            if ( row[ "status" ] != "ok" )
                return 1;
        return 0;
    }

    emit( hmlr::run_bench( grid ), opt.out );
    return 0;
}

int
cmd_dump ( const CliOptions & opt )
{
    const auto  grid = make_grid( opt );

    if ( grid.size() != 1 )
        throw hmlr::InvalidArgument( "dump expects a single parameter combination" );

    const auto &  spec = grid.front();
    const auto    ct   = hmlr::build_cluster_tree( spec.n, spec.rho );
    const auto    bt   = hmlr::build_block_tree( ct, spec.adm );

    if ( opt.dump_tree || opt.dump_blocks )
    {
        nlohmann::json  j;

        j[ "schema_version" ] = 1;
        if ( opt.dump_tree )
            j[ "cluster_tree" ] = hmlr::tree_to_json( ct );
        if ( opt.dump_blocks )
            j[ "block_tree" ] = hmlr::blocks_to_json( bt );

        emit( j.dump( 2 ), opt.out );
        return 0;
    }

    // binary dump of the compressed problem matrix
    if ( opt.out.empty() )
        throw hmlr::InvalidArgument( "dump without --dump-tree/--dump-blocks needs --out" );

    hmlr::FlopCounter  fc;
    const auto         m = hmlr::generate( spec );
    const auto         h = hmlr::from_dense( m, ct, bt, spec.k, spec.eps, fc );

    hmlr::write_hmatrix( h, spec, opt.out );
    return 0;
}

}// namespace

int
main ( int argc, char ** argv )
{
    CLI::App  app{ "hierarchical-matrix LR factorization with an exact work-count model" };

    app.require_subcommand( 1 );

    CliOptions  opt;

    auto *  verify = app.add_subcommand( "verify", "run accuracy and work-model checks" );
    auto *  bench  = app.add_subcommand( "bench", "run a parameter grid, emit one row per run" );
    auto *  dump   = app.add_subcommand( "dump", "dump trees as JSON or the compressed matrix as binary" );

    add_problem_flags( verify, opt );
    add_problem_flags( bench, opt );
    add_problem_flags( dump, opt );

    dump->add_flag( "--dump-tree", opt.dump_tree, "dump the cluster tree as JSON" );
    dump->add_flag( "--dump-blocks", opt.dump_blocks, "dump the block tree as JSON" );

    try
    {
        app.parse( argc, argv );

        if ( verify->parsed() ) return cmd_verify( opt );
        if ( bench->parsed() )  return cmd_bench( opt );
        if ( dump->parsed() )   return cmd_dump( opt );

        return 2;
    }
    catch ( const CLI::ParseError & e )
    {
        const int  rc = app.exit( e );

        return ( rc == 0 ? 0 : 2 );
    }
    catch ( const std::exception & e )
    {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
}
