#pragma once
//
// Project     : hmlr
// File        : harness.hpp
// Description : verification and benchmark drivers
//

#include <hmlr/generators.hpp>
#include <hmlr/triangular.hpp>
#include <hmlr/work_model.hpp>

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace hmlr {

struct VerifyOptions
{
    bool           with_dense_oracle = true;
    WorkConstants  consts{};
    double         pivot_tol = default_pivot_tol;
};

struct ResidualEntry
{
    double       value = 0.0;
    std::string  oracle;
};

struct Domination
{
    std::string   name;
    std::int64_t  measured = 0;
    wide          bound    = 0;
    bool          ok       = false;
};

//
// everything one verification run produces: tree statistics, per-phase
// operation counts, dense-oracle residuals, work-model values, the
// flop-vs-model dominations and the lemma/theorem checks
//
struct RunReport
{
    ProblemSpec  spec;

    int    depth = 0, clusters = 0, blocks = 0;
    int    adm_leaves = 0, inadm_leaves = 0, csp = 0;
    Index  khat = 0;

    std::map<std::string, std::int64_t>    flops;
    std::map<std::string, std::string>     work;       // exact W values as strings
    double                                 mm_bound_ratio = 0.0;
    std::map<std::string, ResidualEntry>   residuals;
    std::vector<Domination>                dominations;
    VerifyReport                           model_checks;
    std::map<std::string, double>          timings_ms;

    std::string  status = "ok";
    std::string  error;

    bool  all_passed () const;

    nlohmann::json  to_json ( bool with_timings = true ) const;
};

RunReport run_verify ( const ProblemSpec & spec, const VerifyOptions & opts = {} );

std::string  bench_csv_header ();
std::string  bench_csv_row ( const RunReport & rep );

// one CSV row per spec; failures are recorded in the row, the run continues
std::string  run_bench ( const std::vector<ProblemSpec> & grid, const VerifyOptions & opts = {} );

nlohmann::json  run_bench_json ( const std::vector<ProblemSpec> & grid, const VerifyOptions & opts = {} );

}// namespace hmlr
