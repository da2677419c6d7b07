#include "cli.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <sstream>

using namespace ticksynth;
using namespace ticksynth::testing;

namespace
{

struct outcome
{
    int code;
    std::string out;
    std::string err;
};

outcome run( std::vector< std::string > args )
{
    std::ostringstream out, err;
    int code = cli::run( args, out, err );
    return { code, out.str(), err.str() };
}

const std::string fig1_path = fixture( "fig1.json" );

} // namespace

TEST( cli, synth_phi1 )
{
    auto r = run( { "synth", "--system", fig1_path, "--formula", phi1_text, "--hmin", "5", "--hmax", "15" } );
    EXPECT_EQ( r.code, cli::exit_found ) << r.err;
    EXPECT_NE( r.out.find( "found: horizon 11" ), std::string::npos ) << r.out;
    EXPECT_EQ( r.out.find( "wall time" ), std::string::npos );
}

TEST( cli, synth_phi2_not_found_below_minimum )
{
    auto r = run( { "synth", "--system", fig1_path, "--formula", phi2_text, "--hmin", "5", "--hmax", "6" } );
    EXPECT_EQ( r.code, cli::exit_not_found );
    EXPECT_NE( r.out.find( "not found" ), std::string::npos );
    auto nine = run( { "synth", "--system", fig1_path, "--formula", phi2_text, "--hmax", "9" } );
    EXPECT_EQ( nine.code, cli::exit_found );
    EXPECT_NE( nine.out.find( "found: horizon 7" ), std::string::npos );
}

TEST( cli, synth_json )
{
    auto r = run( { "synth", "-s", fig1_path, "-f", phi1_text, "--hmin", "5", "--hmax", "15", "--format", "json" } );
    ASSERT_EQ( r.code, 0 );
    auto doc = nlohmann::json::parse( r.out );
    EXPECT_TRUE( doc[ "found" ].get< bool >() );
    EXPECT_EQ( doc[ "horizon" ], 11 );
    EXPECT_EQ( doc[ "fragment" ][ "events" ].size(), 11u );
    EXPECT_TRUE( doc[ "stats" ].contains( "solver_nodes" ) );
    EXPECT_FALSE( doc[ "stats" ].contains( "wall_time_ms" ) );
}

TEST( cli, synth_dot )
{
    auto r = run( { "synth", "-s", fig1_path, "-f", "F[1,2] ap4", "--hmax", "5", "--format", "dot" } );
    ASSERT_EQ( r.code, 0 );
    EXPECT_NE( r.out.find( "color=red" ), std::string::npos );
}

TEST( cli, output_is_repeatable )
{
    std::vector< std::string > args{ "synth", "-s", fig1_path, "-f", phi2_text, "--hmax", "12", "--format", "json" };
    auto a = run( args );
    auto b = run( args );
    EXPECT_EQ( a.out, b.out );
    auto w = run( { "synth", "-s", fig1_path, "-f", phi2_text, "--hmax", "12", "--format", "json", "--workers", "3" } );
    EXPECT_EQ( nlohmann::json::parse( a.out )[ "fragment" ], nlohmann::json::parse( w.out )[ "fragment" ] );
}

TEST( cli, timing_flag )
{
    auto r = run( { "synth", "-s", fig1_path, "-f", "ap1", "--timing" } );
    EXPECT_NE( r.out.find( "wall time" ), std::string::npos );
}

TEST( cli, check_bundled_fragments )
{
    auto pi1 = run( { "check", "--fragment", fixture( "pi1.json" ), "--formula", "F[1,5] ap4" } );
    EXPECT_EQ( pi1.code, 0 ) << pi1.err;
    EXPECT_NE( pi1.out.find( "\nsatisfied" ), std::string::npos );
    EXPECT_EQ( run( { "check", "--fragment", fixture( "pi1.json" ), "--formula", phi1_text } ).code, 0 );
    EXPECT_EQ( run( { "check", "--fragment", fixture( "pi2.json" ), "--formula", phi2_text } ).code, 0 );
    auto miss = run( { "check", "--fragment", fixture( "pi2.json" ), "--formula", phi1_text, "--format", "json" } );
    EXPECT_EQ( miss.code, 1 );
    EXPECT_FALSE( nlohmann::json::parse( miss.out )[ "satisfied" ].get< bool >() );
}

TEST( cli, build )
{
    auto r = run( { "build", "--system", fig1_path } );
    EXPECT_EQ( r.code, 0 );
    EXPECT_NE( r.out.find( "timed states: 28" ), std::string::npos ) << r.out;
    auto act = run( { "build", "--system", fig1_path, "--format", "dot", "--graph", "act" } );
    EXPECT_NE( act.out.find( "digraph G_act" ), std::string::npos );
    auto json = run( { "build", "--system", fig1_path, "--format", "json" } );
    EXPECT_EQ( nlohmann::json::parse( json.out )[ "timed_states" ], 28 );
}

TEST( cli, oracle )
{
    auto r = run( { "oracle", "-s", fig1_path, "-f", phi2_text, "--hmin", "6", "--hmax", "6" } );
    EXPECT_EQ( r.code, 1 );
    auto found = run( { "oracle", "-s", fig1_path, "-f", phi2_text, "--hmax", "8" } );
    EXPECT_EQ( found.code, 0 );
    EXPECT_NE( found.out.find( "found: horizon 7" ), std::string::npos );
    auto budget = run( { "oracle", "-s", fig1_path, "-f", "false", "--hmin", "9", "--hmax", "9", "--budget", "10" } );
    EXPECT_EQ( budget.code, 2 );
    EXPECT_NE( budget.err.find( "budget" ), std::string::npos );
}

TEST( cli, dump_ilp )
{
    auto r = run( { "dump-ilp", "-s", fig1_path, "-f", phi2_text, "--horizon", "3" } );
    EXPECT_EQ( r.code, 0 );
    for ( const char* part : { "Subject To", "w[3][", "ze[2]", "exact", "End" } )
        EXPECT_NE( r.out.find( part ), std::string::npos ) << part;
    auto paper = run( { "dump-ilp", "-s", fig1_path, "-f", phi2_text, "-H", "3", "--mode", "paper" } );
    EXPECT_NE( paper.out.find( "paper" ), std::string::npos );
}

TEST( cli, usage_errors )
{
    EXPECT_EQ( run( {} ).code, cli::exit_error );
    EXPECT_EQ( run( { "fly" } ).code, cli::exit_error );
    EXPECT_EQ( run( { "synth", "--system", fig1_path } ).code, cli::exit_error );
    EXPECT_EQ( run( { "synth", "--system", fig1_path, "-f", "ap1", "--hmin", "4", "--hmax", "2" } ).code, cli::exit_error );
    EXPECT_EQ( run( { "synth", "--system", fig1_path, "-f", "ap1", "--mode", "fast" } ).code, cli::exit_error );
    EXPECT_EQ( run( { "synth", "--system", fig1_path, "-f", "ap1", "--hmax", "0" } ).code, cli::exit_error );
    EXPECT_EQ( run( { "synth", "--system", "/nonexistent.json", "-f", "ap1" } ).code, cli::exit_error );
    EXPECT_EQ( run( { "check", "--fragment", fixture( "pi1.json" ), "-f", "ap1", "--format", "dot" } ).code,
               cli::exit_error );
    EXPECT_EQ( run( { "--help" } ).code, 0 );
}

TEST( cli, input_errors_have_context )
{
    auto bad_formula = run( { "synth", "-s", fig1_path, "-f", "ap1 &" } );
    EXPECT_EQ( bad_formula.code, 2 );
    EXPECT_NE( bad_formula.err.find( "position" ), std::string::npos ) << bad_formula.err;
    auto bad_atom = run( { "synth", "-s", fig1_path, "-f", "ap9" } );
    EXPECT_EQ( bad_atom.code, 2 );
    EXPECT_NE( bad_atom.err.find( "ap9" ), std::string::npos );
    auto cap = run( { "build", "-s", fig1_path, "--state-cap", "3" } );
    EXPECT_EQ( cap.code, 2 );
    EXPECT_NE( cap.err.find( "cap" ), std::string::npos );
    auto not_json = run( { "build", "-s", fixture( "pi1.json" ) } );
    EXPECT_EQ( not_json.code, 2 );
    EXPECT_NE( not_json.err.find( "pi1.json" ), std::string::npos ) << not_json.err;
}
