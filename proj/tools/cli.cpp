#include "cli.hpp"

#include "ticksynth/encode.hpp"
#include "ticksynth/io.hpp"
#include "ticksynth/logic.hpp"
#include "ticksynth/synth.hpp"
#include "ticksynth/tdes.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace ticksynth::cli
{

namespace
{

using nlohmann::json;

class usage_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct run_config
{
    std::string subcommand;
    std::string system_path;
    std::string formula_text;
    std::string formula_path;
    std::string fragment_path;
    std::size_t horizon_min = 1;
    std::size_t horizon_max = 1;
    std::size_t horizon = 1;
    std::string mode = "exact";
    std::string format = "text";
    std::string graph = "tdes";
    std::size_t state_cap = default_state_cap;
    std::size_t workers = 1;
    std::uint64_t budget = default_oracle_budget;
    bool timing = false;
};

std::string read_text( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw io::input_error( path + ": cannot open file" );
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto text = buffer.str();
    while ( !text.empty() && ( text.back() == '\n' || text.back() == '\r' ) )
        text.pop_back();
    return text;
}

formula load_formula( const run_config& cfg )
{
    auto text = cfg.formula_path.empty() ? cfg.formula_text : read_text( cfg.formula_path );
    try
    {
        return parse_formula( text );
    }
    catch ( const parse_error& e )
    {
        auto source = cfg.formula_path.empty() ? std::string( "--formula" ) : cfg.formula_path;
        throw io::input_error( source + ": " + e.what() );
    }
}

timed_system load_system( const std::string& path )
{
    auto des = io::load_system( path );
    auto diagnostics = validate( des );
    if ( has_errors( diagnostics ) )
    {
        std::string msg = path + ": invalid system";
        for ( const auto& d : diagnostics )
            if ( d.level == severity::error )
                msg += "\n  " + d.invariant + " (" + d.element + "): " + d.message;
        throw io::input_error( msg );
    }
    return timed_system( des );
}

std::string fragment_line( const timed_system& sys, const fragment& f )
{
    std::string line = sys.activity_names()[ f.state( 0 ).activity ];
    for ( std::size_t k = 1; k <= f.horizon(); ++k )
        line += ", " + std::string( sys.event_name( f.event( k ) ) ) + ", " + sys.activity_names()[ f.state( k ).activity ];
    return line;
}

std::vector< std::size_t > tdes_path( const timed_des& g, const fragment& f )
{
    std::vector< std::size_t > path;
    for ( const auto& s : f.states() )
        path.push_back( g.find( s ).value() );
    return path;
}

json stats_json( const synthesis_stats& stats, bool timing )
{
    json j{ { "variables", stats.variables },
            { "constraints", stats.constraints },
            { "solver_nodes", stats.solver_nodes },
            { "horizons_tried", stats.horizons_tried },
            { "exact_retries", stats.exact_retries } };
    if ( timing )
        j[ "wall_time_ms" ] = stats.wall_time.count();
    return j;
}

void print_result( const run_config& cfg, const timed_system& sys, const timed_des& g, const synthesis_result& r,
                   bool from_oracle, std::ostream& out )
{
    if ( cfg.format == "dot" )
    {
        if ( r.found() )
        {
            auto path = tdes_path( g, *r.witness );
            io::write_dot( out, g, path, r.witness->events() );
        }
        else
            io::write_dot( out, g );
        return;
    }
    if ( cfg.format == "json" )
    {
        json j{ { "found", r.found() }, { "horizon", r.horizon } };
        if ( r.found() )
            j[ "fragment" ] = json::parse( io::fragment_to_json( sys, *r.witness ) );
        if ( from_oracle )
            j[ "search_nodes" ] = r.stats.solver_nodes;
        else
            j[ "stats" ] = stats_json( r.stats, cfg.timing );
        out << j.dump( 2 ) << "\n";
        return;
    }
    if ( r.found() )
    {
        out << "found: horizon " << r.horizon << "\n";
        out << "fragment: " << fragment_line( sys, *r.witness ) << "\n";
        out << "ticks: " << r.witness->count( 0, r.witness->horizon() ) << "\n";
    }
    else
        out << "not found: no fragment up to horizon " << r.horizon << "\n";
    if ( from_oracle )
        out << "search nodes: " << r.stats.solver_nodes << "\n";
    else
    {
        out << "variables: " << r.stats.variables << "\n";
        out << "constraints: " << r.stats.constraints << "\n";
        out << "solver nodes: " << r.stats.solver_nodes << "\n";
        out << "horizons tried: " << r.stats.horizons_tried << "\n";
        out << "exact retries: " << r.stats.exact_retries << "\n";
    }
    if ( cfg.timing )
        out << "wall time: " << r.stats.wall_time.count() << " ms\n";
}

int cmd_synth( const run_config& cfg, std::ostream& out )
{
    auto sys = load_system( cfg.system_path );
    auto phi = load_formula( cfg );
    auto g = build_tdes( sys, cfg.state_cap );
    auto mode = cfg.mode == "paper" ? tick_mode::paper : tick_mode::exact;
    auto r = synthesize( g, phi, cfg.horizon_min, cfg.horizon_max, mode, cfg.workers );
    print_result( cfg, sys, g, r, false, out );
    return r.found() ? exit_found : exit_not_found;
}

int cmd_oracle( const run_config& cfg, std::ostream& out )
{
    auto sys = load_system( cfg.system_path );
    auto phi = load_formula( cfg );
    auto g = build_tdes( sys, cfg.state_cap );
    auto r = oracle_synthesize( g, phi, cfg.horizon_min, cfg.horizon_max, cfg.budget );
    print_result( cfg, sys, g, r, true, out );
    return r.found() ? exit_found : exit_not_found;
}

int cmd_check( const run_config& cfg, std::ostream& out )
{
    auto doc = io::load_fragment( cfg.fragment_path );
    auto system_path = cfg.system_path;
    if ( system_path.empty() )
    {
        if ( !doc.system )
            throw usage_error( "check needs --system (the fragment file does not name one)" );
        system_path = *doc.system;
    }
    auto sys = load_system( system_path );
    auto phi = load_formula( cfg );
    auto f = io::resolve_fragment( sys, doc );
    bool ok = evaluate( f, phi, 0, sys.labels() );
    if ( cfg.format == "json" )
        out << json{ { "satisfied", ok }, { "horizon", f.horizon() }, { "ticks", f.count( 0, f.horizon() ) } }.dump( 2 )
            << "\n";
    else
    {
        out << "fragment: " << fragment_line( sys, f ) << "\n";
        out << "formula: " << to_string( phi ) << "\n";
        out << ( ok ? "satisfied" : "not satisfied" ) << "\n";
    }
    return ok ? exit_found : exit_not_found;
}

int cmd_build( const run_config& cfg, std::ostream& out )
{
    auto des = io::load_system( cfg.system_path );
    auto sys = load_system( cfg.system_path );
    auto g = build_tdes( sys, cfg.state_cap );
    if ( cfg.format == "dot" )
    {
        if ( cfg.graph == "act" )
            io::write_dot( out, des );
        else
            io::write_dot( out, g );
        return exit_found;
    }
    std::size_t ticks = 0;
    for ( std::size_t i = 0; i < g.size(); ++i )
        for ( const auto& e : g.edges( i ) )
            ticks += is_tick( e.event ) ? 1 : 0;
    if ( cfg.format == "json" )
    {
        out << json{ { "activity_states", sys.activity_names().size() },
                     { "events", sys.event_names().size() },
                     { "timed_states", g.size() },
                     { "transitions", g.transition_count() },
                     { "tick_transitions", ticks } }
                   .dump( 2 )
            << "\n";
        return exit_found;
    }
    auto diagnostics = validate( des );
    for ( const auto& d : diagnostics )
        out << "warning: " << d.invariant << " (" << d.element << "): " << d.message << "\n";
    out << "activity states: " << sys.activity_names().size() << "\n";
    out << "events: " << sys.event_names().size() << "\n";
    out << "timed states: " << g.size() << "\n";
    out << "transitions: " << g.transition_count() << " (" << ticks << " tick)\n";
    return exit_found;
}

int cmd_dump_ilp( const run_config& cfg, std::ostream& out )
{
    auto sys = load_system( cfg.system_path );
    auto phi = load_formula( cfg );
    auto g = build_tdes( sys, cfg.state_cap );
    auto mode = cfg.mode == "paper" ? tick_mode::paper : tick_mode::exact;
    auto enc = encode( g, phi, cfg.horizon, mode );
    out << "\\ formula: " << to_string( phi ) << "\n";
    out << "\\ horizon " << cfg.horizon << ", " << to_string( mode ) << " tick encoding, " << g.size()
        << " timed states, M = " << enc.big_m << "\n";
    out << "\\ counters are substituted: c(k,j) = ze[k+1] + ... + ze[j]\n";
    ilp::write_lp( out, enc.model );
    return exit_found;
}

} // namespace

int run( int argc, const char* const* argv, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "Bounded synthesis for timed discrete event systems under ticked LTL_f", "ticksynth" };
    app.require_subcommand( 1 );
    run_config cfg;

    const std::vector< std::string > modes{ "paper", "exact" };

    auto add_formula = [ & ]( CLI::App* sub ) {
        auto* text = sub->add_option( "--formula,-f", cfg.formula_text, "formula text" );
        auto* file = sub->add_option( "--formula-file", cfg.formula_path, "file holding the formula" )->check( CLI::ExistingFile );
        text->excludes( file );
        file->excludes( text );
        return std::make_pair( text, file );
    };
    auto add_range = [ & ]( CLI::App* sub ) {
        sub->add_option( "--hmin", cfg.horizon_min, "smallest horizon" )->check( CLI::PositiveNumber );
        sub->add_option( "--hmax", cfg.horizon_max, "largest horizon" )->check( CLI::PositiveNumber );
    };
    auto add_cap = [ & ]( CLI::App* sub ) {
        sub->add_option( "--state-cap", cfg.state_cap, "maximum number of timed states" )->check( CLI::PositiveNumber );
    };

    auto* synth = app.add_subcommand( "synth", "find a fragment satisfying a formula (ILP)" );
    synth->add_option( "--system,-s", cfg.system_path, "system JSON" )->required()->check( CLI::ExistingFile );
    auto synth_formula = add_formula( synth );
    add_range( synth );
    add_cap( synth );
    synth->add_option( "--mode", cfg.mode, "tick encoding" )->check( CLI::IsMember( modes ) );
    synth->add_option( "--format", cfg.format, "output format" )->check( CLI::IsMember( { "text", "json", "dot" } ) );
    synth->add_option( "--workers", cfg.workers, "horizons solved concurrently" )->check( CLI::PositiveNumber );
    synth->add_flag( "--timing", cfg.timing, "report wall time" );

    auto* check = app.add_subcommand( "check", "evaluate a fragment against a formula" );
    check->add_option( "--fragment", cfg.fragment_path, "fragment JSON" )->required()->check( CLI::ExistingFile );
    check->add_option( "--system,-s", cfg.system_path, "system JSON (default: the one named in the fragment)" )
        ->check( CLI::ExistingFile );
    auto check_formula = add_formula( check );
    check->add_option( "--format", cfg.format, "output format" )->check( CLI::IsMember( { "text", "json" } ) );

    auto* build = app.add_subcommand( "build", "construct the timed DES and report its size" );
    build->add_option( "--system,-s", cfg.system_path, "system JSON" )->required()->check( CLI::ExistingFile );
    add_cap( build );
    build->add_option( "--format", cfg.format, "output format" )->check( CLI::IsMember( { "text", "json", "dot" } ) );
    build->add_option( "--graph", cfg.graph, "graph for DOT output" )->check( CLI::IsMember( { "act", "tdes" } ) );

    auto* oracle = app.add_subcommand( "oracle", "find a fragment by exhaustive enumeration" );
    oracle->add_option( "--system,-s", cfg.system_path, "system JSON" )->required()->check( CLI::ExistingFile );
    auto oracle_formula = add_formula( oracle );
    add_range( oracle );
    add_cap( oracle );
    oracle->add_option( "--budget", cfg.budget, "search node budget" )->check( CLI::PositiveNumber );
    oracle->add_option( "--format", cfg.format, "output format" )->check( CLI::IsMember( { "text", "json", "dot" } ) );
    oracle->add_flag( "--timing", cfg.timing, "report wall time" );

    auto* dump = app.add_subcommand( "dump-ilp", "print the encoded model for one horizon" );
    dump->add_option( "--system,-s", cfg.system_path, "system JSON" )->required()->check( CLI::ExistingFile );
    auto dump_formula = add_formula( dump );
    dump->add_option( "--horizon,-H", cfg.horizon, "horizon" )->required()->check( CLI::PositiveNumber );
    add_cap( dump );
    dump->add_option( "--mode", cfg.mode, "tick encoding" )->check( CLI::IsMember( modes ) );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        int code = app.exit( e, out, err );
        return code == 0 ? 0 : exit_error;
    }

    try
    {
        auto* chosen = app.get_subcommands().front();
        cfg.subcommand = chosen->get_name();

        auto need_formula = [ & ]( std::pair< CLI::Option*, CLI::Option* > opts ) {
            if ( opts.first->count() == 0 && opts.second->count() == 0 )
                throw usage_error( "one of --formula or --formula-file is required" );
        };
        if ( cfg.subcommand == "synth" )
            need_formula( synth_formula );
        else if ( cfg.subcommand == "check" )
            need_formula( check_formula );
        else if ( cfg.subcommand == "oracle" )
            need_formula( oracle_formula );
        else if ( cfg.subcommand == "dump-ilp" )
            need_formula( dump_formula );

        if ( ( cfg.subcommand == "synth" || cfg.subcommand == "oracle" ) && cfg.horizon_min > cfg.horizon_max )
            throw usage_error( "--hmin must not exceed --hmax" );

        if ( cfg.subcommand == "synth" )
            return cmd_synth( cfg, out );
        if ( cfg.subcommand == "check" )
            return cmd_check( cfg, out );
        if ( cfg.subcommand == "build" )
            return cmd_build( cfg, out );
        if ( cfg.subcommand == "oracle" )
            return cmd_oracle( cfg, out );
        return cmd_dump_ilp( cfg, out );
    }
    catch ( const usage_error& e )
    {
        err << "usage error: " << e.what() << "\n";
    }
    catch ( const io::input_error& e )
    {
        err << "input error: " << e.what() << "\n";
    }
    catch ( const model_error& e )
    {
        err << "model error: " << e.what() << "\n";
    }
    catch ( const evaluation_error& e )
    {
        err << "formula error: " << e.what() << "\n";
    }
    catch ( const budget_exceeded& e )
    {
        err << "oracle error: " << e.what() << "\n";
    }
    return exit_error;
}

int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    std::vector< const char* > argv{ "ticksynth" };
    for ( const auto& a : args )
        argv.push_back( a.c_str() );
    return run( static_cast< int >( argv.size() ), argv.data(), out, err );
}

} // namespace ticksynth::cli
