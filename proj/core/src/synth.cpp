#include "ticksynth/synth.hpp"

#include <algorithm>
#include <future>

namespace ticksynth
{

namespace
{

void check_range( std::size_t horizon_min, std::size_t horizon_max )
{
    if ( horizon_min < 1 || horizon_min > horizon_max )
        throw std::invalid_argument( "horizon range needs 1 <= min <= max, got " + std::to_string( horizon_min ) + ".."
                                     + std::to_string( horizon_max ) );
}

struct attempt
{
    std::optional< fragment > witness;
    std::size_t variables = 0;
    std::size_t constraints = 0;
    std::uint64_t nodes = 0;
    std::size_t exact_retries = 0;
};

attempt solve_exact( const timed_des& g, const formula& phi, std::size_t horizon )
{
    auto enc = encode( g, phi, horizon, tick_mode::exact );
    auto result = ilp::solve( enc.model );
    attempt out{ std::nullopt, enc.model.var_count(), enc.model.constraint_count(), result.stats.nodes, 0 };
    if ( result.solution )
    {
        try
        {
            out.witness = decode( enc, *result.solution, g );
        }
        catch ( const decode_error& e )
        {
            throw std::logic_error( std::string( "exact encoding produced an uncertifiable fragment: " ) + e.what() );
        }
    }
    return out;
}

attempt solve_horizon( const timed_des& g, const formula& phi, std::size_t horizon, tick_mode mode )
{
    if ( mode == tick_mode::exact )
        return solve_exact( g, phi, horizon );

    auto enc = encode( g, phi, horizon, tick_mode::paper );
    auto result = ilp::solve( enc.model );
    attempt out{ std::nullopt, enc.model.var_count(), enc.model.constraint_count(), result.stats.nodes, 0 };
    if ( !result.solution )
        return out;
    try
    {
        out.witness = decode( enc, *result.solution, g );
        return out;
    }
    catch ( const decode_error& )
    {
        auto retry = solve_exact( g, phi, horizon );
        retry.nodes += out.nodes;
        retry.exact_retries = 1;
        return retry;
    }
}

} // namespace

synthesis_result synthesize( const timed_des& g, const formula& phi, std::size_t horizon_min, std::size_t horizon_max,
                             tick_mode mode, std::size_t workers )
{
    check_range( horizon_min, horizon_max );
    auto started = std::chrono::steady_clock::now();
    workers = std::max< std::size_t >( workers, 1 );

    synthesis_result out;
    out.horizon = horizon_max;
    auto absorb = [ & ]( attempt& a, std::size_t horizon ) {
        out.stats.variables = a.variables;
        out.stats.constraints = a.constraints;
        out.stats.solver_nodes += a.nodes;
        out.stats.exact_retries += a.exact_retries;
        ++out.stats.horizons_tried;
        if ( a.witness )
        {
            out.witness = std::move( a.witness );
            out.horizon = horizon;
            return true;
        }
        return false;
    };

    for ( std::size_t h = horizon_min; h <= horizon_max; h += workers )
    {
        auto last = std::min( horizon_max, h + workers - 1 );
        if ( workers == 1 )
        {
            auto a = solve_horizon( g, phi, h, mode );
            if ( absorb( a, h ) )
                break;
            continue;
        }
        std::vector< std::future< attempt > > batch;
        for ( auto k = h; k <= last; ++k )
            batch.push_back( std::async( std::launch::async, [ &, k ] { return solve_horizon( g, phi, k, mode ); } ) );
        bool done = false;
        for ( std::size_t i = 0; i < batch.size(); ++i )
        {
            auto a = batch[ i ].get();
            if ( !done && absorb( a, h + i ) )
                done = true;
        }
        if ( done )
            break;
    }
    out.stats.wall_time = std::chrono::duration_cast< std::chrono::milliseconds >( std::chrono::steady_clock::now() - started );
    return out;
}

synthesis_result synthesize( const synthesis_request& request )
{
    check_range( request.horizon_min, request.horizon_max );
    auto g = build_tdes( timed_system( request.system ), request.state_cap );
    return synthesize( g, request.phi, request.horizon_min, request.horizon_max, request.mode, request.workers );
}

std::uint64_t enumerate_fragments( const timed_des& g, std::size_t horizon, const fragment_visitor& visit,
                                   std::uint64_t budget )
{
    // Outgoing edges in event-name order, independent of how g was built.
    std::vector< std::vector< timed_edge > > ordered( g.size() );
    for ( std::size_t i = 0; i < g.size(); ++i )
    {
        ordered[ i ].assign( g.edges( i ).begin(), g.edges( i ).end() );
        std::ranges::sort( ordered[ i ], [ & ]( const timed_edge& a, const timed_edge& b ) {
            return g.event_name( a.event ) < g.event_name( b.event );
        } );
    }

    std::vector< std::size_t > states{ g.initial() };
    std::vector< event_id > events;
    std::vector< std::size_t > next_edge{ 0 };
    std::uint64_t nodes = 0;

    while ( !next_edge.empty() )
    {
        if ( events.size() == horizon )
        {
            if ( !visit( states, events ) )
                return nodes;
            next_edge.pop_back();
            states.pop_back();
            if ( !events.empty() )
                events.pop_back();
            continue;
        }
        auto here = states.back();
        auto& cursor = next_edge.back();
        if ( cursor == ordered[ here ].size() )
        {
            next_edge.pop_back();
            states.pop_back();
            if ( !events.empty() )
                events.pop_back();
            continue;
        }
        if ( ++nodes > budget )
            throw budget_exceeded( "oracle budget of " + std::to_string( budget ) + " search nodes exceeded" );
        const auto& edge = ordered[ here ][ cursor++ ];
        states.push_back( edge.target );
        events.push_back( edge.event );
        next_edge.push_back( 0 );
    }
    return nodes;
}

synthesis_result oracle_synthesize( const timed_des& g, const formula& phi, std::size_t horizon_min,
                                    std::size_t horizon_max, std::uint64_t budget )
{
    check_range( horizon_min, horizon_max );
    auto started = std::chrono::steady_clock::now();
    subformula_table table( phi );
    for ( const auto& entry : table.entries() )
        if ( entry.kind == formula_kind::atom && !g.labels().atom_index( entry.atom ) )
            throw evaluation_error( "atom '" + entry.atom + "' is not an atomic proposition of the system" );

    synthesis_result out;
    out.horizon = horizon_max;
    for ( auto h = horizon_min; h <= horizon_max && !out.found(); ++h )
    {
        ++out.stats.horizons_tried;
        out.stats.solver_nodes += enumerate_fragments(
            g, h,
            [ & ]( std::span< const std::size_t > path, std::span< const event_id > events ) {
                std::vector< timed_state > states;
                states.reserve( path.size() );
                for ( auto i : path )
                    states.push_back( g.state( i ) );
                fragment f( std::move( states ), { events.begin(), events.end() } );
                evaluator ev( table, f, g.labels() );
                if ( !ev.holds_root( 0 ) )
                    return true;
                out.witness = std::move( f );
                out.horizon = h;
                return false;
            },
            budget );
    }
    out.stats.wall_time = std::chrono::duration_cast< std::chrono::milliseconds >( std::chrono::steady_clock::now() - started );
    return out;
}

synthesis_result oracle_synthesize( const synthesis_request& request, std::uint64_t budget )
{
    check_range( request.horizon_min, request.horizon_max );
    auto g = build_tdes( timed_system( request.system ), request.state_cap );
    return oracle_synthesize( g, request.phi, request.horizon_min, request.horizon_max, budget );
}

} // namespace ticksynth
