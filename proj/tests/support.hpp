#pragma once

#include "ticksynth/ilp.hpp"
#include "ticksynth/io.hpp"
#include "ticksynth/logic.hpp"
#include "ticksynth/tdes.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace ticksynth::testing
{

inline std::string fixture( const std::string& name ) { return std::string( TICKSYNTH_FIXTURE_DIR ) + "/" + name; }

inline untimed_des fig1() { return io::load_system( fixture( "fig1.json" ) ); }

inline const std::vector< std::string > pi1_events{ "move14", "tick", "reach14", "move41", "tick", "tick",
                                                    "reach41", "move12", "tick", "tick", "reach12" };
inline const std::vector< std::string > pi2_events{ "tick",    "move14", "tick",   "reach14", "move43",
                                                    "tick",    "reach43", "move32", "tick" };

inline const char* const phi1_text = "F[1,5] ap2 & F[1,5] ap4";
inline const char* const phi2_text = "!ap2 U[3,5] ap3";

inline std::vector< event_id > event_ids( const timed_system& sys, const std::vector< std::string >& names )
{
    std::vector< event_id > out;
    for ( const auto& n : names )
        out.push_back( sys.event( n ) );
    return out;
}

// The two-letter trace a,tick,a,sigma,b,tick,a used to illustrate counting.
// Activity 0 is labeled a, activity 1 is labeled b; sigma is event 0.
struct sample_trace
{
    labeling labels{ { "a", "b" }, { { true, false }, { false, true } } };
    fragment f{ { { 0, {} }, { 0, {} }, { 1, {} }, { 0, {} } }, { event_id::tick, make_event( 0 ), event_id::tick } };
};

// Plain trace: label sets per position and a tick flag per event.
struct trace
{
    std::vector< std::set< std::string > > labels; // positions 0..H
    std::vector< bool > ticks;                     // events 1..H at index 0..H-1
};

inline trace to_trace( const fragment_view& f, const labeling& l )
{
    trace t;
    for ( const auto& s : f.states() )
    {
        std::set< std::string > here;
        for ( std::size_t a = 0; a < l.atoms().size(); ++a )
            if ( l.holds( s, a ) )
                here.insert( l.atoms()[ a ] );
        t.labels.push_back( std::move( here ) );
    }
    for ( auto e : f.events() )
        t.ticks.push_back( is_tick( e ) );
    return t;
}

inline std::size_t reference_count( const trace& t, std::size_t k, std::size_t j )
{
    std::size_t c = 0;
    for ( auto i = k + 1; i <= j; ++i )
        c += t.ticks[ i - 1 ] ? 1 : 0;
    return c;
}

// Direct recursion on the formula tree, no memo, no subformula table.
inline bool reference_holds( const trace& t, const formula& phi, std::size_t k )
{
    switch ( phi.kind() )
    {
    case formula_kind::truth:
        return true;
    case formula_kind::atom:
        return t.labels[ k ].count( phi.atom_name() ) > 0;
    case formula_kind::negation:
        return !reference_holds( t, phi.lhs(), k );
    case formula_kind::conjunction:
        return reference_holds( t, phi.lhs(), k ) && reference_holds( t, phi.rhs(), k );
    case formula_kind::disjunction:
        return reference_holds( t, phi.lhs(), k ) || reference_holds( t, phi.rhs(), k );
    case formula_kind::until:
    {
        auto horizon = t.ticks.size();
        for ( auto j = k; j <= horizon; ++j )
        {
            auto c = reference_count( t, k, j );
            if ( c < phi.lower() || c > phi.upper() || !reference_holds( t, phi.rhs(), j ) )
                continue;
            bool prefix = true;
            for ( auto i = k; i < j && prefix; ++i )
                prefix = reference_holds( t, phi.lhs(), i );
            if ( prefix )
                return true;
        }
        return false;
    }
    }
    return false;
}

// Random systems: up to `max_states` activity states, one to three events,
// timing bounds up to `max_bound`, atoms a and b.
inline untimed_des random_system( std::mt19937& rng, std::size_t max_states = 5, int max_bound = 2 )
{
    auto pick = [ & ]( int lo, int hi ) { return std::uniform_int_distribution< int >( lo, hi )( rng ); };
    untimed_des des;
    auto n = static_cast< std::size_t >( pick( 1, static_cast< int >( max_states ) ) );
    for ( std::size_t i = 0; i < n; ++i )
        des.states.push_back( "s" + std::to_string( i ) );
    des.initial = "s0";
    auto m = pick( 1, 3 );
    for ( int e = 0; e < m; ++e )
    {
        auto name = "e" + std::to_string( e );
        des.events.push_back( name );
        auto lower = pick( 0, max_bound );
        if ( pick( 0, 1 ) == 0 )
            des.timing[ name ] = event_timing::prospective( lower, pick( lower, max_bound ) );
        else
            des.timing[ name ] = event_timing::remote( lower );
    }
    for ( const auto& s : des.states )
        for ( const auto& e : des.events )
            if ( pick( 0, 99 ) < 55 )
                des.transitions.push_back( { s, e, des.states[ static_cast< std::size_t >( pick( 0, static_cast< int >( n ) - 1 ) ) ] } );
    des.atoms = { "a", "b" };
    for ( const auto& s : des.states )
    {
        std::vector< std::string > l;
        if ( pick( 0, 1 ) )
            l.push_back( "a" );
        if ( pick( 0, 1 ) )
            l.push_back( "b" );
        des.labels[ s ] = l;
    }
    return des;
}

// Random formulas over `atoms` with nesting depth at most `depth` and until
// bounds drawn from [0, max_bound].
inline formula random_formula( std::mt19937& rng, std::size_t depth, const std::vector< std::string >& atoms,
                               int max_bound )
{
    auto pick = [ & ]( int lo, int hi ) { return std::uniform_int_distribution< int >( lo, hi )( rng ); };
    if ( depth == 0 || pick( 0, 4 ) == 0 )
    {
        if ( pick( 0, 7 ) == 0 )
            return formula::truth();
        return formula::atom( atoms[ static_cast< std::size_t >( pick( 0, static_cast< int >( atoms.size() ) - 1 ) ) ] );
    }
    auto sub = [ & ] { return random_formula( rng, depth - 1, atoms, max_bound ); };
    switch ( pick( 0, 4 ) )
    {
    case 0:
        return formula::negation( sub() );
    case 1:
    {
        auto lhs = sub();
        return formula::conjunction( std::move( lhs ), sub() );
    }
    case 2:
    {
        auto lhs = sub();
        return formula::disjunction( std::move( lhs ), sub() );
    }
    default:
    {
        auto lower = pick( 0, max_bound );
        auto upper = pick( lower, max_bound );
        auto lhs = sub();
        return formula::until( std::move( lhs ), sub(), lower, upper );
    }
    }
}

// Uniform random walk of `horizon` steps through g. Returns TDES indices.
inline std::pair< std::vector< std::size_t >, std::vector< event_id > > random_walk( std::mt19937& rng,
                                                                                     const timed_des& g,
                                                                                     std::size_t horizon )
{
    std::vector< std::size_t > path{ g.initial() };
    std::vector< event_id > events;
    for ( std::size_t k = 0; k < horizon; ++k )
    {
        auto edges = g.edges( path.back() );
        const auto& e = edges[ std::uniform_int_distribution< std::size_t >( 0, edges.size() - 1 )( rng ) ];
        path.push_back( e.target );
        events.push_back( e.event );
    }
    return { path, events };
}

inline fragment to_fragment( const timed_des& g, const std::vector< std::size_t >& path,
                             const std::vector< event_id >& events )
{
    std::vector< timed_state > states;
    for ( auto i : path )
        states.push_back( g.state( i ) );
    return { std::move( states ), events };
}

// Random pure 0/1 model with `vars` variables and a handful of sparse rows.
inline ilp::model random_binary_model( std::mt19937& rng, std::size_t vars )
{
    auto pick = [ & ]( int lo, int hi ) { return std::uniform_int_distribution< int >( lo, hi )( rng ); };
    ilp::model m;
    for ( std::size_t v = 0; v < vars; ++v )
        m.add_binary( "x" + std::to_string( v ) );
    auto rows = pick( 1, static_cast< int >( vars ) + 4 );
    for ( int r = 0; r < rows; ++r )
    {
        ilp::linear_constraint c;
        auto width = pick( 1, std::min( 6, static_cast< int >( vars ) ) );
        std::int64_t reach = 0;
        for ( int t = 0; t < width; ++t )
        {
            auto coef = pick( -3, 3 );
            if ( coef == 0 )
                coef = 1;
            c.terms.push_back( { coef, static_cast< ilp::var_index >( pick( 0, static_cast< int >( vars ) - 1 ) ) } );
            reach += std::abs( coef );
        }
        c.cmp = static_cast< ilp::comparator >( pick( 0, 2 ) );
        c.rhs = pick( -static_cast< int >( reach ) / 2, static_cast< int >( reach ) / 2 + 1 );
        if ( c.cmp == ilp::comparator::equal && pick( 0, 1 ) )
            c.cmp = ilp::comparator::less_equal;
        m.add_constraint( std::move( c ) );
    }
    return m;
}

// Exhaustive search over every integer point within the variable bounds.
// Evaluates the constraints as added, never the solver's rows.
inline std::optional< ilp::assignment > enumerate_model( const ilp::model& m )
{
    auto holds = [ & ]( const ilp::assignment& a ) {
        for ( const auto& c : m.constraints() )
        {
            std::int64_t lhs = 0;
            for ( const auto& t : c.terms )
                lhs += t.coefficient * a.values[ t.var ];
            bool ok = c.cmp == ilp::comparator::less_equal      ? lhs <= c.rhs
                      : c.cmp == ilp::comparator::greater_equal ? lhs >= c.rhs
                                                                : lhs == c.rhs;
            if ( !ok )
                return false;
        }
        return true;
    };
    ilp::assignment a;
    for ( const auto& v : m.variables() )
        a.values.push_back( v.lower );
    while ( true )
    {
        if ( holds( a ) )
            return a;
        std::size_t i = 0;
        while ( i < a.values.size() && a.values[ i ] == m.variables()[ i ].upper )
        {
            a.values[ i ] = m.variables()[ i ].lower;
            ++i;
        }
        if ( i == a.values.size() )
            return std::nullopt;
        ++a.values[ i ];
    }
}

} // namespace ticksynth::testing
