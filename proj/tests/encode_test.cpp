#include "ticksynth/encode.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ticksynth;
using namespace ticksynth::testing;

namespace
{

struct fig1_fixture
{
    timed_system sys{ fig1() };
    timed_des g = build_tdes( sys );

    std::pair< std::vector< std::size_t >, std::vector< event_id > > path( const std::vector< std::string >& names ) const
    {
        auto events = event_ids( sys, names );
        auto f = replay( sys, events );
        std::vector< std::size_t > states;
        for ( const auto& s : f.states() )
            states.push_back( *g.find( s ) );
        return { states, events };
    }
};

timed_des single_tick_loop()
{
    untimed_des des;
    des.states = { "only" };
    des.initial = "only";
    des.atoms = { "p" };
    des.labels[ "only" ] = { "p" };
    return build_tdes( timed_system( des ) );
}

// a -go-> b with tick loops at both ends: the go step leaves a tick-enabled
// state and enters one that is reached by tick.
timed_des tick_and_event()
{
    untimed_des des;
    des.states = { "a", "b" };
    des.events = { "go" };
    des.transitions = { { "a", "go", "b" } };
    des.initial = "a";
    des.timing[ "go" ] = event_timing::remote( 0 );
    des.atoms = { "b" };
    des.labels[ "b" ] = { "b" };
    return build_tdes( timed_system( des ) );
}

} // namespace

TEST( encode_trajectory, sizes )
{
    fig1_fixture fx;
    const std::size_t horizon = 11;
    auto enc = encode_trajectory( fx.g, horizon );
    auto n = fx.g.size();
    EXPECT_EQ( enc.model.var_count(), ( horizon + 1 ) * n );
    EXPECT_EQ( enc.model.constraint_count(), horizon * n + ( horizon + 1 ) );
    EXPECT_EQ( enc.w.size(), horizon + 1 );
    EXPECT_EQ( enc.model.var( enc.w[ 0 ][ fx.g.initial() ] ).lower, 1 );
    for ( std::size_t i = 0; i < n; ++i )
        for ( std::size_t j = 0; j < n; ++j )
        {
            bool linked = false;
            for ( const auto& e : fx.g.edges( i ) )
                linked = linked || e.target == j;
            EXPECT_EQ( enc.adjacency[ i ][ j ], linked );
        }
}

TEST( encode_trajectory, single_state )
{
    auto g = single_tick_loop();
    auto enc = encode_trajectory( g, 3 );
    auto r = ilp::solve( enc.model );
    ASSERT_TRUE( r.feasible() );
    for ( std::size_t k = 0; k <= 3; ++k )
        EXPECT_EQ( ( *r.solution )[ enc.w[ k ][ 0 ] ], 1 );
}

TEST( encode_trajectory, solutions_are_walks )
{
    fig1_fixture fx;
    auto enc = encode( fx.g, parse_formula( "F[0,3] ap3" ), 6, tick_mode::exact );
    auto r = ilp::solve( enc.model );
    ASSERT_TRUE( r.feasible() );
    for ( std::size_t k = 0; k < 6; ++k )
    {
        std::size_t from = 0, to = 0;
        for ( std::size_t i = 0; i < fx.g.size(); ++i )
        {
            if ( ( *r.solution )[ enc.w[ k ][ i ] ] )
                from = i;
            if ( ( *r.solution )[ enc.w[ k + 1 ][ i ] ] )
                to = i;
        }
        EXPECT_TRUE( enc.adjacency[ from ][ to ] );
    }
}

TEST( encode_ticks, indicator_vectors )
{
    auto g = tick_and_event();
    auto enc = encode_trajectory( g, 2 );
    encode_ticks( g, enc );
    for ( std::size_t i = 0; i < g.size(); ++i )
    {
        EXPECT_EQ( enc.alpha[ i ], g.successor( i, event_id::tick ).has_value() );
        bool pred = false;
        for ( std::size_t j = 0; j < g.size(); ++j )
            pred = pred || g.successor( j, event_id::tick ) == i;
        EXPECT_EQ( enc.beta[ i ], pred );
    }
}

TEST( encode_ticks, tick_pair_forces_indicator )
{
    auto g = single_tick_loop();
    auto enc = encode_trajectory( g, 2 );
    encode_ticks( g, enc );
    auto r = ilp::solve( enc.model );
    ASSERT_TRUE( r.feasible() );
    EXPECT_EQ( ( *r.solution )[ enc.ze[ 1 ] ], 1 );
    EXPECT_EQ( ( *r.solution )[ enc.ze[ 2 ] ], 1 );
}

TEST( encode_ticks, paper_rows_overcount_pi1 )
{
    // Each reach step leaves a tick-enabled state and enters one with a tick
    // self-loop, so the paper rows count it as a tick: 5 ticks + 3 reaches.
    fig1_fixture fx;
    auto [ states, events ] = fx.path( pi1_events );
    auto enc = encode_trajectory( fx.g, 11 );
    encode_ticks( fx.g, enc );
    auto a = induced_assignment( enc, fx.g, states, events );
    std::int64_t ticks = 0;
    for ( std::size_t k = 1; k <= 11; ++k )
        ticks += a[ enc.ze[ k ] ];
    EXPECT_EQ( ticks, 5 );
    EXPECT_TRUE( ilp::first_violation( enc.model, a ) );

    std::int64_t forced = 0;
    for ( std::size_t k = 1; k <= 11; ++k )
    {
        bool on = enc.alpha[ states[ k - 1 ] ] && enc.beta[ states[ k ] ];
        a.values[ enc.ze[ k ] ] = on;
        forced += on;
    }
    EXPECT_EQ( forced, 8 );
    EXPECT_FALSE( ilp::first_violation( enc.model, a ) );
}

TEST( encode_edges, exact_ticks_on_pi1 )
{
    fig1_fixture fx;
    auto [ states, events ] = fx.path( pi1_events );
    auto enc = encode_trajectory( fx.g, 11 );
    encode_edges_exact( fx.g, enc );
    EXPECT_EQ( enc.edges.size(), fx.g.transition_count() );
    auto a = induced_assignment( enc, fx.g, states, events );
    EXPECT_FALSE( ilp::first_violation( enc.model, a ) );
    std::int64_t ticks = 0;
    for ( std::size_t k = 1; k <= 11; ++k )
        ticks += a[ enc.ze[ k ] ];
    EXPECT_EQ( ticks, 5 );
}

TEST( encode_formula, atom_at_initial_state )
{
    fig1_fixture fx;
    for ( const char* ap : { "ap1", "ap2", "ap3", "ap4" } )
    {
        auto enc = encode( fx.g, formula::atom( ap ), 1, tick_mode::exact );
        EXPECT_EQ( ilp::solve( enc.model ).feasible(), std::string( ap ) == "ap1" ) << ap;
    }
}

TEST( encode_formula, negation_rows )
{
    fig1_fixture fx;
    auto phi = parse_formula( "!(F[0,2] ap4)" );
    auto enc = encode( fx.g, phi, 5, tick_mode::exact );
    auto r = ilp::solve( enc.model );
    ASSERT_TRUE( r.feasible() );
    const auto& table = *enc.table;
    auto root = table.root();
    ASSERT_EQ( table[ root ].kind, formula_kind::negation );
    for ( std::size_t k = 0; k <= 5; ++k )
        EXPECT_EQ( ( *r.solution )[ enc.z[ root ][ k ] ] + ( *r.solution )[ enc.z[ table[ root ].left ][ k ] ], 1 );
}

TEST( encode_formula, unknown_atom )
{
    fig1_fixture fx;
    EXPECT_THROW( (void)encode( fx.g, formula::atom( "ap9" ), 2, tick_mode::exact ), evaluation_error );
}

TEST( encode_formula, shared_subformulas_encoded_once )
{
    fig1_fixture fx;
    auto enc = encode( fx.g, parse_formula( "F[0,2] ap4 & !F[0,2] ap4" ), 3, tick_mode::exact );
    EXPECT_EQ( enc.table->size(), 5u );
    EXPECT_EQ( enc.z.size(), 5u );
    EXPECT_FALSE( ilp::solve( enc.model ).feasible() );
}

TEST( encode_formula, size_bound )
{
    fig1_fixture fx;
    for ( std::size_t horizon : { 2u, 5u, 11u } )
    {
        auto phi = parse_formula( phi1_text );
        auto enc = encode( fx.g, phi, horizon, tick_mode::exact );
        auto n = fx.g.size();
        auto t = fx.g.transition_count();
        auto entries = enc.table->size();
        auto h = horizon + 1;
        EXPECT_LE( enc.model.var_count(), h * n + horizon * ( t + 1 ) + entries * h + 2 * 3 * h * h );
    }
}

TEST( encode_threshold, fixed_counter )
{
    ilp::model m;
    auto one = m.add_var( "one", 1, 1 );
    auto two = m.add_var( "two", 1, 1 );
    auto lo = m.add_binary( "lo" );
    auto hi = m.add_binary( "hi" );
    add_threshold_rows( m, { { 1, one }, { 1, two } }, 1, 3, 6, lo, hi );
    auto r = ilp::solve( m );
    ASSERT_TRUE( r.feasible() );
    EXPECT_EQ( ( *r.solution )[ lo ], 1 );
    EXPECT_EQ( ( *r.solution )[ hi ], 1 );
}

TEST( encode_threshold, bounds_must_fit_big_m )
{
    ilp::model m;
    auto lo = m.add_binary( "lo" );
    auto hi = m.add_binary( "hi" );
    EXPECT_THROW( add_threshold_rows( m, {}, 0, 4, 4, lo, hi ), std::invalid_argument );
    EXPECT_THROW( add_threshold_rows( m, {}, 5, 5, 4, lo, hi ), std::invalid_argument );
}

TEST( encode_threshold, bounds_past_horizon_are_clamped )
{
    fig1_fixture fx;
    auto enc = encode( fx.g, parse_formula( "F[0,40] ap2" ), 6, tick_mode::exact );
    EXPECT_TRUE( ilp::solve( enc.model ).feasible() );
    auto late = encode( fx.g, parse_formula( "F[7,40] ap2" ), 6, tick_mode::exact );
    EXPECT_FALSE( ilp::solve( late.model ).feasible() );
}

TEST( encode_root, trivially_true )
{
    fig1_fixture fx;
    auto enc = encode( fx.g, formula::truth(), 2, tick_mode::paper );
    EXPECT_TRUE( ilp::solve( enc.model ).feasible() );
}

TEST( encode_root, phi1_feasibility_by_horizon )
{
    fig1_fixture fx;
    auto phi = parse_formula( phi1_text );
    EXPECT_FALSE( ilp::solve( encode( fx.g, phi, 5, tick_mode::exact ).model ).feasible() );
    EXPECT_FALSE( ilp::solve( encode( fx.g, phi, 10, tick_mode::exact ).model ).feasible() );
    EXPECT_TRUE( ilp::solve( encode( fx.g, phi, 11, tick_mode::exact ).model ).feasible() );
}

TEST( encode_replay, induced_exact_assignment_is_feasible_and_matches_evaluation )
{
    fig1_fixture fx;
    for ( const auto* events : { &pi1_events, &pi2_events } )
    {
        auto [ states, ids ] = fx.path( *events );
        for ( const char* text : { phi1_text, phi2_text, "G[0,3] !ap3 | F[2,4] (ap1 & !ap2)" } )
        {
            auto phi = parse_formula( text );
            auto enc = encode_trajectory( fx.g, ids.size() );
            encode_edges_exact( fx.g, enc );
            encode_formula( fx.g, phi, enc );
            auto a = induced_assignment( enc, fx.g, states, ids );
            EXPECT_FALSE( ilp::first_violation( enc.model, a ) ) << *ilp::first_violation( enc.model, a );
            auto f = to_fragment( fx.g, states, ids );
            for ( std::size_t e = 0; e < enc.table->size(); ++e )
            {
                evaluator ev( *enc.table, f, fx.g.labels() );
                for ( std::size_t k = 0; k <= ids.size(); ++k )
                    EXPECT_EQ( a[ enc.z[ e ][ k ] ], ev.holds( e, k ) ? 1 : 0 );
            }
        }
    }
}

TEST( encode_decode, pi1_round_trip )
{
    fig1_fixture fx;
    auto [ states, events ] = fx.path( pi1_events );
    auto enc = encode( fx.g, parse_formula( phi1_text ), 11, tick_mode::exact );
    auto a = induced_assignment( enc, fx.g, states, events );
    ASSERT_TRUE( ilp::satisfies( enc.model, a ) );
    auto f = decode( enc, a, fx.g );
    EXPECT_EQ( f.events(), events );
    EXPECT_EQ( f, replay( fx.sys, events ) );
    EXPECT_EQ( f.states().size() + f.events().size(), 23u );
}

TEST( encode_decode, single_tick )
{
    auto g = single_tick_loop();
    auto enc = encode( g, formula::atom( "p" ), 1, tick_mode::paper );
    auto r = ilp::solve( enc.model );
    ASSERT_TRUE( r.feasible() );
    auto f = decode( enc, *r.solution, g );
    ASSERT_EQ( f.horizon(), 1u );
    EXPECT_EQ( f.event( 1 ), event_id::tick );
}

TEST( encode_decode, corrupted_assignment )
{
    fig1_fixture fx;
    auto [ states, events ] = fx.path( pi1_events );
    auto enc = encode( fx.g, parse_formula( phi1_text ), 11, tick_mode::exact );
    auto a = induced_assignment( enc, fx.g, states, events );
    // Claim the fragment ends somewhere it does not.
    auto last = states.back();
    auto other = last == 0 ? 1 : 0;
    a.values[ enc.w[ 11 ][ last ] ] = 0;
    a.values[ enc.w[ 11 ][ other ] ] = 1;
    EXPECT_THROW( (void)decode( enc, a, fx.g ), decode_error );

    auto b = induced_assignment( enc, fx.g, states, events );
    b.values[ enc.w[ 11 ][ last ] ] = 0;
    EXPECT_THROW( (void)decode( enc, b, fx.g ), decode_error );
}

TEST( encode_decode, paper_mode_uncertified_pair )
{
    // Paper mode counts the go step as a tick.
    auto g = tick_and_event();
    auto enc = encode( g, parse_formula( "F[1,1] b" ), 1, tick_mode::paper );
    auto r = ilp::solve( enc.model );
    ASSERT_TRUE( r.feasible() );
    EXPECT_THROW( (void)decode( enc, *r.solution, g ), decode_error );
    auto exact = encode( g, parse_formula( "F[1,1] b" ), 1, tick_mode::exact );
    EXPECT_FALSE( ilp::solve( exact.model ).feasible() );
}
