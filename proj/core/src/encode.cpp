#include "ticksynth/encode.hpp"

#include <algorithm>
#include <string>

namespace ticksynth
{

using ilp::term;
using ilp::var_index;

const char* to_string( tick_mode mode )
{
    return mode == tick_mode::paper ? "paper" : "exact";
}

std::vector< term > encoding::counter( std::size_t k, std::size_t j ) const
{
    std::vector< term > out;
    for ( std::size_t i = k + 1; i <= j; ++i )
        out.push_back( { 1, ze[ i ] } );
    return out;
}

namespace
{

std::string idx( std::size_t a ) { return "[" + std::to_string( a ) + "]"; }
std::string idx( std::size_t a, std::size_t b ) { return "[" + std::to_string( a ) + "," + std::to_string( b ) + "]"; }

} // namespace

encoding encode_trajectory( const timed_des& g, std::size_t horizon )
{
    if ( horizon < 1 )
        throw std::invalid_argument( "horizon must be at least 1" );

    encoding enc;
    enc.horizon = horizon;
    enc.num_states = g.size();
    enc.big_m = static_cast< std::int64_t >( horizon ) + 1;

    const auto n = g.size();
    enc.adjacency.assign( n, std::vector< bool >( n, false ) );
    enc.alpha.assign( n, false );
    enc.beta.assign( n, false );
    for ( std::size_t i = 0; i < n; ++i )
        for ( const auto& edge : g.edges( i ) )
        {
            enc.adjacency[ i ][ edge.target ] = true;
            if ( is_tick( edge.event ) )
            {
                enc.alpha[ i ] = true;
                enc.beta[ edge.target ] = true;
            }
        }

    auto& m = enc.model;
    enc.w.resize( horizon + 1 );
    for ( std::size_t k = 0; k <= horizon; ++k )
        for ( std::size_t i = 0; i < n; ++i )
        {
            std::int64_t lo = ( k == 0 && i == g.initial() ) ? 1 : 0;
            enc.w[ k ].push_back( m.add_var( "w" + idx( k ) + idx( i ), lo, 1 ) );
        }

    for ( std::size_t k = 0; k <= horizon; ++k )
    {
        std::vector< term > one_hot;
        for ( auto v : enc.w[ k ] )
            one_hot.push_back( { 1, v } );
        m.add_eq( std::move( one_hot ), 1 );
    }

    std::vector< std::vector< std::size_t > > predecessors( n );
    for ( std::size_t i = 0; i < n; ++i )
        for ( std::size_t j = 0; j < n; ++j )
            if ( enc.adjacency[ i ][ j ] )
                predecessors[ j ].push_back( i );

    for ( std::size_t k = 0; k < horizon; ++k )
        for ( std::size_t j = 0; j < n; ++j )
        {
            std::vector< term > row{ { 1, enc.w[ k + 1 ][ j ] } };
            for ( auto i : predecessors[ j ] )
                row.push_back( { -1, enc.w[ k ][ i ] } );
            m.add_le( std::move( row ), 0 );
        }
    return enc;
}

void encode_ticks( const timed_des& g, encoding& enc )
{
    (void) g;
    enc.mode = tick_mode::paper;
    auto& m = enc.model;
    const auto n = enc.num_states;
    enc.ze.assign( enc.horizon + 1, 0 );
    for ( std::size_t k = 1; k <= enc.horizon; ++k )
    {
        auto z = m.add_binary( "ze" + idx( k ) );
        enc.ze[ k ] = z;

        std::vector< term > alpha_prev;
        std::vector< term > beta_here;
        for ( std::size_t i = 0; i < n; ++i )
        {
            if ( enc.alpha[ i ] )
                alpha_prev.push_back( { 1, enc.w[ k - 1 ][ i ] } );
            if ( enc.beta[ i ] )
                beta_here.push_back( { 1, enc.w[ k ][ i ] } );
        }
        // ze(k) <= alpha^T w(k-1)
        std::vector< term > row{ { 1, z } };
        for ( auto t : alpha_prev )
            row.push_back( { -1, t.var } );
        m.add_le( row, 0 );
        // ze(k) <= beta^T w(k)
        row = { { 1, z } };
        for ( auto t : beta_here )
            row.push_back( { -1, t.var } );
        m.add_le( row, 0 );
        // ze(k) >= -1 + alpha^T w(k-1) + beta^T w(k)
        row = { { 1, z } };
        for ( auto t : alpha_prev )
            row.push_back( { -1, t.var } );
        for ( auto t : beta_here )
            row.push_back( { -1, t.var } );
        m.add_ge( row, -1 );
    }
}

void encode_edges_exact( const timed_des& g, encoding& enc )
{
    enc.mode = tick_mode::exact;
    auto& m = enc.model;
    const auto n = enc.num_states;

    enc.edges.clear();
    for ( std::size_t i = 0; i < n; ++i )
        for ( const auto& edge : g.edges( i ) )
            enc.edges.push_back( { i, edge.event, edge.target } );

    enc.edge_vars.assign( enc.horizon + 1, {} );
    enc.ze.assign( enc.horizon + 1, 0 );
    for ( std::size_t k = 1; k <= enc.horizon; ++k )
    {
        for ( std::size_t t = 0; t < enc.edges.size(); ++t )
            enc.edge_vars[ k ].push_back( m.add_binary( "x" + idx( k ) + idx( t ) ) );
        enc.ze[ k ] = m.add_binary( "ze" + idx( k ) );

        std::vector< term > one;
        std::vector< std::vector< term > > out_of( n );
        std::vector< std::vector< term > > into( n );
        std::vector< term > ticks{ { 1, enc.ze[ k ] } };
        for ( std::size_t t = 0; t < enc.edges.size(); ++t )
        {
            auto x = enc.edge_vars[ k ][ t ];
            one.push_back( { 1, x } );
            out_of[ enc.edges[ t ].source ].push_back( { 1, x } );
            into[ enc.edges[ t ].target ].push_back( { 1, x } );
            if ( is_tick( enc.edges[ t ].event ) )
                ticks.push_back( { -1, x } );
        }
        m.add_eq( std::move( one ), 1 );
        for ( std::size_t i = 0; i < n; ++i )
        {
            // w(k-1)_i = sum of selected transitions leaving s_i
            auto leave = out_of[ i ];
            leave.push_back( { -1, enc.w[ k - 1 ][ i ] } );
            m.add_eq( std::move( leave ), 0 );
            // w(k)_i = sum of selected transitions entering s_i
            auto enter = into[ i ];
            enter.push_back( { -1, enc.w[ k ][ i ] } );
            m.add_eq( std::move( enter ), 0 );
        }
        m.add_eq( std::move( ticks ), 0 );
    }
}

void add_threshold_rows( ilp::model& m, const std::vector< term >& counter, std::uint32_t lower, std::uint32_t upper,
                         std::int64_t big_m, var_index at_least, var_index at_most )
{
    if ( static_cast< std::int64_t >( lower ) > big_m || static_cast< std::int64_t >( upper ) >= big_m )
        throw std::invalid_argument( "big-M too small for the threshold bounds" );
    const auto lo = static_cast< std::int64_t >( lower );
    const auto hi = static_cast< std::int64_t >( upper );

    // m - M <= c - M*at_least < m
    auto row = counter;
    row.push_back( { -big_m, at_least } );
    m.add_le( row, lo - 1 );
    m.add_ge( row, lo - big_m );

    // n < c + M*at_most <= n + M
    row = counter;
    row.push_back( { big_m, at_most } );
    m.add_ge( row, hi + 1 );
    m.add_le( row, hi + big_m );
}

void encode_formula( const timed_des& g, const formula& phi, encoding& enc )
{
    if ( enc.ze.size() != enc.horizon + 1 )
        throw std::logic_error( "encode the tick indicators before the formula" );

    enc.table.emplace( phi );
    const auto& table = *enc.table;
    const auto horizon = enc.horizon;
    auto& m = enc.model;

    for ( std::size_t e = 0; e < table.size(); ++e )
        if ( table[ e ].kind == formula_kind::atom && !g.labels().atom_index( table[ e ].atom ) )
            throw evaluation_error( "atom '" + table[ e ].atom + "' is not an atomic proposition of the system" );

    enc.z.assign( table.size(), {} );
    enc.until.assign( table.size(), std::nullopt );
    for ( std::size_t e = 0; e < table.size(); ++e )
    {
        const auto& entry = table[ e ];
        const auto label = table.label( e );
        auto& z = enc.z[ e ];
        for ( std::size_t k = 0; k <= horizon; ++k )
        {
            if ( entry.kind == formula_kind::truth )
                z.push_back( m.add_var( "z[" + label + "]" + idx( k ), 1, 1 ) );
            else
                z.push_back( m.add_binary( "z[" + label + "]" + idx( k ) ) );
        }

        switch ( entry.kind )
        {
        case formula_kind::truth: break;
        case formula_kind::atom:
        {
            auto atom = *g.labels().atom_index( entry.atom );
            for ( std::size_t k = 0; k <= horizon; ++k )
            {
                // z(k) = v^T w(k); both sides are 0/1 under the one-hot rows
                std::vector< term > row{ { 1, z[ k ] } };
                for ( std::size_t i = 0; i < enc.num_states; ++i )
                    if ( g.labels().holds( g.state( i ), atom ) )
                        row.push_back( { -1, enc.w[ k ][ i ] } );
                m.add_eq( std::move( row ), 0 );
            }
            break;
        }
        case formula_kind::negation:
            for ( std::size_t k = 0; k <= horizon; ++k )
                m.add_eq( { { 1, z[ k ] }, { 1, enc.z[ entry.left ][ k ] } }, 1 );
            break;
        case formula_kind::conjunction:
            for ( std::size_t k = 0; k <= horizon; ++k )
            {
                auto a = enc.z[ entry.left ][ k ];
                auto b = enc.z[ entry.right ][ k ];
                m.add_le( { { 1, z[ k ] }, { -1, a } }, 0 );
                m.add_le( { { 1, z[ k ] }, { -1, b } }, 0 );
                m.add_ge( { { 1, z[ k ] }, { -1, a }, { -1, b } }, 1 - 2 );
            }
            break;
        case formula_kind::disjunction:
            for ( std::size_t k = 0; k <= horizon; ++k )
            {
                auto a = enc.z[ entry.left ][ k ];
                auto b = enc.z[ entry.right ][ k ];
                m.add_ge( { { 1, z[ k ] }, { -1, a } }, 0 );
                m.add_ge( { { 1, z[ k ] }, { -1, b } }, 0 );
                m.add_le( { { 1, z[ k ] }, { -1, a }, { -1, b } }, 0 );
            }
            break;
        case formula_kind::until:
        {
            // The counter never exceeds H, so bounds beyond it are clamped;
            // this keeps M = H + 1 valid for every interval.
            auto lower = std::min< std::uint32_t >( entry.lower, static_cast< std::uint32_t >( horizon + 1 ) );
            auto upper = std::min< std::uint32_t >( entry.upper, static_cast< std::uint32_t >( horizon ) );
            encoding::until_vars vars;
            vars.at_least.resize( horizon + 1 );
            vars.at_most.resize( horizon + 1 );
            vars.witness.resize( horizon + 1 );
            const auto& lhs = enc.z[ entry.left ];
            const auto& rhs = enc.z[ entry.right ];
            for ( std::size_t k = 0; k <= horizon; ++k )
            {
                std::vector< term > any{ { -1, z[ k ] } };
                for ( std::size_t j = k; j <= horizon; ++j )
                {
                    auto at_least = m.add_binary( "zlo[" + label + "]" + idx( k, j ) );
                    auto at_most = m.add_binary( "zhi[" + label + "]" + idx( k, j ) );
                    auto witness = m.add_binary( "z[" + label + "]" + idx( k, j ) );
                    vars.at_least[ k ].push_back( at_least );
                    vars.at_most[ k ].push_back( at_most );
                    vars.witness[ k ].push_back( witness );

                    add_threshold_rows( m, enc.counter( k, j ), lower, upper, enc.big_m, at_least, at_most );

                    // witness = at_most & at_least & rhs(j) & lhs(k..j-1)
                    std::vector< var_index > parts{ at_most, at_least, rhs[ j ] };
                    for ( std::size_t l = k; l < j; ++l )
                        parts.push_back( lhs[ l ] );
                    std::vector< term > all{ { 1, witness } };
                    for ( auto p : parts )
                    {
                        m.add_le( { { 1, witness }, { -1, p } }, 0 );
                        all.push_back( { -1, p } );
                    }
                    m.add_ge( std::move( all ), 1 - static_cast< std::int64_t >( parts.size() ) );

                    // z(k) = OR_j witness(k,j)
                    m.add_ge( { { 1, z[ k ] }, { -1, witness } }, 0 );
                    any.push_back( { 1, witness } );
                }
                m.add_ge( std::move( any ), 0 );
            }
            enc.until[ e ] = std::move( vars );
            break;
        }
        }
    }
}

void encode_root( encoding& enc )
{
    if ( !enc.table )
        throw std::logic_error( "encode the formula before the root" );
    enc.model.add_eq( { { 1, enc.z[ enc.table->root() ][ 0 ] } }, 1 );
}

encoding encode( const timed_des& g, const formula& phi, std::size_t horizon, tick_mode mode )
{
    auto enc = encode_trajectory( g, horizon );
    if ( mode == tick_mode::paper )
        encode_ticks( g, enc );
    else
        encode_edges_exact( g, enc );
    encode_formula( g, phi, enc );
    encode_root( enc );
    return enc;
}

fragment decode( const encoding& enc, const ilp::assignment& a, const timed_des& g )
{
    if ( !enc.table )
        throw decode_error( "encoding has no formula" );
    if ( a.values.size() != enc.model.var_count() )
        throw decode_error( "assignment does not match the model" );

    std::vector< std::size_t > path;
    for ( std::size_t k = 0; k <= enc.horizon; ++k )
    {
        std::optional< std::size_t > chosen;
        for ( std::size_t i = 0; i < enc.num_states; ++i )
            if ( a[ enc.w[ k ][ i ] ] == 1 )
            {
                if ( chosen )
                    throw decode_error( "w(" + std::to_string( k ) + ") selects more than one state" );
                chosen = i;
            }
        if ( !chosen )
            throw decode_error( "w(" + std::to_string( k ) + ") selects no state" );
        path.push_back( *chosen );
    }
    if ( path[ 0 ] != g.initial() )
        throw decode_error( "s(0) is not the initial state" );

    std::vector< event_id > events;
    for ( std::size_t k = 1; k <= enc.horizon; ++k )
    {
        auto from = path[ k - 1 ];
        auto to = path[ k ];
        std::optional< event_id > chosen;
        if ( enc.mode == tick_mode::exact )
        {
            for ( std::size_t t = 0; t < enc.edges.size(); ++t )
                if ( a[ enc.edge_vars[ k ][ t ] ] == 1 )
                {
                    const auto& edge = enc.edges[ t ];
                    if ( chosen || edge.source != from || edge.target != to )
                        throw decode_error( "transition selectors at step " + std::to_string( k )
                                            + " disagree with the state trajectory" );
                    chosen = edge.event;
                }
        }
        else if ( a[ enc.ze[ k ] ] == 1 )
        {
            if ( g.successor( from, event_id::tick ) == to )
                chosen = event_id::tick;
        }
        else
        {
            // Edges are sorted by event name: the first match is the smallest.
            for ( const auto& edge : g.edges( from ) )
                if ( !is_tick( edge.event ) && edge.target == to )
                {
                    chosen = edge.event;
                    break;
                }
        }
        if ( !chosen )
            throw decode_error( "decode ambiguity at step " + std::to_string( k ) + ": no "
                                + ( a[ enc.ze[ k ] ] == 1 ? std::string( "tick" ) : std::string( "non-tick" ) )
                                + " transition from " + g.describe( from ) + " to " + g.describe( to ) );
        events.push_back( *chosen );
    }

    std::vector< timed_state > states;
    for ( auto i : path )
        states.push_back( g.state( i ) );
    fragment f( std::move( states ), std::move( events ) );

    evaluator ev( *enc.table, f, g.labels() );
    if ( !ev.holds_root( 0 ) )
        throw decode_error( "certification failed: the decoded fragment does not satisfy the formula" );
    return f;
}

ilp::assignment induced_assignment( const encoding& enc, const timed_des& g, std::span< const std::size_t > states,
                                    std::span< const event_id > events )
{
    if ( states.size() != enc.horizon + 1 || events.size() != enc.horizon )
        throw std::invalid_argument( "fragment length does not match the encoding horizon" );

    ilp::assignment a;
    a.values.assign( enc.model.var_count(), 0 );

    for ( std::size_t k = 0; k <= enc.horizon; ++k )
        a.values[ enc.w[ k ][ states[ k ] ] ] = 1;
    for ( std::size_t k = 1; k <= enc.horizon; ++k )
    {
        auto e = events[ k - 1 ];
        a.values[ enc.ze[ k ] ] = is_tick( e ) ? 1 : 0;
        if ( enc.mode == tick_mode::exact )
            for ( std::size_t t = 0; t < enc.edges.size(); ++t )
            {
                const auto& edge = enc.edges[ t ];
                if ( edge.source == states[ k - 1 ] && edge.event == e && edge.target == states[ k ] )
                    a.values[ enc.edge_vars[ k ][ t ] ] = 1;
            }
    }

    if ( !enc.table )
        return a;

    std::vector< timed_state > timed;
    for ( auto i : states )
        timed.push_back( g.state( i ) );
    fragment f( std::move( timed ), { events.begin(), events.end() } );
    evaluator ev( *enc.table, f, g.labels() );

    const auto& table = *enc.table;
    for ( std::size_t e = 0; e < table.size(); ++e )
    {
        for ( std::size_t k = 0; k <= enc.horizon; ++k )
            a.values[ enc.z[ e ][ k ] ] = ev.holds( e, k ) ? 1 : 0;
        if ( !enc.until[ e ] )
            continue;
        const auto& vars = *enc.until[ e ];
        const auto& entry = table[ e ];
        for ( std::size_t k = 0; k <= enc.horizon; ++k )
        {
            bool lhs_so_far = true;
            for ( std::size_t j = k; j <= enc.horizon; ++j )
            {
                auto c = f.count( k, j );
                bool at_least = c >= entry.lower;
                bool at_most = c <= entry.upper;
                a.values[ vars.at_least[ k ][ j - k ] ] = at_least;
                a.values[ vars.at_most[ k ][ j - k ] ] = at_most;
                a.values[ vars.witness[ k ][ j - k ] ] = at_least && at_most && ev.holds( entry.right, j ) && lhs_so_far;
                lhs_so_far = lhs_so_far && ev.holds( entry.left, j );
            }
        }
    }
    return a;
}

} // namespace ticksynth
