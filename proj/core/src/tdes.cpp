#include "ticksynth/tdes.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ticksynth
{

namespace
{

diagnostic error( std::string invariant, std::string element, std::string message )
{
    return { severity::error, std::move( invariant ), std::move( element ), std::move( message ) };
}

std::string join_errors( std::span< const diagnostic > diagnostics )
{
    std::ostringstream out;
    out << "invalid system:";
    for ( const auto& d : diagnostics )
        if ( d.level == severity::error )
            out << "\n  " << d.invariant << " (" << d.element << "): " << d.message;
    return out.str();
}

} // namespace

std::vector< diagnostic > validate( const untimed_des& des )
{
    std::vector< diagnostic > out;

    std::set< std::string > states;
    for ( const auto& s : des.states )
        if ( !states.insert( s ).second )
            out.push_back( error( "state-duplicate", s, "state declared more than once" ) );

    std::set< std::string > events;
    for ( const auto& e : des.events )
    {
        if ( e == tick_name )
            out.push_back( error( "event-reserved", e, "\"tick\" is reserved for the clock event" ) );
        if ( !events.insert( e ).second )
            out.push_back( error( "event-duplicate", e, "event declared more than once" ) );
    }

    std::set< std::string > atoms( des.atoms.begin(), des.atoms.end() );
    if ( atoms.size() != des.atoms.size() )
        out.push_back( error( "atom-duplicate", "atoms", "atomic proposition declared more than once" ) );

    if ( !states.contains( des.initial ) )
        out.push_back( error( "initial-undeclared", des.initial, "initial state is not a declared state" ) );

    std::set< std::pair< std::string, std::string > > seen;
    std::set< std::string > used_events;
    for ( const auto& t : des.transitions )
    {
        std::string element = t.from + " --" + t.event + "--> " + t.to;
        if ( !states.contains( t.from ) )
            out.push_back( error( "transition-source-undeclared", element, "source state '" + t.from + "' is not declared" ) );
        if ( !states.contains( t.to ) )
            out.push_back( error( "transition-target-undeclared", element, "target state '" + t.to + "' is not declared" ) );
        if ( !events.contains( t.event ) )
            out.push_back( error( "transition-event-undeclared", element, "event '" + t.event + "' is not declared" ) );
        if ( !seen.emplace( t.from, t.event ).second )
            out.push_back( error( "transition-nondeterministic", element, "more than one successor for (" + t.from + ", " + t.event + ")" ) );
        used_events.insert( t.event );
    }

    for ( const auto& [ state, labels ] : des.labels )
    {
        if ( !states.contains( state ) )
            out.push_back( error( "label-state-undeclared", state, "labeled state is not declared" ) );
        for ( const auto& ap : labels )
            if ( !atoms.contains( ap ) )
                out.push_back( error( "label-atom-undeclared", state + ":" + ap, "atom '" + ap + "' is not declared" ) );
    }

    for ( const auto& e : des.events )
    {
        auto it = des.timing.find( e );
        if ( it == des.timing.end() )
        {
            out.push_back( error( "timing-missing", e, "event has no timing entry" ) );
            continue;
        }
        const auto& timing = it->second;
        if ( timing.lower < 0 )
            out.push_back( error( "timing-negative", e, "lower bound must be nonnegative" ) );
        if ( timing.kind == event_kind::prospective )
        {
            if ( !timing.upper )
                out.push_back( error( "timing-upper-missing", e, "prospective event needs an upper bound" ) );
            else if ( *timing.upper < timing.lower )
                out.push_back( error( "timing-lower-exceeds-upper", e,
                                      "lower bound " + std::to_string( timing.lower ) + " exceeds upper bound "
                                          + std::to_string( *timing.upper ) ) );
        }
        else if ( timing.upper )
            out.push_back( error( "timing-remote-upper", e, "remote events have an infinite upper bound" ) );
    }
    for ( const auto& [ e, _ ] : des.timing )
    {
        if ( !events.contains( e ) )
            out.push_back( error( "timing-event-undeclared", e, "timing entry for an undeclared event" ) );
        else if ( !used_events.contains( e ) )
            out.push_back( { severity::warning, "timing-dead", e, "no transition uses this event" } );
    }
    return out;
}

bool has_errors( std::span< const diagnostic > diagnostics )
{
    return std::ranges::any_of( diagnostics, []( const auto& d ) { return d.level == severity::error; } );
}

std::size_t timed_state_hash::operator()( const timed_state& s ) const noexcept
{
    std::size_t h = std::hash< std::size_t >{}( s.activity );
    for ( int t : s.timers )
        h ^= std::hash< int >{}( t ) + 0x9e3779b97f4a7c15ULL + ( h << 6 ) + ( h >> 2 );
    return h;
}

labeling::labeling( std::vector< std::string > atoms, std::vector< std::vector< bool > > by_activity )
    : _atoms{ std::move( atoms ) }, _by_activity{ std::move( by_activity ) }
{
    for ( const auto& row : _by_activity )
        if ( row.size() != _atoms.size() )
            throw std::invalid_argument( "labeling row size does not match the number of atoms" );
}

std::optional< std::size_t > labeling::atom_index( std::string_view atom ) const
{
    auto it = std::ranges::find( _atoms, atom );
    if ( it == _atoms.end() )
        return std::nullopt;
    return static_cast< std::size_t >( it - _atoms.begin() );
}

bool labeling::holds( std::size_t activity, std::size_t atom ) const
{
    return _by_activity.at( activity ).at( atom );
}

timed_system::timed_system( const untimed_des& des )
{
    auto diagnostics = validate( des );
    if ( has_errors( diagnostics ) )
        throw model_error( join_errors( diagnostics ) );

    _activities = des.states;
    _events = des.events;
    std::ranges::sort( _events );
    for ( const auto& e : _events )
        _timing.push_back( des.timing.at( e ) );

    auto activity_of = [ & ]( const std::string& name ) { return *find_activity( name ); };
    auto event_of = [ & ]( const std::string& name ) {
        return static_cast< std::size_t >( std::ranges::lower_bound( _events, name ) - _events.begin() );
    };

    _succ.assign( _activities.size(), std::vector< std::optional< std::size_t > >( _events.size() ) );
    for ( const auto& t : des.transitions )
        _succ[ activity_of( t.from ) ][ event_of( t.event ) ] = activity_of( t.to );
    _initial = activity_of( des.initial );

    std::vector< std::vector< bool > > rows( _activities.size(), std::vector< bool >( des.atoms.size(), false ) );
    for ( const auto& [ state, aps ] : des.labels )
        for ( const auto& ap : aps )
        {
            auto it = std::ranges::find( des.atoms, ap );
            rows[ activity_of( state ) ][ static_cast< std::size_t >( it - des.atoms.begin() ) ] = true;
        }
    _labels = labeling( des.atoms, std::move( rows ) );
}

std::optional< std::size_t > timed_system::find_activity( std::string_view name ) const
{
    auto it = std::ranges::find( _activities, name );
    if ( it == _activities.end() )
        return std::nullopt;
    return static_cast< std::size_t >( it - _activities.begin() );
}

event_id timed_system::event( std::string_view name ) const
{
    if ( name == tick_name )
        return event_id::tick;
    auto it = std::ranges::lower_bound( _events, name );
    if ( it == _events.end() || *it != name )
        throw model_error( "unknown event '" + std::string( name ) + "'" );
    return make_event( static_cast< std::size_t >( it - _events.begin() ) );
}

std::string_view timed_system::event_name( event_id e ) const
{
    if ( is_tick( e ) )
        return tick_name;
    return _events.at( event_index( e ) );
}

timed_state timed_system::initial_state() const
{
    timed_state s{ _initial, {} };
    s.timers.reserve( _events.size() );
    for ( const auto& timing : _timing )
        s.timers.push_back( timing.timer_default() );
    return s;
}

bool timed_system::enabled( const timed_state& s, event_id e ) const
{
    if ( is_tick( e ) )
    {
        for ( std::size_t tau = 0; tau < _events.size(); ++tau )
            if ( _timing[ tau ].kind == event_kind::prospective && _succ[ s.activity ][ tau ] && s.timers[ tau ] == 0 )
                return false;
        return true;
    }
    auto sigma = event_index( e );
    if ( sigma >= _events.size() )
        throw model_error( "unknown event index " + std::to_string( sigma ) );
    if ( !_succ[ s.activity ][ sigma ] )
        return false;
    const auto& timing = _timing[ sigma ];
    int t = s.timers[ sigma ];
    if ( timing.kind == event_kind::prospective )
        return 0 <= t && t <= *timing.upper - timing.lower;
    return t == 0;
}

timed_state timed_system::step( const timed_state& s, event_id e ) const
{
    if ( !enabled( s, e ) )
        throw model_error( "event '" + std::string( event_name( e ) ) + "' is not enabled at " + describe( s ) );

    timed_state next = s;
    if ( is_tick( e ) )
    {
        for ( std::size_t tau = 0; tau < _events.size(); ++tau )
        {
            int& t = next.timers[ tau ];
            if ( !_succ[ s.activity ][ tau ] )
                t = _timing[ tau ].timer_default();
            else if ( t > 0 )
                --t;
            else
                // An enabled prospective event with timer 0 disables tick (C1).
                assert( _timing[ tau ].kind == event_kind::remote );
        }
        return next;
    }

    auto sigma = event_index( e );
    next.activity = *_succ[ s.activity ][ sigma ];
    for ( std::size_t tau = 0; tau < _events.size(); ++tau )
    {
        if ( tau == sigma || !_succ[ next.activity ][ tau ] )
            next.timers[ tau ] = _timing[ tau ].timer_default();
    }
    return next;
}

std::vector< event_id > timed_system::enabled_events( const timed_state& s ) const
{
    std::vector< event_id > out;
    bool tick_done = false;
    for ( std::size_t i = 0; i < _events.size(); ++i )
    {
        if ( !tick_done && _events[ i ] > tick_name )
        {
            if ( enabled( s, event_id::tick ) )
                out.push_back( event_id::tick );
            tick_done = true;
        }
        if ( enabled( s, make_event( i ) ) )
            out.push_back( make_event( i ) );
    }
    if ( !tick_done && enabled( s, event_id::tick ) )
        out.push_back( event_id::tick );
    return out;
}

bool timed_system::timers_in_range( const timed_state& s ) const
{
    if ( s.timers.size() != _events.size() )
        return false;
    for ( std::size_t i = 0; i < _events.size(); ++i )
        if ( s.timers[ i ] < 0 || s.timers[ i ] > _timing[ i ].timer_default() )
            return false;
    return true;
}

namespace
{

std::string describe_state( const timed_state& s, std::span< const std::string > activities )
{
    std::ostringstream out;
    out << activities[ s.activity ] << " | [";
    for ( std::size_t i = 0; i < s.timers.size(); ++i )
        out << ( i ? "," : "" ) << s.timers[ i ];
    out << "]";
    return out.str();
}

} // namespace

std::string timed_system::describe( const timed_state& s ) const
{
    return describe_state( s, _activities );
}

timed_des::timed_des( std::vector< timed_state > states, std::vector< std::vector< timed_edge > > edges,
                      std::vector< std::string > event_names, std::vector< std::string > activity_names,
                      labeling labels )
    : _states{ std::move( states ) }, _edges{ std::move( edges ) }, _event_names{ std::move( event_names ) },
      _activity_names{ std::move( activity_names ) }, _labels{ std::move( labels ) }
{
    if ( _states.empty() )
        throw std::invalid_argument( "timed DES needs at least the initial state" );
    if ( _edges.size() != _states.size() )
        throw std::invalid_argument( "edge list count does not match the state count" );
    for ( std::size_t i = 0; i < _states.size(); ++i )
    {
        if ( !_index.emplace( _states[ i ], i ).second )
            throw std::invalid_argument( "duplicate timed state" );
        std::set< event_id > seen;
        for ( const auto& edge : _edges[ i ] )
        {
            if ( edge.target >= _states.size() )
                throw std::invalid_argument( "edge target out of range" );
            if ( !is_tick( edge.event ) && event_index( edge.event ) >= _event_names.size() )
                throw std::invalid_argument( "edge event out of range" );
            if ( !seen.insert( edge.event ).second )
                throw std::invalid_argument( "nondeterministic edge" );
        }
    }
}

std::size_t timed_des::transition_count() const
{
    std::size_t n = 0;
    for ( const auto& out : _edges )
        n += out.size();
    return n;
}

std::optional< std::size_t > timed_des::successor( std::size_t i, event_id e ) const
{
    for ( const auto& edge : _edges[ i ] )
        if ( edge.event == e )
            return edge.target;
    return std::nullopt;
}

std::optional< std::size_t > timed_des::find( const timed_state& s ) const
{
    auto it = _index.find( s );
    if ( it == _index.end() )
        return std::nullopt;
    return it->second;
}

std::string_view timed_des::event_name( event_id e ) const
{
    if ( is_tick( e ) )
        return tick_name;
    return _event_names.at( event_index( e ) );
}

std::string timed_des::describe( std::size_t i ) const
{
    return describe_state( _states[ i ], _activity_names );
}

timed_des build_tdes( const timed_system& system, std::size_t state_cap )
{
    std::vector< timed_state > states;
    std::vector< std::vector< timed_edge > > edges;
    std::unordered_map< timed_state, std::size_t, timed_state_hash > index;
    std::deque< std::size_t > queue;

    auto intern = [ & ]( timed_state s ) -> std::size_t {
        auto [ it, inserted ] = index.emplace( s, states.size() );
        if ( inserted )
        {
            if ( states.size() >= state_cap )
                throw model_error( "state cap exceeded: more than " + std::to_string( state_cap )
                                   + " reachable timed states" );
            states.push_back( std::move( s ) );
            edges.emplace_back();
            queue.push_back( it->second );
        }
        return it->second;
    };

    intern( system.initial_state() );
    while ( !queue.empty() )
    {
        auto i = queue.front();
        queue.pop_front();
        for ( event_id e : system.enabled_events( states[ i ] ) )
        {
            auto target = intern( system.step( states[ i ], e ) );
            edges[ i ].push_back( { e, target } );
        }
    }
    return timed_des( std::move( states ), std::move( edges ), system.event_names(), system.activity_names(),
                      system.labels() );
}

const timed_state& fragment_view::state( std::size_t k ) const
{
    if ( k >= _states.size() )
        throw std::out_of_range( "state index " + std::to_string( k ) + " beyond horizon" );
    return _states[ k ];
}

event_id fragment_view::event( std::size_t k ) const
{
    if ( k == 0 || k > _events.size() )
        throw std::out_of_range( "event index " + std::to_string( k ) + " outside 1..H" );
    return _events[ k - 1 ];
}

std::size_t fragment_view::count( std::size_t k, std::size_t j ) const
{
    if ( k > j || j > horizon() )
        throw std::out_of_range( "count(" + std::to_string( k ) + ", " + std::to_string( j ) + ") outside 0 <= k <= j <= "
                                 + std::to_string( horizon() ) );
    return _ticks[ j ] - _ticks[ k ];
}

fragment_view fragment_view::suffix( std::size_t k ) const
{
    if ( k > horizon() )
        throw std::out_of_range( "suffix index " + std::to_string( k ) + " beyond horizon" );
    return { _states.subspan( k ), _events.subspan( k ), _ticks.subspan( k ) };
}

bool operator==( const fragment_view& a, const fragment_view& b )
{
    return std::ranges::equal( a._states, b._states ) && std::ranges::equal( a._events, b._events );
}

fragment::fragment( std::vector< timed_state > states, std::vector< event_id > events )
    : _states{ std::move( states ) }, _events{ std::move( events ) }
{
    if ( _events.empty() )
        throw std::invalid_argument( "fragment horizon must be at least 1" );
    if ( _states.size() != _events.size() + 1 )
        throw std::invalid_argument( "fragment needs exactly one more state than events" );
    _ticks.reserve( _states.size() );
    _ticks.push_back( 0 );
    for ( event_id e : _events )
        _ticks.push_back( _ticks.back() + ( is_tick( e ) ? 1 : 0 ) );
}

fragment replay( const timed_system& system, std::span< const event_id > events )
{
    std::vector< timed_state > states{ system.initial_state() };
    for ( std::size_t k = 0; k < events.size(); ++k )
    {
        if ( !system.enabled( states.back(), events[ k ] ) )
            throw model_error( "step " + std::to_string( k + 1 ) + ": event '" + std::string( system.event_name( events[ k ] ) )
                               + "' is not enabled at " + system.describe( states.back() ) );
        states.push_back( system.step( states.back(), events[ k ] ) );
    }
    return { std::move( states ), { events.begin(), events.end() } };
}

std::optional< std::string > check_execution( const timed_system& system, const fragment& f )
{
    for ( std::size_t k = 0; k <= f.horizon(); ++k )
    {
        const auto& s = f.state( k );
        if ( s.activity >= system.activity_names().size() || s.timers.size() != system.event_names().size() )
            return "s(" + std::to_string( k ) + ") is not a state of the system";
    }
    if ( f.state( 0 ) != system.initial_state() )
        return "s(0) is not the initial state";
    for ( std::size_t k = 1; k <= f.horizon(); ++k )
    {
        const auto& prev = f.state( k - 1 );
        auto e = f.event( k );
        if ( !is_tick( e ) && event_index( e ) >= system.event_names().size() )
            return "e(" + std::to_string( k ) + ") is not an event of the system";
        if ( !system.enabled( prev, e ) )
            return "e(" + std::to_string( k ) + ") = " + std::string( system.event_name( e ) ) + " is not enabled at s("
                   + std::to_string( k - 1 ) + ")";
        if ( system.step( prev, e ) != f.state( k ) )
            return "s(" + std::to_string( k ) + ") does not match the successor of s(" + std::to_string( k - 1 ) + ")";
    }
    return std::nullopt;
}

} // namespace ticksynth
