#include "ticksynth/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace ticksynth::io
{

using nlohmann::json;

namespace
{

std::string read_file( const std::filesystem::path& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw input_error( path.string() + ": cannot open file" );
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json parse_json( std::string_view text, std::string_view source )
{
    try
    {
        return json::parse( text );
    }
    catch ( const json::parse_error& e )
    {
        throw input_error( std::string( source ) + ": malformed JSON at byte " + std::to_string( e.byte ) + ": " + e.what() );
    }
}

class reader
{
    std::string _source;

public:
    explicit reader( std::string_view source ) : _source{ source } {}

    [[noreturn]] void fail( const std::string& where, const std::string& what ) const
    {
        throw input_error( _source + ": " + where + ": " + what );
    }

    const json& field( const json& obj, const std::string& key, const std::string& where ) const
    {
        if ( !obj.is_object() )
            fail( where, "expected an object" );
        auto it = obj.find( key );
        if ( it == obj.end() )
            fail( where, "missing field \"" + key + "\"" );
        return *it;
    }

    std::string string( const json& v, const std::string& where ) const
    {
        if ( !v.is_string() )
            fail( where, "expected a string" );
        return v.get< std::string >();
    }

    int integer( const json& v, const std::string& where ) const
    {
        if ( !v.is_number_integer() )
            fail( where, "expected an integer" );
        auto value = v.get< std::int64_t >();
        if ( value < 0 || value > 1'000'000'000 )
            fail( where, "expected a nonnegative integer" );
        return static_cast< int >( value );
    }

    const json& array( const json& v, const std::string& where ) const
    {
        if ( !v.is_array() )
            fail( where, "expected an array" );
        return v;
    }

    std::vector< std::string > strings( const json& v, const std::string& where ) const
    {
        std::vector< std::string > out;
        std::size_t i = 0;
        for ( const auto& item : array( v, where ) )
            out.push_back( string( item, where + "/" + std::to_string( i++ ) ) );
        return out;
    }
};

} // namespace

untimed_des parse_system( std::string_view text, std::string_view source )
{
    auto doc = parse_json( text, source );
    reader r( source );
    untimed_des des;

    des.states = r.strings( r.field( doc, "states", "/" ), "/states" );
    des.initial = r.string( r.field( doc, "initial", "/" ), "/initial" );
    des.atoms = doc.contains( "atoms" ) ? r.strings( doc[ "atoms" ], "/atoms" ) : std::vector< std::string >{};

    std::size_t i = 0;
    for ( const auto& ev : r.array( r.field( doc, "events", "/" ), "/events" ) )
    {
        auto where = "/events/" + std::to_string( i++ );
        auto name = r.string( r.field( ev, "name", where ), where + "/name" );
        auto kind = r.string( r.field( ev, "kind", where ), where + "/kind" );
        auto lower = r.integer( r.field( ev, "lower", where ), where + "/lower" );
        event_timing timing;
        if ( kind == "prospective" )
            timing = event_timing::prospective( lower, r.integer( r.field( ev, "upper", where ), where + "/upper" ) );
        else if ( kind == "remote" )
        {
            if ( ev.contains( "upper" ) && !ev[ "upper" ].is_null() )
                r.fail( where + "/upper", "remote events have no finite upper bound" );
            timing = event_timing::remote( lower );
        }
        else
            r.fail( where + "/kind", "expected \"prospective\" or \"remote\"" );
        if ( des.timing.contains( name ) )
            r.fail( where + "/name", "duplicate event \"" + name + "\"" );
        des.events.push_back( name );
        des.timing.emplace( name, timing );
    }

    i = 0;
    for ( const auto& t : r.array( r.field( doc, "transitions", "/" ), "/transitions" ) )
    {
        auto where = "/transitions/" + std::to_string( i++ );
        des.transitions.push_back( { r.string( r.field( t, "from", where ), where + "/from" ),
                                     r.string( r.field( t, "event", where ), where + "/event" ),
                                     r.string( r.field( t, "to", where ), where + "/to" ) } );
    }

    if ( doc.contains( "labels" ) )
    {
        const auto& labels = doc[ "labels" ];
        if ( !labels.is_object() )
            r.fail( "/labels", "expected an object" );
        for ( const auto& [ state, aps ] : labels.items() )
            des.labels[ state ] = r.strings( aps, "/labels/" + state );
    }
    return des;
}

untimed_des load_system( const std::filesystem::path& path )
{
    return parse_system( read_file( path ), path.string() );
}

std::string system_to_json( const untimed_des& des )
{
    json doc;
    doc[ "states" ] = des.states;
    doc[ "events" ] = json::array();
    for ( const auto& name : des.events )
    {
        json ev{ { "name", name } };
        if ( auto it = des.timing.find( name ); it != des.timing.end() )
        {
            ev[ "kind" ] = it->second.kind == event_kind::prospective ? "prospective" : "remote";
            ev[ "lower" ] = it->second.lower;
            if ( it->second.upper )
                ev[ "upper" ] = *it->second.upper;
        }
        doc[ "events" ].push_back( std::move( ev ) );
    }
    doc[ "transitions" ] = json::array();
    for ( const auto& t : des.transitions )
        doc[ "transitions" ].push_back( { { "from", t.from }, { "event", t.event }, { "to", t.to } } );
    doc[ "initial" ] = des.initial;
    doc[ "atoms" ] = des.atoms;
    doc[ "labels" ] = json::object();
    for ( const auto& [ state, aps ] : des.labels )
        doc[ "labels" ][ state ] = aps;
    return doc.dump( 2 ) + "\n";
}

namespace
{

fragment_document::state read_state( const reader& r, const json& v, const std::string& where )
{
    if ( v.is_string() )
        return { v.get< std::string >(), std::nullopt };
    fragment_document::state s{ r.string( r.field( v, "activity", where ), where + "/activity" ), std::nullopt };
    if ( v.contains( "timers" ) )
    {
        const auto& timers = v[ "timers" ];
        if ( !timers.is_object() )
            r.fail( where + "/timers", "expected an object" );
        s.timers.emplace();
        for ( const auto& [ name, value ] : timers.items() )
            ( *s.timers )[ name ] = r.integer( value, where + "/timers/" + name );
    }
    return s;
}

} // namespace

fragment_document parse_fragment( std::string_view text, std::string_view source )
{
    auto doc = parse_json( text, source );
    reader r( source );
    fragment_document out;

    if ( doc.is_array() )
    {
        if ( doc.size() % 2 == 0 )
            r.fail( "/", "an alternating fragment has an odd number of elements" );
        for ( std::size_t i = 0; i < doc.size(); ++i )
        {
            auto where = "/" + std::to_string( i );
            if ( i % 2 == 0 )
                out.states.push_back( read_state( r, doc[ i ], where ) );
            else
                out.events.push_back( r.string( doc[ i ], where ) );
        }
    }
    else
    {
        const auto& states = r.array( r.field( doc, "states", "/" ), "/states" );
        for ( std::size_t i = 0; i < states.size(); ++i )
            out.states.push_back( read_state( r, states[ i ], "/states/" + std::to_string( i ) ) );
        out.events = r.strings( r.field( doc, "events", "/" ), "/events" );
        if ( doc.contains( "system" ) )
            out.system = r.string( doc[ "system" ], "/system" );
    }
    if ( out.events.empty() )
        r.fail( "/", "a fragment needs at least one event" );
    if ( out.states.size() != out.events.size() + 1 )
        r.fail( "/", "expected one more state than events, got " + std::to_string( out.states.size() ) + " states and "
                         + std::to_string( out.events.size() ) + " events" );
    return out;
}

fragment_document load_fragment( const std::filesystem::path& path )
{
    auto doc = parse_fragment( read_file( path ), path.string() );
    if ( doc.system && std::filesystem::path( *doc.system ).is_relative() )
        doc.system = ( path.parent_path() / *doc.system ).lexically_normal().string();
    return doc;
}

fragment resolve_fragment( const timed_system& system, const fragment_document& doc )
{
    std::vector< event_id > events;
    for ( std::size_t k = 0; k < doc.events.size(); ++k )
    {
        try
        {
            events.push_back( system.event( doc.events[ k ] ) );
        }
        catch ( const model_error& e )
        {
            throw input_error( "e(" + std::to_string( k + 1 ) + "): " + e.what() );
        }
    }

    std::optional< fragment > replayed;
    try
    {
        replayed = replay( system, events );
    }
    catch ( const model_error& e )
    {
        throw input_error( std::string( "fragment is not executable: " ) + e.what() );
    }

    for ( std::size_t k = 0; k < doc.states.size(); ++k )
    {
        const auto& expected = replayed->state( k );
        const auto& given = doc.states[ k ];
        const auto& activity = system.activity_names()[ expected.activity ];
        if ( given.activity != activity )
            throw input_error( "s(" + std::to_string( k ) + ") is '" + given.activity + "' but replay reaches '" + activity
                               + "'" );
        if ( !given.timers )
            continue;
        for ( const auto& [ name, value ] : *given.timers )
        {
            event_id e;
            try
            {
                e = system.event( name );
            }
            catch ( const model_error& err )
            {
                throw input_error( "s(" + std::to_string( k ) + ") timers: " + err.what() );
            }
            if ( is_tick( e ) || expected.timers[ event_index( e ) ] != value )
                throw input_error( "s(" + std::to_string( k ) + ") timer " + name + " = " + std::to_string( value )
                                   + " does not match the replay" );
        }
    }
    return std::move( *replayed );
}

std::string fragment_to_json( const timed_system& system, const fragment& f )
{
    json doc;
    doc[ "states" ] = json::array();
    for ( const auto& s : f.states() )
    {
        json timers = json::object();
        for ( std::size_t i = 0; i < s.timers.size(); ++i )
            timers[ system.event_names()[ i ] ] = s.timers[ i ];
        doc[ "states" ].push_back( { { "activity", system.activity_names()[ s.activity ] }, { "timers", timers } } );
    }
    doc[ "events" ] = json::array();
    for ( auto e : f.events() )
        doc[ "events" ].push_back( std::string( system.event_name( e ) ) );
    return doc.dump( 2 ) + "\n";
}

namespace
{

std::string quote( std::string_view s )
{
    std::string out = "\"";
    for ( char c : s )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

void write_dot( std::ostream& out, const untimed_des& des )
{
    out << "digraph G_act {\n  rankdir=LR;\n";
    out << "  __start [shape=point];\n  __start -> " << quote( des.initial ) << ";\n";
    for ( const auto& s : des.states )
    {
        std::string label = s;
        if ( auto it = des.labels.find( s ); it != des.labels.end() && !it->second.empty() )
        {
            label += "\\n{";
            for ( std::size_t i = 0; i < it->second.size(); ++i )
                label += ( i ? "," : "" ) + it->second[ i ];
            label += "}";
        }
        out << "  " << quote( s ) << " [label=\"" << label << "\"];\n";
    }
    for ( const auto& t : des.transitions )
        out << "  " << quote( t.from ) << " -> " << quote( t.to ) << " [label=" << quote( t.event ) << "];\n";
    out << "}\n";
}

void write_dot( std::ostream& out, const timed_des& g, std::span< const std::size_t > path,
                std::span< const event_id > events )
{
    std::set< std::size_t > on_path( path.begin(), path.end() );
    std::set< std::tuple< std::size_t, event_id, std::size_t > > used;
    for ( std::size_t k = 0; k < events.size() && k + 1 < path.size(); ++k )
        used.emplace( path[ k ], events[ k ], path[ k + 1 ] );

    out << "digraph G {\n";
    out << "  __start [shape=point];\n  __start -> s" << g.initial() << ";\n";
    for ( std::size_t i = 0; i < g.size(); ++i )
    {
        out << "  s" << i << " [label=" << quote( g.describe( i ) );
        if ( on_path.contains( i ) )
            out << ", color=red, fontcolor=red";
        out << "];\n";
    }
    for ( std::size_t i = 0; i < g.size(); ++i )
        for ( const auto& edge : g.edges( i ) )
        {
            out << "  s" << i << " -> s" << edge.target << " [label=" << quote( g.event_name( edge.event ) );
            if ( is_tick( edge.event ) )
                out << ", style=dashed";
            if ( used.contains( { i, edge.event, edge.target } ) )
                out << ", color=red, fontcolor=red";
            out << "];\n";
        }
    out << "}\n";
}

} // namespace ticksynth::io
