#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ticksynth
{

// Untimed activity automaton with per-event timing bounds, and the timed
// automaton (Brandin-Wonham style, discrete `tick`) derived from it.

enum class event_kind
{
    prospective, // finite upper bound
    remote       // upper bound is infinity
};

struct event_timing
{
    event_kind kind = event_kind::remote;
    int lower = 0;
    std::optional< int > upper; // only for prospective events

    // Value a timer takes when the event (re)enters its window: u for
    // prospective events, l for remote ones. Also the top of T_sigma.
    [[nodiscard]] int timer_default() const { return kind == event_kind::prospective ? upper.value_or( 0 ) : lower; }

    static event_timing prospective( int lower, int upper ) { return { event_kind::prospective, lower, upper }; }
    static event_timing remote( int lower ) { return { event_kind::remote, lower, std::nullopt }; }

    friend bool operator==( const event_timing&, const event_timing& ) = default;
};

struct activity_transition
{
    std::string from;
    std::string event;
    std::string to;

    friend bool operator==( const activity_transition&, const activity_transition& ) = default;
};

// Plain description of an untimed DES, as read from disk. Nothing is
// checked on construction; run `validate` before compiling it.
struct untimed_des
{
    std::vector< std::string > states;
    std::vector< std::string > events;
    std::vector< activity_transition > transitions;
    std::string initial;
    std::vector< std::string > atoms;
    std::map< std::string, std::vector< std::string > > labels;
    std::map< std::string, event_timing > timing;
};

enum class severity
{
    error,
    warning
};

struct diagnostic
{
    severity level = severity::error;
    std::string invariant; // short machine-friendly tag, e.g. "transition-target-undeclared"
    std::string element;   // offending element
    std::string message;
};

// Empty iff every invariant holds. Dead timing entries (events that no
// transition uses) produce warnings.
[[nodiscard]] std::vector< diagnostic > validate( const untimed_des& des );

[[nodiscard]] bool has_errors( std::span< const diagnostic > diagnostics );

class model_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Event reference: non-negative values index the compiled system's events
// (sorted by name), `event_id::tick` is the global clock event.
enum class event_id : std::int32_t
{
    tick = -1
};

[[nodiscard]] constexpr event_id make_event( std::size_t index ) { return static_cast< event_id >( index ); }
[[nodiscard]] constexpr bool is_tick( event_id e ) { return e == event_id::tick; }
[[nodiscard]] constexpr std::size_t event_index( event_id e ) { return static_cast< std::size_t >( e ); }

inline constexpr std::string_view tick_name = "tick";

struct timed_state
{
    std::size_t activity = 0;
    std::vector< int > timers; // one per event, indexed like timed_system::event_names()

    friend bool operator==( const timed_state&, const timed_state& ) = default;
    friend auto operator<=>( const timed_state&, const timed_state& ) = default;
};

struct timed_state_hash
{
    std::size_t operator()( const timed_state& s ) const noexcept;
};

// Atomic-proposition labeling lifted to timed states through the activity
// component.
class labeling
{
    std::vector< std::string > _atoms;
    std::vector< std::vector< bool > > _by_activity; // [activity][atom]

public:
    labeling() = default;
    labeling( std::vector< std::string > atoms, std::vector< std::vector< bool > > by_activity );

    [[nodiscard]] const std::vector< std::string >& atoms() const { return _atoms; }
    [[nodiscard]] std::optional< std::size_t > atom_index( std::string_view atom ) const;
    [[nodiscard]] bool holds( std::size_t activity, std::size_t atom ) const;
    [[nodiscard]] bool holds( const timed_state& s, std::size_t atom ) const { return holds( s.activity, atom ); }
};

// Compiled, index-based form of a validated untimed DES. Provides the
// timed semantics: initial state, enabling conditions and the timer update.
class timed_system
{
    std::vector< std::string > _activities;
    std::vector< std::string > _events; // sorted by name
    std::vector< event_timing > _timing; // parallel to _events
    std::vector< std::vector< std::optional< std::size_t > > > _succ; // [activity][event]
    std::size_t _initial = 0;
    labeling _labels;

public:
    // Throws model_error listing the diagnostics when `des` has errors.
    explicit timed_system( const untimed_des& des );

    [[nodiscard]] const std::vector< std::string >& activity_names() const { return _activities; }
    [[nodiscard]] const std::vector< std::string >& event_names() const { return _events; }
    [[nodiscard]] const event_timing& timing( std::size_t event ) const { return _timing[ event ]; }
    [[nodiscard]] const labeling& labels() const { return _labels; }
    [[nodiscard]] std::size_t initial_activity() const { return _initial; }
    [[nodiscard]] std::optional< std::size_t > activity_successor( std::size_t activity, std::size_t event ) const
    {
        return _succ[ activity ][ event ];
    }

    [[nodiscard]] std::optional< std::size_t > find_activity( std::string_view name ) const;
    // Throws model_error for unknown names; "tick" maps to event_id::tick.
    [[nodiscard]] event_id event( std::string_view name ) const;
    [[nodiscard]] std::string_view event_name( event_id e ) const;

    [[nodiscard]] timed_state initial_state() const;
    [[nodiscard]] bool enabled( const timed_state& s, event_id e ) const;
    [[nodiscard]] bool enabled( const timed_state& s, std::string_view event_name ) const { return enabled( s, event( event_name ) ); }

    // Throws model_error("not enabled") when the precondition fails.
    [[nodiscard]] timed_state step( const timed_state& s, event_id e ) const;
    [[nodiscard]] timed_state step( const timed_state& s, std::string_view event_name ) const { return step( s, event( event_name ) ); }

    // Enabled events in lexicographic order of their names ("tick" included).
    [[nodiscard]] std::vector< event_id > enabled_events( const timed_state& s ) const;

    [[nodiscard]] bool timers_in_range( const timed_state& s ) const;
    [[nodiscard]] std::string describe( const timed_state& s ) const;
};

struct timed_edge
{
    event_id event;
    std::size_t target;

    friend bool operator==( const timed_edge&, const timed_edge& ) = default;
};

// Reachable part of a timed DES as an explicit graph. State 0 is the initial
// state. `build_tdes` numbers states in breadth-first discovery order and
// sorts outgoing edges by event name.
class timed_des
{
    std::vector< timed_state > _states;
    std::vector< std::vector< timed_edge > > _edges;
    std::vector< std::string > _event_names;
    std::vector< std::string > _activity_names;
    labeling _labels;
    std::unordered_map< timed_state, std::size_t, timed_state_hash > _index;

public:
    // Edges must reference existing states and be deterministic per event.
    timed_des( std::vector< timed_state > states, std::vector< std::vector< timed_edge > > edges,
               std::vector< std::string > event_names, std::vector< std::string > activity_names, labeling labels );

    [[nodiscard]] std::size_t size() const { return _states.size(); }
    [[nodiscard]] std::size_t initial() const { return 0; }
    [[nodiscard]] const timed_state& state( std::size_t i ) const { return _states[ i ]; }
    [[nodiscard]] const std::vector< timed_state >& states() const { return _states; }
    [[nodiscard]] std::span< const timed_edge > edges( std::size_t i ) const { return _edges[ i ]; }
    [[nodiscard]] std::size_t transition_count() const;
    [[nodiscard]] std::optional< std::size_t > successor( std::size_t i, event_id e ) const;
    [[nodiscard]] std::optional< std::size_t > find( const timed_state& s ) const;

    [[nodiscard]] const labeling& labels() const { return _labels; }
    [[nodiscard]] const std::vector< std::string >& event_names() const { return _event_names; }
    [[nodiscard]] const std::vector< std::string >& activity_names() const { return _activity_names; }
    [[nodiscard]] std::string_view event_name( event_id e ) const;
    [[nodiscard]] std::string describe( std::size_t i ) const;
};

inline constexpr std::size_t default_state_cap = 1'000'000;

// Breadth-first exploration of the reachable timed states. Throws
// model_error("state cap exceeded ...") past `state_cap` states.
[[nodiscard]] timed_des build_tdes( const timed_system& system, std::size_t state_cap = default_state_cap );

class fragment;

// Non-owning view of s(k)...s(H) with the events in between. Positions are
// relative to the view.
class fragment_view
{
    std::span< const timed_state > _states;
    std::span< const event_id > _events;
    std::span< const std::uint32_t > _ticks; // ticks among the first i events, i = 0..H

public:
    fragment_view() = default;
    fragment_view( std::span< const timed_state > states, std::span< const event_id > events,
                   std::span< const std::uint32_t > ticks )
        : _states{ states }, _events{ events }, _ticks{ ticks } {}

    [[nodiscard]] std::size_t horizon() const { return _events.size(); }
    [[nodiscard]] const timed_state& state( std::size_t k ) const;
    // e(k) for k in 1..H.
    [[nodiscard]] event_id event( std::size_t k ) const;
    [[nodiscard]] std::span< const timed_state > states() const { return _states; }
    [[nodiscard]] std::span< const event_id > events() const { return _events; }

    // Number of ticks among e(k+1)...e(j). Throws std::out_of_range unless
    // 0 <= k <= j <= H.
    [[nodiscard]] std::size_t count( std::size_t k, std::size_t j ) const;
    [[nodiscard]] fragment_view suffix( std::size_t k ) const;

    friend bool operator==( const fragment_view& a, const fragment_view& b );
};

// Alternating state/event sequence s(0), e(1), s(1), ..., e(H), s(H).
// Construction only checks the shape; `check_execution` checks it against
// a system.
class fragment
{
    std::vector< timed_state > _states;
    std::vector< event_id > _events;
    std::vector< std::uint32_t > _ticks;

public:
    fragment( std::vector< timed_state > states, std::vector< event_id > events );

    [[nodiscard]] std::size_t horizon() const { return _events.size(); }
    [[nodiscard]] const timed_state& state( std::size_t k ) const { return view().state( k ); }
    [[nodiscard]] event_id event( std::size_t k ) const { return view().event( k ); }
    [[nodiscard]] const std::vector< timed_state >& states() const { return _states; }
    [[nodiscard]] const std::vector< event_id >& events() const { return _events; }
    [[nodiscard]] std::size_t count( std::size_t k, std::size_t j ) const { return view().count( k, j ); }
    [[nodiscard]] fragment_view suffix( std::size_t k ) const { return view().suffix( k ); }
    [[nodiscard]] fragment_view view() const { return { _states, _events, _ticks }; }
    operator fragment_view() const { return view(); } // NOLINT(google-explicit-constructor)

    friend bool operator==( const fragment& a, const fragment& b )
    {
        return a._states == b._states && a._events == b._events;
    }
};

// Runs `events` from the initial state. Throws model_error naming the first
// step that is not enabled.
[[nodiscard]] fragment replay( const timed_system& system, std::span< const event_id > events );

// nullopt when f is an execution fragment of `system`, else the reason.
[[nodiscard]] std::optional< std::string > check_execution( const timed_system& system, const fragment& f );

} // namespace ticksynth
