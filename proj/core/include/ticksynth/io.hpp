#pragma once

#include "ticksynth/tdes.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// File formats: system and fragment JSON, DOT exports.
namespace ticksynth::io
{

class input_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// {"states":[...], "events":[{"name", "kind":"prospective"|"remote", "lower",
//  "upper"?}], "transitions":[{"from","event","to"}], "initial",
//  "atoms":[...], "labels":{state:[atoms]}}
// Throws input_error with `source` and a JSON pointer-ish location.
[[nodiscard]] untimed_des parse_system( std::string_view text, std::string_view source = "<input>" );
[[nodiscard]] untimed_des load_system( const std::filesystem::path& path );
[[nodiscard]] std::string system_to_json( const untimed_des& des );

// A fragment as written on disk. Either {"states":[...],"events":[...]} or
// a flat array alternating states and events. A state is an activity name
// or {"activity", "timers"?}. An optional "system" names the system file,
// relative to the fragment file.
struct fragment_document
{
    struct state
    {
        std::string activity;
        std::optional< std::map< std::string, int > > timers;
    };
    std::vector< state > states;
    std::vector< std::string > events;
    std::optional< std::string > system;
};

[[nodiscard]] fragment_document parse_fragment( std::string_view text, std::string_view source = "<input>" );
[[nodiscard]] fragment_document load_fragment( const std::filesystem::path& path );

// Replays the document's events from the initial state and checks the
// listed activities (and timers, when given) against the replay.
[[nodiscard]] fragment resolve_fragment( const timed_system& system, const fragment_document& doc );

[[nodiscard]] std::string fragment_to_json( const timed_system& system, const fragment& f );

// G_act: one node per activity, edges labeled by event.
void write_dot( std::ostream& out, const untimed_des& des );

// Reachable TDES; nodes labeled "activity | timers", tick edges dashed.
// With `path` (TDES state indices s(0..H) and events) the traversed nodes
// and edges are drawn red.
void write_dot( std::ostream& out, const timed_des& g, std::span< const std::size_t > path = {},
                std::span< const event_id > events = {} );

} // namespace ticksynth::io
