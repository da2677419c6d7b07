#pragma once

#include "ticksynth/encode.hpp"
#include "ticksynth/logic.hpp"
#include "ticksynth/tdes.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>

namespace ticksynth
{

struct synthesis_request
{
    untimed_des system;
    formula phi = formula::truth();
    std::size_t horizon_min = 1;
    std::size_t horizon_max = 1;
    tick_mode mode = tick_mode::exact;
    std::size_t state_cap = default_state_cap;
    // Horizons solved concurrently; the smallest feasible one wins.
    std::size_t workers = 1;
};

struct synthesis_stats
{
    std::size_t variables = 0;   // of the model that produced the answer (or the last one tried)
    std::size_t constraints = 0;
    std::uint64_t solver_nodes = 0; // summed over every horizon tried
    std::size_t horizons_tried = 0;
    std::size_t exact_retries = 0;  // paper-mode certification failures re-solved in exact mode
    std::chrono::milliseconds wall_time{ 0 };
};

struct synthesis_result
{
    std::optional< fragment > witness; // certified; nullopt when nothing was found
    std::size_t horizon = 0;           // horizon of the witness, or horizon_max when not found
    synthesis_stats stats;

    [[nodiscard]] bool found() const { return witness.has_value(); }
};

// Encode, solve, decode and certify for H = horizon_min..horizon_max,
// returning the first horizon that yields a certified fragment. In paper
// mode a certification failure re-solves the same horizon in exact mode.
[[nodiscard]] synthesis_result synthesize( const synthesis_request& request );
[[nodiscard]] synthesis_result synthesize( const timed_des& g, const formula& phi, std::size_t horizon_min,
                                           std::size_t horizon_max, tick_mode mode = tick_mode::exact,
                                           std::size_t workers = 1 );

class budget_exceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t default_oracle_budget = 20'000'000;

// Calls `visit` with every execution fragment of horizon H (TDES state
// indices and events), in lexicographic order of event names. Stops early
// when `visit` returns false. Throws budget_exceeded once more than
// `budget` search nodes have been expanded. Returns the nodes expanded.
using fragment_visitor = std::function< bool( std::span< const std::size_t >, std::span< const event_id > ) >;
std::uint64_t enumerate_fragments( const timed_des& g, std::size_t horizon, const fragment_visitor& visit,
                                   std::uint64_t budget = default_oracle_budget );

// Brute force: enumerate every fragment of each horizon and evaluate the
// formula directly. Returns the first satisfying fragment.
[[nodiscard]] synthesis_result oracle_synthesize( const synthesis_request& request,
                                                  std::uint64_t budget = default_oracle_budget );
[[nodiscard]] synthesis_result oracle_synthesize( const timed_des& g, const formula& phi, std::size_t horizon_min,
                                                  std::size_t horizon_max, std::uint64_t budget = default_oracle_budget );

} // namespace ticksynth
