#pragma once

#include "ticksynth/ilp.hpp"
#include "ticksynth/logic.hpp"
#include "ticksynth/tdes.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace ticksynth
{

// How tick occurrences z_e(k) are tied to the trajectory.
enum class tick_mode
{
    // From state membership only: z_e(k) = alpha^T w(k-1) AND beta^T w(k).
    // Over-approximates whenever a non-tick step leaves a tick-enabled state
    // and enters a tick-reachable one, so decoded fragments are certified.
    paper,
    // One selector per (step, transition); z_e(k) is the sum of the selected
    // tick transitions.
    exact
};

[[nodiscard]] const char* to_string( tick_mode mode );

struct graph_edge
{
    std::size_t source;
    event_id event;
    std::size_t target;
};

// Variable registry of one bounded encoding plus the model itself. Model
// variables carry registry names such as "w[3][17]", "ze[4]" or
// "z[Until#2][0,5]".
struct encoding
{
    ilp::model model;
    std::size_t horizon = 0;
    std::size_t num_states = 0;
    tick_mode mode = tick_mode::paper;
    std::int64_t big_m = 0;

    std::vector< std::vector< ilp::var_index > > w; // [k][i], k in 0..H
    std::vector< ilp::var_index > ze;               // [k], k in 1..H; ze[0] unused

    std::vector< std::vector< bool > > adjacency; // A[i][j]
    std::vector< bool > alpha;                    // tick enabled at s_i
    std::vector< bool > beta;                     // s_i has a tick predecessor

    std::vector< graph_edge > edges;                      // exact mode only
    std::vector< std::vector< ilp::var_index > > edge_vars; // [k][t], k in 1..H; [0] unused

    std::optional< subformula_table > table;
    std::vector< std::vector< ilp::var_index > > z; // [entry][k]

    // Threshold and witness indicators of each until entry, [k][j - k].
    struct until_vars
    {
        std::vector< std::vector< ilp::var_index > > at_least; // c(k,j) >= m
        std::vector< std::vector< ilp::var_index > > at_most;  // c(k,j) <= n
        std::vector< std::vector< ilp::var_index > > witness;  // z_phi(k,j)
    };
    std::vector< std::optional< until_vars > > until; // [entry]

    // Terms of the counter expression c(k,j) = sum_{i=k+1..j} ze[i].
    [[nodiscard]] std::vector< ilp::term > counter( std::size_t k, std::size_t j ) const;
};

// Trajectory rows: one-hot w(k), w(k+1) <= A^T w(k), w(0) pinned to the
// initial state through its bounds.
[[nodiscard]] encoding encode_trajectory( const timed_des& g, std::size_t horizon );

// Tick indicators from alpha/beta membership (tick_mode::paper).
void encode_ticks( const timed_des& g, encoding& enc );

// Transition selectors (tick_mode::exact); defines ze from them.
void encode_edges_exact( const timed_des& g, encoding& enc );

// z_phi(k) for every subformula and position. Throws evaluation_error for
// atoms outside the system's propositions.
void encode_formula( const timed_des& g, const formula& phi, encoding& enc );

// z_root(0) = 1.
void encode_root( encoding& enc );

// All of the above.
[[nodiscard]] encoding encode( const timed_des& g, const formula& phi, std::size_t horizon, tick_mode mode );

// Adds the two big-M rows tying `at_least` and `at_most` to a counter
// expression. Shared by encode_formula and the threshold tests.
void add_threshold_rows( ilp::model& m, const std::vector< ilp::term >& counter, std::uint32_t lower,
                         std::uint32_t upper, std::int64_t big_m, ilp::var_index at_least, ilp::var_index at_most );

class decode_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Reads the trajectory out of a satisfying assignment and certifies the
// result by direct evaluation. Throws decode_error when the selected
// states/events are not an execution of `g`, or when the fragment does not
// satisfy the formula.
[[nodiscard]] fragment decode( const encoding& enc, const ilp::assignment& a, const timed_des& g );

// The valuation a genuine fragment induces on every registered variable:
// w and ze from the fragment, thresholds from tick counts, z from direct
// evaluation. `states` are TDES indices s(0..H).
[[nodiscard]] ilp::assignment induced_assignment( const encoding& enc, const timed_des& g,
                                                  std::span< const std::size_t > states,
                                                  std::span< const event_id > events );

} // namespace ticksynth
