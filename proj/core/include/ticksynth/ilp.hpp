#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// A small exact integer feasibility engine. No floating point anywhere:
// pruning is done by integer bounds propagation only.
namespace ticksynth::ilp
{

using var_index = std::uint32_t;

enum class comparator
{
    less_equal,
    greater_equal,
    equal
};

struct term
{
    std::int64_t coefficient;
    var_index var;
};

struct linear_constraint
{
    std::vector< term > terms;
    comparator cmp = comparator::less_equal;
    std::int64_t rhs = 0;
};

struct variable
{
    std::string name;
    std::int64_t lower;
    std::int64_t upper;
};

// Normalized internal row: sum(coefficients[i] * vars[i]) <= rhs.
struct row
{
    std::vector< std::int64_t > coefficients;
    std::vector< var_index > vars;
    std::int64_t rhs;
};

class model
{
    std::vector< variable > _vars;
    std::vector< linear_constraint > _constraints;
    std::vector< row > _rows;

public:
    // Throws std::invalid_argument when lower > upper.
    var_index add_var( std::string name, std::int64_t lower, std::int64_t upper );
    var_index add_binary( std::string name ) { return add_var( std::move( name ), 0, 1 ); }

    // Throws std::invalid_argument when a term names an undeclared variable.
    // Equalities are stored as a <= / >= row pair.
    void add_constraint( linear_constraint c );
    void add_le( std::vector< term > terms, std::int64_t rhs ) { add_constraint( { std::move( terms ), comparator::less_equal, rhs } ); }
    void add_ge( std::vector< term > terms, std::int64_t rhs ) { add_constraint( { std::move( terms ), comparator::greater_equal, rhs } ); }
    void add_eq( std::vector< term > terms, std::int64_t rhs ) { add_constraint( { std::move( terms ), comparator::equal, rhs } ); }

    [[nodiscard]] std::size_t var_count() const { return _vars.size(); }
    [[nodiscard]] std::size_t constraint_count() const { return _constraints.size(); }
    [[nodiscard]] const variable& var( var_index v ) const { return _vars[ v ]; }
    [[nodiscard]] const std::vector< variable >& variables() const { return _vars; }
    [[nodiscard]] const std::vector< linear_constraint >& constraints() const { return _constraints; }
    [[nodiscard]] const std::vector< row >& rows() const { return _rows; }
};

struct assignment
{
    std::vector< std::int64_t > values;

    [[nodiscard]] std::int64_t operator[]( var_index v ) const { return values[ v ]; }
    friend bool operator==( const assignment&, const assignment& ) = default;
};

struct solve_stats
{
    std::uint64_t nodes = 0;      // branching decisions
    std::uint64_t backtracks = 0;
    std::uint64_t row_visits = 0; // propagation work
};

struct solve_result
{
    std::optional< assignment > solution; // nullopt: infeasible
    solve_stats stats;

    [[nodiscard]] bool feasible() const { return solution.has_value(); }
};

// Depth-first branch and bound: propagate bounds to a fixpoint, backtrack
// on crossed bounds, branch on the lowest-index unfixed variable trying its
// lower bound first. Deterministic.
[[nodiscard]] solve_result solve( const model& m );

// Independent check of an assignment against the constraints as added
// (not the normalized rows). Returns a description of the first violation.
[[nodiscard]] std::optional< std::string > first_violation( const model& m, const assignment& a );
[[nodiscard]] inline bool satisfies( const model& m, const assignment& a ) { return !first_violation( m, a ); }

// Plain-text LP-like listing: named variables and integer coefficients.
void write_lp( std::ostream& out, const model& m );

} // namespace ticksynth::ilp
