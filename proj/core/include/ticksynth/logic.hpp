#pragma once

#include "ticksynth/tdes.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ticksynth
{

enum class formula_kind
{
    truth,
    atom,
    negation,
    conjunction,
    disjunction,
    until
};

// Immutable ticked LTL_f formula. Nodes are shared; equality is structural.
// Derived operators (false, ->, <->, F, G) are expanded into the core kinds
// when built.
class formula
{
    struct node;
    std::shared_ptr< const node > _node;

    explicit formula( std::shared_ptr< const node > n ) : _node{ std::move( n ) } {}

public:
    static formula truth();
    static formula atom( std::string name );
    static formula negation( formula operand );
    static formula conjunction( formula lhs, formula rhs );
    static formula disjunction( formula lhs, formula rhs );
    // Throws std::invalid_argument unless 0 <= lower <= upper.
    static formula until( formula lhs, formula rhs, int lower, int upper );

    static formula falsity();
    static formula implies( formula lhs, formula rhs );
    static formula iff( formula lhs, formula rhs );
    static formula eventually( int lower, int upper, formula operand );
    static formula always( int lower, int upper, formula operand );

    [[nodiscard]] formula_kind kind() const;
    [[nodiscard]] const std::string& atom_name() const;
    // Operand of a negation, or left operand of a binary node.
    [[nodiscard]] const formula& lhs() const;
    [[nodiscard]] const formula& rhs() const;
    [[nodiscard]] std::uint32_t lower() const;
    [[nodiscard]] std::uint32_t upper() const;
    [[nodiscard]] std::size_t depth() const;

    friend bool operator==( const formula& a, const formula& b );
};

// Emits the concrete syntax accepted by parse_formula, with the minimum of
// parentheses.
[[nodiscard]] std::string to_string( const formula& f );

class parse_error : public std::runtime_error
{
    std::size_t _position;

public:
    parse_error( const std::string& what, std::size_t position );
    [[nodiscard]] std::size_t position() const { return _position; }
};

// Precedence, lowest first: <->, ->, |, &, U[m,n] (right-assoc), then the
// prefix operators !, F[m,n], G[m,n]. Atoms are identifiers; `true`,
// `false` and parentheses are accepted.
[[nodiscard]] formula parse_formula( std::string_view text );

// Distinct subformulas in topological order (children first, root last).
class subformula_table
{
public:
    static constexpr std::size_t none = std::numeric_limits< std::size_t >::max();

    struct entry
    {
        formula_kind kind;
        std::string atom;         // atom only
        std::size_t left = none;  // negation operand, or left operand
        std::size_t right = none; // binary nodes
        std::uint32_t lower = 0;  // until only
        std::uint32_t upper = 0;
    };

    explicit subformula_table( const formula& root );

    [[nodiscard]] std::size_t size() const { return _entries.size(); }
    [[nodiscard]] const entry& operator[]( std::size_t i ) const { return _entries[ i ]; }
    [[nodiscard]] const std::vector< entry >& entries() const { return _entries; }
    [[nodiscard]] std::size_t root() const { return _entries.size() - 1; }
    [[nodiscard]] std::string label( std::size_t i ) const; // e.g. "Until#4"

private:
    std::vector< entry > _entries;
};

[[nodiscard]] inline subformula_table subformulas( const formula& f ) { return subformula_table( f ); }

class evaluation_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Lazy, memoized satisfaction of every subformula at every position of one
// fragment. Throws evaluation_error on construction when the formula names
// an atom the labeling does not know.
class evaluator
{
    subformula_table _table;
    fragment_view _fragment;
    const labeling* _labels;
    std::vector< std::size_t > _atom_index; // per entry, for atoms
    std::vector< std::int8_t > _memo;       // -1 unknown, 0 false, 1 true; [entry * (H+1) + k]

    bool compute( std::size_t entry, std::size_t k );

public:
    evaluator( subformula_table table, fragment_view f, const labeling& labels );

    [[nodiscard]] const subformula_table& table() const { return _table; }
    // Whether the k-th suffix satisfies the given subformula.
    [[nodiscard]] bool holds( std::size_t entry, std::size_t k );
    [[nodiscard]] bool holds_root( std::size_t k ) { return holds( _table.root(), k ); }
};

// pi(k...) |= phi.
[[nodiscard]] bool evaluate( fragment_view f, const formula& phi, std::size_t k, const labeling& labels );

} // namespace ticksynth
