#include "ticksynth/logic.hpp"

#include <cctype>
#include <map>
#include <tuple>

namespace ticksynth
{

struct formula::node
{
    formula_kind kind;
    std::string atom;
    std::vector< formula > children;
    std::uint32_t lower = 0;
    std::uint32_t upper = 0;
    std::size_t depth = 1;
};

namespace
{

std::size_t child_depth( const std::vector< formula >& children )
{
    std::size_t d = 0;
    for ( const auto& c : children )
        d = std::max( d, c.depth() );
    return d;
}

} // namespace

formula formula::truth()
{
    static const formula t{ std::make_shared< const node >( node{ formula_kind::truth, {}, {}, 0, 0, 1 } ) };
    return t;
}

formula formula::atom( std::string name )
{
    if ( name.empty() )
        throw std::invalid_argument( "atom name must not be empty" );
    return formula{ std::make_shared< const node >( node{ formula_kind::atom, std::move( name ), {}, 0, 0, 1 } ) };
}

formula formula::negation( formula operand )
{
    std::vector< formula > children{ std::move( operand ) };
    auto d = child_depth( children ) + 1;
    return formula{ std::make_shared< const node >( node{ formula_kind::negation, {}, std::move( children ), 0, 0, d } ) };
}

formula formula::conjunction( formula lhs, formula rhs )
{
    std::vector< formula > children{ std::move( lhs ), std::move( rhs ) };
    auto d = child_depth( children ) + 1;
    return formula{ std::make_shared< const node >( node{ formula_kind::conjunction, {}, std::move( children ), 0, 0, d } ) };
}

formula formula::disjunction( formula lhs, formula rhs )
{
    std::vector< formula > children{ std::move( lhs ), std::move( rhs ) };
    auto d = child_depth( children ) + 1;
    return formula{ std::make_shared< const node >( node{ formula_kind::disjunction, {}, std::move( children ), 0, 0, d } ) };
}

formula formula::until( formula lhs, formula rhs, int lower, int upper )
{
    if ( lower < 0 || upper < 0 )
        throw std::invalid_argument( "until bounds must be nonnegative" );
    if ( lower > upper )
        throw std::invalid_argument( "until bounds need m <= n, got [" + std::to_string( lower ) + ","
                                     + std::to_string( upper ) + "]" );
    std::vector< formula > children{ std::move( lhs ), std::move( rhs ) };
    auto d = child_depth( children ) + 1;
    return formula{ std::make_shared< const node >( node{ formula_kind::until, {}, std::move( children ),
                                                          static_cast< std::uint32_t >( lower ),
                                                          static_cast< std::uint32_t >( upper ), d } ) };
}

formula formula::falsity() { return negation( truth() ); }

formula formula::implies( formula lhs, formula rhs ) { return disjunction( negation( std::move( lhs ) ), std::move( rhs ) ); }

formula formula::iff( formula lhs, formula rhs ) { return conjunction( implies( lhs, rhs ), implies( rhs, lhs ) ); }

formula formula::eventually( int lower, int upper, formula operand )
{
    return until( truth(), std::move( operand ), lower, upper );
}

formula formula::always( int lower, int upper, formula operand )
{
    return negation( eventually( lower, upper, negation( std::move( operand ) ) ) );
}

formula_kind formula::kind() const { return _node->kind; }
const std::string& formula::atom_name() const { return _node->atom; }
const formula& formula::lhs() const { return _node->children.at( 0 ); }
const formula& formula::rhs() const { return _node->children.at( 1 ); }
std::uint32_t formula::lower() const { return _node->lower; }
std::uint32_t formula::upper() const { return _node->upper; }
std::size_t formula::depth() const { return _node->depth; }

bool operator==( const formula& a, const formula& b )
{
    if ( a._node == b._node )
        return true;
    const auto& x = *a._node;
    const auto& y = *b._node;
    return x.kind == y.kind && x.atom == y.atom && x.lower == y.lower && x.upper == y.upper && x.children == y.children;
}

// Printing

namespace
{

int precedence( formula_kind k )
{
    switch ( k )
    {
    case formula_kind::disjunction: return 1;
    case formula_kind::conjunction: return 2;
    case formula_kind::until: return 3;
    default: return 4;
    }
}

void print( const formula& f, std::string& out );

void print_child( const formula& f, int min_precedence, std::string& out )
{
    bool parens = precedence( f.kind() ) < min_precedence;
    if ( parens )
        out += '(';
    print( f, out );
    if ( parens )
        out += ')';
}

void print( const formula& f, std::string& out )
{
    switch ( f.kind() )
    {
    case formula_kind::truth: out += "true"; break;
    case formula_kind::atom: out += f.atom_name(); break;
    case formula_kind::negation:
        out += '!';
        print_child( f.lhs(), 4, out );
        break;
    case formula_kind::conjunction:
    case formula_kind::disjunction:
    {
        int p = precedence( f.kind() );
        print_child( f.lhs(), p, out );
        out += f.kind() == formula_kind::conjunction ? " & " : " | ";
        print_child( f.rhs(), p + 1, out );
        break;
    }
    case formula_kind::until:
        print_child( f.lhs(), 4, out );
        out += " U[" + std::to_string( f.lower() ) + "," + std::to_string( f.upper() ) + "] ";
        print_child( f.rhs(), 3, out );
        break;
    }
}

} // namespace

std::string to_string( const formula& f )
{
    std::string out;
    print( f, out );
    return out;
}

// Parsing

parse_error::parse_error( const std::string& what, std::size_t position )
    : std::runtime_error( what + " at position " + std::to_string( position ) ), _position{ position }
{}

namespace
{

class parser
{
    std::string_view _text;
    std::size_t _pos = 0;

    [[noreturn]] void fail( const std::string& what, std::size_t at ) const { throw parse_error( what, at ); }
    [[noreturn]] void fail( const std::string& what ) const { fail( what, _pos ); }

    void skip_space()
    {
        while ( _pos < _text.size() && std::isspace( static_cast< unsigned char >( _text[ _pos ] ) ) )
            ++_pos;
    }

    bool accept( std::string_view token )
    {
        skip_space();
        if ( _text.substr( _pos, token.size() ) == token )
        {
            _pos += token.size();
            return true;
        }
        return false;
    }

    void expect( std::string_view token )
    {
        if ( !accept( token ) )
            fail( "expected '" + std::string( token ) + "'" );
    }

    static bool ident_start( char c ) { return std::isalpha( static_cast< unsigned char >( c ) ) || c == '_'; }
    static bool ident_char( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_'; }

    // Identifier at the cursor without consuming it.
    std::string_view peek_identifier()
    {
        skip_space();
        if ( _pos >= _text.size() || !ident_start( _text[ _pos ] ) )
            return {};
        auto end = _pos;
        while ( end < _text.size() && ident_char( _text[ end ] ) )
            ++end;
        return _text.substr( _pos, end - _pos );
    }

    bool accept_keyword( std::string_view word )
    {
        if ( peek_identifier() != word )
            return false;
        _pos += word.size();
        return true;
    }

    int parse_bound()
    {
        skip_space();
        auto start = _pos;
        if ( _pos < _text.size() && _text[ _pos ] == '-' )
            fail( "malformed interval: bounds must be nonnegative" );
        if ( peek_identifier() == "inf" )
            fail( "malformed interval: unbounded intervals are not supported, use the horizon as upper bound" );
        long value = 0;
        while ( _pos < _text.size() && std::isdigit( static_cast< unsigned char >( _text[ _pos ] ) ) )
        {
            value = value * 10 + ( _text[ _pos ] - '0' );
            if ( value > 1'000'000'000 )
                fail( "malformed interval: bound too large", start );
            ++_pos;
        }
        if ( _pos == start )
            fail( "malformed interval: expected a nonnegative integer" );
        if ( _pos < _text.size() && ( _text[ _pos ] == '.' || ident_start( _text[ _pos ] ) ) )
            fail( "malformed interval: bounds must be integers" );
        return static_cast< int >( value );
    }

    std::pair< int, int > parse_interval()
    {
        auto start = ( skip_space(), _pos );
        expect( "[" );
        int m = parse_bound();
        expect( "," );
        int n = parse_bound();
        expect( "]" );
        if ( m > n )
            fail( "malformed interval: lower bound exceeds upper bound", start );
        return { m, n };
    }

    formula parse_iff()
    {
        auto lhs = parse_implies();
        while ( accept( "<->" ) )
            lhs = formula::iff( lhs, parse_implies() );
        return lhs;
    }

    formula parse_implies()
    {
        auto lhs = parse_or();
        if ( accept( "->" ) )
            return formula::implies( lhs, parse_implies() );
        return lhs;
    }

    formula parse_or()
    {
        auto lhs = parse_and();
        while ( accept( "|" ) )
            lhs = formula::disjunction( lhs, parse_and() );
        return lhs;
    }

    formula parse_and()
    {
        auto lhs = parse_until();
        while ( accept( "&" ) )
            lhs = formula::conjunction( lhs, parse_until() );
        return lhs;
    }

    formula parse_until()
    {
        auto lhs = parse_unary();
        if ( accept_keyword( "U" ) )
        {
            auto [ m, n ] = parse_interval();
            return formula::until( lhs, parse_until(), m, n );
        }
        return lhs;
    }

    formula parse_unary()
    {
        skip_space();
        if ( accept( "!" ) )
            return formula::negation( parse_unary() );
        if ( accept_keyword( "F" ) )
        {
            auto [ m, n ] = parse_interval();
            return formula::eventually( m, n, parse_unary() );
        }
        if ( accept_keyword( "G" ) )
        {
            auto [ m, n ] = parse_interval();
            return formula::always( m, n, parse_unary() );
        }
        return parse_primary();
    }

    formula parse_primary()
    {
        skip_space();
        if ( _pos >= _text.size() )
            fail( "unexpected end of formula" );
        if ( accept( "(" ) )
        {
            auto inner = parse_iff();
            expect( ")" );
            return inner;
        }
        auto word = peek_identifier();
        if ( word.empty() )
            fail( std::string( "unexpected character '" ) + _text[ _pos ] + "'" );
        if ( word == "X" )
            fail( "the next operator X is not part of the logic" );
        if ( word == "U" )
            fail( "until needs a left operand" );
        _pos += word.size();
        if ( word == "true" )
            return formula::truth();
        if ( word == "false" )
            return formula::falsity();
        return formula::atom( std::string( word ) );
    }

public:
    explicit parser( std::string_view text ) : _text{ text } {}

    formula run()
    {
        auto f = parse_iff();
        skip_space();
        if ( _pos != _text.size() )
            fail( "unexpected trailing input" );
        return f;
    }
};

} // namespace

formula parse_formula( std::string_view text )
{
    return parser( text ).run();
}

// Subformula table

subformula_table::subformula_table( const formula& root )
{
    using key = std::tuple< formula_kind, std::string, std::size_t, std::size_t, std::uint32_t, std::uint32_t >;
    std::map< key, std::size_t > index;

    auto visit = [ & ]( auto& self, const formula& f ) -> std::size_t {
        entry e{ f.kind(), {}, none, none, 0, 0 };
        switch ( f.kind() )
        {
        case formula_kind::truth: break;
        case formula_kind::atom: e.atom = f.atom_name(); break;
        case formula_kind::negation: e.left = self( self, f.lhs() ); break;
        case formula_kind::until:
            e.lower = f.lower();
            e.upper = f.upper();
            [[fallthrough]];
        case formula_kind::conjunction:
        case formula_kind::disjunction:
            e.left = self( self, f.lhs() );
            e.right = self( self, f.rhs() );
            break;
        }
        key k{ e.kind, e.atom, e.left, e.right, e.lower, e.upper };
        auto [ it, inserted ] = index.emplace( k, _entries.size() );
        if ( inserted )
            _entries.push_back( std::move( e ) );
        return it->second;
    };
    auto r = visit( visit, root );
    // The root is visited last, so it is always the final entry.
    (void) r;
}

std::string subformula_table::label( std::size_t i ) const
{
    static constexpr const char* names[] = { "True", "Atom", "Not", "And", "Or", "Until" };
    const auto& e = _entries.at( i );
    std::string out = names[ static_cast< int >( e.kind ) ];
    if ( e.kind == formula_kind::atom )
        return out + "(" + e.atom + ")#" + std::to_string( i );
    return out + "#" + std::to_string( i );
}

// Evaluation

evaluator::evaluator( subformula_table table, fragment_view f, const labeling& labels )
    : _table{ std::move( table ) }, _fragment{ f }, _labels{ &labels }
{
    _atom_index.assign( _table.size(), 0 );
    for ( std::size_t i = 0; i < _table.size(); ++i )
    {
        if ( _table[ i ].kind != formula_kind::atom )
            continue;
        auto idx = labels.atom_index( _table[ i ].atom );
        if ( !idx )
            throw evaluation_error( "atom '" + _table[ i ].atom + "' is not an atomic proposition of the system" );
        _atom_index[ i ] = *idx;
    }
    _memo.assign( _table.size() * ( f.horizon() + 1 ), -1 );
}

bool evaluator::holds( std::size_t entry, std::size_t k )
{
    if ( k > _fragment.horizon() )
        throw std::out_of_range( "position " + std::to_string( k ) + " beyond horizon" );
    auto& slot = _memo[ entry * ( _fragment.horizon() + 1 ) + k ];
    if ( slot < 0 )
        slot = compute( entry, k ) ? 1 : 0;
    return slot == 1;
}

bool evaluator::compute( std::size_t entry, std::size_t k )
{
    const auto& e = _table[ entry ];
    switch ( e.kind )
    {
    case formula_kind::truth: return true;
    case formula_kind::atom: return _labels->holds( _fragment.state( k ), _atom_index[ entry ] );
    case formula_kind::negation: return !holds( e.left, k );
    case formula_kind::conjunction: return holds( e.left, k ) && holds( e.right, k );
    case formula_kind::disjunction: return holds( e.left, k ) || holds( e.right, k );
    case formula_kind::until:
        for ( std::size_t j = k; j <= _fragment.horizon(); ++j )
        {
            auto c = _fragment.count( k, j );
            if ( c > e.upper )
                return false;
            if ( c >= e.lower && holds( e.right, j ) )
                return true;
            // Witnesses further out need the left operand at j.
            if ( !holds( e.left, j ) )
                return false;
        }
        return false;
    }
    return false;
}

bool evaluate( fragment_view f, const formula& phi, std::size_t k, const labeling& labels )
{
    evaluator ev( subformula_table( phi ), f, labels );
    return ev.holds_root( k );
}

} // namespace ticksynth
