#include "ticksynth/ilp.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>

namespace ticksynth::ilp
{

var_index model::add_var( std::string name, std::int64_t lower, std::int64_t upper )
{
    if ( lower > upper )
        throw std::invalid_argument( "variable '" + name + "': lower bound " + std::to_string( lower )
                                     + " exceeds upper bound " + std::to_string( upper ) );
    _vars.push_back( { std::move( name ), lower, upper } );
    return static_cast< var_index >( _vars.size() - 1 );
}

void model::add_constraint( linear_constraint c )
{
    for ( const auto& t : c.terms )
        if ( t.var >= _vars.size() )
            throw std::invalid_argument( "constraint references undeclared variable " + std::to_string( t.var ) );

    // Merge duplicate variables so each row mentions a variable once.
    std::vector< term > merged = c.terms;
    std::ranges::sort( merged, {}, &term::var );
    std::vector< std::int64_t > coefficients;
    std::vector< var_index > vars;
    for ( const auto& t : merged )
    {
        if ( !vars.empty() && vars.back() == t.var )
            coefficients.back() += t.coefficient;
        else
        {
            vars.push_back( t.var );
            coefficients.push_back( t.coefficient );
        }
    }
    auto add_row = [ & ]( std::int64_t sign, std::int64_t rhs ) {
        row r{ {}, {}, sign * rhs };
        for ( std::size_t i = 0; i < vars.size(); ++i )
            if ( coefficients[ i ] != 0 )
            {
                r.coefficients.push_back( sign * coefficients[ i ] );
                r.vars.push_back( vars[ i ] );
            }
        _rows.push_back( std::move( r ) );
    };
    if ( c.cmp != comparator::greater_equal )
        add_row( 1, c.rhs );
    if ( c.cmp != comparator::less_equal )
        add_row( -1, c.rhs );
    _constraints.push_back( std::move( c ) );
}

namespace
{

std::int64_t floor_div( std::int64_t a, std::int64_t b )
{
    std::int64_t q = a / b;
    if ( ( a % b != 0 ) && ( ( a < 0 ) != ( b < 0 ) ) )
        --q;
    return q;
}

std::int64_t ceil_div( std::int64_t a, std::int64_t b )
{
    std::int64_t q = a / b;
    if ( ( a % b != 0 ) && ( ( a < 0 ) == ( b < 0 ) ) )
        ++q;
    return q;
}

class search
{
    const model& _model;
    std::vector< std::int64_t > _lo;
    std::vector< std::int64_t > _hi;
    std::vector< std::vector< std::uint32_t > > _occurs; // var -> rows

    struct trail_entry
    {
        var_index var;
        std::int64_t lo;
        std::int64_t hi;
    };
    std::vector< trail_entry > _trail;

    std::vector< std::uint32_t > _queue;
    std::vector< char > _queued;

    solve_stats _stats;

    void enqueue_rows_of( var_index v )
    {
        for ( auto r : _occurs[ v ] )
            if ( !_queued[ r ] )
            {
                _queued[ r ] = 1;
                _queue.push_back( r );
            }
    }

    bool set_bounds( var_index v, std::int64_t lo, std::int64_t hi )
    {
        if ( lo == _lo[ v ] && hi == _hi[ v ] )
            return true;
        _trail.push_back( { v, _lo[ v ], _hi[ v ] } );
        _lo[ v ] = lo;
        _hi[ v ] = hi;
        if ( lo > hi )
            return false;
        enqueue_rows_of( v );
        return true;
    }

    bool propagate_row( const row& r )
    {
        ++_stats.row_visits;
        std::int64_t min_activity = 0;
        for ( std::size_t i = 0; i < r.vars.size(); ++i )
        {
            auto a = r.coefficients[ i ];
            min_activity += a > 0 ? a * _lo[ r.vars[ i ] ] : a * _hi[ r.vars[ i ] ];
        }
        if ( min_activity > r.rhs )
            return false;
        for ( std::size_t i = 0; i < r.vars.size(); ++i )
        {
            auto a = r.coefficients[ i ];
            auto v = r.vars[ i ];
            // Tightening hi (a > 0) or lo (a < 0) leaves min_activity unchanged.
            if ( a > 0 )
            {
                auto slack = r.rhs - ( min_activity - a * _lo[ v ] );
                auto hi = floor_div( slack, a );
                if ( hi < _hi[ v ] && !set_bounds( v, _lo[ v ], hi ) )
                    return false;
            }
            else
            {
                auto slack = r.rhs - ( min_activity - a * _hi[ v ] );
                auto lo = ceil_div( slack, a );
                if ( lo > _lo[ v ] && !set_bounds( v, lo, _hi[ v ] ) )
                    return false;
            }
        }
        return true;
    }

    bool propagate()
    {
        const auto& rows = _model.rows();
        bool ok = true;
        std::size_t head = 0;
        while ( head < _queue.size() )
        {
            auto r = _queue[ head++ ];
            _queued[ r ] = 0;
            if ( ok && !propagate_row( rows[ r ] ) )
                ok = false;
        }
        _queue.clear();
        return ok;
    }

    void undo_to( std::size_t mark )
    {
        while ( _trail.size() > mark )
        {
            auto e = _trail.back();
            _trail.pop_back();
            _lo[ e.var ] = e.lo;
            _hi[ e.var ] = e.hi;
        }
    }

    struct frame
    {
        var_index var;
        std::size_t mark;
        std::int64_t value; // value tried on the first branch
        bool second = false;
    };

public:
    explicit search( const model& m ) : _model{ m }
    {
        for ( const auto& v : m.variables() )
        {
            _lo.push_back( v.lower );
            _hi.push_back( v.upper );
        }
        _occurs.resize( m.var_count() );
        const auto& rows = m.rows();
        _queued.assign( rows.size(), 1 );
        for ( std::uint32_t r = 0; r < rows.size(); ++r )
        {
            for ( auto v : rows[ r ].vars )
                _occurs[ v ].push_back( r );
            _queue.push_back( r );
        }
    }

    solve_result run()
    {
        std::vector< frame > stack;
        std::size_t cursor = 0;
        bool consistent = propagate();

        while ( true )
        {
            if ( consistent )
            {
                while ( cursor < _lo.size() && _lo[ cursor ] == _hi[ cursor ] )
                    ++cursor;
                if ( cursor == _lo.size() )
                {
                    return { assignment{ _lo }, _stats };
                }
                ++_stats.nodes;
                auto v = static_cast< var_index >( cursor );
                stack.push_back( { v, _trail.size(), _lo[ v ] } );
                set_bounds( v, _lo[ v ], _lo[ v ] );
                consistent = propagate();
                continue;
            }

            ++_stats.backtracks;
            while ( !stack.empty() && stack.back().second )
            {
                undo_to( stack.back().mark );
                stack.pop_back();
            }
            if ( stack.empty() )
                return { std::nullopt, _stats };
            auto& top = stack.back();
            undo_to( top.mark );
            top.second = true;
            cursor = top.var;
            consistent = set_bounds( top.var, top.value + 1, _hi[ top.var ] ) && propagate();
        }
    }
};

} // namespace

solve_result solve( const model& m )
{
    auto result = search( m ).run();
    if ( result.solution )
        if ( auto violation = first_violation( m, *result.solution ) )
            throw std::logic_error( "solver returned an assignment that fails verification: " + *violation );
    return result;
}

std::optional< std::string > first_violation( const model& m, const assignment& a )
{
    if ( a.values.size() != m.var_count() )
        return "assignment has " + std::to_string( a.values.size() ) + " values for " + std::to_string( m.var_count() )
               + " variables";
    for ( var_index v = 0; v < m.var_count(); ++v )
    {
        const auto& var = m.var( v );
        if ( a[ v ] < var.lower || a[ v ] > var.upper )
            return "variable " + var.name + " = " + std::to_string( a[ v ] ) + " outside its bounds";
    }
    for ( std::size_t c = 0; c < m.constraint_count(); ++c )
    {
        const auto& con = m.constraints()[ c ];
        std::int64_t lhs = 0;
        for ( const auto& t : con.terms )
            lhs += t.coefficient * a[ t.var ];
        bool ok = con.cmp == comparator::less_equal      ? lhs <= con.rhs
                  : con.cmp == comparator::greater_equal ? lhs >= con.rhs
                                                         : lhs == con.rhs;
        if ( !ok )
        {
            std::string text;
            for ( const auto& t : con.terms )
                text += ( t.coefficient < 0 ? " - " : " + " ) + std::to_string( std::abs( t.coefficient ) ) + " "
                        + m.var( t.var ).name;
            static constexpr const char* ops[] = { " <= ", " >= ", " = " };
            return "constraint c" + std::to_string( c ) + ":" + text + ops[ static_cast< int >( con.cmp ) ]
                   + std::to_string( con.rhs ) + " violated (lhs = " + std::to_string( lhs ) + ")";
        }
    }
    return std::nullopt;
}

void write_lp( std::ostream& out, const model& m )
{
    out << "\\ " << m.var_count() << " variables, " << m.constraint_count() << " constraints\n";
    out << "Subject To\n";
    static constexpr const char* ops[] = { " <= ", " >= ", " = " };
    for ( std::size_t c = 0; c < m.constraint_count(); ++c )
    {
        const auto& con = m.constraints()[ c ];
        out << " c" << c << ":";
        if ( con.terms.empty() )
            out << " 0";
        for ( const auto& t : con.terms )
            out << ( t.coefficient < 0 ? " - " : " + " ) << std::abs( t.coefficient ) << ' ' << m.var( t.var ).name;
        out << ops[ static_cast< int >( con.cmp ) ] << con.rhs << '\n';
    }
    out << "Bounds\n";
    for ( const auto& v : m.variables() )
        out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
    out << "General\n";
    for ( const auto& v : m.variables() )
        out << ' ' << v.name << '\n';
    out << "End\n";
}

} // namespace ticksynth::ilp
