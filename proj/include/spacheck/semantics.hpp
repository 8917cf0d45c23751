#pragma once

#include "lexer.hpp"
#include "model.hpp"
#include "parser.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace spacheck
{

// A runtime evaluation failure, attributable to a source location.
class eval_error : public std::runtime_error
{
    source_pos _pos;
    std::string _context;
    std::optional< state > _snapshot;

public:
    eval_error( const std::string& message, source_pos pos, std::string context = {},
                std::optional< state > snapshot = std::nullopt )
        : std::runtime_error{ message }, _pos{ pos }, _context{ std::move( context ) },
          _snapshot{ std::move( snapshot ) } {}

    [[nodiscard]] source_pos pos() const { return _pos; }
    [[nodiscard]] const std::string& context() const { return _context; }
    [[nodiscard]] const std::optional< state >& snapshot() const { return _snapshot; }

    // "Check 12:9: message"
    [[nodiscard]] std::string describe() const
    {
        std::string out = _context.empty() ? "" : _context + " ";
        return out + std::to_string( _pos.line ) + ":" + std::to_string( _pos.column ) + ": " + what();
    }
};

// Constant binding failures: missing, unknown, duplicate or ill-kinded values.
class binding_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using constant_assignments = std::vector< std::pair< std::string, value > >;

class bound_spec
{
    spec_model _spec;
    std::vector< value > _constants; // aligned with _spec.constants
    std::unordered_map< std::string, std::size_t > _var_slot;
    std::unordered_map< std::string, std::size_t > _const_slot;

public:
    bound_spec( spec_model spec, std::vector< value > constants )
        : _spec{ std::move( spec ) }, _constants{ std::move( constants ) }
    {
        for ( std::size_t i = 0; i < _spec.variables.size(); ++i )
            _var_slot.emplace( _spec.variables[ i ].name, i );
        for ( std::size_t i = 0; i < _spec.constants.size(); ++i )
            _const_slot.emplace( _spec.constants[ i ].name, i );
    }

    [[nodiscard]] const spec_model& spec() const { return _spec; }
    [[nodiscard]] const std::vector< value >& constant_values() const { return _constants; }

    [[nodiscard]] const std::size_t* variable_slot( const std::string& name ) const
    {
        auto it = _var_slot.find( name );
        return it == _var_slot.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const value* constant( const std::string& name ) const
    {
        auto it = _const_slot.find( name );
        return it == _const_slot.end() ? nullptr : &_constants[ it->second ];
    }

    [[nodiscard]] constant_assignments constants() const
    {
        constant_assignments out;
        for ( std::size_t i = 0; i < _spec.constants.size(); ++i )
            out.emplace_back( _spec.constants[ i ].name, _constants[ i ] );
        return out;
    }
};

inline bound_spec bind_constants( spec_model spec, const constant_assignments& assignments )
{
    std::vector< std::optional< value > > slots( spec.constants.size() );
    for ( const auto& [ name, v ] : assignments )
    {
        auto idx = spec.constant_index( name );
        if ( !idx )
            throw binding_error( "unknown constant " + name );
        if ( slots[ *idx ] )
            throw binding_error( "constant " + name + " bound more than once" );
        const auto& decl = spec.constants[ *idx ];
        if ( v.kind() != decl.kind )
            throw binding_error( "constant " + name + " is declared " + std::string{ kind_name( decl.kind ) } +
                                 " but bound to a " + std::string{ kind_name( v.kind() ) } + " value" );
        slots[ *idx ] = v;
    }
    std::vector< value > values;
    for ( std::size_t i = 0; i < slots.size(); ++i )
    {
        if ( !slots[ i ] )
            throw binding_error( "constant " + spec.constants[ i ].name + " unbound" );
        values.push_back( *slots[ i ] );
    }
    return bound_spec{ std::move( spec ), std::move( values ) };
}

// Parses `name=value` where value is an integer, true/false or a quoted string.
inline std::pair< std::string, value > parse_constant_assignment( std::string_view text )
{
    auto eq = text.find( '=' );
    if ( eq == std::string_view::npos )
        throw binding_error( "constant assignment '" + std::string{ text } + "' is not of the form name=value" );
    std::string name{ text.substr( 0, eq ) };
    std::string_view rhs = text.substr( eq + 1 );
    std::vector< token > tokens;
    try
    {
        tokens = tokenize( rhs );
    }
    catch ( const parse_error& e )
    {
        throw binding_error( "bad value for constant " + name + ": " + e.what() );
    }
    bool ident_ok = !name.empty() && detail::ident_start( name[ 0 ] ) && !is_keyword( name );
    for ( char c : name )
        ident_ok = ident_ok && detail::ident_char( c );
    if ( !ident_ok )
        throw binding_error( "'" + name + "' is not a valid constant name" );

    bool negative = tokens.size() == 3 && tokens[ 0 ].kind == token_kind::op && tokens[ 0 ].text == "-";
    const token& t = tokens[ negative ? 1 : 0 ];
    if ( tokens.size() != ( negative ? 3u : 2u ) )
        throw binding_error( "bad value for constant " + name + ": '" + std::string{ rhs } + "'" );
    if ( t.kind == token_kind::integer )
    {
        std::int64_t v = std::stoll( t.text );
        return { name, value{ negative ? -v : v } };
    }
    if ( !negative && t.kind == token_kind::keyword && ( t.text == "true" || t.text == "false" ) )
        return { name, value{ t.text == "true" } };
    if ( !negative && t.kind == token_kind::string )
        return { name, value{ t.text } };
    throw binding_error( "bad value for constant " + name + ": '" + std::string{ rhs } + "'" );
}

struct static_error
{
    std::string message;
    source_pos pos;
    std::string context; // declaration, action or property name

    [[nodiscard]] std::string describe() const
    {
        return std::to_string( pos.line ) + ":" + std::to_string( pos.column ) + ": " +
               ( context.empty() ? "" : "in " + context + ": " ) + message;
    }
};

namespace detail
{

class validator
{
    const bound_spec& _bound;
    std::vector< static_error > _errors;
    std::string _context;
    bool _allow_vars = false;
    std::vector< std::pair< std::string, value_kind > > _binders;

public:
    explicit validator( const bound_spec& bound ) : _bound{ bound } {}

    std::vector< static_error > run()
    {
        const spec_model& spec = _bound.spec();
        _context = "spec " + spec.name;
        if ( spec.variables.empty() )
            error( "a spec needs at least one variable", {} );
        if ( spec.actions.empty() )
            error( "a spec needs at least one action", {} );

        std::unordered_set< std::string > names;
        for ( const auto& c : spec.constants )
            if ( !names.insert( c.name ).second )
                error( "duplicate declaration of " + c.name, c.pos );
        for ( const auto& v : spec.variables )
            if ( !names.insert( v.name ).second )
                error( "duplicate declaration of " + v.name, v.pos );

        std::unordered_set< std::string > action_names;
        for ( const auto& a : spec.actions )
            if ( !action_names.insert( a.name ).second )
                error( "duplicate action " + a.name, a.pos );
        std::unordered_set< std::string > prop_names;
        for ( const auto& p : spec.properties )
            if ( !prop_names.insert( p.name ).second )
                error( "duplicate property " + p.name, p.pos );

        for ( const auto& v : spec.variables )
            check_var( v );
        for ( const auto& a : spec.actions )
            check_action( a );
        for ( const auto& p : spec.properties )
            check_property( p );
        return std::move( _errors );
    }

private:
    void error( std::string message, source_pos pos )
    {
        _errors.push_back( { std::move( message ), pos, _context } );
    }

    void expect_kind( const expr& e, value_kind want, std::string_view what )
    {
        auto got = infer( e );
        if ( got && *got != want )
            error( std::string{ what } + " must be " + std::string{ kind_name( want ) } + ", found " +
                       std::string{ kind_name( *got ) },
                   e.pos );
    }

    void check_var( const var_decl& v )
    {
        _context = "var " + v.name;
        _allow_vars = false;
        if ( v.domain )
        {
            auto k = infer_set( *v.domain );
            if ( k && *k != v.kind )
                error( "domain of " + v.name + " must contain " + std::string{ kind_name( v.kind ) } + " values",
                       v.domain->pos );
        }
        if ( v.init_in_set )
        {
            auto k = infer_set( v.init );
            if ( k && *k != v.kind )
                error( "initial set of " + v.name + " must contain " + std::string{ kind_name( v.kind ) } +
                           " values",
                       v.init.pos );
        }
        else
            expect_kind( v.init, v.kind, "initial value of " + v.name );
    }

    void check_action( const action_def& a )
    {
        _context = "action " + a.name;
        _allow_vars = true;
        _binders.clear();
        for ( const auto& g : a.guards )
            expect_kind( g, value_kind::boolean, "guard" );
        std::unordered_map< std::string, std::vector< source_pos > > assigned;
        check_block( a.body, assigned );
    }

    // `assigned` maps each variable to the sites that may have assigned it
    // on some path reaching the current statement.
    void check_block( const std::vector< stmt >& body,
                      std::unordered_map< std::string, std::vector< source_pos > >& assigned )
    {
        for ( const auto& s : body )
        {
            switch ( s.kind )
            {
                case stmt_kind::assign:
                {
                    const auto* slot = _bound.variable_slot( s.name );
                    if ( !slot )
                    {
                        if ( _bound.constant( s.name ) )
                            error( "cannot assign to constant " + s.name, s.pos );
                        else
                            error( "assignment to undeclared variable " + s.name, s.pos );
                        infer( s.value_expr );
                        break;
                    }
                    const auto& decl = _bound.spec().variables[ *slot ];
                    expect_kind( s.value_expr, decl.kind, "value assigned to " + s.name );
                    auto& sites = assigned[ s.name ];
                    for ( const auto& prior : sites )
                        error( "variable " + s.name + " assigned twice on one path (also assigned at " +
                                   std::to_string( prior.line ) + ":" + std::to_string( prior.column ) + ")",
                               s.pos );
                    sites.push_back( s.pos );
                    break;
                }
                case stmt_kind::any:
                {
                    bool saved = _allow_vars;
                    _allow_vars = false;
                    auto k = infer_set( s.value_expr );
                    _allow_vars = saved;
                    bool pushed = push_binder( s.name, k.value_or( value_kind::boolean ), s.pos );
                    check_block( s.body, assigned );
                    if ( pushed )
                        _binders.pop_back();
                    break;
                }
                case stmt_kind::if_:
                {
                    expect_kind( s.value_expr, value_kind::boolean, "condition" );
                    auto then_assigned = assigned;
                    check_block( s.body, then_assigned );
                    check_block( s.alt, assigned );
                    for ( auto& [ var, sites ] : then_assigned )
                    {
                        auto& merged = assigned[ var ];
                        for ( const auto& site : sites )
                            if ( std::find_if( merged.begin(), merged.end(), [ & ]( const source_pos& p ) {
                                     return p.line == site.line && p.column == site.column;
                                 } ) == merged.end() )
                                merged.push_back( site );
                    }
                    break;
                }
            }
        }
    }

    void check_property( const temporal_property& p )
    {
        _context = "property " + p.name;
        _binders.clear();
        bool pushed = false;
        if ( p.binder )
        {
            _allow_vars = false;
            auto k = infer_set( p.binder->set );
            pushed = push_binder( p.binder->name, k.value_or( value_kind::integer ), p.pos );
        }
        _allow_vars = true;
        expect_kind( p.pred, value_kind::boolean, "predicate" );
        if ( p.shape == property_shape::leadsto )
            expect_kind( p.target, value_kind::boolean, "predicate" );
        if ( pushed )
            _binders.pop_back();
    }

    bool push_binder( const std::string& name, value_kind kind, source_pos pos )
    {
        bool clash = _bound.variable_slot( name ) || _bound.constant( name );
        for ( const auto& b : _binders )
            clash = clash || b.first == name;
        if ( clash )
        {
            error( "binder " + name + " shadows an existing name", pos );
            return false;
        }
        _binders.emplace_back( name, kind );
        return true;
    }

    std::optional< value_kind > infer_set( const expr& e )
    {
        if ( e.op == expr_op::range )
        {
            expect_kind( e.children[ 0 ], value_kind::integer, "range bound" );
            expect_kind( e.children[ 1 ], value_kind::integer, "range bound" );
            return value_kind::integer;
        }
        if ( e.op == expr_op::set_literal )
        {
            std::optional< value_kind > kind;
            bool ok = true;
            for ( const auto& el : e.children )
            {
                auto k = infer( el );
                if ( !k )
                    ok = false;
                else if ( kind && *kind != *k )
                {
                    error( "set literal mixes " + std::string{ kind_name( *kind ) } + " and " +
                               std::string{ kind_name( *k ) } + " elements",
                           el.pos );
                    ok = false;
                }
                else
                    kind = k;
            }
            return ok ? kind : std::nullopt;
        }
        error( "expected a set expression", e.pos );
        return std::nullopt;
    }

    std::optional< value_kind > infer( const expr& e )
    {
        using K = value_kind;
        auto both = [ & ]( K want, std::string_view what ) {
            bool ok = true;
            for ( const auto& c : e.children )
            {
                auto k = infer( c );
                if ( !k )
                    ok = false;
                else if ( *k != want )
                {
                    error( std::string{ what } + " needs " + std::string{ kind_name( want ) } + " operands, found " +
                               std::string{ kind_name( *k ) },
                           c.pos );
                    ok = false;
                }
            }
            return ok;
        };

        switch ( e.op )
        {
            case expr_op::literal: return e.literal.kind();
            case expr_op::name:
            {
                for ( auto it = _binders.rbegin(); it != _binders.rend(); ++it )
                    if ( it->first == e.name )
                        return it->second;
                if ( const auto* slot = _bound.variable_slot( e.name ) )
                {
                    if ( !_allow_vars )
                    {
                        error( "variable " + e.name + " cannot be used here (only constants are allowed)", e.pos );
                        return std::nullopt;
                    }
                    return _bound.spec().variables[ *slot ].kind;
                }
                if ( const auto* c = _bound.constant( e.name ) )
                    return c->kind();
                error( "unknown identifier " + e.name, e.pos );
                return std::nullopt;
            }
            case expr_op::neg: return both( K::integer, "negation" ) ? std::optional{ K::integer } : std::nullopt;
            case expr_op::not_: return both( K::boolean, "'not'" ) ? std::optional{ K::boolean } : std::nullopt;
            case expr_op::and_:
            case expr_op::or_:
            case expr_op::implies:
                return both( K::boolean, "boolean connective" ) ? std::optional{ K::boolean } : std::nullopt;
            case expr_op::add:
            case expr_op::sub:
            case expr_op::mul:
                return both( K::integer, "arithmetic" ) ? std::optional{ K::integer } : std::nullopt;
            case expr_op::lt:
            case expr_op::le:
            case expr_op::gt:
            case expr_op::ge:
                return both( K::integer, "ordering comparison" ) ? std::optional{ K::boolean } : std::nullopt;
            case expr_op::eq:
            case expr_op::ne:
            {
                auto l = infer( e.children[ 0 ] );
                auto r = infer( e.children[ 1 ] );
                if ( l && r && *l != *r )
                {
                    error( "cannot compare " + std::string{ kind_name( *l ) } + " with " +
                               std::string{ kind_name( *r ) },
                           e.pos );
                    return std::nullopt;
                }
                return ( l && r ) ? std::optional{ K::boolean } : std::nullopt;
            }
            case expr_op::in:
            {
                auto l = infer( e.children[ 0 ] );
                auto s = infer_set( e.children[ 1 ] );
                if ( l && s && *l != *s )
                {
                    error( "membership of a " + std::string{ kind_name( *l ) } + " value in a set of " +
                               std::string{ kind_name( *s ) } + " values",
                           e.pos );
                    return std::nullopt;
                }
                return ( l && s ) ? std::optional{ K::boolean } : std::nullopt;
            }
            case expr_op::if_then_else:
            {
                expect_kind( e.children[ 0 ], K::boolean, "condition" );
                auto a = infer( e.children[ 1 ] );
                auto b = infer( e.children[ 2 ] );
                if ( a && b && *a != *b )
                {
                    error( "branches of if-expression have different kinds (" + std::string{ kind_name( *a ) } +
                               " and " + std::string{ kind_name( *b ) } + ")",
                           e.pos );
                    return std::nullopt;
                }
                return ( a && b ) ? a : std::nullopt;
            }
            case expr_op::set_literal:
            case expr_op::range:
                error( "a set is not a value", e.pos );
                return std::nullopt;
        }
        return std::nullopt;
    }
};

} // namespace detail

// Static checks over a bound spec. Returns every violation found, in
// declaration order; an empty result means the spec is well-formed.
inline std::vector< static_error > validate( const bound_spec& bound )
{
    return detail::validator{ bound }.run();
}

// Everything an expression may refer to.
struct env
{
    const bound_spec& bound;
    const state* current = nullptr; // null where only constants are in scope
    std::vector< std::pair< std::string, value > > binders;
    std::string context;

    [[nodiscard]] const value& lookup( const expr& e ) const
    {
        for ( auto it = binders.rbegin(); it != binders.rend(); ++it )
            if ( it->first == e.name )
                return it->second;
        if ( current )
            if ( const auto* slot = bound.variable_slot( e.name ) )
                return current->values[ *slot ];
        if ( const auto* c = bound.constant( e.name ) )
            return *c;
        fail( "unresolved identifier " + e.name, e.pos );
    }

    [[noreturn]] void fail( const std::string& message, source_pos pos ) const
    {
        throw eval_error( message, pos, context, current ? std::optional{ *current } : std::nullopt );
    }
};

namespace detail
{

inline constexpr std::int64_t max_enumerated_range = 10'000'000;

inline bool truth( const value& v, const expr& e, const env& en )
{
    if ( !v.is_bool() )
        en.fail( "expected a boolean value", e.pos );
    return v.as_bool();
}

inline std::int64_t integer( const value& v, const expr& e, const env& en )
{
    if ( !v.is_int() )
        en.fail( "expected an integer value", e.pos );
    return v.as_int();
}

} // namespace detail

inline value eval_expr( const expr& e, const env& en );

// `a..b` yields a..b inclusive (empty when a > b); a literal yields its
// elements in written order with later duplicates dropped.
inline std::vector< value > eval_set( const expr& e, const env& en )
{
    std::vector< value > out;
    if ( e.op == expr_op::range )
    {
        std::int64_t lo = detail::integer( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en );
        std::int64_t hi = detail::integer( eval_expr( e.children[ 1 ], en ), e.children[ 1 ], en );
        if ( lo > hi )
            return out;
        if ( static_cast< unsigned long long >( hi ) - static_cast< unsigned long long >( lo ) >=
             static_cast< unsigned long long >( detail::max_enumerated_range ) )
            en.fail( "range " + std::to_string( lo ) + ".." + std::to_string( hi ) + " is too large to enumerate",
                     e.pos );
        for ( std::int64_t i = lo;; ++i )
        {
            out.emplace_back( i );
            if ( i == hi )
                break;
        }
        return out;
    }
    if ( e.op != expr_op::set_literal )
        en.fail( "expected a set expression", e.pos );
    for ( const auto& el : e.children )
    {
        value v = eval_expr( el, en );
        if ( !out.empty() && out.front().kind() != v.kind() )
            en.fail( "set literal mixes value kinds", el.pos );
        if ( std::find( out.begin(), out.end(), v ) == out.end() )
            out.push_back( std::move( v ) );
    }
    return out;
}

// Membership without materializing ranges.
inline bool set_contains( const expr& set, const value& v, const env& en )
{
    if ( set.op == expr_op::range )
    {
        std::int64_t lo = detail::integer( eval_expr( set.children[ 0 ], en ), set.children[ 0 ], en );
        std::int64_t hi = detail::integer( eval_expr( set.children[ 1 ], en ), set.children[ 1 ], en );
        return v.is_int() && lo <= v.as_int() && v.as_int() <= hi;
    }
    if ( set.op != expr_op::set_literal )
        en.fail( "expected a set expression", set.pos );
    for ( const auto& el : set.children )
        if ( eval_expr( el, en ) == v )
            return true;
    return false;
}

inline value eval_expr( const expr& e, const env& en )
{
    using detail::integer;
    using detail::truth;

    auto arith = [ & ]( auto op ) -> value {
        std::int64_t a = integer( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en );
        std::int64_t b = integer( eval_expr( e.children[ 1 ], en ), e.children[ 1 ], en );
        std::int64_t r = 0;
        if ( op( a, b, &r ) )
            en.fail( "integer overflow in " + std::to_string( a ) + " " + std::string{ detail::op_symbol( e.op ) } +
                         " " + std::to_string( b ),
                     e.pos );
        return value{ r };
    };
    auto order = [ & ]( auto cmp ) -> value {
        std::int64_t a = integer( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en );
        std::int64_t b = integer( eval_expr( e.children[ 1 ], en ), e.children[ 1 ], en );
        return value{ cmp( a, b ) };
    };
    auto equal = [ & ]() {
        value a = eval_expr( e.children[ 0 ], en );
        value b = eval_expr( e.children[ 1 ], en );
        if ( a.kind() != b.kind() )
            en.fail( "cannot compare " + std::string{ kind_name( a.kind() ) } + " with " +
                         std::string{ kind_name( b.kind() ) },
                     e.pos );
        return a == b;
    };

    switch ( e.op )
    {
        case expr_op::literal: return e.literal;
        case expr_op::name: return en.lookup( e );
        case expr_op::neg:
        {
            std::int64_t a = integer( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en );
            std::int64_t r = 0;
            if ( __builtin_sub_overflow( std::int64_t{ 0 }, a, &r ) )
                en.fail( "integer overflow in negation of " + std::to_string( a ), e.pos );
            return value{ r };
        }
        case expr_op::not_: return value{ !truth( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en ) };
        case expr_op::and_:
            return value{ truth( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en ) &&
                          truth( eval_expr( e.children[ 1 ], en ), e.children[ 1 ], en ) };
        case expr_op::or_:
            return value{ truth( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en ) ||
                          truth( eval_expr( e.children[ 1 ], en ), e.children[ 1 ], en ) };
        case expr_op::implies:
            return value{ !truth( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en ) ||
                          truth( eval_expr( e.children[ 1 ], en ), e.children[ 1 ], en ) };
        case expr_op::eq: return value{ equal() };
        case expr_op::ne: return value{ !equal() };
        case expr_op::lt: return order( []( auto a, auto b ) { return a < b; } );
        case expr_op::le: return order( []( auto a, auto b ) { return a <= b; } );
        case expr_op::gt: return order( []( auto a, auto b ) { return a > b; } );
        case expr_op::ge: return order( []( auto a, auto b ) { return a >= b; } );
        case expr_op::add:
            return arith( []( std::int64_t a, std::int64_t b, std::int64_t* r ) { return __builtin_add_overflow( a, b, r ); } );
        case expr_op::sub:
            return arith( []( std::int64_t a, std::int64_t b, std::int64_t* r ) { return __builtin_sub_overflow( a, b, r ); } );
        case expr_op::mul:
            return arith( []( std::int64_t a, std::int64_t b, std::int64_t* r ) { return __builtin_mul_overflow( a, b, r ); } );
        case expr_op::in:
        {
            value v = eval_expr( e.children[ 0 ], en );
            return value{ set_contains( e.children[ 1 ], v, en ) };
        }
        case expr_op::if_then_else:
            return truth( eval_expr( e.children[ 0 ], en ), e.children[ 0 ], en ) ? eval_expr( e.children[ 1 ], en )
                                                                                  : eval_expr( e.children[ 2 ], en );
        case expr_op::set_literal:
        case expr_op::range: en.fail( "a set is not a value", e.pos );
    }
    en.fail( "malformed expression", e.pos );
}

inline bool eval_predicate( const expr& e, const env& en )
{
    return detail::truth( eval_expr( e, en ), e, en );
}

// Cartesian product of each variable's init clause, lexicographic in
// declaration order (the first variable varies slowest).
inline std::vector< state > initial_states( const bound_spec& bound )
{
    const auto& vars = bound.spec().variables;
    std::vector< std::vector< value > > choices;
    for ( const auto& v : vars )
    {
        env en{ bound, nullptr, {}, "var " + v.name };
        std::vector< value > options =
            v.init_in_set ? eval_set( v.init, en ) : std::vector< value >{ eval_expr( v.init, en ) };
        for ( const auto& o : options )
        {
            if ( o.kind() != v.kind )
                en.fail( "initial value " + to_string( o ) + " of " + v.name + " has the wrong kind", v.init.pos );
            if ( v.domain && !set_contains( *v.domain, o, en ) )
                en.fail( "initial value " + to_string( o ) + " of " + v.name + " lies outside its domain",
                         v.init.pos );
        }
        choices.push_back( std::move( options ) );
    }

    std::vector< state > out;
    for ( const auto& c : choices )
        if ( c.empty() )
            return out;

    std::vector< std::size_t > odometer( vars.size(), 0 );
    while ( true )
    {
        state s;
        for ( std::size_t i = 0; i < vars.size(); ++i )
            s.values.push_back( choices[ i ][ odometer[ i ] ] );
        out.push_back( std::move( s ) );

        std::size_t pos = vars.size();
        while ( pos > 0 )
        {
            --pos;
            if ( ++odometer[ pos ] < choices[ pos ].size() )
                break;
            odometer[ pos ] = 0;
            if ( pos == 0 )
                return out;
        }
        if ( vars.empty() )
            return out;
    }
}

namespace detail
{

class action_runner
{
    const bound_spec& _bound;
    const action_def& _action;
    const state& _current;
    env _env;
    std::vector< state > _out;
    std::unordered_set< std::string > _seen;

public:
    action_runner( const bound_spec& bound, const action_def& action, const state& current )
        : _bound{ bound }, _action{ action }, _current{ current },
          _env{ bound, &current, {}, "action " + action.name } {}

    std::vector< state > run()
    {
        for ( const auto& g : _action.guards )
            if ( !eval_predicate( g, _env ) )
                return {};
        state next = _current;
        exec( _action.body, 0, next, [ this ]( const state& done ) { emit( done ); } );
        return std::move( _out );
    }

private:
    using continuation = std::function< void( const state& ) >;

    void emit( const state& done )
    {
        if ( _seen.insert( canonical_key( done ) ).second )
            _out.push_back( done );
    }

    // Executes body[pos..] on `next`, then hands each completed path to k.
    void exec( const std::vector< stmt >& body, std::size_t pos, const state& next, const continuation& k )
    {
        if ( pos == body.size() )
        {
            k( next );
            return;
        }
        const stmt& s = body[ pos ];
        auto rest = [ &, pos ]( const state& after ) { exec( body, pos + 1, after, k ); };
        switch ( s.kind )
        {
            case stmt_kind::assign:
            {
                const auto* slot = _bound.variable_slot( s.name );
                if ( !slot )
                    _env.fail( "assignment to undeclared variable " + s.name, s.pos );
                const auto& decl = _bound.spec().variables[ *slot ];
                value v = eval_expr( s.value_expr, _env );
                if ( v.kind() != decl.kind )
                    _env.fail( "value " + to_string( v ) + " assigned to " + s.name + " has the wrong kind", s.pos );
                if ( decl.domain )
                {
                    env domain_env{ _bound, nullptr, {}, _env.context };
                    if ( !set_contains( *decl.domain, v, domain_env ) )
                        _env.fail( "value " + to_string( v ) + " assigned to " + s.name + " lies outside its domain",
                                   s.pos );
                }
                state after = next;
                after.values[ *slot ] = std::move( v );
                rest( after );
                break;
            }
            case stmt_kind::any:
            {
                for ( const auto& choice : eval_set( s.value_expr, _env ) )
                {
                    _env.binders.emplace_back( s.name, choice );
                    std::size_t depth = _env.binders.size();
                    exec( s.body, 0, next, [ &, depth ]( const state& after ) {
                        // the binder is out of scope for the statements that follow
                        auto saved = _env.binders[ depth - 1 ];
                        _env.binders.resize( depth - 1 );
                        rest( after );
                        _env.binders.resize( depth - 1 );
                        _env.binders.push_back( std::move( saved ) );
                    } );
                    _env.binders.resize( depth - 1 );
                }
                break;
            }
            case stmt_kind::if_:
            {
                if ( eval_predicate( s.value_expr, _env ) )
                    exec( s.body, 0, next, rest );
                else
                    exec( s.alt, 0, next, rest );
                break;
            }
        }
    }
};

} // namespace detail

// Successors of `current` under one action, in choice-enumeration order with
// duplicates merged. Empty when a guard is false.
inline std::vector< state > action_successors( const state& current, const action_def& action,
                                               const bound_spec& bound )
{
    return detail::action_runner{ bound, action, current }.run();
}

struct labeled_state
{
    std::size_t action; // index into spec().actions
    state target;
};

// Union of action_successors over all actions in declaration order.
inline std::vector< labeled_state > successors( const state& current, const bound_spec& bound )
{
    std::vector< labeled_state > out;
    std::unordered_set< std::string > seen;
    const auto& actions = bound.spec().actions;
    for ( std::size_t a = 0; a < actions.size(); ++a )
    {
        for ( auto& t : action_successors( current, actions[ a ], bound ) )
        {
            std::string key = actions[ a ].name + '\0' + canonical_key( t );
            if ( seen.insert( std::move( key ) ).second )
                out.push_back( { a, std::move( t ) } );
        }
    }
    return out;
}

} // namespace spacheck
