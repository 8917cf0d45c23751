#pragma once

#include "value.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spacheck
{

// Positions are diagnostics only: they never take part in structural
// equality, so a spec compares equal to its pretty-printed reparse.
struct source_pos
{
    int line = 0;
    int column = 0;

    friend bool operator==( const source_pos&, const source_pos& ) { return true; }
};

enum class expr_op
{
    literal,
    name,
    neg,
    not_,
    and_,
    or_,
    implies,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    add,
    sub,
    mul,
    in,          // children: element, set
    if_then_else,
    set_literal, // only valid in set positions
    range,       // only valid in set positions; children: low, high
};

struct expr
{
    expr_op op = expr_op::literal;
    value literal;        // expr_op::literal
    std::string name;     // expr_op::name
    std::vector< expr > children;
    source_pos pos;

    friend bool operator==( const expr&, const expr& ) = default;
};

inline expr make_literal( value v, source_pos pos = {} )
{
    expr e;
    e.op = expr_op::literal;
    e.literal = std::move( v );
    e.pos = pos;
    return e;
}

inline expr make_name( std::string name, source_pos pos = {} )
{
    expr e;
    e.op = expr_op::name;
    e.name = std::move( name );
    e.pos = pos;
    return e;
}

inline expr make_node( expr_op op, std::vector< expr > children, source_pos pos = {} )
{
    expr e;
    e.op = op;
    e.children = std::move( children );
    e.pos = pos;
    return e;
}

inline bool is_set_expr( const expr& e )
{
    return e.op == expr_op::set_literal || e.op == expr_op::range;
}

enum class stmt_kind
{
    assign, // target' = rhs
    any,    // any binder in set { body }
    if_,    // if cond { body } else { alt }
};

struct stmt
{
    stmt_kind kind = stmt_kind::assign;
    std::string name; // assignment target or choice binder
    expr value_expr;  // assignment rhs, choice set, or if condition
    std::vector< stmt > body;
    std::vector< stmt > alt;
    bool has_else = false;
    source_pos pos;

    friend bool operator==( const stmt&, const stmt& ) = default;
};

struct const_decl
{
    std::string name;
    value_kind kind = value_kind::integer;
    source_pos pos;

    friend bool operator==( const const_decl&, const const_decl& ) = default;
};

struct var_decl
{
    std::string name;
    value_kind kind = value_kind::integer;
    std::optional< expr > domain;
    bool init_in_set = false; // `init in S` rather than `init e`
    expr init;
    source_pos pos;

    friend bool operator==( const var_decl&, const var_decl& ) = default;
};

struct action_def
{
    std::string name;
    std::vector< expr > guards;
    std::vector< stmt > body;
    source_pos pos;

    friend bool operator==( const action_def&, const action_def& ) = default;
};

enum class property_shape
{
    invariant,
    eventually,
    leadsto,
    always_eventually,
};

inline std::string_view shape_name( property_shape shape )
{
    switch ( shape )
    {
        case property_shape::invariant: return "invariant";
        case property_shape::eventually: return "eventually";
        case property_shape::leadsto: return "leadsto";
        case property_shape::always_eventually: return "always_eventually";
    }
    return "?";
}

struct property_binder
{
    std::string name;
    expr set;

    friend bool operator==( const property_binder&, const property_binder& ) = default;
};

struct temporal_property
{
    std::string name;
    property_shape shape = property_shape::invariant;
    expr pred;   // p for leads-to
    expr target; // q for leads-to, unused otherwise
    std::optional< property_binder > binder;
    source_pos pos;

    friend bool operator==( const temporal_property&, const temporal_property& ) = default;
};

struct spec_model
{
    std::string name;
    std::vector< const_decl > constants;
    std::vector< var_decl > variables; // declaration order is the state layout
    std::vector< action_def > actions;
    std::vector< temporal_property > properties;

    friend bool operator==( const spec_model&, const spec_model& ) = default;

    [[nodiscard]] std::optional< std::size_t > variable_index( std::string_view var ) const
    {
        for ( std::size_t i = 0; i < variables.size(); ++i )
            if ( variables[ i ].name == var )
                return i;
        return std::nullopt;
    }

    [[nodiscard]] std::optional< std::size_t > constant_index( std::string_view c ) const
    {
        for ( std::size_t i = 0; i < constants.size(); ++i )
            if ( constants[ i ].name == c )
                return i;
        return std::nullopt;
    }
};

// One valuation of all declared variables, in declaration order.
struct state
{
    std::vector< value > values;

    friend bool operator==( const state&, const state& ) = default;
};

// Injective serialization of a state: a kind tag per value, followed by a
// fixed-width integer, a single boolean byte, or a length-prefixed string.
inline std::string canonical_key( const state& s )
{
    std::string key;
    key.reserve( s.values.size() * 9 );
    auto put_u64 = [ & ]( std::uint64_t x ) {
        for ( int shift = 56; shift >= 0; shift -= 8 )
            key += static_cast< char >( ( x >> shift ) & 0xff );
    };
    for ( const auto& v : s.values )
    {
        key += static_cast< char >( v.kind() );
        switch ( v.kind() )
        {
            case value_kind::boolean: key += v.as_bool() ? '\1' : '\0'; break;
            case value_kind::integer: put_u64( static_cast< std::uint64_t >( v.as_int() ) ); break;
            case value_kind::string:
                put_u64( v.as_string().size() );
                key += v.as_string();
                break;
        }
    }
    return key;
}

using state_record = std::vector< std::pair< std::string, value > >;

inline state_record state_to_record( const state& s, const spec_model& spec )
{
    state_record record;
    record.reserve( spec.variables.size() );
    for ( std::size_t i = 0; i < spec.variables.size() && i < s.values.size(); ++i )
        record.emplace_back( spec.variables[ i ].name, s.values[ i ] );
    return record;
}

// `name=value, ...` as used in trace listings and graph labels.
inline std::string format_state( const state& s, const spec_model& spec, std::string_view sep = ", " )
{
    std::string out;
    bool first = true;
    for ( const auto& [ name, v ] : state_to_record( s, spec ) )
    {
        if ( !first )
            out += sep;
        first = false;
        out += name + "=" + to_string( v );
    }
    return out;
}

} // namespace spacheck
