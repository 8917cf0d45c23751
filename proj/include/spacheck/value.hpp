#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace spacheck
{

enum class value_kind
{
    boolean,
    integer,
    string,
};

inline std::string_view kind_name( value_kind kind )
{
    switch ( kind )
    {
        case value_kind::boolean: return "bool";
        case value_kind::integer: return "int";
        case value_kind::string: return "string";
    }
    return "?";
}

// A runtime datum. Equality is structural; values of different kinds are
// never equal. Ordering is only defined between integers.
class value
{
    std::variant< bool, std::int64_t, std::string > _data;

public:
    value() : _data{ false } {}
    value( bool b ) : _data{ b } {}
    value( std::int64_t i ) : _data{ i } {}
    value( int i ) : _data{ static_cast< std::int64_t >( i ) } {}
    value( std::string s ) : _data{ std::move( s ) } {}
    value( const char* s ) : _data{ std::string{ s } } {}

    [[nodiscard]] value_kind kind() const { return static_cast< value_kind >( _data.index() ); }

    [[nodiscard]] bool is_bool() const { return kind() == value_kind::boolean; }
    [[nodiscard]] bool is_int() const { return kind() == value_kind::integer; }
    [[nodiscard]] bool is_string() const { return kind() == value_kind::string; }

    [[nodiscard]] bool as_bool() const { return std::get< bool >( _data ); }
    [[nodiscard]] std::int64_t as_int() const { return std::get< std::int64_t >( _data ); }
    [[nodiscard]] const std::string& as_string() const { return std::get< std::string >( _data ); }

    friend bool operator==( const value&, const value& ) = default;
};

inline std::string quote_string( std::string_view text )
{
    std::string out = "\"";
    for ( char c : text )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

// Source-style rendering: true, 42, "Right".
inline std::string to_string( const value& v )
{
    switch ( v.kind() )
    {
        case value_kind::boolean: return v.as_bool() ? "true" : "false";
        case value_kind::integer: return std::to_string( v.as_int() );
        case value_kind::string: return quote_string( v.as_string() );
    }
    return {};
}

} // namespace spacheck
