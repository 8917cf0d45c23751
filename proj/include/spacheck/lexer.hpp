#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spacheck
{

enum class token_kind
{
    keyword,
    identifier,
    integer,
    string,
    op,
    punct,
    end,
};

inline std::string_view token_kind_name( token_kind kind )
{
    switch ( kind )
    {
        case token_kind::keyword: return "keyword";
        case token_kind::identifier: return "identifier";
        case token_kind::integer: return "integer literal";
        case token_kind::string: return "string literal";
        case token_kind::op: return "operator";
        case token_kind::punct: return "punctuation";
        case token_kind::end: return "end of input";
    }
    return "?";
}

struct token
{
    token_kind kind = token_kind::end;
    std::string text; // string literals hold the unescaped contents
    int line = 1;
    int column = 1;

    friend bool operator==( const token&, const token& ) = default;
};

class parse_error : public std::runtime_error
{
    int _line;
    int _column;
    std::vector< std::string > _expected;

public:
    parse_error( const std::string& message, int line, int column, std::vector< std::string > expected = {} )
        : std::runtime_error{ std::to_string( line ) + ":" + std::to_string( column ) + ": " + message },
          _line{ line }, _column{ column }, _expected{ std::move( expected ) } {}

    [[nodiscard]] int line() const { return _line; }
    [[nodiscard]] int column() const { return _column; }
    [[nodiscard]] const std::vector< std::string >& expected() const { return _expected; }
};

inline constexpr std::array< std::string_view, 27 > keywords = {
    "spec", "const", "var", "init", "in", "domain", "action", "when", "any",
    "if", "then", "else", "invariant", "property", "forall", "always", "eventually",
    "leadsto", "and", "or", "not", "implies", "true", "false", "int", "bool", "string",
};

inline bool is_keyword( std::string_view word )
{
    for ( auto k : keywords )
        if ( k == word )
            return true;
    return false;
}

namespace detail
{

inline bool ident_start( char c )
{
    return ( c >= 'a' && c <= 'z' ) || ( c >= 'A' && c <= 'Z' ) || c == '_';
}

inline bool ident_char( char c )
{
    return ident_start( c ) || ( c >= '0' && c <= '9' );
}

} // namespace detail

// Splits source text into tokens. Whitespace and `//` comments are dropped.
// Columns count UTF-8 code points, not bytes.
inline std::vector< token > tokenize( std::string_view src )
{
    std::vector< token > out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    auto advance = [ & ]() {
        char c = src[ i++ ];
        if ( c == '\n' )
        {
            ++line;
            col = 1;
        }
        else if ( ( static_cast< unsigned char >( c ) & 0xC0 ) != 0x80 )
            ++col;
    };
    auto peek = [ & ]( std::size_t ahead = 0 ) -> char {
        return i + ahead < src.size() ? src[ i + ahead ] : '\0';
    };

    while ( i < src.size() )
    {
        char c = peek();
        if ( c == ' ' || c == '\t' || c == '\r' || c == '\n' )
        {
            advance();
            continue;
        }
        if ( c == '/' && peek( 1 ) == '/' )
        {
            while ( i < src.size() && peek() != '\n' )
                advance();
            continue;
        }

        token tok;
        tok.line = line;
        tok.column = col;

        if ( detail::ident_start( c ) )
        {
            std::size_t start = i;
            while ( i < src.size() && detail::ident_char( peek() ) )
                advance();
            tok.text = std::string{ src.substr( start, i - start ) };
            tok.kind = is_keyword( tok.text ) ? token_kind::keyword : token_kind::identifier;
        }
        else if ( c >= '0' && c <= '9' )
        {
            std::size_t start = i;
            while ( i < src.size() && peek() >= '0' && peek() <= '9' )
                advance();
            tok.kind = token_kind::integer;
            tok.text = std::string{ src.substr( start, i - start ) };
            std::int64_t parsed = 0;
            auto [ ptr, ec ] = std::from_chars( tok.text.data(), tok.text.data() + tok.text.size(), parsed );
            if ( ec != std::errc{} )
                throw parse_error( "integer literal " + tok.text + " out of 64-bit range", tok.line, tok.column );
        }
        else if ( c == '"' )
        {
            advance();
            tok.kind = token_kind::string;
            while ( true )
            {
                if ( i >= src.size() || peek() == '\n' )
                    throw parse_error( "unterminated string literal", tok.line, tok.column );
                char d = peek();
                if ( d == '"' )
                {
                    advance();
                    break;
                }
                if ( d == '\\' )
                {
                    advance();
                    char e = peek();
                    if ( e != '"' && e != '\\' )
                        throw parse_error( "invalid escape in string literal", line, col );
                    tok.text += e;
                    advance();
                    continue;
                }
                tok.text += d;
                advance();
            }
        }
        else
        {
            static constexpr std::array< std::string_view, 4 > two_char = { "..", "/=", "<=", ">=" };
            std::string_view rest = src.substr( i );
            std::string_view matched;
            for ( auto op : two_char )
                if ( rest.starts_with( op ) )
                    matched = op;
            if ( matched.empty() )
            {
                switch ( c )
                {
                    case '=': case '<': case '>': case '+': case '-': case '*':
                        matched = rest.substr( 0, 1 );
                        break;
                    case '{': case '}': case '(': case ')': case ',': case ':': case '\'':
                        matched = rest.substr( 0, 1 );
                        tok.kind = token_kind::punct;
                        break;
                    default:
                        throw parse_error( std::string{ "illegal character '" } + c + "'", tok.line, tok.column );
                }
            }
            if ( tok.kind != token_kind::punct )
                tok.kind = token_kind::op;
            tok.text = std::string{ matched };
            for ( std::size_t k = 0; k < matched.size(); ++k )
                advance();
        }
        out.push_back( std::move( tok ) );
    }

    token eof;
    eof.kind = token_kind::end;
    eof.line = line;
    eof.column = col;
    out.push_back( eof );
    return out;
}

} // namespace spacheck
