#pragma once

#include "lexer.hpp"
#include "model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace spacheck
{

namespace detail
{

class parser
{
    std::vector< token > _tokens;
    std::size_t _at = 0;

public:
    explicit parser( std::string_view source ) : _tokens{ tokenize( source ) } {}

    spec_model parse_spec()
    {
        spec_model spec;
        expect_keyword( "spec" );
        spec.name = expect_identifier( "specification name" ).text;
        while ( peek().kind != token_kind::end )
        {
            const token& t = peek();
            if ( is_kw( "const" ) )
                spec.constants.push_back( parse_const() );
            else if ( is_kw( "var" ) )
                spec.variables.push_back( parse_var() );
            else if ( is_kw( "action" ) )
                spec.actions.push_back( parse_action() );
            else if ( is_kw( "invariant" ) || is_kw( "property" ) )
                spec.properties.push_back( parse_property() );
            else
                throw parse_error( "unexpected '" + t.text + "', expected a declaration", t.line, t.column,
                                   { "const", "var", "action", "invariant", "property" } );
        }
        return spec;
    }

    expr parse_standalone_expr()
    {
        expr e = parse_expr();
        expect_end();
        return e;
    }

private:
    const token& peek( std::size_t ahead = 0 ) const
    {
        std::size_t idx = std::min( _at + ahead, _tokens.size() - 1 );
        return _tokens[ idx ];
    }

    const token& next()
    {
        const token& t = _tokens[ _at ];
        if ( _at + 1 < _tokens.size() )
            ++_at;
        return t;
    }

    bool is_kw( std::string_view word, std::size_t ahead = 0 ) const
    {
        const token& t = peek( ahead );
        return t.kind == token_kind::keyword && t.text == word;
    }

    bool is_sym( std::string_view sym, std::size_t ahead = 0 ) const
    {
        const token& t = peek( ahead );
        return ( t.kind == token_kind::op || t.kind == token_kind::punct ) && t.text == sym;
    }

    static source_pos pos_of( const token& t ) { return { t.line, t.column }; }

    [[noreturn]] void fail_expected( std::string_view what ) const
    {
        const token& t = peek();
        std::string found = t.kind == token_kind::end ? "end of input" : "'" + t.text + "'";
        throw parse_error( "expected " + std::string{ what } + ", found " + found, t.line, t.column,
                           { std::string{ what } } );
    }

    const token& expect_keyword( std::string_view word )
    {
        if ( !is_kw( word ) )
            fail_expected( "'" + std::string{ word } + "'" );
        return next();
    }

    const token& expect_sym( std::string_view sym )
    {
        if ( !is_sym( sym ) )
            fail_expected( "'" + std::string{ sym } + "'" );
        return next();
    }

    const token& expect_identifier( std::string_view what )
    {
        if ( peek().kind != token_kind::identifier )
            fail_expected( what );
        return next();
    }

    void expect_end()
    {
        if ( peek().kind != token_kind::end )
            fail_expected( "end of input" );
    }

    value_kind parse_kind()
    {
        if ( is_kw( "int" ) )
        {
            next();
            return value_kind::integer;
        }
        if ( is_kw( "bool" ) )
        {
            next();
            return value_kind::boolean;
        }
        if ( is_kw( "string" ) )
        {
            next();
            return value_kind::string;
        }
        fail_expected( "a kind (int, bool or string)" );
    }

    const_decl parse_const()
    {
        const_decl decl;
        decl.pos = pos_of( expect_keyword( "const" ) );
        decl.name = expect_identifier( "constant name" ).text;
        expect_sym( ":" );
        decl.kind = parse_kind();
        return decl;
    }

    var_decl parse_var()
    {
        var_decl decl;
        decl.pos = pos_of( expect_keyword( "var" ) );
        decl.name = expect_identifier( "variable name" ).text;
        expect_sym( ":" );
        decl.kind = parse_kind();
        if ( is_kw( "domain" ) )
        {
            next();
            decl.domain = parse_set();
        }
        expect_keyword( "init" );
        if ( is_kw( "in" ) )
        {
            next();
            decl.init_in_set = true;
            decl.init = parse_set();
        }
        else
            decl.init = parse_expr();
        return decl;
    }

    action_def parse_action()
    {
        action_def action;
        action.pos = pos_of( expect_keyword( "action" ) );
        action.name = expect_identifier( "action name" ).text;
        expect_sym( "{" );
        while ( !is_sym( "}" ) )
        {
            if ( is_kw( "when" ) )
            {
                next();
                action.guards.push_back( parse_expr() );
            }
            else
                action.body.push_back( parse_stmt() );
        }
        expect_sym( "}" );
        return action;
    }

    std::vector< stmt > parse_block()
    {
        std::vector< stmt > body;
        expect_sym( "{" );
        while ( !is_sym( "}" ) )
        {
            if ( is_kw( "when" ) )
                throw parse_error( "'when' is only allowed at the top level of an action", peek().line,
                                   peek().column );
            body.push_back( parse_stmt() );
        }
        expect_sym( "}" );
        return body;
    }

    stmt parse_stmt()
    {
        stmt s;
        const token& first = peek();
        s.pos = pos_of( first );
        if ( first.kind == token_kind::identifier )
        {
            s.kind = stmt_kind::assign;
            s.name = next().text;
            expect_sym( "'" );
            expect_sym( "=" );
            s.value_expr = parse_expr();
        }
        else if ( is_kw( "any" ) )
        {
            next();
            s.kind = stmt_kind::any;
            s.name = expect_identifier( "choice variable" ).text;
            expect_keyword( "in" );
            s.value_expr = parse_set();
            s.body = parse_block();
        }
        else if ( is_kw( "if" ) )
        {
            next();
            s.kind = stmt_kind::if_;
            s.value_expr = parse_expr();
            s.body = parse_block();
            if ( is_kw( "else" ) )
            {
                next();
                s.has_else = true;
                s.alt = parse_block();
            }
        }
        else if ( is_sym( "}" ) || first.kind == token_kind::end )
            fail_expected( "'}'" );
        else
            fail_expected( "a statement (assignment, 'any', 'if' or 'when')" );
        return s;
    }

    temporal_property parse_property()
    {
        temporal_property prop;
        prop.pos = pos_of( peek() );
        if ( is_kw( "invariant" ) )
        {
            next();
            prop.name = expect_identifier( "property name" ).text;
            expect_sym( ":" );
            prop.shape = property_shape::invariant;
            prop.pred = parse_expr();
            return prop;
        }
        expect_keyword( "property" );
        prop.name = expect_identifier( "property name" ).text;
        expect_sym( ":" );
        if ( is_kw( "forall" ) )
        {
            next();
            property_binder binder;
            binder.name = expect_identifier( "quantified variable" ).text;
            expect_keyword( "in" );
            binder.set = parse_set();
            expect_sym( ":" );
            prop.binder = std::move( binder );
        }

        if ( is_kw( "always" ) )
        {
            next();
            if ( is_kw( "eventually" ) )
            {
                next();
                prop.shape = property_shape::always_eventually;
            }
            else
                prop.shape = property_shape::invariant;
            prop.pred = parse_parenthesized();
        }
        else if ( is_kw( "eventually" ) )
        {
            next();
            prop.shape = property_shape::eventually;
            prop.pred = parse_parenthesized();
        }
        else if ( is_sym( "(" ) )
        {
            prop.shape = property_shape::leadsto;
            prop.pred = parse_parenthesized();
            expect_keyword( "leadsto" );
            prop.target = parse_parenthesized();
        }
        else if ( peek().kind == token_kind::identifier )
        {
            prop.shape = property_shape::leadsto;
            const token& p = next();
            prop.pred = make_name( p.text, pos_of( p ) );
            expect_keyword( "leadsto" );
            const token& q = expect_identifier( "boolean variable" );
            prop.target = make_name( q.text, pos_of( q ) );
        }
        else
            fail_expected( "a temporal formula ('always', 'eventually' or leads-to)" );
        return prop;
    }

    expr parse_parenthesized()
    {
        expect_sym( "(" );
        expr e = parse_expr();
        expect_sym( ")" );
        return e;
    }

    expr parse_set()
    {
        source_pos pos = pos_of( peek() );
        if ( is_sym( "{" ) )
        {
            next();
            std::vector< expr > elems;
            elems.push_back( parse_expr() );
            while ( is_sym( "," ) )
            {
                next();
                elems.push_back( parse_expr() );
            }
            expect_sym( "}" );
            return make_node( expr_op::set_literal, std::move( elems ), pos );
        }
        expr low = parse_additive();
        expect_sym( ".." );
        expr high = parse_additive();
        return make_node( expr_op::range, { std::move( low ), std::move( high ) }, pos );
    }

    expr parse_expr() { return parse_implies(); }

    expr parse_implies()
    {
        expr lhs = parse_or();
        if ( is_kw( "implies" ) )
        {
            source_pos pos = pos_of( next() );
            expr rhs = parse_implies();
            return make_node( expr_op::implies, { std::move( lhs ), std::move( rhs ) }, pos );
        }
        return lhs;
    }

    expr parse_or()
    {
        expr lhs = parse_and();
        while ( is_kw( "or" ) )
        {
            source_pos pos = pos_of( next() );
            expr rhs = parse_and();
            lhs = make_node( expr_op::or_, { std::move( lhs ), std::move( rhs ) }, pos );
        }
        return lhs;
    }

    expr parse_and()
    {
        expr lhs = parse_not();
        while ( is_kw( "and" ) )
        {
            source_pos pos = pos_of( next() );
            expr rhs = parse_not();
            lhs = make_node( expr_op::and_, { std::move( lhs ), std::move( rhs ) }, pos );
        }
        return lhs;
    }

    expr parse_not()
    {
        if ( is_kw( "not" ) )
        {
            source_pos pos = pos_of( next() );
            return make_node( expr_op::not_, { parse_not() }, pos );
        }
        return parse_comparison();
    }

    expr parse_comparison()
    {
        expr lhs = parse_additive();
        static constexpr std::pair< std::string_view, expr_op > ops[] = {
            { "=", expr_op::eq }, { "/=", expr_op::ne }, { "<", expr_op::lt },
            { "<=", expr_op::le }, { ">", expr_op::gt }, { ">=", expr_op::ge },
        };
        for ( auto [ sym, op ] : ops )
        {
            if ( peek().kind == token_kind::op && peek().text == sym )
            {
                source_pos pos = pos_of( next() );
                expr rhs = parse_additive();
                return make_node( op, { std::move( lhs ), std::move( rhs ) }, pos );
            }
        }
        if ( is_kw( "in" ) )
        {
            source_pos pos = pos_of( next() );
            expr set = parse_set();
            return make_node( expr_op::in, { std::move( lhs ), std::move( set ) }, pos );
        }
        return lhs;
    }

    expr parse_additive()
    {
        expr lhs = parse_multiplicative();
        while ( peek().kind == token_kind::op && ( peek().text == "+" || peek().text == "-" ) )
        {
            const token& t = next();
            expr_op op = t.text == "+" ? expr_op::add : expr_op::sub;
            expr rhs = parse_multiplicative();
            lhs = make_node( op, { std::move( lhs ), std::move( rhs ) }, pos_of( t ) );
        }
        return lhs;
    }

    expr parse_multiplicative()
    {
        expr lhs = parse_unary();
        while ( peek().kind == token_kind::op && peek().text == "*" )
        {
            source_pos pos = pos_of( next() );
            expr rhs = parse_unary();
            lhs = make_node( expr_op::mul, { std::move( lhs ), std::move( rhs ) }, pos );
        }
        return lhs;
    }

    expr parse_unary()
    {
        if ( peek().kind == token_kind::op && peek().text == "-" )
        {
            source_pos pos = pos_of( next() );
            // `-` directly before a literal is part of the literal
            if ( peek().kind == token_kind::integer )
            {
                const token& t = next();
                std::int64_t magnitude = std::stoll( t.text );
                return make_literal( value{ -magnitude }, pos );
            }
            return make_node( expr_op::neg, { parse_unary() }, pos );
        }
        return parse_primary();
    }

    expr parse_primary()
    {
        const token& t = peek();
        source_pos pos = pos_of( t );
        switch ( t.kind )
        {
            case token_kind::integer:
                next();
                return make_literal( value{ static_cast< std::int64_t >( std::stoll( t.text ) ) }, pos );
            case token_kind::string:
                next();
                return make_literal( value{ t.text }, pos );
            case token_kind::identifier:
            {
                next();
                if ( is_sym( "'" ) )
                    throw parse_error( "primed variable " + t.text +
                                           "' may only appear on the left-hand side of an assignment",
                                       peek().line, peek().column );
                return make_name( t.text, pos );
            }
            case token_kind::keyword:
                if ( t.text == "true" || t.text == "false" )
                {
                    next();
                    return make_literal( value{ t.text == "true" }, pos );
                }
                if ( t.text == "if" )
                {
                    next();
                    expr cond = parse_expr();
                    expect_keyword( "then" );
                    expr then_branch = parse_expr();
                    expect_keyword( "else" );
                    expr else_branch = parse_expr();
                    return make_node( expr_op::if_then_else,
                                      { std::move( cond ), std::move( then_branch ), std::move( else_branch ) },
                                      pos );
                }
                break;
            case token_kind::punct:
                if ( t.text == "(" )
                {
                    next();
                    expr inner = parse_expr();
                    expect_sym( ")" );
                    return inner;
                }
                break;
            default:
                break;
        }
        fail_expected( "an expression" );
    }
};

} // namespace detail

// Parses a complete `.spa` source. Throws parse_error on the first syntax
// violation; name resolution and kinds are checked later by validate().
inline spec_model parse_spec( std::string_view source )
{
    return detail::parser{ source }.parse_spec();
}

inline expr parse_expression( std::string_view source )
{
    return detail::parser{ source }.parse_standalone_expr();
}

namespace detail
{

inline std::string_view op_symbol( expr_op op )
{
    switch ( op )
    {
        case expr_op::and_: return "and";
        case expr_op::or_: return "or";
        case expr_op::implies: return "implies";
        case expr_op::eq: return "=";
        case expr_op::ne: return "/=";
        case expr_op::lt: return "<";
        case expr_op::le: return "<=";
        case expr_op::gt: return ">";
        case expr_op::ge: return ">=";
        case expr_op::add: return "+";
        case expr_op::sub: return "-";
        case expr_op::mul: return "*";
        default: return "?";
    }
}

inline bool is_atom( const expr& e )
{
    return e.op == expr_op::literal || e.op == expr_op::name;
}

inline std::string print_expr( const expr& e, bool top );

inline std::string print_child( const expr& e )
{
    return print_expr( e, false );
}

inline std::string print_set( const expr& e )
{
    if ( e.op == expr_op::range )
        return print_child( e.children[ 0 ] ) + ".." + print_child( e.children[ 1 ] );
    std::string out = "{";
    for ( std::size_t i = 0; i < e.children.size(); ++i )
    {
        if ( i > 0 )
            out += ", ";
        out += print_expr( e.children[ i ], true );
    }
    return out + "}";
}

// Every compound subexpression is parenthesized, so the printed text parses
// back to the same tree regardless of precedence.
inline std::string print_expr( const expr& e, bool top )
{
    std::string body;
    switch ( e.op )
    {
        case expr_op::literal: return to_string( e.literal );
        case expr_op::name: return e.name;
        case expr_op::set_literal:
        case expr_op::range: return print_set( e );
        case expr_op::neg: body = "-(" + print_expr( e.children[ 0 ], true ) + ")"; break;
        case expr_op::not_: body = "not " + print_child( e.children[ 0 ] ); break;
        case expr_op::in: body = print_child( e.children[ 0 ] ) + " in " + print_set( e.children[ 1 ] ); break;
        case expr_op::if_then_else:
            body = "if " + print_child( e.children[ 0 ] ) + " then " + print_child( e.children[ 1 ] ) + " else " +
                   print_child( e.children[ 2 ] );
            break;
        default:
            body = print_child( e.children[ 0 ] ) + " " + std::string{ op_symbol( e.op ) } + " " +
                   print_child( e.children[ 1 ] );
            break;
    }
    return top ? body : "(" + body + ")";
}

inline void print_stmts( const std::vector< stmt >& body, int depth, std::string& out )
{
    std::string indent( static_cast< std::size_t >( depth ) * 4, ' ' );
    for ( const auto& s : body )
    {
        switch ( s.kind )
        {
            case stmt_kind::assign:
                out += indent + s.name + "' = " + print_expr( s.value_expr, true ) + "\n";
                break;
            case stmt_kind::any:
                out += indent + "any " + s.name + " in " + print_set( s.value_expr ) + " {\n";
                print_stmts( s.body, depth + 1, out );
                out += indent + "}\n";
                break;
            case stmt_kind::if_:
                out += indent + "if " + print_expr( s.value_expr, true ) + " {\n";
                print_stmts( s.body, depth + 1, out );
                if ( s.has_else )
                {
                    out += indent + "} else {\n";
                    print_stmts( s.alt, depth + 1, out );
                }
                out += indent + "}\n";
                break;
        }
    }
}

} // namespace detail

inline std::string print_expression( const expr& e )
{
    return is_set_expr( e ) ? detail::print_set( e ) : detail::print_expr( e, true );
}

// Canonical text for a spec; parse_spec(pretty_print(s)) == s.
inline std::string pretty_print( const spec_model& spec )
{
    using detail::print_expr;
    using detail::print_set;

    std::string out = "spec " + spec.name + "\n";
    if ( !spec.constants.empty() )
        out += "\n";
    for ( const auto& c : spec.constants )
        out += "const " + c.name + " : " + std::string{ kind_name( c.kind ) } + "\n";
    if ( !spec.variables.empty() )
        out += "\n";
    for ( const auto& v : spec.variables )
    {
        out += "var " + v.name + " : " + std::string{ kind_name( v.kind ) };
        if ( v.domain )
            out += " domain " + print_set( *v.domain );
        out += v.init_in_set ? " init in " + print_set( v.init ) : " init " + print_expr( v.init, true );
        out += "\n";
    }
    for ( const auto& a : spec.actions )
    {
        out += "\naction " + a.name + " {\n";
        for ( const auto& g : a.guards )
            out += "    when " + print_expr( g, true ) + "\n";
        detail::print_stmts( a.body, 1, out );
        out += "}\n";
    }
    if ( !spec.properties.empty() )
        out += "\n";
    for ( const auto& p : spec.properties )
    {
        if ( p.shape == property_shape::invariant && !p.binder )
        {
            out += "invariant " + p.name + ": " + print_expr( p.pred, true ) + "\n";
            continue;
        }
        out += "property " + p.name + ": ";
        if ( p.binder )
            out += "forall " + p.binder->name + " in " + print_set( p.binder->set ) + " : ";
        switch ( p.shape )
        {
            case property_shape::invariant: out += "always (" + print_expr( p.pred, true ) + ")"; break;
            case property_shape::eventually: out += "eventually (" + print_expr( p.pred, true ) + ")"; break;
            case property_shape::always_eventually:
                out += "always eventually (" + print_expr( p.pred, true ) + ")";
                break;
            case property_shape::leadsto:
                out += "(" + print_expr( p.pred, true ) + ") leadsto (" + print_expr( p.target, true ) + ")";
                break;
        }
        out += "\n";
    }
    return out;
}

} // namespace spacheck
