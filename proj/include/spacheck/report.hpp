#pragma once

#include "explorer.hpp"
#include "liveness.hpp"
#include "parser.hpp"
#include "semantics.hpp"

#include <json.hpp>

#include <cctype>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace spacheck
{

struct report
{
    std::string spec_name;
    std::vector< std::string > variables;
    constant_assignments constants;
    std::size_t states = 0;
    std::size_t transitions = 0;
    double elapsed_ms = 0;
    std::vector< verdict > verdicts;
};

struct check_options
{
    bool deadlock = true;
    explore_limits limits;
};

struct check_run
{
    report result;
    state_graph graph;
};

// Explores and runs the deadlock check (unless disabled) followed by every
// declared property in declaration order. Throws exploration_error.
inline check_run run_checks( const bound_spec& bound, const check_options& options = {} )
{
    auto start = std::chrono::steady_clock::now();
    check_run run;
    run.graph = explore( bound, options.limits );

    report& r = run.result;
    r.spec_name = bound.spec().name;
    for ( const auto& v : bound.spec().variables )
        r.variables.push_back( v.name );
    r.constants = bound.constants();
    r.states = run.graph.size();
    r.transitions = run.graph.transition_count();
    if ( options.deadlock )
        r.verdicts.push_back( check_deadlock( run.graph ) );
    for ( const auto& prop : bound.spec().properties )
        r.verdicts.push_back( check_property( run.graph, bound, prop ) );
    r.elapsed_ms =
        std::chrono::duration< double, std::milli >( std::chrono::steady_clock::now() - start ).count();
    return run;
}

inline nlohmann::ordered_json value_to_json( const value& v )
{
    switch ( v.kind() )
    {
        case value_kind::boolean: return v.as_bool();
        case value_kind::integer: return v.as_int();
        case value_kind::string: return v.as_string();
    }
    return nullptr;
}

// The JSON form of a trace lists the loop-closing action as the last element
// of "actions" when "loop_start" is set, so that actions[i] always leads out
// of states[i]. A pure stuttering loop is written as the empty string.
inline nlohmann::ordered_json trace_to_json( const trace& t, const std::vector< std::string >& variables )
{
    nlohmann::ordered_json j;
    j[ "states" ] = nlohmann::ordered_json::array();
    for ( const auto& s : t.states )
    {
        nlohmann::ordered_json record = nlohmann::ordered_json::object();
        for ( std::size_t i = 0; i < variables.size() && i < s.values.size(); ++i )
            record[ variables[ i ] ] = value_to_json( s.values[ i ] );
        j[ "states" ].push_back( std::move( record ) );
    }
    j[ "actions" ] = t.actions;
    if ( t.loop_start )
    {
        j[ "actions" ].push_back( t.loop_action );
        j[ "loop_start" ] = *t.loop_start;
    }
    else
        j[ "loop_start" ] = nullptr;
    return j;
}

inline nlohmann::ordered_json report_to_json( const report& r )
{
    nlohmann::ordered_json j;
    j[ "spec" ] = r.spec_name;
    j[ "constants" ] = nlohmann::ordered_json::object();
    for ( const auto& [ name, v ] : r.constants )
        j[ "constants" ][ name ] = value_to_json( v );
    j[ "states" ] = r.states;
    j[ "transitions" ] = r.transitions;
    j[ "elapsed_ms" ] = r.elapsed_ms;
    j[ "results" ] = nlohmann::ordered_json::array();
    for ( const auto& v : r.verdicts )
    {
        nlohmann::ordered_json item;
        item[ "name" ] = v.name;
        item[ "kind" ] = check_kind_name( v.kind );
        item[ "status" ] = status_name( v.status );
        item[ "binder" ] = v.binder ? value_to_json( *v.binder ) : nlohmann::ordered_json( nullptr );
        item[ "trace" ] =
            v.counterexample ? trace_to_json( *v.counterexample, r.variables ) : nlohmann::ordered_json( nullptr );
        item[ "detail" ] = v.detail;
        j[ "results" ].push_back( std::move( item ) );
    }
    return j;
}

inline std::string emit_json( const report& r )
{
    return report_to_json( r ).dump( 2 ) + "\n";
}

inline void write_trace_text( std::ostream& out, const trace& t, const std::vector< std::string >& variables )
{
    for ( std::size_t i = 0; i < t.states.size(); ++i )
    {
        if ( i > 0 )
            out << "    -- " << t.actions[ i - 1 ] << " -->\n";
        out << "    State " << i + 1 << ":\n";
        for ( std::size_t k = 0; k < variables.size() && k < t.states[ i ].values.size(); ++k )
            out << "      " << variables[ k ] << " = " << to_string( t.states[ i ].values[ k ] ) << "\n";
    }
    if ( t.loop_start )
    {
        out << "    -- " << ( t.loop_action.empty() ? "(stutter)" : t.loop_action ) << " -->\n";
        out << "    loop to state " << *t.loop_start + 1 << "\n";
    }
}

inline std::string emit_text( const report& r )
{
    std::ostringstream out;
    out << "spec " << r.spec_name;
    if ( !r.constants.empty() )
    {
        out << " (";
        for ( std::size_t i = 0; i < r.constants.size(); ++i )
            out << ( i ? ", " : "" ) << r.constants[ i ].first << "=" << to_string( r.constants[ i ].second );
        out << ")";
    }
    out << ": " << r.states << " states, " << r.transitions << " transitions\n";
    for ( const auto& v : r.verdicts )
    {
        std::string status{ status_name( v.status ) };
        for ( auto& c : status )
            c = static_cast< char >( std::toupper( static_cast< unsigned char >( c ) ) );
        out << status << "  " << check_kind_name( v.kind ) << " " << v.name;
        if ( v.binder )
            out << " [" << to_string( *v.binder ) << "]";
        out << ": " << v.detail << "\n";
        if ( v.counterexample && v.status != verdict_status::pass )
            write_trace_text( out, *v.counterexample, r.variables );
    }
    return out.str();
}

namespace detail
{

inline std::string dot_escape( std::string_view text )
{
    std::string out;
    for ( char c : text )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace detail

// Graphviz rendering: one node per state (initial states as double octagons),
// one labelled edge per transition.
inline std::string emit_dot( const state_graph& graph, const spec_model& spec )
{
    std::ostringstream out;
    out << "digraph \"" << detail::dot_escape( spec.name ) << "\" {\n";
    out << "  node [shape=box];\n";
    for ( std::size_t i = 0; i < graph.size(); ++i )
    {
        out << "  s" << i << " [label=\"" << i << "\\n"
            << detail::dot_escape( format_state( graph.states[ i ], spec, "," ) ) << "\"";
        if ( graph.is_initial( i ) )
            out << ", shape=doubleoctagon";
        out << "];\n";
    }
    for ( std::size_t i = 0; i < graph.size(); ++i )
        for ( const auto& e : graph.edges[ i ] )
            out << "  s" << i << " -> s" << e.target << " [label=\""
                << detail::dot_escape( graph.action_names[ e.action ] ) << "\"];\n";
    out << "}\n";
    return out.str();
}

enum exit_code : int
{
    exit_pass = 0,
    exit_fail = 1,
    exit_error = 2,
    exit_usage = 3,
};

struct run_config
{
    std::string spec_path;
    std::vector< std::string > constants; // raw `name=value` arguments
    bool no_deadlock = false;
    bool json = false;
    std::optional< std::string > dot_path;
    explore_limits limits;
    bool graph_only = false;
};

// The whole command: parse, bind, validate, explore, check, report.
inline int run_check( const run_config& config, std::ostream& out, std::ostream& err )
{
    std::ifstream file( config.spec_path, std::ios::binary );
    if ( !file )
    {
        err << "error: cannot read " << config.spec_path << "\n";
        return exit_error;
    }
    std::stringstream buffer;
    buffer << file.rdbuf();

    spec_model spec;
    try
    {
        spec = parse_spec( buffer.str() );
    }
    catch ( const parse_error& e )
    {
        err << config.spec_path << ":" << e.what() << "\n";
        return exit_error;
    }

    std::optional< bound_spec > bound;
    try
    {
        constant_assignments assignments;
        for ( const auto& raw : config.constants )
            assignments.push_back( parse_constant_assignment( raw ) );
        for ( std::size_t i = 0; i < assignments.size(); ++i )
            for ( std::size_t k = 0; k < i; ++k )
                if ( assignments[ i ].first == assignments[ k ].first )
                    throw binding_error( "constant " + assignments[ i ].first + " given more than once" );
        bound.emplace( bind_constants( spec, assignments ) );
    }
    catch ( const binding_error& e )
    {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    auto problems = validate( *bound );
    if ( !problems.empty() )
    {
        for ( const auto& p : problems )
            err << config.spec_path << ":" << p.describe() << "\n";
        return exit_error;
    }

    check_options options;
    options.deadlock = !config.no_deadlock && !config.graph_only;
    options.limits = config.limits;
    std::optional< check_run > run;
    try
    {
        if ( config.graph_only )
        {
            run.emplace();
            run->graph = explore( *bound, options.limits );
        }
        else
            run.emplace( run_checks( *bound, options ) );
    }
    catch ( const exploration_error& e )
    {
        err << "error: " << e.what() << "\n";
        if ( e.discovery_trace() )
        {
            std::ostringstream t;
            std::vector< std::string > names;
            for ( const auto& v : spec.variables )
                names.push_back( v.name );
            write_trace_text( t, *e.discovery_trace(), names );
            err << "  while exploring:\n" << t.str();
        }
        return exit_error;
    }

    if ( config.dot_path )
    {
        std::ofstream dot( *config.dot_path, std::ios::binary );
        if ( !dot )
        {
            err << "error: cannot write " << *config.dot_path << "\n";
            return exit_error;
        }
        dot << emit_dot( run->graph, bound->spec() );
    }
    if ( config.graph_only )
    {
        out << "wrote " << run->graph.size() << " states and " << run->graph.transition_count() << " transitions to "
            << *config.dot_path << "\n";
        return exit_pass;
    }

    const report& r = run->result;
    out << ( config.json ? emit_json( r ) : emit_text( r ) );

    int code = exit_pass;
    for ( const auto& v : r.verdicts )
    {
        if ( v.status == verdict_status::error )
            return exit_error;
        if ( v.status == verdict_status::fail )
            code = exit_fail;
    }
    return code;
}

} // namespace spacheck
