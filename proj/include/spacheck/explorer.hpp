#pragma once

#include "model.hpp"
#include "semantics.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace spacheck
{

struct edge
{
    std::size_t action; // index into action_names
    std::size_t target;

    friend bool operator==( const edge&, const edge& ) = default;
};

// The reachable state space. Indices are BFS discovery order, so a smaller
// index never lies deeper than a larger one.
struct state_graph
{
    std::vector< std::string > action_names;
    std::vector< state > states;
    std::unordered_map< std::string, std::size_t > key_index;
    std::vector< std::size_t > initial;
    std::vector< std::vector< edge > > edges;
    std::vector< std::optional< edge > > parent; // edge.target is the predecessor
    std::vector< std::size_t > depth;

    [[nodiscard]] std::size_t size() const { return states.size(); }

    [[nodiscard]] std::size_t transition_count() const
    {
        std::size_t n = 0;
        for ( const auto& out : edges )
            n += out.size();
        return n;
    }

    [[nodiscard]] std::optional< std::size_t > find( const state& s ) const
    {
        auto it = key_index.find( canonical_key( s ) );
        if ( it == key_index.end() )
            return std::nullopt;
        return it->second;
    }

    [[nodiscard]] bool is_initial( std::size_t idx ) const
    {
        return std::find( initial.begin(), initial.end(), idx ) != initial.end();
    }
};

// A finite behaviour prefix. With loop_start set the behaviour continues
// forever by returning from the last state to states[loop_start] via
// loop_action; an empty loop_action is a pure stuttering step.
struct trace
{
    std::vector< state > states;
    std::vector< std::string > actions; // actions[i] leads from states[i] to states[i + 1]
    std::optional< std::size_t > loop_start;
    std::string loop_action;

    friend bool operator==( const trace&, const trace& ) = default;
};

enum class check_kind
{
    deadlock,
    invariant,
    eventually,
    leadsto,
    always_eventually,
};

inline std::string_view check_kind_name( check_kind kind )
{
    switch ( kind )
    {
        case check_kind::deadlock: return "deadlock";
        case check_kind::invariant: return "invariant";
        case check_kind::eventually: return "eventually";
        case check_kind::leadsto: return "leadsto";
        case check_kind::always_eventually: return "always_eventually";
    }
    return "?";
}

inline check_kind kind_of( property_shape shape )
{
    switch ( shape )
    {
        case property_shape::invariant: return check_kind::invariant;
        case property_shape::eventually: return check_kind::eventually;
        case property_shape::leadsto: return check_kind::leadsto;
        case property_shape::always_eventually: return check_kind::always_eventually;
    }
    return check_kind::invariant;
}

enum class verdict_status
{
    pass,
    fail,
    error,
};

inline std::string_view status_name( verdict_status status )
{
    switch ( status )
    {
        case verdict_status::pass: return "pass";
        case verdict_status::fail: return "fail";
        case verdict_status::error: return "error";
    }
    return "?";
}

struct verdict
{
    std::string name;
    check_kind kind = check_kind::invariant;
    verdict_status status = verdict_status::pass;
    std::optional< value > binder;
    std::optional< trace > counterexample; // always present on fail
    std::string detail;
};

struct explore_limits
{
    std::size_t max_states = 1'000'000;
    std::optional< std::size_t > max_depth;
};

// Raised when exploration cannot complete: a runtime evaluation error, an
// exceeded limit, or an empty initial-state set. Carries the discovery trace
// to the offending state when there is one.
class exploration_error : public std::runtime_error
{
    std::optional< trace > _trace;

public:
    exploration_error( const std::string& message, std::optional< trace > t = std::nullopt )
        : std::runtime_error{ message }, _trace{ std::move( t ) } {}

    [[nodiscard]] const std::optional< trace >& discovery_trace() const { return _trace; }
};

// Shortest discovery path from an initial state to `target`, via parent links.
inline trace reconstruct_trace( const state_graph& graph, std::size_t target )
{
    std::vector< std::size_t > path{ target };
    std::vector< std::string > actions;
    std::size_t at = target;
    while ( graph.parent[ at ] )
    {
        const edge& p = *graph.parent[ at ];
        actions.push_back( graph.action_names[ p.action ] );
        at = p.target;
        path.push_back( at );
    }
    std::reverse( path.begin(), path.end() );
    std::reverse( actions.begin(), actions.end() );

    trace t;
    for ( auto idx : path )
        t.states.push_back( graph.states[ idx ] );
    t.actions = std::move( actions );
    return t;
}

// Breadth-first construction of the reachable state graph.
inline state_graph explore( const bound_spec& bound, const explore_limits& limits = {} )
{
    state_graph graph;
    for ( const auto& a : bound.spec().actions )
        graph.action_names.push_back( a.name );

    auto add_state = [ & ]( state s, std::optional< edge > parent, std::size_t depth ) -> std::size_t {
        std::string key = canonical_key( s );
        auto [ it, inserted ] = graph.key_index.emplace( std::move( key ), graph.states.size() );
        if ( !inserted )
            return it->second;
        if ( graph.states.size() >= limits.max_states )
            throw exploration_error( "state limit of " + std::to_string( limits.max_states ) + " states exceeded" );
        if ( limits.max_depth && depth > *limits.max_depth )
        {
            graph.key_index.erase( it );
            trace t = parent ? reconstruct_trace( graph, parent->target ) : trace{};
            throw exploration_error( "depth limit of " + std::to_string( *limits.max_depth ) + " exceeded",
                                     parent ? std::optional{ std::move( t ) } : std::nullopt );
        }
        graph.states.push_back( std::move( s ) );
        graph.edges.emplace_back();
        graph.parent.push_back( parent );
        graph.depth.push_back( depth );
        return graph.states.size() - 1;
    };

    std::vector< state > init;
    try
    {
        init = initial_states( bound );
    }
    catch ( const eval_error& e )
    {
        throw exploration_error( e.describe() );
    }
    if ( init.empty() )
        throw exploration_error( "the spec has no initial states" );
    for ( auto& s : init )
    {
        std::size_t before = graph.states.size();
        std::size_t idx = add_state( std::move( s ), std::nullopt, 0 );
        if ( idx == before )
            graph.initial.push_back( idx );
    }

    for ( std::size_t i = 0; i < graph.states.size(); ++i )
    {
        std::vector< labeled_state > next;
        try
        {
            next = successors( graph.states[ i ], bound );
        }
        catch ( const eval_error& e )
        {
            throw exploration_error( e.describe(), reconstruct_trace( graph, i ) );
        }
        for ( auto& [ action, target ] : next )
        {
            std::size_t idx = add_state( std::move( target ), edge{ action, i }, graph.depth[ i ] + 1 );
            graph.edges[ i ].push_back( { action, idx } );
        }
    }
    return graph;
}

// Thrown by label_states; `index` is the state that could not be evaluated.
class state_eval_error : public eval_error
{
    std::size_t _index;

public:
    state_eval_error( const eval_error& e, std::size_t index ) : eval_error{ e }, _index{ index } {}
    [[nodiscard]] std::size_t index() const { return _index; }
};

using binder_values = std::vector< std::pair< std::string, value > >;

// Truth of `pred` in every stored state, by index.
inline std::vector< char > label_states( const state_graph& graph, const bound_spec& bound, const expr& pred,
                                         const binder_values& binders, const std::string& context )
{
    std::vector< char > holds( graph.size() );
    env en{ bound, nullptr, binders, context };
    for ( std::size_t i = 0; i < graph.size(); ++i )
    {
        en.current = &graph.states[ i ];
        try
        {
            holds[ i ] = eval_predicate( pred, en ) ? 1 : 0;
        }
        catch ( const eval_error& e )
        {
            throw state_eval_error( e, i );
        }
    }
    return holds;
}

inline verdict error_verdict( const state_graph& graph, std::string name, check_kind kind,
                              const state_eval_error& e )
{
    verdict v;
    v.name = std::move( name );
    v.kind = kind;
    v.status = verdict_status::error;
    v.counterexample = reconstruct_trace( graph, e.index() );
    v.detail = e.describe();
    return v;
}

// Passes iff `pred` holds in every reachable state. A violation is reported
// with the shortest path to the first violating state in BFS order.
inline verdict check_invariant( const state_graph& graph, const bound_spec& bound, const expr& pred,
                                const binder_values& binders = {}, std::string name = "invariant" )
{
    verdict v;
    v.name = name;
    v.kind = check_kind::invariant;
    env en{ bound, nullptr, binders, "property " + name };
    for ( std::size_t i = 0; i < graph.size(); ++i )
    {
        en.current = &graph.states[ i ];
        bool ok = false;
        try
        {
            ok = eval_predicate( pred, en );
        }
        catch ( const eval_error& e )
        {
            return error_verdict( graph, name, check_kind::invariant, state_eval_error{ e, i } );
        }
        if ( !ok )
        {
            v.status = verdict_status::fail;
            v.counterexample = reconstruct_trace( graph, i );
            v.detail = "invariant violated in state " + std::to_string( v.counterexample->states.size() ) +
                       " of the trace";
            return v;
        }
    }
    v.detail = "holds in all " + std::to_string( graph.size() ) + " states";
    return v;
}

// Deadlock: a reachable state with no successor at all. Stuttering
// self-loops count as successors.
inline verdict check_deadlock( const state_graph& graph )
{
    verdict v;
    v.name = "deadlock";
    v.kind = check_kind::deadlock;
    for ( std::size_t i = 0; i < graph.size(); ++i )
    {
        if ( graph.edges[ i ].empty() )
        {
            v.status = verdict_status::fail;
            v.counterexample = reconstruct_trace( graph, i );
            v.detail = "deadlock reached: no action is enabled";
            return v;
        }
    }
    v.detail = "no deadlock";
    return v;
}

// Re-executes a trace against the next-state relation. Returns nullopt when
// every step is valid; otherwise the first bad step: 0 when the first state
// is not initial, i when states[i - 1] -> states[i] is not a step of
// actions[i - 1], and states.size() when the loop-closing step is invalid.
inline std::optional< std::size_t > replay_trace( const bound_spec& bound, const trace& t )
{
    const auto& spec = bound.spec();
    auto well_formed = [ & ]( const state& s ) {
        if ( s.values.size() != spec.variables.size() )
            return false;
        for ( std::size_t i = 0; i < s.values.size(); ++i )
            if ( s.values[ i ].kind() != spec.variables[ i ].kind )
                return false;
        return true;
    };
    auto related = [ & ]( const state& from, const std::string& action_name, const state& to ) {
        auto it = std::find_if( spec.actions.begin(), spec.actions.end(),
                                [ & ]( const action_def& a ) { return a.name == action_name; } );
        if ( it == spec.actions.end() )
            return false;
        try
        {
            auto next = action_successors( from, *it, bound );
            return std::find( next.begin(), next.end(), to ) != next.end();
        }
        catch ( const eval_error& )
        {
            return false;
        }
    };

    if ( t.states.empty() || !well_formed( t.states[ 0 ] ) )
        return 0;
    try
    {
        auto init = initial_states( bound );
        if ( std::find( init.begin(), init.end(), t.states[ 0 ] ) == init.end() )
            return 0;
    }
    catch ( const eval_error& )
    {
        return 0;
    }
    for ( std::size_t i = 1; i < t.states.size(); ++i )
    {
        if ( i - 1 >= t.actions.size() || !well_formed( t.states[ i ] ) ||
             !related( t.states[ i - 1 ], t.actions[ i - 1 ], t.states[ i ] ) )
            return i;
    }
    if ( t.actions.size() != t.states.size() - 1 )
        return t.states.size();
    if ( t.loop_start )
    {
        if ( *t.loop_start >= t.states.size() )
            return t.states.size();
        const state& back = t.states.back();
        const state& to = t.states[ *t.loop_start ];
        bool ok = t.loop_action.empty() ? back == to : related( back, t.loop_action, to );
        if ( !ok )
            return t.states.size();
    }
    return std::nullopt;
}

} // namespace spacheck
