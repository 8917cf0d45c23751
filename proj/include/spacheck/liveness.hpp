#pragma once

#include "explorer.hpp"
#include "semantics.hpp"

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spacheck
{

// Liveness is judged over the behaviours admitted by
//
//     Init /\ [][Next]_vars /\ WF_vars(Next)
//
// Weak fairness forbids stuttering forever while a state-changing step is
// enabled. The admitted infinite behaviours are therefore (a) paths that take
// state-changing edges infinitely often and (b) paths that reach a quiescent
// state, one with no edge to a different state, and stutter there. Self-loop
// edges (e.g. an action that only has a guard) are stuttering steps.
//
// Quiescence is distinct from deadlock: a state whose only successor is a
// self-loop is quiescent but not deadlocked.

inline bool is_quiescent( const state_graph& graph, std::size_t idx )
{
    for ( const auto& e : graph.edges[ idx ] )
        if ( e.target != idx )
            return false;
    return true;
}

inline std::vector< std::size_t > quiescent_states( const state_graph& graph )
{
    std::vector< std::size_t > out;
    for ( std::size_t i = 0; i < graph.size(); ++i )
        if ( is_quiescent( graph, i ) )
            out.push_back( i );
    return out;
}

inline constexpr std::size_t no_component = static_cast< std::size_t >( -1 );

// Strongly connected components of the subgraph induced by `keep`, using
// state-changing edges only.
struct scc_info
{
    std::vector< std::size_t > component; // no_component outside `keep`
    std::vector< std::size_t > order;     // states grouped by component, each group sorted
    std::vector< std::size_t > offset;    // component c occupies order[offset[c], offset[c + 1])
    std::vector< char > nontrivial;       // >= 2 states, hence a fair cycle

    [[nodiscard]] std::size_t count() const { return nontrivial.size(); }

    [[nodiscard]] std::span< const std::size_t > members( std::size_t c ) const
    {
        return { order.data() + offset[ c ], offset[ c + 1 ] - offset[ c ] };
    }

    [[nodiscard]] bool in_fair_cycle( std::size_t idx ) const
    {
        return component[ idx ] != no_component && nontrivial[ component[ idx ] ];
    }
};

// Iterative Tarjan.
inline scc_info strongly_connected_components( const state_graph& graph, const std::vector< char >& keep )
{
    const std::size_t n = graph.size();
    scc_info info;
    info.component.assign( n, no_component );
    info.offset.push_back( 0 );

    std::vector< std::size_t > index( n, no_component );
    std::vector< std::size_t > low( n, 0 );
    std::vector< char > on_stack( n, 0 );
    std::vector< std::size_t > stack;
    std::size_t counter = 0;

    struct frame
    {
        std::size_t node;
        std::size_t next_edge;
    };
    std::vector< frame > call;

    for ( std::size_t root = 0; root < n; ++root )
    {
        if ( !keep[ root ] || index[ root ] != no_component )
            continue;
        call.push_back( { root, 0 } );
        index[ root ] = low[ root ] = counter++;
        stack.push_back( root );
        on_stack[ root ] = 1;

        while ( !call.empty() )
        {
            frame& f = call.back();
            const auto& out = graph.edges[ f.node ];
            if ( f.next_edge < out.size() )
            {
                std::size_t w = out[ f.next_edge++ ].target;
                if ( w == f.node || !keep[ w ] )
                    continue;
                if ( index[ w ] == no_component )
                {
                    index[ w ] = low[ w ] = counter++;
                    stack.push_back( w );
                    on_stack[ w ] = 1;
                    call.push_back( { w, 0 } );
                }
                else if ( on_stack[ w ] )
                    low[ f.node ] = std::min( low[ f.node ], index[ w ] );
                continue;
            }

            std::size_t v = f.node;
            call.pop_back();
            if ( !call.empty() )
                low[ call.back().node ] = std::min( low[ call.back().node ], low[ v ] );
            if ( low[ v ] != index[ v ] )
                continue;

            std::size_t id = info.count();
            std::size_t first = info.order.size();
            while ( true )
            {
                std::size_t w = stack.back();
                stack.pop_back();
                on_stack[ w ] = 0;
                info.component[ w ] = id;
                info.order.push_back( w );
                if ( w == v )
                    break;
            }
            std::sort( info.order.begin() + static_cast< std::ptrdiff_t >( first ), info.order.end() );
            info.offset.push_back( info.order.size() );
            info.nontrivial.push_back( info.order.size() - first >= 2 ? 1 : 0 );
        }
    }
    return info;
}

namespace detail
{

// A behaviour that avoids some target predicate forever: the states allowed
// on it (`avoid`), their SCCs, and the lasso builder.
class avoidance
{
    const state_graph& _graph;
    const std::vector< char >& _avoid;
    scc_info _scc;

public:
    avoidance( const state_graph& graph, const std::vector< char >& avoid )
        : _graph{ graph }, _avoid{ avoid }, _scc{ strongly_connected_components( graph, avoid ) } {}

    // A state from which some admitted behaviour stays inside `avoid` forever
    // without leaving it: a fair cycle of the restriction, or quiescence.
    [[nodiscard]] bool is_trap( std::size_t idx ) const
    {
        return _avoid[ idx ] && ( _scc.in_fair_cycle( idx ) || is_quiescent( _graph, idx ) );
    }

    struct path
    {
        std::vector< std::size_t > nodes;
        std::vector< std::size_t > actions;
    };

    // Multi-source BFS inside `avoid` from `sources` (ascending index order)
    // to the nearest trap.
    [[nodiscard]] std::optional< path > find_trap( const std::vector< std::size_t >& sources ) const
    {
        const std::size_t n = _graph.size();
        std::vector< std::optional< edge > > from( n );
        std::vector< char > seen( n, 0 );
        std::deque< std::size_t > queue;
        for ( auto s : sources )
        {
            if ( _avoid[ s ] && !seen[ s ] )
            {
                seen[ s ] = 1;
                queue.push_back( s );
            }
        }
        while ( !queue.empty() )
        {
            std::size_t u = queue.front();
            queue.pop_front();
            if ( is_trap( u ) )
            {
                path p;
                for ( std::size_t at = u;; )
                {
                    p.nodes.push_back( at );
                    if ( !from[ at ] )
                        break;
                    p.actions.push_back( from[ at ]->action );
                    at = from[ at ]->target;
                }
                std::reverse( p.nodes.begin(), p.nodes.end() );
                std::reverse( p.actions.begin(), p.actions.end() );
                return p;
            }
            for ( const auto& e : _graph.edges[ u ] )
            {
                if ( e.target == u || !_avoid[ e.target ] || seen[ e.target ] )
                    continue;
                seen[ e.target ] = 1;
                from[ e.target ] = edge{ e.action, u };
                queue.push_back( e.target );
            }
        }
        return std::nullopt;
    }

    // Appends the looping part for a trap state that ends `t`.
    void close_lasso( trace& t, std::size_t trap ) const
    {
        if ( is_quiescent( _graph, trap ) )
        {
            t.loop_start = t.states.size() - 1;
            for ( const auto& e : _graph.edges[ trap ] )
            {
                if ( e.target == trap )
                {
                    t.loop_action = _graph.action_names[ e.action ];
                    break;
                }
            }
            return;
        }

        // Shortest cycle back to `trap` through its component.
        const std::size_t comp = _scc.component[ trap ];
        const std::size_t n = _graph.size();
        std::vector< std::optional< edge > > from( n );
        std::vector< char > seen( n, 0 );
        std::deque< std::size_t > queue{ trap };
        seen[ trap ] = 1;
        std::optional< edge > closing;
        std::size_t last = trap;
        while ( !queue.empty() && !closing )
        {
            std::size_t u = queue.front();
            queue.pop_front();
            for ( const auto& e : _graph.edges[ u ] )
            {
                if ( e.target == u || _scc.component[ e.target ] != comp )
                    continue;
                if ( e.target == trap )
                {
                    closing = e;
                    last = u;
                    break;
                }
                if ( seen[ e.target ] )
                    continue;
                seen[ e.target ] = 1;
                from[ e.target ] = edge{ e.action, u };
                queue.push_back( e.target );
            }
        }

        std::vector< std::size_t > nodes;
        std::vector< std::size_t > actions;
        for ( std::size_t at = last; at != trap; )
        {
            nodes.push_back( at );
            actions.push_back( from[ at ]->action );
            at = from[ at ]->target;
        }
        std::reverse( nodes.begin(), nodes.end() );
        std::reverse( actions.begin(), actions.end() );

        t.loop_start = t.states.size() - 1;
        for ( std::size_t k = 0; k < nodes.size(); ++k )
        {
            t.actions.push_back( _graph.action_names[ actions[ k ] ] );
            t.states.push_back( _graph.states[ nodes[ k ] ] );
        }
        t.loop_action = _graph.action_names[ closing->action ];
    }

    // Appends `p` (whose first node already ends `t`) and closes the lasso.
    void extend( trace& t, const path& p ) const
    {
        for ( std::size_t k = 1; k < p.nodes.size(); ++k )
        {
            t.actions.push_back( _graph.action_names[ p.actions[ k - 1 ] ] );
            t.states.push_back( _graph.states[ p.nodes[ k ] ] );
        }
        close_lasso( t, p.nodes.back() );
    }
};

inline std::vector< char > negate( const std::vector< char >& holds )
{
    std::vector< char > out( holds.size() );
    for ( std::size_t i = 0; i < holds.size(); ++i )
        out[ i ] = holds[ i ] ? 0 : 1;
    return out;
}

} // namespace detail

// Counterexample to <>pred: an admitted behaviour from an initial state that
// never satisfies pred. nullopt when the property holds.
inline std::optional< trace > find_eventually_violation( const state_graph& graph, const std::vector< char >& pred )
{
    auto avoid = detail::negate( pred );
    detail::avoidance search{ graph, avoid };
    auto sources = graph.initial;
    std::sort( sources.begin(), sources.end() );
    auto p = search.find_trap( sources );
    if ( !p )
        return std::nullopt;
    trace t;
    t.states.push_back( graph.states[ p->nodes.front() ] );
    search.extend( t, *p );
    return t;
}

// Counterexample to p ~> q: a path to a reachable p-state followed by an
// admitted continuation that never satisfies q.
inline std::optional< trace > find_leadsto_violation( const state_graph& graph, const std::vector< char >& p,
                                                      const std::vector< char >& q )
{
    auto avoid = detail::negate( q );
    detail::avoidance search{ graph, avoid };
    std::vector< std::size_t > sources;
    for ( std::size_t i = 0; i < graph.size(); ++i )
        if ( p[ i ] && !q[ i ] )
            sources.push_back( i );
    auto path = search.find_trap( sources );
    if ( !path )
        return std::nullopt;
    trace t = reconstruct_trace( graph, path->nodes.front() );
    search.extend( t, *path );
    return t;
}

// Counterexample to []<>pred: a reachable trap of the not-pred restriction.
inline std::optional< trace > find_always_eventually_violation( const state_graph& graph,
                                                                const std::vector< char >& pred )
{
    auto avoid = detail::negate( pred );
    detail::avoidance search{ graph, avoid };
    for ( std::size_t i = 0; i < graph.size(); ++i )
    {
        if ( !search.is_trap( i ) )
            continue;
        trace t = reconstruct_trace( graph, i );
        search.extend( t, { { i }, {} } );
        return t;
    }
    return std::nullopt;
}

namespace detail
{

inline verdict liveness_verdict( std::string name, check_kind kind, std::optional< trace > counterexample )
{
    verdict v;
    v.name = std::move( name );
    v.kind = kind;
    if ( counterexample )
    {
        v.status = verdict_status::fail;
        v.detail = counterexample->loop_action.empty() && counterexample->loop_start &&
                           *counterexample->loop_start + 1 == counterexample->states.size()
                       ? "behaviour stutters forever in a state where the property is not met"
                       : "fair behaviour avoids the target forever";
        v.counterexample = std::move( counterexample );
    }
    else
        v.detail = "holds under weak fairness";
    return v;
}

} // namespace detail

inline verdict check_eventually( const state_graph& graph, const bound_spec& bound, const expr& pred,
                                 const binder_values& binders = {}, std::string name = "eventually" )
{
    try
    {
        auto holds = label_states( graph, bound, pred, binders, "property " + name );
        return detail::liveness_verdict( name, check_kind::eventually, find_eventually_violation( graph, holds ) );
    }
    catch ( const state_eval_error& e )
    {
        return error_verdict( graph, name, check_kind::eventually, e );
    }
}

inline verdict check_leadsto( const state_graph& graph, const bound_spec& bound, const expr& p, const expr& q,
                              const binder_values& binders = {}, std::string name = "leadsto" )
{
    try
    {
        auto p_holds = label_states( graph, bound, p, binders, "property " + name );
        auto q_holds = label_states( graph, bound, q, binders, "property " + name );
        return detail::liveness_verdict( name, check_kind::leadsto,
                                         find_leadsto_violation( graph, p_holds, q_holds ) );
    }
    catch ( const state_eval_error& e )
    {
        return error_verdict( graph, name, check_kind::leadsto, e );
    }
}

inline verdict check_always_eventually( const state_graph& graph, const bound_spec& bound, const expr& pred,
                                        const binder_values& binders = {},
                                        std::string name = "always_eventually" )
{
    try
    {
        auto holds = label_states( graph, bound, pred, binders, "property " + name );
        return detail::liveness_verdict( name, check_kind::always_eventually,
                                         find_always_eventually_violation( graph, holds ) );
    }
    catch ( const state_eval_error& e )
    {
        return error_verdict( graph, name, check_kind::always_eventually, e );
    }
}

// Checks one declared property, expanding a `forall` binder into one check
// per element. The first failing instance decides the verdict.
inline verdict check_property( const state_graph& graph, const bound_spec& bound, const temporal_property& prop )
{
    auto check_one = [ & ]( const binder_values& binders ) {
        switch ( prop.shape )
        {
            case property_shape::invariant: return check_invariant( graph, bound, prop.pred, binders, prop.name );
            case property_shape::eventually: return check_eventually( graph, bound, prop.pred, binders, prop.name );
            case property_shape::leadsto:
                return check_leadsto( graph, bound, prop.pred, prop.target, binders, prop.name );
            case property_shape::always_eventually:
                return check_always_eventually( graph, bound, prop.pred, binders, prop.name );
        }
        return verdict{};
    };

    if ( !prop.binder )
        return check_one( {} );

    verdict summary;
    summary.name = prop.name;
    summary.kind = kind_of( prop.shape );
    std::vector< value > elements;
    try
    {
        elements = eval_set( prop.binder->set, env{ bound, nullptr, {}, "property " + prop.name } );
    }
    catch ( const eval_error& e )
    {
        summary.status = verdict_status::error;
        summary.detail = e.describe();
        return summary;
    }
    if ( elements.empty() )
    {
        summary.detail = "warning: quantifier ranges over an empty set; holds vacuously";
        return summary;
    }
    for ( const auto& element : elements )
    {
        verdict v = check_one( { { prop.binder->name, element } } );
        if ( v.status != verdict_status::pass )
        {
            v.binder = element;
            v.detail = prop.binder->name + " = " + to_string( element ) + ": " + v.detail;
            return v;
        }
    }
    summary.detail = "holds for all " + std::to_string( elements.size() ) + " values of " + prop.binder->name;
    return summary;
}

} // namespace spacheck
