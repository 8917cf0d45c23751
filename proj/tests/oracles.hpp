#pragma once

// Test-only reference implementations. Nothing here calls into the
// exploration or liveness code it is used to check.

#include <spacheck/spacheck.hpp>

#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace oracle
{

inline std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string corpus( const std::string& name )
{
    return std::string{ SPACHECK_CORPUS_DIR } + "/" + name;
}

inline std::string test_data( const std::string& name )
{
    return std::string{ SPACHECK_TEST_DATA_DIR } + "/" + name;
}

inline spacheck::bound_spec load_source( const std::string& source, const spacheck::constant_assignments& consts = {} )
{
    auto bound = spacheck::bind_constants( spacheck::parse_spec( source ), consts );
    auto errors = spacheck::validate( bound );
    if ( !errors.empty() )
        throw std::runtime_error( "spec does not validate: " + errors.front().describe() );
    return bound;
}

inline spacheck::bound_spec load( const std::string& path, const spacheck::constant_assignments& consts = {} )
{
    return load_source( read_file( path ), consts );
}

inline spacheck::bound_spec load_math( std::int64_t n, const std::string& file = "math.spa" )
{
    return load( corpus( file ), { { "max_num_q", spacheck::value{ n } } } );
}

// --- Hand-coded math workflow --------------------------------------------
// (num, count_right, count_wrong, result, input_enabled, check_enabled,
//  new_question_enabled), stepped exactly as the four user/system actions.

using math_state = std::tuple< std::int64_t, std::int64_t, std::int64_t, std::string, bool, bool, bool >;

inline std::vector< math_state > math_successors( const math_state& s, std::int64_t n, bool off_by_one )
{
    auto [ num, cr, cw, res, ie, ce, nq ] = s;
    std::vector< math_state > out;
    if ( ie )
        out.emplace_back( num, cr, cw, res, false, true, nq );
    if ( ce )
    {
        out.emplace_back( num, cr + 1, cw, "Right", ie, false, true );
        out.emplace_back( num, cr, cw + 1, "Wrong", ie, false, true );
    }
    if ( num < n + ( off_by_one ? 1 : 0 ) && nq )
        out.emplace_back( num + 1, cr, cw, "", true, ce, false );
    if ( num == n )
        out.push_back( s );
    return out;
}

// Fixpoint iteration on a plain set until no growth.
inline std::set< math_state > math_reachable( std::int64_t n, bool off_by_one = false )
{
    std::set< math_state > seen{ math_state{ 1, 0, 0, "", true, false, false } };
    while ( true )
    {
        auto grown = seen;
        for ( const auto& s : seen )
            for ( const auto& t : math_successors( s, n, off_by_one ) )
                grown.insert( t );
        if ( grown.size() == seen.size() )
            return seen;
        seen = std::move( grown );
    }
}

inline math_state to_math_state( const spacheck::state& s )
{
    const auto& v = s.values;
    return { v[ 0 ].as_int(), v[ 1 ].as_int(), v[ 2 ].as_int(), v[ 3 ].as_string(),
             v[ 4 ].as_bool(), v[ 5 ].as_bool(), v[ 6 ].as_bool() };
}

// --- Hand-coded clock -------------------------------------------------------

using clock_state = std::pair< std::int64_t, std::string >;

inline std::vector< clock_state > clock_all_states()
{
    std::vector< clock_state > out;
    for ( std::int64_t hr = 1; hr <= 12; ++hr )
        for ( const char* p : { "am", "pm" } )
            out.emplace_back( hr, p );
    return out;
}

inline clock_state clock_next( const clock_state& s )
{
    std::int64_t hr = s.first == 12 ? 1 : s.first + 1;
    std::string period = s.first == 11 ? ( s.second == "am" ? "pm" : "am" ) : s.second;
    return { hr, period };
}

// --- Generic successor fixpoint over the interpreter's relation -------------

inline std::set< std::string > fixpoint_keys( const spacheck::bound_spec& bound )
{
    std::set< std::string > seen;
    std::vector< spacheck::state > frontier;
    for ( auto& s : spacheck::initial_states( bound ) )
        if ( seen.insert( spacheck::canonical_key( s ) ).second )
            frontier.push_back( s );
    while ( !frontier.empty() )
    {
        std::vector< spacheck::state > next;
        for ( const auto& s : frontier )
            for ( const auto& a : bound.spec().actions )
                for ( auto& t : spacheck::action_successors( s, a, bound ) )
                    if ( seen.insert( spacheck::canonical_key( t ) ).second )
                        next.push_back( std::move( t ) );
        frontier = std::move( next );
    }
    return seen;
}

// --- Liveness by closure ----------------------------------------------------
// Admitted infinite behaviours are lassos: a prefix followed by either a
// closed walk of state-changing steps or perpetual stuttering at a state with
// no state-changing successor. Closed walks are found from the transitive
// closure (Warshall) of the restricted step relation.

class lasso_oracle
{
    const spacheck::state_graph& _g;
    std::size_t _n;

public:
    explicit lasso_oracle( const spacheck::state_graph& g ) : _g{ g }, _n{ g.size() } {}

    // reach[u][v]: v reachable from u in >= 1 state-changing steps inside `allowed`
    [[nodiscard]] std::vector< std::vector< char > > closure( const std::vector< char >& allowed ) const
    {
        std::vector< std::vector< char > > reach( _n, std::vector< char >( _n, 0 ) );
        for ( std::size_t u = 0; u < _n; ++u )
            if ( allowed[ u ] )
                for ( const auto& e : _g.edges[ u ] )
                    if ( e.target != u && allowed[ e.target ] )
                        reach[ u ][ e.target ] = 1;
        for ( std::size_t k = 0; k < _n; ++k )
            for ( std::size_t u = 0; u < _n; ++u )
                if ( reach[ u ][ k ] )
                    for ( std::size_t v = 0; v < _n; ++v )
                        if ( reach[ k ][ v ] )
                            reach[ u ][ v ] = 1;
        return reach;
    }

    [[nodiscard]] bool stuck( std::size_t u ) const
    {
        for ( const auto& e : _g.edges[ u ] )
            if ( e.target != u )
                return false;
        return true;
    }

    // Is there an admitted behaviour from `start` that stays in `allowed`
    // forever?
    [[nodiscard]] bool escapes( std::size_t start, const std::vector< char >& allowed,
                                const std::vector< std::vector< char > >& reach ) const
    {
        if ( !allowed[ start ] )
            return false;
        for ( std::size_t v = 0; v < _n; ++v )
        {
            bool on_path = v == start || reach[ start ][ v ];
            if ( on_path && allowed[ v ] && ( reach[ v ][ v ] || stuck( v ) ) )
                return true;
        }
        return false;
    }

    [[nodiscard]] bool eventually_holds( const std::vector< char >& pred ) const
    {
        auto allowed = negate( pred );
        auto reach = closure( allowed );
        for ( auto i : _g.initial )
            if ( escapes( i, allowed, reach ) )
                return false;
        return true;
    }

    [[nodiscard]] bool leadsto_holds( const std::vector< char >& p, const std::vector< char >& q ) const
    {
        auto allowed = negate( q );
        auto reach = closure( allowed );
        for ( std::size_t s = 0; s < _n; ++s )
            if ( p[ s ] && escapes( s, allowed, reach ) )
                return false;
        return true;
    }

    [[nodiscard]] bool always_eventually_holds( const std::vector< char >& pred ) const
    {
        auto allowed = negate( pred );
        auto reach = closure( allowed );
        for ( std::size_t v = 0; v < _n; ++v )
            if ( allowed[ v ] && ( reach[ v ][ v ] || stuck( v ) ) )
                return false;
        return true;
    }

private:
    static std::vector< char > negate( const std::vector< char >& xs )
    {
        std::vector< char > out( xs.size() );
        for ( std::size_t i = 0; i < xs.size(); ++i )
            out[ i ] = !xs[ i ];
        return out;
    }
};

// Shape checks on a liveness counterexample, independent of how it was found.
// Returns an empty string when the lasso is a replayable, fair behaviour.
inline std::string lasso_problem( const spacheck::bound_spec& bound, const spacheck::state_graph& g,
                                  const spacheck::trace& t )
{
    if ( !t.loop_start )
        return "no loop";
    if ( auto bad = spacheck::replay_trace( bound, t ) )
        return "replay fails at step " + std::to_string( *bad );
    if ( *t.loop_start + 1 == t.states.size() )
    {
        // a loop that never changes the state is fair only where nothing else can happen
        auto idx = g.find( t.states.back() );
        if ( !idx )
            return "state not in graph";
        for ( const auto& e : g.edges[ *idx ] )
            if ( e.target != *idx )
                return "stutters in a state that can still move";
    }
    return {};
}

// --- Random small specs -----------------------------------------------------

// A random spec with <= 3 variables over domains of size <= 3, <= 4 actions,
// and a handful of liveness properties over atomic predicates.
inline std::string random_spec( std::mt19937& rng, int id )
{
    auto pick = [ & ]( int lo, int hi ) { return std::uniform_int_distribution< int >( lo, hi )( rng ); };
    auto coin = [ & ]() { return pick( 0, 1 ) == 1; };

    int k = pick( 2, 3 ); // shared integer domain size
    int nvars = pick( 1, 3 );
    struct var
    {
        std::string name;
        bool is_int;
    };
    std::vector< var > vars;
    for ( int i = 0; i < nvars; ++i )
        vars.push_back( { std::string( 1, static_cast< char >( 'a' + i ) ), coin() } );

    auto literal = [ & ]( const var& v ) {
        return v.is_int ? std::to_string( pick( 0, k - 1 ) ) : std::string( coin() ? "true" : "false" );
    };
    auto atom = [ & ]() {
        const var& v = vars[ static_cast< std::size_t >( pick( 0, nvars - 1 ) ) ];
        if ( v.is_int )
        {
            switch ( pick( 0, 2 ) )
            {
                case 0: return v.name + " = " + literal( v );
                case 1: return v.name + " < " + std::to_string( pick( 1, k - 1 ) );
                default: return v.name + " /= " + literal( v );
            }
        }
        return coin() ? v.name : "not " + v.name;
    };
    auto rhs = [ & ]( const var& v ) -> std::string {
        std::vector< std::string > same;
        for ( const auto& w : vars )
            if ( w.is_int == v.is_int && w.name != v.name )
                same.push_back( w.name );
        int choice = pick( 0, 3 );
        if ( choice == 0 || ( choice == 2 && same.empty() ) )
            return literal( v );
        if ( choice == 1 )
            return v.is_int ? "if " + v.name + " = " + std::to_string( k - 1 ) + " then 0 else " + v.name + " + 1"
                            : "not " + v.name;
        if ( choice == 2 )
            return same[ static_cast< std::size_t >( pick( 0, static_cast< int >( same.size() ) - 1 ) ) ];
        return "if " + atom() + " then " + literal( v ) + " else " + literal( v );
    };

    std::ostringstream src;
    src << "spec random" << id << "\n";
    std::string dom = "0.." + std::to_string( k - 1 );
    for ( const auto& v : vars )
    {
        src << "var " << v.name << " : " << ( v.is_int ? "int domain " + dom : "bool" );
        if ( coin() )
            src << " init " << literal( v ) << "\n";
        else
            src << " init in " << ( v.is_int ? dom : "{true, false}" ) << "\n";
    }

    int nactions = pick( 1, 4 );
    for ( int a = 0; a < nactions; ++a )
    {
        src << "action A" << a << " {\n";
        for ( int g = pick( 0, 2 ); g > 0; --g )
            src << "    when " << atom() << "\n";
        for ( const auto& v : vars )
        {
            if ( !coin() )
                continue;
            switch ( pick( 0, 4 ) )
            {
                case 0:
                    src << "    any c in " << ( v.is_int ? dom : "{true, false}" ) << " {\n        " << v.name
                        << "' = c\n    }\n";
                    break;
                case 1:
                    src << "    if " << atom() << " {\n        " << v.name << "' = " << rhs( v ) << "\n    } else {\n        "
                        << v.name << "' = " << rhs( v ) << "\n    }\n";
                    break;
                default: src << "    " << v.name << "' = " << rhs( v ) << "\n"; break;
            }
        }
        src << "}\n";
    }

    for ( int p = 0; p < 2; ++p )
    {
        src << "property E" << p << ": eventually (" << atom() << ")\n";
        src << "property R" << p << ": always eventually (" << atom() << ")\n";
        src << "property L" << p << ": (" << atom() << ") leadsto (" << atom() << ")\n";
    }
    return src.str();
}

} // namespace oracle
