#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <regex>
#include <sstream>

using namespace spacheck;

namespace {

struct outcome
{
    int code;
    std::string out;
    std::string err;
};

outcome run( run_config config )
{
    std::ostringstream out, err;
    int code = run_check( config, out, err );
    return { code, out.str(), err.str() };
}

run_config config_for( const std::string& path, std::vector< std::string > constants = {} )
{
    run_config c;
    c.spec_path = path;
    c.constants = std::move( constants );
    return c;
}

std::string temp_path( const std::string& name )
{
    return ( std::filesystem::temp_directory_path() / ( "spacheck_test_" + name ) ).string();
}

std::string write_temp( const std::string& name, const std::string& contents )
{
    auto path = temp_path( name );
    std::ofstream( path, std::ios::binary ) << contents;
    return path;
}

std::size_t count_matches( const std::string& text, const std::regex& re )
{
    return static_cast< std::size_t >(
        std::distance( std::sregex_iterator( text.begin(), text.end(), re ), std::sregex_iterator() ) );
}

TEST( RunCheck, ExitCodes )
{
    EXPECT_EQ( run( config_for( oracle::corpus( "math.spa" ), { "max_num_q=3" } ) ).code, 0 );
    EXPECT_EQ( run( config_for( oracle::corpus( "clock.spa" ) ) ).code, 0 );
    EXPECT_EQ( run( config_for( oracle::corpus( "math_buggy.spa" ), { "max_num_q=3" } ) ).code, 1 );
    EXPECT_EQ( run( config_for( oracle::test_data( "math_naive_invariant.spa" ), { "max_num_q=3" } ) ).code, 1 );
    EXPECT_EQ( run( config_for( write_temp( "syntax.spa", "spec t var x : int init 0 action A { when }" ) ) ).code,
               2 );
    EXPECT_EQ( run( config_for( write_temp( "kind.spa", "spec t var x : int init 0 action A { x' = true }" ) ) ).code,
               2 );
    EXPECT_EQ( run( config_for( temp_path( "does_not_exist.spa" ) ) ).code, 2 );
    EXPECT_EQ( run( config_for( oracle::corpus( "math.spa" ) ) ).code, 3 );
    EXPECT_EQ( run( config_for( oracle::corpus( "math.spa" ), { "max_num_q=3", "max_num_q=4" } ) ).code, 3 );
    EXPECT_EQ( run( config_for( oracle::corpus( "math.spa" ), { "max_num_q=three" } ) ).code, 3 );
    EXPECT_EQ( run( config_for( oracle::corpus( "clock.spa" ), { "max_num_q=3" } ) ).code, 3 );
}

TEST( RunCheck, NoDeadlockSkipsTheCheck )
{
    auto c = config_for( oracle::corpus( "math_buggy.spa" ), { "max_num_q=3" } );
    c.no_deadlock = true;
    auto r = run( c );
    EXPECT_EQ( r.code, 0 );
    EXPECT_EQ( r.out.find( "deadlock" ), std::string::npos );
}

TEST( RunCheck, ErrorsNameTheLocation )
{
    auto r = run( config_for( write_temp( "where.spa", "spec t var x : int init 0 action A { when }" ) ) );
    EXPECT_NE( r.err.find( "where.spa:1:43:" ), std::string::npos ) << r.err;
}

TEST( RunCheck, LimitExceededIsAnError )
{
    auto c = config_for( oracle::corpus( "math.spa" ), { "max_num_q=5" } );
    c.limits.max_states = 10;
    auto r = run( c );
    EXPECT_EQ( r.code, 2 );
    EXPECT_NE( r.err.find( "state limit" ), std::string::npos );
}

TEST( RunCheck, TextReport )
{
    auto r = run( config_for( oracle::corpus( "math_buggy.spa" ), { "max_num_q=3" } ) );
    EXPECT_EQ( r.out.rfind( "spec math (max_num_q=3): 40 states, 54 transitions\n", 0 ), 0u ) << r.out;
    EXPECT_NE( r.out.find( "FAIL  deadlock deadlock:" ), std::string::npos );
    EXPECT_NE( r.out.find( "State 12:" ), std::string::npos );
    EXPECT_EQ( r.out.find( "State 13:" ), std::string::npos );
    EXPECT_NE( r.out.find( "PASS  leadsto Liveness:" ), std::string::npos );
}

TEST( Json, MathReport )
{
    auto c = config_for( oracle::corpus( "math.spa" ), { "max_num_q=3" } );
    c.json = true;
    auto r = run( c );
    ASSERT_EQ( r.code, 0 );
    auto j = nlohmann::json::parse( r.out );
    EXPECT_EQ( j[ "spec" ], "math" );
    EXPECT_EQ( j[ "constants" ][ "max_num_q" ], 3 );
    EXPECT_EQ( j[ "states" ], 24 );
    EXPECT_EQ( j[ "transitions" ], 36 );
    EXPECT_TRUE( j[ "elapsed_ms" ].is_number() );
    ASSERT_EQ( j[ "results" ].size(), 4u );
    std::vector< std::string > kinds;
    for ( const auto& item : j[ "results" ] )
    {
        EXPECT_EQ( item[ "status" ], "pass" );
        EXPECT_TRUE( item[ "trace" ].is_null() );
        EXPECT_TRUE( item[ "binder" ].is_null() );
        kinds.push_back( item[ "kind" ] );
    }
    EXPECT_EQ( kinds, ( std::vector< std::string >{ "deadlock", "eventually", "leadsto", "invariant" } ) );
}

TEST( Json, ClockCounts )
{
    auto c = config_for( oracle::corpus( "clock.spa" ) );
    c.json = true;
    auto j = nlohmann::json::parse( run( c ).out );
    EXPECT_EQ( j[ "states" ], 24 );
    EXPECT_EQ( j[ "transitions" ], 24 );
    EXPECT_TRUE( j[ "constants" ].is_object() );
    EXPECT_TRUE( j[ "constants" ].empty() );
}

TEST( Json, InvariantTrace )
{
    auto c = config_for( oracle::test_data( "math_naive_invariant.spa" ), { "max_num_q=3" } );
    c.json = true;
    auto r = run( c );
    ASSERT_EQ( r.code, 1 );
    auto j = nlohmann::json::parse( r.out );
    const nlohmann::json* inv = nullptr;
    for ( const auto& item : j[ "results" ] )
        if ( item[ "name" ] == "Invariant" )
            inv = &item;
    ASSERT_NE( inv, nullptr );
    EXPECT_EQ( ( *inv )[ "status" ], "fail" );
    const auto& t = ( *inv )[ "trace" ];
    ASSERT_EQ( t[ "states" ].size(), 1u );
    EXPECT_EQ( t[ "actions" ], nlohmann::json::array() );
    EXPECT_TRUE( t[ "loop_start" ].is_null() );
    auto expected = nlohmann::json::parse( R"({"num":1,"count_right":0,"count_wrong":0,"result":"",
        "input_enabled":true,"check_enabled":false,"new_question_enabled":false})" );
    EXPECT_EQ( t[ "states" ][ 0 ], expected );
}

TEST( Json, LassoTraceListsTheClosingAction )
{
    auto path = write_temp( "lasso.spa", oracle::read_file( oracle::corpus( "clock.spa" ) ) +
                                             "property Never: eventually (hr = 13)\n" );
    auto c = config_for( path );
    c.json = true;
    auto r = run( c );
    ASSERT_EQ( r.code, 1 );
    auto j = nlohmann::json::parse( r.out );
    const auto& t = j[ "results" ].back()[ "trace" ];
    EXPECT_EQ( t[ "actions" ].size(), t[ "states" ].size() );
    EXPECT_TRUE( t[ "loop_start" ].is_number_integer() );
    EXPECT_LT( t[ "loop_start" ].get< std::size_t >(), t[ "states" ].size() );
}

TEST( Json, BinderOnFailure )
{
    auto source = oracle::read_file( oracle::corpus( "math.spa" ) );
    source = source.substr( 0, source.find( "property Reachability" ) ) +
             "property Reach: forall x in 1..max_num_q + 1 : eventually (num = x)\n";
    auto c = config_for( write_temp( "binder.spa", source ), { "max_num_q=2" } );
    c.json = true;
    auto j = nlohmann::json::parse( run( c ).out );
    EXPECT_EQ( j[ "results" ].back()[ "binder" ], 3 );
}

TEST( Json, AgreesWithText )
{
    for ( const char* file : { "math.spa", "math_buggy.spa", "clock.spa" } )
    {
        std::vector< std::string > consts;
        if ( std::string{ file } != "clock.spa" )
            consts.push_back( "max_num_q=2" );
        auto text = run( config_for( oracle::corpus( file ), consts ) );
        auto c = config_for( oracle::corpus( file ), consts );
        c.json = true;
        auto json = run( c );
        EXPECT_EQ( text.code, json.code );
        auto j = nlohmann::json::parse( json.out );
        for ( const auto& item : j[ "results" ] )
        {
            std::string status = item[ "status" ];
            for ( auto& ch : status )
                ch = static_cast< char >( std::toupper( static_cast< unsigned char >( ch ) ) );
            std::string line = status + "  " + item[ "kind" ].get< std::string >() + " " +
                               item[ "name" ].get< std::string >();
            EXPECT_NE( text.out.find( line ), std::string::npos ) << line;
        }
    }
}

TEST( Dot, ClockGraph )
{
    auto c = config_for( oracle::corpus( "clock.spa" ) );
    c.dot_path = temp_path( "clock.dot" );
    c.graph_only = true;
    ASSERT_EQ( run( c ).code, 0 );
    auto dot = oracle::read_file( *c.dot_path );
    EXPECT_EQ( dot.rfind( "digraph \"clock\" {", 0 ), 0u );
    EXPECT_EQ( count_matches( dot, std::regex( R"(\n  s\d+ \[label=)" ) ), 24u );
    EXPECT_EQ( count_matches( dot, std::regex( R"(-> s\d+ \[label="Next"\])" ) ), 24u );
    EXPECT_EQ( count_matches( dot, std::regex( "doubleoctagon" ) ), 24u );
}

TEST( Dot, MathGraph )
{
    auto c = config_for( oracle::corpus( "math.spa" ), { "max_num_q=1" } );
    c.dot_path = temp_path( "math.dot" );
    ASSERT_EQ( run( c ).code, 0 );
    auto dot = oracle::read_file( *c.dot_path );
    EXPECT_EQ( count_matches( dot, std::regex( R"(\n  s\d+ \[label=)" ) ), 4u );
    EXPECT_EQ( count_matches( dot, std::regex( "doubleoctagon" ) ), 1u );
    EXPECT_NE( dot.find( "result=\\\"\\\"" ), std::string::npos );
}

// The installed binary, run as a user would.
int run_binary( const std::string& args )
{
    std::string command = std::string{ SPACHECK_CLI_PATH } + " " + args + " > /dev/null 2>&1";
    int status = std::system( command.c_str() );
    return WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
}

TEST( Binary, ExitCodes )
{
    auto math = oracle::corpus( "math.spa" );
    EXPECT_EQ( run_binary( "check " + math + " --const max_num_q=3" ), 0 );
    EXPECT_EQ( run_binary( "check " + oracle::corpus( "math_buggy.spa" ) + " --const max_num_q=3" ), 1 );
    EXPECT_EQ( run_binary( "check " + oracle::corpus( "math_buggy.spa" ) + " --const max_num_q=3 --no-deadlock" ), 0 );
    EXPECT_EQ( run_binary( "check " + math ), 3 );
    EXPECT_EQ( run_binary( "check " + math + " --const max_num_q=3 --const max_num_q=3" ), 3 );
    EXPECT_EQ( run_binary( "check " + math + " --const max_num_q=3 --bogus" ), 3 );
    EXPECT_EQ( run_binary( "" ), 3 );
    EXPECT_EQ( run_binary( "graph " + math + " --const max_num_q=3" ), 3 );
    EXPECT_EQ( run_binary( "check " + math + " --const max_num_q=3 --max-states 5" ), 2 );
    EXPECT_EQ( run_binary( "graph " + oracle::corpus( "clock.spa" ) + " --dot " + temp_path( "bin.dot" ) ), 0 );
    EXPECT_TRUE( std::filesystem::exists( temp_path( "bin.dot" ) ) );
}

} // namespace
