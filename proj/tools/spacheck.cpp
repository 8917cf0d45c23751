#include <spacheck/spacheck.hpp>

#include <CLI11.hpp>

#include <iostream>

int main( int argc, char** argv )
{
    using namespace spacheck;

    CLI::App app{ "spacheck: model checker for single-page application workflow specs" };
    app.require_subcommand( 1 );

    run_config config;
    std::optional< std::size_t > max_depth;

    auto add_common = [ & ]( CLI::App* cmd ) {
        cmd->add_option( "file", config.spec_path, "Specification (.spa) to load" )->required();
        cmd->add_option( "--const", config.constants, "Bind a constant, e.g. max_num_q=5 (repeatable)" );
        cmd->add_option( "--max-states", config.limits.max_states, "Abort after this many states" )
            ->check( CLI::PositiveNumber );
        cmd->add_option( "--max-depth", max_depth, "Abort when a state lies deeper than this" )
            ->check( CLI::PositiveNumber );
    };

    auto* check = app.add_subcommand( "check", "Explore the state space and run all checks" );
    add_common( check );
    check->add_flag( "--no-deadlock", config.no_deadlock, "Skip the deadlock check" );
    check->add_flag( "--json", config.json, "Print a machine-readable report" );
    check->add_option( "--dot", config.dot_path, "Also write the state graph in DOT format" );

    auto* graph = app.add_subcommand( "graph", "Write the reachable state graph in DOT format" );
    add_common( graph );
    graph->add_option( "--dot", config.dot_path, "Output path" )->required();

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::CallForHelp& e )
    {
        return app.exit( e );
    }
    catch ( const CLI::CallForAllHelp& e )
    {
        return app.exit( e );
    }
    catch ( const CLI::ParseError& e )
    {
        app.exit( e );
        return exit_usage;
    }

    config.limits.max_depth = max_depth;
    config.graph_only = graph->parsed();
    return run_check( config, std::cout, std::cerr );
}
