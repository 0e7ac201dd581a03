#include "warphopf/config.hpp"
#include "warphopf/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Geometry of immersed spheres in warped-product 3-manifolds"};
    app.require_subcommand(1);

    auto*                      run_cmd = app.add_subcommand("run", "Run the checks of a JSON configuration");
    std::string                config_path;
    std::optional< int >       threads;
    std::optional< std::string > csv_path;
    run_cmd->add_option("config", config_path, "Configuration file")->required();
    run_cmd->add_option("--threads", threads, "Worker threads (overrides the config and WARPHOPF_THREADS)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--csv", csv_path, "Per-node CSV dump path");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : warphopf::exit_config;
    }

    warphopf::RunConfig config;
    try
    {
        config = warphopf::load_config(config_path);
    }
    catch (const warphopf::ConfigError& e)
    {
        std::cerr << "warphopf: " << e.what() << '\n';
        return warphopf::exit_config;
    }

    int count = 0;
    if (threads)
        count = *threads;
    else if (config.threads)
        count = *config.threads;
    else if (const char* env = std::getenv("WARPHOPF_THREADS"))
    {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
        {
            std::cerr << "warphopf: WARPHOPF_THREADS must be a positive integer\n";
            return warphopf::exit_config;
        }
        count = static_cast< int >(v);
    }
    if (count > 0)
        warphopf::set_thread_count(count);

    const auto result = warphopf::run(config, csv_path);
    if (result.report.contains("error"))
        std::cerr << "warphopf: " << result.report["error"].get< std::string >() << '\n';
    else
        std::cout << config.output.report_path << ": " << result.report["status"].get< std::string >() << '\n';
    return result.exit_code;
}
