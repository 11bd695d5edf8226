#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "lrbench/cli.hpp"

int main(int argc, char** argv) {
    using lrbench::cli::OutputFormat;
    lrbench::cli::CliCommand cmd;

    CLI::App app{"Likelihood-ratio system benchmark"};
    app.add_option("command", cmd.command,
                   "rank | illcond | csprior | tailbound | demand | calibrate | oracle-check")
        ->required()
        ->check(CLI::IsMember({"rank", "illcond", "csprior", "tailbound", "demand", "calibrate", "oracle-check"}));
    app.add_option("--config", cmd.config_path, "experiment or world JSON (default: built-in world)");

    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--out", cmd.out_dir, "output directory")->capture_default_str();

    const std::map<std::string, OutputFormat> formats{
        {"json", OutputFormat::Json}, {"csv", OutputFormat::Csv}, {"both", OutputFormat::Both}};
    app.add_option("--format", cmd.format, "output files to write (default: both)")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case).description(""))
        ->option_text("json|csv|both");

    std::size_t cases = 0;
    auto* cases_opt = app.add_option("--cases", cases, "number of cases")->check(CLI::PositiveNumber);
    std::string rule;
    auto* rule_opt = app.add_option("--rule", rule, "Logarithmic | Brier | Table3");
    std::size_t paths = 0;
    auto* paths_opt = app.add_option("--paths", paths, "oracle paths per term")->check(CLI::PositiveNumber);
    app.add_flag("--force", cmd.force, "overwrite existing output files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : lrbench::cli::kExitConfig;
    }

    if (*seed_opt) cmd.seed = seed;
    if (*cases_opt) cmd.cases = cases;
    if (*paths_opt) cmd.paths = paths;
    if (*rule_opt) {
        try {
            cmd.rule = lrbench::scoring::rule_from_string(rule);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return lrbench::cli::kExitConfig;
        }
    }
    return lrbench::cli::run(cmd, std::cout, std::cerr);
}
