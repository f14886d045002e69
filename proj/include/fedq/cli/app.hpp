#pragma once

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fedq/cli/pipeline.hpp"

namespace fedq::cli {

namespace detail {

inline int write_report(const Report& r, Format fmt, const std::string& out_path, std::ostream& out,
                        std::ostream& err) {
    const std::string body = emit_report(r, fmt);
    if (out_path.empty()) {
        out << body;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            err << "fedq: cannot write " << out_path << "\n";
            return 3;
        }
        f << body;
    }
    if (r.exit_code == 1) {
        err << "fedq: failed checks:";
        for (const auto& name : r.failed_checks()) err << " " << name;
        err << "\n";
    } else if (r.exit_code == 2) {
        err << "fedq: computation error in stage " << r.failed_stage << ": " << r.error << "\n";
    }
    return r.exit_code;
}

} // namespace detail

/// Entry point of the command-line tool; `args` excludes the program name.
/// Returns the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Fedosov quantization of (fractional) Lagrange spaces", "fedq"};
    app.require_subcommand(1);

    std::string config, out_path, format = "json", suite;
    int order = 0;
    const std::map<std::string, Format> formats{{"json", Format::json}, {"text", Format::text}};

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "run configuration (JSON)")->required();
        cmd->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("--out", out_path, "write the report to this file instead of stdout");
    };

    auto* run = app.add_subcommand("run", "run every stage and check");
    add_common(run);
    run->add_option("--order", order, "truncation order K")->check(CLI::Range(2, 8));

    auto* check = app.add_subcommand("check", "run one check suite");
    check->add_option("suite", suite, "suite name")
        ->required()
        ->check(CLI::IsMember({"caputo", "algebra", "geometry", "fedosov", "chern"}));
    add_common(check);
    check->add_option("--order", order, "truncation order K")->check(CLI::Range(2, 8));

    auto* star = app.add_subcommand("star", "star-product coefficients C_0..C_K for the configured observables");
    add_common(star);
    star->add_option("--order", order, "truncation order K")->required()->check(CLI::Range(2, 8));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "fedq: " << e.what() << "\n";
        return 3;
    }

    try {
        const RunSpec spec = parse_config_file(config);
        PipelineOptions opt;
        if (order > 0) opt.order = order;
        if (check->parsed()) opt.suites = {suite};
        if (star->parsed()) opt.suites = {"fedosov"};
        const Report report = run_pipeline(spec, opt);
        return detail::write_report(report, formats.at(format), out_path, out, err);
    } catch (const ConfigError& e) {
        err << "fedq: config error: " << e.what() << "\n";
        return 3;
    } catch (const MalformedInput& e) {
        err << "fedq: malformed input: " << e.what() << "\n";
        return 3;
    }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace fedq::cli
