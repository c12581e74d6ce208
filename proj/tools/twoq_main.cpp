#include "twoq/circuit.hpp"
#include "twoq/cli.hpp"
#include "twoq/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void emit(const twoq::Report& report, const std::string& format, const std::string& out_path) {
    const std::string text =
        format == "csv" ? twoq::render_csv(report) : twoq::render_json(report);
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw twoq::cli::IoError("cannot write output file '" + out_path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    using namespace twoq;

    CLI::App app{"twoq - postselection-capable statevector simulator and "
                 "no-cloning workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("twoq ") + cli::kVersion);

    unsigned threads = 0;
    app.add_option("--threads", threads, "cap worker threads (mirrors TWOQ_THREADS)");

    std::string format = "json";
    std::string out_path;

    auto add_io_options = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", out_path, "write the report to a file instead of stdout");
    };

    cli::RunOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "execute a .2wqc circuit file");
    run->add_option("file", run_opts.circuit_path, "circuit file")->required();
    run->add_option("--shots", run_opts.shots, "measurement samples to draw");
    run->add_option("--seed", run_opts.seed, "rng seed");
    add_io_options(run);

    CLI::App* noclone = app.add_subcommand("noclone", "no-cloning experiments");
    noclone->require_subcommand(1);

    cli::VerifyOptions verify_opts;
    CLI::App* verify = noclone->add_subcommand("verify", "basis-cloner contradiction checks");
    verify->add_option("--samples", verify_opts.samples, "number of sampled (c0, c1) cloners");
    verify->add_option("--seed", verify_opts.seed, "rng seed");
    verify->add_flag("--inject-identity", verify_opts.inject_identity,
                     "also check a deliberately broken (identity) instance");
    add_io_options(verify);

    cli::OptimizeOptionsCli opt_opts;
    CLI::App* optimize = noclone->add_subcommand("optimize", "search for the best cloner");
    optimize->add_option("--mode", opt_opts.mode, "1wqc or 2wqc")
        ->check(CLI::IsMember({"1wqc", "2wqc"}))
        ->required();
    optimize->add_option("--budget", opt_opts.budget, "objective evaluations");
    optimize->add_option("--restarts", opt_opts.restarts, "search restarts");
    optimize->add_option("--seed", opt_opts.seed, "rng seed");
    optimize->add_option("--depth", opt_opts.depth, "ansatz entangling depth");
    add_io_options(optimize);

    cli::Bb84OptionsCli bb84_opts;
    CLI::App* bb84 = app.add_subcommand("bb84", "BB84 eavesdropping simulation");
    bb84->add_option("--pulses", bb84_opts.pulses, "number of pulses")->required();
    bb84->add_option("--eve", bb84_opts.eve, "none, intercept-resend or postselect-clone")
        ->required();
    bb84->add_option("--seed", bb84_opts.seed, "rng seed");
    bb84->add_option("--sample-fraction", bb84_opts.sample_fraction,
                     "fraction of sifted bits checked for errors");
    add_io_options(bb84);

    try {
        app.parse(argc, argv);
        if (threads > 0) set_worker_threads(threads);

        Report report;
        if (*run) {
            report = cli::cmd_run(run_opts);
        } else if (*verify) {
            report = cli::cmd_noclone_verify(verify_opts);
        } else if (*optimize) {
            report = cli::cmd_noclone_optimize(opt_opts);
        } else {
            report = cli::cmd_bb84(bb84_opts);
        }
        emit(report, format, out_path);
        if (!cli::report_passes(report)) {
            std::cerr << "verification failed: see report" << std::endl;
            return cli::kAssertionFailure;
        }
        return cli::kOk;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return cli::kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << std::endl;
        return cli::kParse;
    } catch (const AnnihilatedAtInstruction& e) {
        std::cerr << "postselection annihilated at instruction " << e.instruction_index()
                  << " (line " << e.span().line << "): " << e.what() << std::endl;
        return cli::kAnnihilated;
    } catch (const PostselectionAnnihilated& e) {
        std::cerr << e.what() << std::endl;
        return cli::kAnnihilated;
    } catch (const cli::IoError& e) {
        std::cerr << "io error: " << e.what() << std::endl;
        return cli::kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
