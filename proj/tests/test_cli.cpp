#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twoq/cli.hpp"
#include "twoq/report.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>

using namespace twoq;

namespace {

/// Writes a temp circuit file and removes it on scope exit.
struct TempCircuit {
    std::string path;
    explicit TempCircuit(const std::string& text) {
        static int counter = 0;
        path = "twoq_test_circuit_" + std::to_string(counter++) + ".2wqc";
        std::ofstream out(path);
        out << text;
    }
    ~TempCircuit() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("run command reports bell statistics") {
    TempCircuit file("qubits 2\nh q0\ncx q0 q1\n");
    cli::RunOptions opts;
    opts.circuit_path = file.path;
    opts.shots = 1000;
    opts.seed = 4;
    const Report rep = cli::cmd_run(opts);

    CHECK(rep.payload["num_qubits"] == 2);
    CHECK(rep.payload["success_probability"] == 1.0);
    const auto& hist = rep.payload["histogram"];
    CHECK(hist.size() == 2);
    CHECK(hist.contains("00"));
    CHECK(hist.contains("11"));
    CHECK(hist["00"].get<int>() + hist["11"].get<int>() == 1000);
    CHECK(cli::report_passes(rep));
}

TEST_CASE("run command surfaces the postselected cloning failure") {
    TempCircuit file("qubits 3\nh q0\ncx q0 q1\ncx q0 q2\nh q2\npostselect q2 0\n");
    cli::RunOptions opts;
    opts.circuit_path = file.path;
    opts.shots = 0;
    const Report rep = cli::cmd_run(opts);

    CHECK(std::abs(rep.payload["success_probability"].get<double>() - 0.5) <= 1e-9);

    // Fidelity against |+>|+>|0>, computed from the reported amplitudes.
    std::vector<std::complex<double>> amps;
    for (const auto& pair : rep.payload["final_amplitudes"]) {
        amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    REQUIRE(amps.size() == 8);
    std::complex<double> ov{0.0, 0.0};
    for (std::size_t i : {0, 2, 4, 6}) ov += 0.5 * amps[i];
    CHECK(std::abs(std::norm(ov) - 0.5) <= 1e-9);
}

TEST_CASE("run command rejects missing files") {
    cli::RunOptions opts;
    opts.circuit_path = "does_not_exist.2wqc";
    CHECK_THROWS_AS(cli::cmd_run(opts), cli::IoError);
}

TEST_CASE("verify command confirms the ceiling") {
    cli::VerifyOptions opts;
    opts.samples = 16;
    opts.seed = 2;
    const Report rep = cli::cmd_noclone_verify(opts);
    CHECK(rep.payload["all_within_bound"] == true);
    CHECK(rep.payload["max_witness_fidelity"].get<double>() <= 0.5 + 1e-9);
    CHECK(rep.payload["cnot"]["contradiction_confirmed"] == true);
    CHECK(rep.payload["two_wqc_sweep"].size() == 16);
    CHECK(cli::report_passes(rep));
}

TEST_CASE("verify command surfaces an injected broken instance") {
    cli::VerifyOptions opts;
    opts.samples = 4;
    opts.inject_identity = true;
    const Report rep = cli::cmd_noclone_verify(opts);
    CHECK(rep.payload["all_within_bound"] == false);
    CHECK(rep.payload["injected_identity"]["basis_exact"] == false);
    CHECK(rep.payload["injected_identity"]["failing_basis_index"] == 1);
    CHECK(!cli::report_passes(rep));
}

TEST_CASE("verify command is deterministic per seed") {
    cli::VerifyOptions opts;
    opts.samples = 8;
    opts.seed = 5;
    const Report a = cli::cmd_noclone_verify(opts);
    const Report b = cli::cmd_noclone_verify(opts);
    CHECK(a.payload.dump() == b.payload.dump());
    opts.seed = 6;
    const Report c = cli::cmd_noclone_verify(opts);
    CHECK(a.payload.dump() != c.payload.dump());
}

TEST_CASE("optimize command emits a monotone trace") {
    cli::OptimizeOptionsCli opts;
    opts.mode = "2wqc";
    opts.budget = 600;
    opts.restarts = 2;
    opts.seed = 10;
    const Report rep = cli::cmd_noclone_optimize(opts);
    CHECK(rep.payload["mode"] == "2wqc");
    CHECK(rep.payload["evaluations_used"] == 600);
    const auto& trace = rep.payload["trace"];
    REQUIRE(trace.size() >= 1);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i][1].get<double>() >= trace[i - 1][1].get<double>());
    }
    CHECK(rep.payload["best_mean_fidelity"].get<double>() < 1.0);
    CHECK(rep.csv_header.size() == 2);
    CHECK(rep.csv_rows.size() == trace.size());
}

TEST_CASE("optimize command validates its options") {
    cli::OptimizeOptionsCli opts;
    opts.mode = "3wqc";
    CHECK_THROWS_AS(cli::cmd_noclone_optimize(opts), cli::UsageError);
    opts.mode = "1wqc";
    opts.budget = 0;
    CHECK_THROWS_AS(cli::cmd_noclone_optimize(opts), cli::UsageError);
}

TEST_CASE("bb84 command reports the attack signature") {
    cli::Bb84OptionsCli opts;
    opts.pulses = 4000;
    opts.eve = "postselect-clone";
    opts.seed = 8;
    const Report rep = cli::cmd_bb84(opts);
    CHECK(rep.payload["qber"].get<double>() >= 0.1);
    CHECK(rep.payload["eve_information"].get<double>() < 1.0);
    CHECK(rep.payload["sifted_length"].get<int>() > 0);

    opts.eve = "none";
    const Report quiet = cli::cmd_bb84(opts);
    CHECK(quiet.payload["qber"] == 0.0);
    CHECK(quiet.payload["exact_expected_qber"] == 0.0);

    opts.eve = "intercept-resend";
    const Report ir = cli::cmd_bb84(opts);
    CHECK(ir.payload["exact_expected_qber_fraction"] == "1/4");

    opts.eve = "mitm";
    CHECK_THROWS_AS(cli::cmd_bb84(opts), cli::UsageError);
}

TEST_CASE("reports render to json and csv") {
    cli::Bb84OptionsCli opts;
    opts.pulses = 100;
    opts.eve = "none";
    const Report rep = cli::cmd_bb84(opts);

    const std::string json_text = render_json(rep);
    const auto parsed = nlohmann::json::parse(json_text);
    CHECK(parsed["metadata"]["artifact"] == "twoq");
    CHECK(parsed["payload"]["pulses"] == 100);

    const std::string csv_text = render_csv(rep);
    CHECK(csv_text.find("# qber=0.0") != std::string::npos);
    CHECK(csv_text.find("eve,pulses,sifted_length") != std::string::npos);
    CHECK(csv_text.find("none,100,") != std::string::npos);
}
