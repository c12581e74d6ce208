#include "twoq/cli.hpp"

#include "twoq/bb84.hpp"
#include "twoq/circuit.hpp"
#include "twoq/noclone.hpp"
#include "twoq/rng.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace twoq::cli {

namespace {

nlohmann::json amplitudes_json(const StateVector& state) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : state.amplitudes()) {
        arr.push_back({a.real(), a.imag()});
    }
    return arr;
}

nlohmann::json contradiction_json(const ContradictionReport& rep) {
    nlohmann::json j{
        {"basis_exact", rep.basis_exact},
        {"basis_residuals", rep.basis_residuals},
        {"witness_fidelity", rep.witness_fidelity},
        {"witness_residual", rep.witness_residual},
        {"contradiction_confirmed", rep.contradiction_confirmed},
    };
    if (rep.failing_basis_index) j["failing_basis_index"] = *rep.failing_basis_index;
    return j;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

Report cmd_run(const RunOptions& opts) {
    std::ifstream in(opts.circuit_path);
    if (!in) throw IoError("cannot open circuit file '" + opts.circuit_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();

    const CircuitProgram program = parse(buffer.str());
    const ExecutionResult result = execute(program, opts.shots, opts.seed);

    Report report = make_report("twoq run " + opts.circuit_path + " --shots " +
                                    std::to_string(opts.shots) + " --seed " +
                                    std::to_string(opts.seed),
                                opts.seed);

    std::map<std::string, std::size_t> histogram;
    for (const auto& s : result.measurement_samples) ++histogram[s];

    nlohmann::json log = nlohmann::json::array();
    for (const auto& ev : result.postselect_log) {
        log.push_back({{"instruction", ev.instruction_index},
                       {"abs_c", ev.amplitude_magnitude},
                       {"discarded_weight", ev.discarded_weight}});
    }

    report.payload = {
        {"num_qubits", program.num_qubits},
        {"shots", opts.shots},
        {"success_probability", result.success_probability},
        {"final_amplitudes", amplitudes_json(result.final_state)},
        {"postselect_log", log},
        {"histogram", histogram},
    };

    report.csv_header = {"bitstring", "count"};
    for (const auto& [bits, count] : histogram) {
        report.csv_rows.push_back({bits, std::to_string(count)});
    }
    return report;
}

Report cmd_noclone_verify(const VerifyOptions& opts) {
    Report report = make_report("twoq noclone verify --samples " +
                                    std::to_string(opts.samples) + " --seed " +
                                    std::to_string(opts.seed) +
                                    (opts.inject_identity ? " --inject-identity" : ""),
                                opts.seed);

    constexpr double kBound = 0.5 + 1e-9;
    bool all_ok = true;
    report.csv_header = {"instance", "c0", "c1", "basis_exact", "witness_fidelity",
                         "witness_residual"};

    const ContradictionReport cnot = verify_basis_cloner_contradiction(cnot_cloner());
    report.payload["cnot"] = contradiction_json(cnot);
    all_ok = all_ok && cnot.contradiction_confirmed && cnot.witness_fidelity <= kBound;
    report.csv_rows.push_back({"cnot", "1", "1", cnot.basis_exact ? "1" : "0",
                               fmt(cnot.witness_fidelity), fmt(cnot.witness_residual)});

    if (opts.inject_identity) {
        const ContradictionReport broken = verify_basis_cloner_contradiction(identity_cloner());
        report.payload["injected_identity"] = contradiction_json(broken);
        all_ok = all_ok && broken.basis_exact; // fails: identity does not clone |1>
        report.csv_rows.push_back({"identity", "1", "1", broken.basis_exact ? "1" : "0",
                                   fmt(broken.witness_fidelity), fmt(broken.witness_residual)});
    }

    // Sweep of basis-exact postselected cloners; first entry is the plain
    // c0 = c1 = 1 construction, the rest draw random magnitudes and phases.
    std::mt19937_64 rng(derive_stream(opts.seed, 0xec5));
    std::uniform_real_distribution<double> mag(0.1, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

    nlohmann::json sweep = nlohmann::json::array();
    double max_witness_fidelity = cnot.witness_fidelity;
    for (std::size_t k = 0; k < opts.samples; ++k) {
        Amplitude c0{1.0, 0.0}, c1{1.0, 0.0};
        if (k > 0) {
            c0 = std::polar(mag(rng), phase(rng));
            c1 = std::polar(mag(rng), phase(rng));
        }
        const CloningInstance inst = basis_exact_2wqc_cloner(c0, c1);
        const ContradictionReport rep = verify_basis_cloner_contradiction(inst);
        const double closed_form =
            std::norm(c0 + c1) / (4.0 * (std::norm(c0) + std::norm(c1)));
        max_witness_fidelity = std::max(max_witness_fidelity, rep.witness_fidelity);
        all_ok = all_ok && rep.basis_exact && rep.witness_fidelity <= kBound;

        sweep.push_back({{"c0", {c0.real(), c0.imag()}},
                         {"c1", {c1.real(), c1.imag()}},
                         {"basis_exact", rep.basis_exact},
                         {"witness_fidelity", rep.witness_fidelity},
                         {"witness_residual", rep.witness_residual},
                         {"closed_form_fidelity", closed_form},
                         {"mean_success_probability",
                          mean_success_probability(inst, 256, derive_stream(opts.seed, k))}});
        report.csv_rows.push_back({"eq5_" + std::to_string(k), fmt(std::abs(c0)),
                                   fmt(std::abs(c1)), rep.basis_exact ? "1" : "0",
                                   fmt(rep.witness_fidelity), fmt(rep.witness_residual)});
    }

    report.payload["two_wqc_sweep"] = sweep;
    report.payload["max_witness_fidelity"] = max_witness_fidelity;
    report.payload["witness_fidelity_bound"] = kBound;
    report.payload["all_within_bound"] = all_ok;
    return report;
}

Report cmd_noclone_optimize(const OptimizeOptionsCli& opts) {
    CloneLayout layout;
    if (opts.mode == "1wqc") {
        layout = one_wqc_layout();
    } else if (opts.mode == "2wqc") {
        layout = two_wqc_layout();
    } else {
        throw UsageError("unknown mode '" + opts.mode + "' (expected 1wqc or 2wqc)");
    }
    if (opts.budget < 1) throw UsageError("budget must be >= 1");
    if (opts.restarts < 1) throw UsageError("restarts must be >= 1");

    const ParameterizedUnitary pu = parameterize_unitary(layout.register_size(), opts.depth);
    OptimizeOptions oo;
    oo.budget = opts.budget;
    oo.restarts = opts.restarts;
    oo.seed = opts.seed;
    const OptimizeResult result = optimize_cloner(layout, pu, oo);

    Report report = make_report("twoq noclone optimize --mode " + opts.mode + " --budget " +
                                    std::to_string(opts.budget) + " --restarts " +
                                    std::to_string(opts.restarts) + " --seed " +
                                    std::to_string(opts.seed),
                                opts.seed);

    nlohmann::json trace = nlohmann::json::array();
    for (const auto& tp : result.trace) trace.push_back({tp.evaluations, tp.objective});

    report.payload = {
        {"mode", opts.mode},
        {"budget", opts.budget},
        {"restarts", opts.restarts},
        {"ansatz_depth", opts.depth},
        {"num_params", pu.num_params},
        {"evaluations_used", result.evaluations_used},
        {"best_objective", result.best_objective},
        {"best_mean_fidelity", result.best_mean_fidelity},
        {"best_params", result.best_params},
        {"trace", trace},
    };

    report.csv_header = {"evaluations", "best_objective"};
    for (const auto& tp : result.trace) {
        report.csv_rows.push_back({std::to_string(tp.evaluations), fmt(tp.objective)});
    }
    return report;
}

Report cmd_bb84(const Bb84OptionsCli& opts) {
    Bb84Config config;
    config.num_pulses = opts.pulses;
    config.seed = opts.seed;
    config.sample_fraction = opts.sample_fraction;

    if (opts.eve == "none") {
        config.eve = EveNone{};
    } else if (opts.eve == "intercept-resend") {
        config.eve = EveInterceptResend{};
    } else if (opts.eve == "postselect-clone") {
        config.eve = canonical_postselect_clone_attack();
    } else {
        throw UsageError("unknown eavesdropper strategy '" + opts.eve + "'");
    }

    const Bb84Result result = run_bb84(config);

    Report report = make_report("twoq bb84 --pulses " + std::to_string(opts.pulses) + " --eve " +
                                    opts.eve + " --seed " + std::to_string(opts.seed),
                                opts.seed);
    report.payload = {
        {"pulses", opts.pulses},
        {"eve", opts.eve},
        {"sample_fraction", opts.sample_fraction},
        {"qber", result.qber},
        {"sifted_length", result.sifted_length},
        {"eve_information", result.eve_information},
        {"discarded_by_eve", result.discarded_by_eve},
        {"checked_bits", result.checked_bits},
        {"check_errors", result.check_errors},
    };
    if (opts.eve == "none" || opts.eve == "intercept-resend") {
        const ExactQber exact = enumerate_intercept_resend(
            opts.eve == "none" ? EveBasisPolicy::NoEavesdropper : EveBasisPolicy::UniformRandom);
        report.payload["exact_expected_qber"] = exact.overall.value();
        report.payload["exact_expected_qber_fraction"] =
            std::to_string(exact.overall.num) + "/" + std::to_string(exact.overall.den);
    }

    report.csv_header = {"eve", "pulses", "sifted_length", "qber", "eve_information",
                         "discarded_by_eve"};
    report.csv_rows.push_back({opts.eve, std::to_string(opts.pulses),
                               std::to_string(result.sifted_length), fmt(result.qber),
                               fmt(result.eve_information),
                               std::to_string(result.discarded_by_eve)});
    return report;
}

bool report_passes(const Report& report) {
    if (report.payload.contains("all_within_bound")) {
        return report.payload["all_within_bound"].get<bool>();
    }
    return true;
}

} // namespace twoq::cli
