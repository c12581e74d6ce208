#pragma once

#include "twoq/postselect.hpp"
#include "twoq/statevec.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

namespace twoq {

/**
 * Partition of a cloning register. `a` and `b` are the clone slots (equal
 * width), `c` is the postselected ancilla block (empty in the plain unitary
 * setting), and `machine` holds non-postselected work qubits that are traced
 * out of fidelity figures. The four sets must tile the register exactly.
 */
struct CloneLayout {
    QubitIndexSet a;
    QubitIndexSet b;
    QubitIndexSet c;
    QubitIndexSet machine;

    std::size_t register_size() const {
        return a.size() + b.size() + c.size() + machine.size();
    }
};

/// A={0}, B={1}, machine={2}: unitary cloner with one work qubit.
CloneLayout one_wqc_layout();
/// A={0}, B={1}, C={2}: cloner with one postselected ancilla.
CloneLayout two_wqc_layout();

/**
 * A candidate cloner: prepare phi on A, e on B (+machine), f on C, apply u,
 * then project C onto <g|.
 */
struct CloningInstance {
    CloneLayout layout;
    StateVector e; // prep on B and machine qubits (that order); width |B|+|M|
    StateVector f; // prep on C; width |C| (0-qubit scalar when C is empty)
    StateVector g; // projection target on C; width |C|
    UnitaryMatrix u;
};

void validate(const CloningInstance& inst);

/// Per-state cloning evidence.
struct CloningReport {
    StateVector phi;
    PostselectOutcome output;
    Amplitude c;
    double residual;
    double fidelity;
};

/// Report of the basis-exactness check plus the superposition witness.
struct ContradictionReport {
    bool basis_exact = false;
    std::optional<std::size_t> failing_basis_index;
    std::vector<double> basis_residuals;
    StateVector witness;
    double witness_fidelity = 0.0;
    double witness_residual = 0.0;
    /// basis_exact and witness_residual >= 0.2.
    bool contradiction_confirmed = false;
};

struct ParameterizedUnitary {
    std::size_t num_qubits = 0;
    std::size_t num_params = 0;
    std::function<UnitaryMatrix(std::span<const double>)> builder;
};

struct TracePoint {
    std::size_t evaluations; // cumulative objective evaluations when recorded
    double objective;        // best objective value so far
};

struct OptimizeOptions {
    std::size_t objective_samples = 256; // Haar states per objective evaluation
    std::size_t report_samples = 100000; // Haar states for the final estimate
    std::size_t budget = 50000;          // total objective evaluations
    std::size_t restarts = 8;
    std::uint64_t seed = 1;
};

struct OptimizeResult {
    std::vector<double> best_params;
    double best_mean_fidelity = 0.0; // re-evaluated at report_samples
    double best_objective = 0.0;     // search-time estimate at objective_samples
    std::vector<TracePoint> trace;   // monotone best-so-far
    std::size_t evaluations_used = 0;
};

// -- Operations ----------------------------------------------------------

/// tensor(phi, e, f) -> apply u -> project C onto g.
PostselectOutcome cloning_output(const CloningInstance& inst, const StateVector& phi);

/// Joint fidelity of the renormalized surviving state against phi (x) phi
/// (machine qubits traced out); 0 when |c| < 1e-12.
double cloning_fidelity(const CloningInstance& inst, const StateVector& phi);

/// Mean of the two per-clone fidelities <phi|rho_A|phi>, <phi|rho_B|phi> of
/// the renormalized surviving state; 0 when |c| < 1e-12.
double symmetric_clone_fidelity(const CloningInstance& inst, const StateVector& phi);

/// Distance from the surviving (subnormalized) state to the closest complex
/// multiple of phi (x) phi: |c| * sqrt(1 - joint fidelity). Defined as 1 when
/// the branch is annihilated (|c| < 1e-12).
double cloning_residual(const CloningInstance& inst, const StateVector& phi);

CloningReport examine_cloning(const CloningInstance& inst, const StateVector& phi);

/// Checks basis-exact cloning, then evaluates the uniform-superposition
/// witness that the exact basis cloner must fail on.
ContradictionReport verify_basis_cloner_contradiction(const CloningInstance& inst,
                                                      double basis_tolerance = 1e-12);

/// Haar average of symmetric_clone_fidelity; deterministic per seed.
double mean_fidelity(const CloningInstance& inst, std::size_t num_samples, std::uint64_t seed);

/// Haar average of the postselection success probability |c_phi|^2.
double mean_success_probability(const CloningInstance& inst, std::size_t num_samples,
                                std::uint64_t seed);

// -- Reference instances -------------------------------------------------

/// CNOT basis cloner: A={0}, B={1}, e=|0>, no ancilla.
CloningInstance cnot_cloner();

/// Identity unitary in the CNOT layout; clones |0> but not |1>.
CloningInstance identity_cloner();

/// Basis-exact postselected cloner: <0|_C U |v>|0>|0> = c_v |v>|v> for
/// v in {0,1}. Requires 0 <= |c_v| <= 1; built by unitary completion.
CloningInstance basis_exact_2wqc_cloner(Amplitude c0, Amplitude c1);

/// The known optimal universal symmetric cloner (one work qubit, no
/// postselection); per-clone fidelity 5/6 for every input state.
CloningInstance buzek_hillery_oracle();

// -- Ansatz and optimizer --------------------------------------------------

/// Layered chart over num_qubits qubits: a (rz, ry, rz) rotation layer, then
/// `depth` repetitions of a cx ladder followed by another rotation layer.
/// num_params = 3 * num_qubits * (depth + 1).
ParameterizedUnitary parameterize_unitary(std::size_t num_qubits, std::size_t depth = 2);

/**
 * Seeded multi-restart compass search maximizing mean_fidelity of the
 * instance built from the layout (with |0...0> preparations and <0...0|
 * projection) and the parameterized unitary. Deterministic per seed;
 * restarts run in parallel up to the worker-thread cap.
 */
OptimizeResult optimize_cloner(const CloneLayout& layout, const ParameterizedUnitary& pu,
                               const OptimizeOptions& opts);

/// Fits the ansatz to a target unitary (overlap |tr(U^dag T)| / dim, phase
/// invariant); used to check chart coverage.
OptimizeResult fit_unitary(const ParameterizedUnitary& pu, const UnitaryMatrix& target,
                           std::size_t budget, std::size_t restarts, std::uint64_t seed);

} // namespace twoq
