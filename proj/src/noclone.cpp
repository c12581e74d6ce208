#include "twoq/noclone.hpp"

#include "twoq/parallel.hpp"
#include "twoq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace twoq {

namespace {

constexpr double kAnnihilatedC = 1e-12;

/// Haar states drawn sequentially from one seeded generator.
std::vector<StateVector> haar_batch(std::size_t num_qubits, std::size_t count,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t d = std::size_t{1} << num_qubits;
    std::vector<StateVector> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<Amplitude> amps(d);
        double n2 = 0.0;
        for (auto& a : amps) {
            a = Amplitude{gauss(rng), gauss(rng)};
            n2 += std::norm(a);
        }
        const double n = std::sqrt(n2);
        for (auto& a : amps) a /= n;
        out.emplace_back(num_qubits, std::move(amps), true);
    }
    return out;
}

std::size_t extract_sub_index(std::size_t idx, const QubitIndexSet& set, std::size_t n) {
    std::size_t sub = 0;
    for (std::size_t q : set) sub = (sub << 1) | ((idx >> (n - 1 - q)) & 1u);
    return sub;
}

/// Bit shifts of a qubit set within the surviving (C removed) register.
struct SurvivorShifts {
    std::size_t n_red = 0;
    std::vector<std::size_t> a, b, m;
};

SurvivorShifts survivor_shifts(const CloneLayout& layout) {
    const std::size_t n = layout.register_size();
    std::vector<std::size_t> red_pos(n, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (!layout.c.contains(q)) red_pos[q] = next++;
    }
    SurvivorShifts s;
    s.n_red = next;
    auto shifts = [&](const QubitIndexSet& set) {
        std::vector<std::size_t> out;
        out.reserve(set.size());
        for (std::size_t q : set) out.push_back(s.n_red - 1 - red_pos[q]);
        return out;
    };
    s.a = shifts(layout.a);
    s.b = shifts(layout.b);
    s.m = shifts(layout.machine);
    return s;
}

std::size_t compose(std::size_t sub, const std::vector<std::size_t>& shifts) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        if ((sub >> (shifts.size() - 1 - i)) & 1u) idx |= (std::size_t{1} << shifts[i]);
    }
    return idx;
}

double joint_fidelity_of_reduced(const StateVector& reduced, const SurvivorShifts& sh,
                                 const StateVector& phi) {
    const double n2 = reduced.norm_squared();
    const std::size_t dA = phi.dim();
    const std::size_t dM = std::size_t{1} << sh.m.size();
    double f = 0.0;
    for (std::size_t m = 0; m < dM; ++m) {
        const std::size_t m_part = compose(m, sh.m);
        Amplitude ov{0.0, 0.0};
        for (std::size_t ai = 0; ai < dA; ++ai) {
            const std::size_t a_part = compose(ai, sh.a);
            for (std::size_t bi = 0; bi < dA; ++bi) {
                ov += std::conj(phi.amp(ai) * phi.amp(bi)) *
                      reduced.amp(a_part | compose(bi, sh.b) | m_part);
            }
        }
        f += std::norm(ov);
    }
    return f / n2;
}

double per_clone_fidelity(const StateVector& reduced, const std::vector<std::size_t>& clone_shifts,
                          const std::vector<std::size_t>& rest_shifts, const StateVector& phi) {
    const double n2 = reduced.norm_squared();
    const std::size_t dA = phi.dim();
    const std::size_t d_rest = std::size_t{1} << rest_shifts.size();
    double f = 0.0;
    for (std::size_t j = 0; j < d_rest; ++j) {
        const std::size_t j_part = compose(j, rest_shifts);
        Amplitude ov{0.0, 0.0};
        for (std::size_t ai = 0; ai < dA; ++ai) {
            ov += std::conj(phi.amp(ai)) * reduced.amp(compose(ai, clone_shifts) | j_part);
        }
        f += std::norm(ov);
    }
    return f / n2;
}

} // namespace

CloneLayout one_wqc_layout() { return CloneLayout{{0}, {1}, {}, {2}}; }
CloneLayout two_wqc_layout() { return CloneLayout{{0}, {1}, {2}, {}}; }

void validate(const CloningInstance& inst) {
    const CloneLayout& lay = inst.layout;
    if (lay.a.size() != lay.b.size()) {
        throw DimensionMismatch("clone slots A and B must have equal width");
    }
    const std::size_t n = lay.register_size();
    std::vector<bool> seen(n, false);
    for (const auto* set : {&lay.a, &lay.b, &lay.c, &lay.machine}) {
        set->check_in_range(n);
        for (std::size_t q : *set) {
            if (seen[q]) {
                throw DimensionMismatch("layout sets overlap at qubit " + std::to_string(q));
            }
            seen[q] = true;
        }
    }
    if (inst.e.num_qubits() != lay.b.size() + lay.machine.size()) {
        throw DimensionMismatch("prep state e must cover B and machine qubits");
    }
    if (inst.f.num_qubits() != lay.c.size() || inst.g.num_qubits() != lay.c.size()) {
        throw DimensionMismatch("f and g must cover the C register");
    }
    if (inst.u.dim_qubits() != n) {
        throw DimensionMismatch("cloner unitary must act on the whole register");
    }
    if (std::abs(inst.e.norm_squared() - 1.0) > kTol ||
        std::abs(inst.f.norm_squared() - 1.0) > kTol ||
        std::abs(inst.g.norm_squared() - 1.0) > kTol) {
        throw NotNormalized("e, f, g must be normalized");
    }
}

PostselectOutcome cloning_output(const CloningInstance& inst, const StateVector& phi) {
    validate(inst);
    if (phi.num_qubits() != inst.layout.a.size()) {
        throw DimensionMismatch("phi width does not match clone slot A");
    }

    const std::size_t n = inst.layout.register_size();
    const std::size_t dim = std::size_t{1} << n;

    // e covers B then machine; build its combined index set in that order.
    std::vector<std::size_t> bm(inst.layout.b.indices());
    bm.insert(bm.end(), inst.layout.machine.begin(), inst.layout.machine.end());
    const QubitIndexSet bm_set(bm);

    std::vector<Amplitude> input(dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        input[idx] = phi.amp(extract_sub_index(idx, inst.layout.a, n)) *
                     inst.e.amp(extract_sub_index(idx, bm_set, n)) *
                     inst.f.amp(extract_sub_index(idx, inst.layout.c, n));
    }

    // u spans the register, so its action is a plain matrix-vector product.
    std::vector<Amplitude> evolved(dim, Amplitude{0.0, 0.0});
    const auto entries = inst.u.entries();
    for (std::size_t r = 0; r < dim; ++r) {
        Amplitude acc{0.0, 0.0};
        const Amplitude* row = entries.data() + r * dim;
        for (std::size_t j = 0; j < dim; ++j) acc += row[j] * input[j];
        evolved[r] = acc;
    }

    return project(StateVector(n, std::move(evolved)), inst.layout.c, inst.g);
}

double cloning_fidelity(const CloningInstance& inst, const StateVector& phi) {
    PostselectOutcome out = cloning_output(inst, phi);
    if (std::abs(out.success_amplitude) < kAnnihilatedC) return 0.0;
    return joint_fidelity_of_reduced(out.reduced_state, survivor_shifts(inst.layout), phi);
}

double symmetric_clone_fidelity(const CloningInstance& inst, const StateVector& phi) {
    PostselectOutcome out = cloning_output(inst, phi);
    if (std::abs(out.success_amplitude) < kAnnihilatedC) return 0.0;
    const SurvivorShifts sh = survivor_shifts(inst.layout);
    std::vector<std::size_t> rest_a(sh.b);
    rest_a.insert(rest_a.end(), sh.m.begin(), sh.m.end());
    std::vector<std::size_t> rest_b(sh.a);
    rest_b.insert(rest_b.end(), sh.m.begin(), sh.m.end());
    const double fa = per_clone_fidelity(out.reduced_state, sh.a, rest_a, phi);
    const double fb = per_clone_fidelity(out.reduced_state, sh.b, rest_b, phi);
    return 0.5 * (fa + fb);
}

double cloning_residual(const CloningInstance& inst, const StateVector& phi) {
    PostselectOutcome out = cloning_output(inst, phi);
    const double abs_c = std::abs(out.success_amplitude);
    if (abs_c < kAnnihilatedC) return 1.0;
    const double f = joint_fidelity_of_reduced(out.reduced_state, survivor_shifts(inst.layout), phi);
    return abs_c * std::sqrt(std::max(0.0, 1.0 - f));
}

CloningReport examine_cloning(const CloningInstance& inst, const StateVector& phi) {
    CloningReport rep{phi, cloning_output(inst, phi), Amplitude{0.0, 0.0}, 0.0, 0.0};
    rep.c = rep.output.success_amplitude;
    const double abs_c = std::abs(rep.c);
    if (abs_c < kAnnihilatedC) {
        rep.residual = 1.0;
        rep.fidelity = 0.0;
    } else {
        rep.fidelity =
            joint_fidelity_of_reduced(rep.output.reduced_state, survivor_shifts(inst.layout), phi);
        rep.residual = abs_c * std::sqrt(std::max(0.0, 1.0 - rep.fidelity));
    }
    return rep;
}

ContradictionReport verify_basis_cloner_contradiction(const CloningInstance& inst,
                                                      double basis_tolerance) {
    const std::size_t width = inst.layout.a.size();
    const std::size_t d = std::size_t{1} << width;

    ContradictionReport rep{false, std::nullopt, {}, StateVector(width), 0.0, 0.0, false};
    rep.basis_exact = true;
    for (std::size_t v = 0; v < d; ++v) {
        const double r = cloning_residual(inst, make_basis_state(width, v));
        rep.basis_residuals.push_back(r);
        if (r > basis_tolerance && rep.basis_exact) {
            rep.basis_exact = false;
            rep.failing_basis_index = v;
        }
    }

    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    rep.witness = StateVector(width, std::vector<Amplitude>(d, Amplitude{amp, 0.0}), true);
    rep.witness_fidelity = cloning_fidelity(inst, rep.witness);
    rep.witness_residual = cloning_residual(inst, rep.witness);
    rep.contradiction_confirmed = rep.basis_exact && rep.witness_residual >= 0.2;
    return rep;
}

namespace {

/// Chunked deterministic mean: per-chunk sums are combined in chunk order, so
/// the result is independent of the worker-thread cap.
double parallel_mean(const std::vector<StateVector>& samples,
                     const std::function<double(const StateVector&)>& value) {
    const std::size_t chunk = 1024;
    const std::size_t nchunks = (samples.size() + chunk - 1) / chunk;
    std::vector<double> sums(nchunks, 0.0);
    parallel_for_each(nchunks, [&](std::size_t ci) {
        const std::size_t lo = ci * chunk;
        const std::size_t hi = std::min(samples.size(), lo + chunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += value(samples[i]);
        sums[ci] = s;
    });
    double total = 0.0;
    for (double s : sums) total += s;
    return total / static_cast<double>(samples.size());
}

} // namespace

double mean_fidelity(const CloningInstance& inst, std::size_t num_samples, std::uint64_t seed) {
    validate(inst);
    const auto samples = haar_batch(inst.layout.a.size(), num_samples, seed);
    return parallel_mean(samples,
                         [&](const StateVector& phi) { return symmetric_clone_fidelity(inst, phi); });
}

double mean_success_probability(const CloningInstance& inst, std::size_t num_samples,
                                std::uint64_t seed) {
    validate(inst);
    const auto samples = haar_batch(inst.layout.a.size(), num_samples, seed);
    return parallel_mean(samples, [&](const StateVector& phi) {
        return std::norm(cloning_output(inst, phi).success_amplitude);
    });
}

// -- Reference instances -------------------------------------------------

namespace {
StateVector scalar_one() { return StateVector(0, {Amplitude{1.0, 0.0}}, true); }
} // namespace

CloningInstance cnot_cloner() {
    return CloningInstance{CloneLayout{{0}, {1}, {}, {}}, make_basis_state(1, 0), scalar_one(),
                           scalar_one(), gates::cx()};
}

CloningInstance identity_cloner() {
    return CloningInstance{CloneLayout{{0}, {1}, {}, {}}, make_basis_state(1, 0), scalar_one(),
                           scalar_one(), UnitaryMatrix::identity(2)};
}

CloningInstance basis_exact_2wqc_cloner(Amplitude c0, Amplitude c1) {
    if (std::abs(c0) > 1.0 + kTol || std::abs(c1) > 1.0 + kTol) {
        throw std::invalid_argument("success amplitudes must satisfy |c| <= 1");
    }
    const double s0 = std::sqrt(std::max(0.0, 1.0 - std::norm(c0)));
    const double s1 = std::sqrt(std::max(0.0, 1.0 - std::norm(c1)));

    // Column for |v,0,0>: |v,v> (x) (c_v|0> + s_v|1>).
    StateVector col0(3), col1(3);
    col0.amp(0b000) = c0;
    col0.amp(0b001) = s0;
    col1.amp(0b110) = c1;
    col1.amp(0b111) = s1;
    const UnitaryMatrix u = UnitaryMatrix::completing(
        3, {{0b000, StateVector(3, {col0.amplitudes().begin(), col0.amplitudes().end()}, true)},
            {0b100, StateVector(3, {col1.amplitudes().begin(), col1.amplitudes().end()}, true)}});

    return CloningInstance{two_wqc_layout(), make_basis_state(1, 0), make_basis_state(1, 0),
                           make_basis_state(1, 0), u};
}

CloningInstance buzek_hillery_oracle() {
    const double w = std::sqrt(2.0 / 3.0);
    const double v = std::sqrt(1.0 / 6.0);
    StateVector col0(3), col1(3);
    col0.amp(0b000) = w;
    col0.amp(0b011) = v;
    col0.amp(0b101) = v;
    col1.amp(0b111) = w;
    col1.amp(0b100) = v;
    col1.amp(0b010) = v;
    const UnitaryMatrix u = UnitaryMatrix::completing(
        3, {{0b000, StateVector(3, {col0.amplitudes().begin(), col0.amplitudes().end()}, true)},
            {0b100, StateVector(3, {col1.amplitudes().begin(), col1.amplitudes().end()}, true)}});
    return CloningInstance{one_wqc_layout(), make_basis_state(2, 0), scalar_one(), scalar_one(),
                           u};
}

// -- Ansatz ----------------------------------------------------------------

ParameterizedUnitary parameterize_unitary(std::size_t num_qubits, std::size_t depth) {
    if (num_qubits == 0) throw std::invalid_argument("ansatz needs at least one qubit");
    ParameterizedUnitary pu;
    pu.num_qubits = num_qubits;
    pu.num_params = 3 * num_qubits * (depth + 1);

    pu.builder = [num_qubits, depth, expected = pu.num_params](std::span<const double> params) {
        if (params.size() != expected) {
            throw DimensionMismatch("parameter count mismatch for ansatz");
        }
        const std::size_t n = num_qubits;
        const std::size_t dim = std::size_t{1} << n;

        // Column-major scratch: col[c * dim + i] = U[i][c]; gates apply to
        // each column as to a statevector.
        std::vector<Amplitude> cols(dim * dim, Amplitude{0.0, 0.0});
        for (std::size_t cidx = 0; cidx < dim; ++cidx) cols[cidx * dim + cidx] = 1.0;

        auto apply_1q = [&](std::size_t q, Amplitude r00, Amplitude r01, Amplitude r10,
                            Amplitude r11) {
            const std::size_t mask = std::size_t{1} << (n - 1 - q);
            for (std::size_t cidx = 0; cidx < dim; ++cidx) {
                Amplitude* col = cols.data() + cidx * dim;
                for (std::size_t i = 0; i < dim; ++i) {
                    if (i & mask) continue;
                    const Amplitude v0 = col[i];
                    const Amplitude v1 = col[i | mask];
                    col[i] = r00 * v0 + r01 * v1;
                    col[i | mask] = r10 * v0 + r11 * v1;
                }
            }
        };
        auto apply_cx = [&](std::size_t control, std::size_t target) {
            const std::size_t cmask = std::size_t{1} << (n - 1 - control);
            const std::size_t tmask = std::size_t{1} << (n - 1 - target);
            for (std::size_t cidx = 0; cidx < dim; ++cidx) {
                Amplitude* col = cols.data() + cidx * dim;
                for (std::size_t i = 0; i < dim; ++i) {
                    if ((i & cmask) && !(i & tmask)) std::swap(col[i], col[i | tmask]);
                }
            }
        };

        std::size_t p = 0;
        auto rotation_layer = [&] {
            for (std::size_t q = 0; q < n; ++q) {
                const double a = params[p], b = params[p + 1], c = params[p + 2];
                p += 3;
                // rz(c) * ry(b) * rz(a), composed directly.
                const double cb = std::cos(b / 2), sb = std::sin(b / 2);
                apply_1q(q, cb * std::polar(1.0, -(a + c) / 2),
                         -sb * std::polar(1.0, (a - c) / 2), sb * std::polar(1.0, -(a - c) / 2),
                         cb * std::polar(1.0, (a + c) / 2));
            }
        };

        rotation_layer();
        for (std::size_t d = 0; d < depth; ++d) {
            for (std::size_t q = 0; q + 1 < n; ++q) apply_cx(q, q + 1);
            rotation_layer();
        }

        std::vector<Amplitude> row_major(dim * dim);
        for (std::size_t cidx = 0; cidx < dim; ++cidx) {
            for (std::size_t i = 0; i < dim; ++i) row_major[i * dim + cidx] = cols[cidx * dim + i];
        }
        return UnitaryMatrix(num_qubits, std::move(row_major));
    };
    return pu;
}

// -- Optimizer ---------------------------------------------------------------

namespace {

struct RestartOutcome {
    std::vector<double> best_params;
    double best_value = -1.0;
    std::vector<TracePoint> improvements; // local evaluation counts
    std::size_t evaluations = 0;
};

/// Compass search with shuffled coordinate sweeps, shrinking step, and
/// re-randomization once the step collapses.
RestartOutcome compass_restart(const std::function<double(std::span<const double>)>& objective,
                               std::size_t num_params, std::size_t eval_budget,
                               std::uint64_t seed) {
    RestartOutcome out;
    if (eval_budget == 0) return out;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> init(-M_PI, M_PI);

    std::vector<double> x(num_params);
    for (auto& v : x) v = init(rng);
    double fx = objective(x);
    out.evaluations = 1;
    out.improvements.push_back({1, fx});
    out.best_params = x;
    out.best_value = fx;

    double step = 0.8;
    std::vector<std::size_t> order(num_params);
    std::iota(order.begin(), order.end(), 0);

    while (out.evaluations < eval_budget) {
        bool improved = false;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            if (out.evaluations >= eval_budget) break;
            for (double delta : {step, -step}) {
                if (out.evaluations >= eval_budget) break;
                const double saved = x[i];
                x[i] = saved + delta;
                const double f2 = objective(x);
                ++out.evaluations;
                if (f2 > fx + 1e-12) {
                    fx = f2;
                    if (fx > out.best_value) {
                        out.best_value = fx;
                        out.best_params = x;
                        out.improvements.push_back({out.evaluations, fx});
                    }
                    improved = true;
                    break;
                }
                x[i] = saved;
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-7 && out.evaluations < eval_budget) {
                for (auto& v : x) v = init(rng);
                fx = objective(x);
                ++out.evaluations;
                if (fx > out.best_value) {
                    out.best_value = fx;
                    out.best_params = x;
                    out.improvements.push_back({out.evaluations, fx});
                }
                step = 0.8;
            }
        }
    }
    return out;
}

OptimizeResult compass_maximize(const std::function<double(std::span<const double>)>& objective,
                                std::size_t num_params, std::size_t budget, std::size_t restarts,
                                std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("optimizer budget must be >= 1");
    if (restarts < 1) throw std::invalid_argument("optimizer needs at least one restart");

    std::vector<std::size_t> slice(restarts, budget / restarts);
    for (std::size_t r = 0; r < budget % restarts; ++r) ++slice[r];

    std::vector<RestartOutcome> outcomes(restarts);
    parallel_for_each(restarts, [&](std::size_t r) {
        outcomes[r] = compass_restart(objective, num_params, slice[r], derive_stream(seed, r));
    });

    OptimizeResult result;
    std::size_t offset = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < restarts; ++r) {
        const RestartOutcome& oc = outcomes[r];
        for (const TracePoint& tp : oc.improvements) {
            if (tp.objective > best) {
                best = tp.objective;
                result.trace.push_back({offset + tp.evaluations, best});
            }
        }
        if (oc.best_value > result.best_objective || result.best_params.empty()) {
            result.best_objective = oc.best_value;
            result.best_params = oc.best_params;
        }
        offset += oc.evaluations;
    }
    result.evaluations_used = offset;
    return result;
}

} // namespace

OptimizeResult optimize_cloner(const CloneLayout& layout, const ParameterizedUnitary& pu,
                               const OptimizeOptions& opts) {
    if (pu.num_qubits != layout.register_size()) {
        throw DimensionMismatch("ansatz width does not match the cloning register");
    }
    const StateVector e = make_basis_state(layout.b.size() + layout.machine.size(), 0);
    const StateVector f =
        layout.c.empty() ? StateVector(0, {Amplitude{1.0, 0.0}}, true) : make_basis_state(layout.c.size(), 0);
    const StateVector g = f;

    const auto samples =
        haar_batch(layout.a.size(), opts.objective_samples, derive_stream(opts.seed, 0x5a17));

    auto objective = [&](std::span<const double> params) {
        const CloningInstance inst{layout, e, f, g, pu.builder(params)};
        double total = 0.0;
        for (const auto& phi : samples) total += symmetric_clone_fidelity(inst, phi);
        return total / static_cast<double>(samples.size());
    };

    OptimizeResult result =
        compass_maximize(objective, pu.num_params, opts.budget, opts.restarts, opts.seed);

    const CloningInstance best_inst{layout, e, f, g, pu.builder(result.best_params)};
    result.best_mean_fidelity =
        mean_fidelity(best_inst, opts.report_samples, derive_stream(opts.seed, 0xf1d));
    return result;
}

OptimizeResult fit_unitary(const ParameterizedUnitary& pu, const UnitaryMatrix& target,
                           std::size_t budget, std::size_t restarts, std::uint64_t seed) {
    if (pu.num_qubits != target.dim_qubits()) {
        throw DimensionMismatch("ansatz width does not match the target unitary");
    }
    const std::size_t dim = target.dim();
    auto objective = [&](std::span<const double> params) {
        const UnitaryMatrix u = pu.builder(params);
        Amplitude tr{0.0, 0.0};
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k)
                tr += std::conj(u.entry(k, i)) * target.entry(k, i);
        return std::abs(tr) / static_cast<double>(dim);
    };
    OptimizeResult result = compass_maximize(objective, pu.num_params, budget, restarts, seed);
    result.best_mean_fidelity = result.best_objective;
    return result;
}

} // namespace twoq
