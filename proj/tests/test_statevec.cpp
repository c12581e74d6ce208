#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "twoq/statevec.hpp"

#include <algorithm>
#include <complex>
#include <random>

using namespace twoq;
using namespace twoq::test;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("basis states") {
    const StateVector zero = make_basis_state(1, 0);
    CHECK(close(zero.amp(0), 1.0));
    CHECK(close(zero.amp(1), 0.0));
    CHECK(zero.normalized());

    const StateVector eleven = make_basis_state(2, 3);
    CHECK(close(eleven.amp(3), 1.0));
    CHECK(close(eleven.norm_squared(), 1.0));

    CHECK(make_basis_state(3, 0).dim() == 8);
    CHECK_THROWS_AS(make_basis_state(2, 4), std::out_of_range);
}

TEST_CASE("statevector invariants") {
    CHECK_THROWS_AS(StateVector(2, {1.0, 0.0}), DimensionMismatch);
    CHECK_THROWS_AS(StateVector(1, {0.7, 0.0}, true), NotNormalized);
    const double nan = std::nan("");
    CHECK_THROWS_AS(StateVector(1, {Amplitude{nan, 0.0}, 0.0}), std::invalid_argument);
}

TEST_CASE("tensor products") {
    CHECK(states_close(tensor(make_basis_state(1, 0), make_basis_state(1, 0)),
                       make_basis_state(2, 0)));

    const Amplitude a{0.6, 0.0}, b{0.0, 0.8};
    const StateVector phi(1, {a, b}, true);
    const StateVector joint = tensor(phi, make_basis_state(1, 0));
    CHECK(close(joint.amp(0), a));
    CHECK(close(joint.amp(2), b));
    CHECK(close(joint.amp(1), 0.0));
    CHECK(close(joint.amp(3), 0.0));

    // |+> (x) |+>: all four entries computed by direct multiplication.
    const StateVector plus(1, {kInvSqrt2, kInvSqrt2}, true);
    const StateVector pp = tensor(plus, plus);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(close(pp.amp(i), kInvSqrt2 * kInvSqrt2));
    }
}

TEST_CASE("tensor is associative and multiplicative in norm") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector a = haar_random_state(1, rng());
        const StateVector b = haar_random_state(2, rng());
        const StateVector c = haar_random_state(1, rng());
        const StateVector left = tensor(tensor(a, b), c);
        const StateVector right = tensor(a, tensor(b, c));
        CHECK(left == right); // amplitude-exact under the fixed index convention
        CHECK(close(tensor(a, b).norm(), a.norm() * b.norm()));
    }
}

TEST_CASE("gate application basics") {
    const StateVector h0 = apply_unitary(make_basis_state(1, 0), gates::h(), {0});
    CHECK(close(h0.amp(0), kInvSqrt2));
    CHECK(close(h0.amp(1), kInvSqrt2));

    // CNOT with control q0 flips |10> to |11>.
    const StateVector flipped = apply_unitary(make_basis_state(2, 2), gates::cx(), {0, 1});
    CHECK(states_close(flipped, make_basis_state(2, 3)));

    // CNOT on (a|0> + b|1>) (x) |0> -> a|00> + b|11>.
    const Amplitude a{0.48, 0.36}, b{0.64, -0.48};
    const StateVector phi(1, {a, b}, true);
    const StateVector out = apply_unitary(tensor(phi, make_basis_state(1, 0)), gates::cx(), {0, 1});
    CHECK(close(out.amp(0), a));
    CHECK(close(out.amp(3), b));
    CHECK(close(out.amp(1), 0.0));
    CHECK(close(out.amp(2), 0.0));

    CHECK_THROWS_AS(apply_unitary(make_basis_state(2, 0), gates::h(), {0, 1}),
                    DimensionMismatch);
    CHECK_THROWS_AS(apply_unitary(make_basis_state(1, 0), gates::h(), {1}), DimensionMismatch);
}

TEST_CASE("gate application on non-adjacent and reordered targets") {
    // swap on listed order {1, 0} equals swap on {0, 1}.
    const StateVector s = haar_random_state(2, 7);
    CHECK(states_close(apply_unitary(s, gates::swap(), {0, 1}),
                       apply_unitary(s, gates::swap(), {1, 0})));

    // cx with control q2, target q0 on |001> gives |101>.
    const StateVector out = apply_unitary(make_basis_state(3, 1), gates::cx(), {2, 0});
    CHECK(states_close(out, make_basis_state(3, 5)));
}

TEST_CASE("unitary application preserves norm") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const StateVector psi = haar_random_state(n, rng());
        const UnitaryMatrix u = random_unitary(n, rng);
        std::vector<std::size_t> qs(n);
        for (std::size_t q = 0; q < n; ++q) qs[q] = q;
        std::shuffle(qs.begin(), qs.end(), rng);
        const StateVector out = apply_unitary(psi, u, QubitIndexSet(qs));
        CHECK(std::abs(out.norm() - psi.norm()) <= 1e-10);
    }
}

TEST_CASE("unitary application is linear") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVector a = haar_random_state(3, rng());
        const StateVector b = haar_random_state(3, rng());
        const Amplitude alpha{0.3, -0.4}, beta{0.5, 0.2};
        std::vector<Amplitude> mix(8);
        for (std::size_t i = 0; i < 8; ++i) mix[i] = alpha * a.amp(i) + beta * b.amp(i);
        const UnitaryMatrix u = random_unitary(2, rng);
        const StateVector lhs = apply_unitary(StateVector(3, mix), u, {0, 2});
        const StateVector ua = apply_unitary(a, u, {0, 2});
        const StateVector ub = apply_unitary(b, u, {0, 2});
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(close(lhs.amp(i), alpha * ua.amp(i) + beta * ub.amp(i)));
        }
    }
}

TEST_CASE("inner products") {
    CHECK(close(inner_product(make_basis_state(1, 0), make_basis_state(1, 1)), 0.0));
    const StateVector plus(1, {kInvSqrt2, kInvSqrt2}, true);
    CHECK(close(inner_product(plus, make_basis_state(1, 0)), kInvSqrt2));
    const StateVector psi = haar_random_state(4, 5);
    CHECK(close(inner_product(psi, psi), 1.0));
    CHECK_THROWS_AS(inner_product(psi, make_basis_state(1, 0)), DimensionMismatch);
}

TEST_CASE("inner product is conjugate-linear in the bra and splits over tensors") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const StateVector a = haar_random_state(2, rng());
        const StateVector b = haar_random_state(1, rng());
        const StateVector c = haar_random_state(2, rng());
        const StateVector d = haar_random_state(1, rng());
        const Amplitude lhs = inner_product(tensor(a, b), tensor(c, d));
        const Amplitude rhs = inner_product(a, c) * inner_product(b, d);
        CHECK(close(lhs, rhs));

        const Amplitude alpha{0.2, 0.9};
        std::vector<Amplitude> scaled(4);
        for (std::size_t i = 0; i < 4; ++i) scaled[i] = alpha * a.amp(i);
        CHECK(close(inner_product(StateVector(2, scaled), c),
                    std::conj(alpha) * inner_product(a, c)));
    }
}

TEST_CASE("haar sampling is seeded and normalized") {
    const StateVector s1 = haar_random_state(3, 77);
    const StateVector s2 = haar_random_state(3, 77);
    CHECK(s1 == s2);
    CHECK(!(haar_random_state(3, 77) == haar_random_state(3, 78)));
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        CHECK(close(haar_random_state(2, seed).norm_squared(), 1.0));
    }
}

TEST_CASE("haar first moment and unitary invariance") {
    const std::size_t n_samples = 100000;
    const StateVector zero = make_basis_state(1, 0);
    double mean = 0.0, mean_rotated = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const StateVector psi = haar_random_state(1, s);
        mean += std::norm(inner_product(zero, psi));
        mean_rotated += std::norm(inner_product(zero, apply_unitary(psi, gates::h(), {0})));
    }
    mean /= n_samples;
    mean_rotated /= n_samples;
    CHECK(std::abs(mean - 0.5) < 0.01);
    CHECK(std::abs(mean_rotated - 0.5) < 0.01);
}

TEST_CASE("state fidelity") {
    const StateVector psi = haar_random_state(2, 8);
    CHECK(close(state_fidelity(psi, psi), 1.0));
    CHECK(close(state_fidelity(make_basis_state(1, 0), make_basis_state(1, 1)), 0.0));

    // Bell vs |+>|+>: direct 4-entry arithmetic oracle.
    const StateVector bell(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2}, true);
    const StateVector plus(1, {kInvSqrt2, kInvSqrt2}, true);
    const StateVector pp = tensor(plus, plus);
    Amplitude ov{0.0, 0.0};
    for (std::size_t i = 0; i < 4; ++i) ov += std::conj(bell.amp(i)) * pp.amp(i);
    CHECK(close(std::norm(ov), 0.5, 1e-12));
    CHECK(close(state_fidelity(bell, pp), 0.5, 1e-12));

    CHECK_THROWS_AS(state_fidelity(StateVector(1), psi), DimensionMismatch);
    CHECK_THROWS_AS(state_fidelity(StateVector(2), psi), NotNormalized);
}

TEST_CASE("unitary matrix certificate") {
    CHECK_THROWS_AS(UnitaryMatrix(1, {1.0, 0.0, 0.0, 0.9}), NotNormalized);
    CHECK_THROWS_AS(UnitaryMatrix(1, {1.0, 0.0, 0.0}), DimensionMismatch);
    CHECK(UnitaryMatrix::identity(2).max_deviation_from_unitary() <= 1e-15);

    std::mt19937_64 rng(3);
    const UnitaryMatrix u = random_unitary(2, rng);
    CHECK(u.max_deviation_from_unitary() <= 1e-10);
    const UnitaryMatrix prod = u * u.adjoint();
    CHECK(prod.max_deviation_from_unitary() <= 1e-10);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(close(prod.entry(i, i), 1.0, 1e-12));
    }
}

TEST_CASE("unitary completion extends orthonormal columns") {
    const StateVector psi = haar_random_state(2, 17);
    const UnitaryMatrix u = UnitaryMatrix::completing(2, {{0, psi}});
    for (std::size_t i = 0; i < 4; ++i) CHECK(close(u.entry(i, 0), psi.amp(i)));
    CHECK(u.max_deviation_from_unitary() <= 1e-10);

    CHECK_THROWS_AS(UnitaryMatrix::completing(
                        1, {{0, make_basis_state(1, 0)}, {1, make_basis_state(1, 0)}}),
                    NotNormalized);
}

TEST_CASE("qubit permutation") {
    const StateVector s = haar_random_state(3, 21);
    const StateVector rolled = permute_qubits(s, {1, 2, 0});
    for (std::size_t idx = 0; idx < 8; ++idx) {
        const std::size_t q0 = (idx >> 2) & 1, q1 = (idx >> 1) & 1, q2 = idx & 1;
        CHECK(close(rolled.amp((q1 << 2) | (q2 << 1) | q0), s.amp(idx)));
    }
    CHECK(states_close(permute_qubits(rolled, {2, 0, 1}), s));
    CHECK_THROWS_AS(permute_qubits(s, {0, 1}), DimensionMismatch);
}

TEST_CASE("qubit index sets reject duplicates and range violations") {
    CHECK_THROWS_AS(QubitIndexSet({0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(QubitIndexSet({0, 3}).check_in_range(2), DimensionMismatch);
    QubitIndexSet ok{2, 0};
    CHECK(ok.contains(0));
    CHECK(!ok.contains(1));
}
