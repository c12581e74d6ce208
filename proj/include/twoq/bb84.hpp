#pragma once

#include "twoq/noclone.hpp"

#include <cstdint>
#include <variant>

namespace twoq {

struct EveNone {};
struct EveInterceptResend {};
/// Eve runs the cloning instance on the in-flight qubit (its A slot must be a
/// single qubit), forwards A to Bob, and measures her clone register after the
/// basis announcement. Pulses whose postselection annihilates are blocked.
struct EvePostselectClone {
    CloningInstance instance;
};

using EveStrategy = std::variant<EveNone, EveInterceptResend, EvePostselectClone>;

struct Bb84Config {
    std::size_t num_pulses = 10000;
    double sample_fraction = 0.5; // fraction of sifted bits spent on QBER estimation
    std::uint64_t seed = 1;
    EveStrategy eve = EveNone{};
};

struct Bb84Result {
    std::size_t sifted_length = 0;
    double qber = 0.0;            // error rate on the checked sample
    double eve_information = 0.0; // fraction of sifted bits Eve guessed right
    std::size_t discarded_by_eve = 0;
    std::size_t checked_bits = 0;
    std::size_t check_errors = 0;
};

/// Noiseless BB84 with the given eavesdropper; deterministic per config.
Bb84Result run_bb84(const Bb84Config& config);

/// The canonical postselection attack: basis-exact postselected cloner with
/// c_0 = c_1 = 1.
EvePostselectClone canonical_postselect_clone_attack();

// -- Exact enumeration oracle ------------------------------------------------

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend Rational operator+(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator==(const Rational&, const Rational&) = default;
};

enum class EveBasisPolicy { UniformRandom, AlwaysZ, NoEavesdropper };

struct ExactQber {
    Rational overall;  // expected QBER over all sifted bits
    Rational z_sifted; // conditional on Z-sifted bits
    Rational x_sifted; // conditional on X-sifted bits
};

/// Exhaustive enumeration of the discrete (bit, bases) choices with exact
/// rational arithmetic; the independent oracle for the Monte Carlo runs.
ExactQber enumerate_intercept_resend(EveBasisPolicy policy = EveBasisPolicy::UniformRandom);

} // namespace twoq
