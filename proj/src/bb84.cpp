#include "twoq/bb84.hpp"

#include "twoq/rng.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace twoq {

namespace {

// Basis tags: 0 = Z, 1 = X.
StateVector encode(int bit, int basis) {
    StateVector s = make_basis_state(1, static_cast<std::size_t>(bit));
    if (basis == 1) s = apply_unitary(s, gates::h(), QubitIndexSet{0});
    return s;
}

/// Measures `qubit` of `state` in the given basis (rotating to Z first),
/// collapsing in place. Returns the outcome bit.
int measure_qubit(StateVector& state, std::size_t qubit, int basis, std::mt19937_64& rng) {
    if (basis == 1) state = apply_unitary(state, gates::h(), QubitIndexSet{qubit});
    double p1 = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (state.bit_of(i, qubit)) p1 += std::norm(state.amp(i));
    }
    p1 /= state.norm_squared();
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const int outcome = uniform(rng) < p1 ? 1 : 0;
    std::vector<Amplitude> amps(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (static_cast<int>(state.bit_of(i, qubit)) != outcome) amps[i] = 0.0;
    }
    double n2 = 0.0;
    for (const auto& a : amps) n2 += std::norm(a);
    const double n = std::sqrt(n2);
    for (auto& a : amps) a /= n;
    state = StateVector(state.num_qubits(), std::move(amps), true);
    return outcome;
}

/// Reduced-register position of a layout set's single qubit after C is removed.
std::size_t survivor_position(const CloneLayout& lay, std::size_t orig_qubit) {
    std::size_t pos = 0;
    for (std::size_t q = 0; q < orig_qubit; ++q) {
        if (!lay.c.contains(q)) ++pos;
    }
    return pos;
}

} // namespace

Bb84Result run_bb84(const Bb84Config& config) {
    if (config.num_pulses < 1) throw std::invalid_argument("num_pulses must be >= 1");
    if (!(config.sample_fraction > 0.0 && config.sample_fraction < 1.0)) {
        throw std::invalid_argument("sample_fraction must lie in (0, 1)");
    }
    if (const auto* clone = std::get_if<EvePostselectClone>(&config.eve)) {
        validate(clone->instance);
        if (clone->instance.layout.a.size() != 1) {
            throw DimensionMismatch("postselect-clone attack needs a single-qubit A slot");
        }
    }

    Bb84Result result;
    std::size_t eve_correct = 0;

    for (std::size_t pulse = 0; pulse < config.num_pulses; ++pulse) {
        std::mt19937_64 rng(derive_stream(config.seed, pulse));
        std::uniform_int_distribution<int> coin(0, 1);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        const int alice_bit = coin(rng);
        const int alice_basis = coin(rng);
        StateVector flight = encode(alice_bit, alice_basis);

        // Eve's transformation. `channel` is the joint state reaching Bob;
        // `bob_qubit` addresses the flight qubit inside it.
        StateVector channel = flight;
        std::size_t bob_qubit = 0;
        bool eve_has_guess = false;
        int eve_measured_bit = 0; // intercept-resend guess, fixed before sifting
        std::optional<std::size_t> eve_clone_qubit;

        if (std::holds_alternative<EveInterceptResend>(config.eve)) {
            const int eve_basis = coin(rng);
            eve_measured_bit = measure_qubit(channel, 0, eve_basis, rng);
            channel = encode(eve_measured_bit, eve_basis);
            eve_has_guess = true;
        } else if (const auto* clone = std::get_if<EvePostselectClone>(&config.eve)) {
            const PostselectOutcome out = cloning_output(clone->instance, channel);
            if (!out.renormalized_state ||
                std::abs(out.success_amplitude) < kDefaultMinAmplitude) {
                ++result.discarded_by_eve;
                continue; // Eve blocks the annihilated pulse
            }
            channel = *out.renormalized_state;
            bob_qubit = survivor_position(clone->instance.layout, clone->instance.layout.a[0]);
            eve_clone_qubit = survivor_position(clone->instance.layout, clone->instance.layout.b[0]);
            eve_has_guess = true;
        }

        const int bob_basis = coin(rng);
        const int bob_bit = measure_qubit(channel, bob_qubit, bob_basis, rng);

        if (bob_basis != alice_basis) continue; // sifted away
        ++result.sifted_length;

        if (eve_has_guess) {
            int guess = eve_measured_bit;
            if (eve_clone_qubit) {
                // Basis announcement is public, so Eve measures her clone in it.
                guess = measure_qubit(channel, *eve_clone_qubit, alice_basis, rng);
            }
            if (guess == alice_bit) ++eve_correct;
        }

        if (uniform(rng) < config.sample_fraction) {
            ++result.checked_bits;
            if (bob_bit != alice_bit) ++result.check_errors;
        }
    }

    result.qber = result.checked_bits
                      ? static_cast<double>(result.check_errors) /
                            static_cast<double>(result.checked_bits)
                      : 0.0;
    result.eve_information =
        result.sifted_length
            ? static_cast<double>(eve_correct) / static_cast<double>(result.sifted_length)
            : 0.0;
    return result;
}

EvePostselectClone canonical_postselect_clone_attack() {
    return EvePostselectClone{basis_exact_2wqc_cloner(Amplitude{1.0, 0.0}, Amplitude{1.0, 0.0})};
}

// -- Exact enumeration ---------------------------------------------------

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}
Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw std::invalid_argument("division by zero");
    return Rational(a.num * b.den, a.den * b.num);
}

namespace {

/// P(outcome | state) for the four BB84 states under a Z/X measurement:
/// same basis is deterministic, crossed bases are even coin flips.
Rational outcome_probability(int state_basis, int state_bit, int meas_basis, int outcome) {
    if (state_basis == meas_basis) return Rational(outcome == state_bit ? 1 : 0, 1);
    return Rational(1, 2);
}

} // namespace

ExactQber enumerate_intercept_resend(EveBasisPolicy policy) {
    Rational sift_all(0, 1), err_all(0, 1);
    Rational sift_z(0, 1), err_z(0, 1);
    Rational sift_x(0, 1), err_x(0, 1);

    const Rational half(1, 2), quarter(1, 4);

    for (int alice_bit = 0; alice_bit <= 1; ++alice_bit) {
        for (int alice_basis = 0; alice_basis <= 1; ++alice_basis) {
            for (int bob_basis = 0; bob_basis <= 1; ++bob_basis) {
                const Rational setting_weight = quarter * half; // bit, alice basis, bob basis
                if (alice_basis != bob_basis) continue;

                // Enumerate the channel state reaching Bob together with its
                // probability, given Eve's policy.
                struct Branch {
                    Rational prob;
                    int basis;
                    int bit;
                };
                std::vector<Branch> branches;
                if (policy == EveBasisPolicy::NoEavesdropper) {
                    branches.push_back({Rational(1, 1), alice_basis, alice_bit});
                } else {
                    for (int eve_basis = 0; eve_basis <= 1; ++eve_basis) {
                        Rational basis_prob(1, 1);
                        if (policy == EveBasisPolicy::UniformRandom) {
                            basis_prob = half;
                        } else if (eve_basis != 0) {
                            continue; // AlwaysZ
                        }
                        for (int eve_out = 0; eve_out <= 1; ++eve_out) {
                            const Rational p =
                                basis_prob *
                                outcome_probability(alice_basis, alice_bit, eve_basis, eve_out);
                            if (p.num == 0) continue;
                            branches.push_back({p, eve_basis, eve_out});
                        }
                    }
                }

                for (const Branch& br : branches) {
                    for (int bob_out = 0; bob_out <= 1; ++bob_out) {
                        const Rational p = setting_weight * br.prob *
                                           outcome_probability(br.basis, br.bit, bob_basis, bob_out);
                        if (p.num == 0) continue;
                        sift_all = sift_all + p;
                        const bool error = bob_out != alice_bit;
                        if (error) err_all = err_all + p;
                        if (alice_basis == 0) {
                            sift_z = sift_z + p;
                            if (error) err_z = err_z + p;
                        } else {
                            sift_x = sift_x + p;
                            if (error) err_x = err_x + p;
                        }
                    }
                }
            }
        }
    }

    ExactQber q;
    q.overall = err_all / sift_all;
    q.z_sifted = err_z / sift_z;
    q.x_sifted = err_x / sift_x;
    return q;
}

} // namespace twoq
