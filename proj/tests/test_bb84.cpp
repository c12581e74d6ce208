#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twoq/bb84.hpp"

#include <cmath>

using namespace twoq;

TEST_CASE("exact enumeration of intercept-resend") {
    const ExactQber q = enumerate_intercept_resend(EveBasisPolicy::UniformRandom);
    CHECK(q.overall == Rational(1, 4));
    CHECK(q.z_sifted == Rational(1, 4));
    CHECK(q.x_sifted == Rational(1, 4));
}

TEST_CASE("exact enumeration without an eavesdropper") {
    const ExactQber q = enumerate_intercept_resend(EveBasisPolicy::NoEavesdropper);
    CHECK(q.overall == Rational(0, 1));
}

TEST_CASE("exact enumeration with a Z-only eavesdropper") {
    // Eve in the matching basis never disturbs; in the crossed basis the
    // resent eigenstate flips Bob's outcome half the time.
    const ExactQber q = enumerate_intercept_resend(EveBasisPolicy::AlwaysZ);
    CHECK(q.z_sifted == Rational(0, 1));
    CHECK(q.x_sifted == Rational(1, 2));
    CHECK(q.overall == Rational(1, 4));
}

TEST_CASE("rational arithmetic reduces") {
    CHECK(Rational(2, 8) == Rational(1, 4));
    CHECK(Rational(1, 2) + Rational(1, 4) == Rational(3, 4));
    CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
    CHECK((Rational(1, 8) / Rational(1, 2)) == Rational(1, 4));
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("quiet channel has zero error rate") {
    Bb84Config config;
    config.num_pulses = 10000;
    config.seed = 5;
    const Bb84Result r = run_bb84(config);
    CHECK(r.qber == 0.0);
    CHECK(r.check_errors == 0);
    CHECK(r.discarded_by_eve == 0);
    CHECK(r.eve_information == 0.0);
    // Binomial sifting around half the pulses.
    CHECK(r.sifted_length > 4850);
    CHECK(r.sifted_length < 5150);
}

TEST_CASE("no-eve QBER is zero for many seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Bb84Config config;
        config.num_pulses = 500;
        config.seed = seed;
        CHECK(run_bb84(config).qber == 0.0);
    }
}

TEST_CASE("intercept-resend matches the enumeration within 3 sigma") {
    Bb84Config config;
    config.num_pulses = 10000;
    config.seed = 1234;
    config.eve = EveInterceptResend{};
    const Bb84Result r = run_bb84(config);

    const double p = enumerate_intercept_resend().overall.value();
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(r.checked_bits));
    CHECK(std::abs(r.qber - p) <= 3.0 * sigma);

    // Eve knows the bit exactly when her basis matched (half the time).
    CHECK(std::abs(r.eve_information - 0.75) < 0.03);
    CHECK(r.discarded_by_eve == 0);
}

TEST_CASE("bb84 runs are deterministic per config") {
    Bb84Config config;
    config.num_pulses = 2000;
    config.seed = 77;
    config.eve = EveInterceptResend{};
    const Bb84Result a = run_bb84(config);
    const Bb84Result b = run_bb84(config);
    CHECK(a.sifted_length == b.sifted_length);
    CHECK(a.qber == b.qber);
    CHECK(a.eve_information == b.eve_information);
    CHECK(a.checked_bits == b.checked_bits);

    config.seed = 78;
    const Bb84Result c = run_bb84(config);
    CHECK((a.sifted_length != c.sifted_length || a.qber != c.qber));
}

TEST_CASE("postselect-clone attack is detected") {
    Bb84Config config;
    config.num_pulses = 10000;
    config.seed = 31;
    config.eve = canonical_postselect_clone_attack();
    const Bb84Result r = run_bb84(config);

    // The no-cloning ceiling forbids the qber -> 0, information -> 1 corner.
    CHECK(r.qber >= 0.1);
    CHECK(r.eve_information < 1.0);

    // Regression values for the canonical basis-exact attack: the clone is
    // perfect on Z pulses and worthless on X pulses.
    CHECK(std::abs(r.qber - 0.25) < 0.03);
    CHECK(std::abs(r.eve_information - 0.75) < 0.03);
    CHECK(r.discarded_by_eve == 0);
}

TEST_CASE("annihilating attack blocks pulses") {
    // c_1 = 0 annihilates every |1> pulse Eve touches.
    Bb84Config config;
    config.num_pulses = 4000;
    config.seed = 9;
    config.eve = EvePostselectClone{basis_exact_2wqc_cloner({1.0, 0.0}, {0.0, 0.0})};
    const Bb84Result r = run_bb84(config);
    CHECK(r.discarded_by_eve > 800); // ~a quarter of all pulses (Z1 exactly)
    CHECK(r.discarded_by_eve < 1200);
    CHECK(r.sifted_length < 2000);
}

TEST_CASE("config validation") {
    Bb84Config config;
    config.num_pulses = 0;
    CHECK_THROWS_AS(run_bb84(config), std::invalid_argument);
    config.num_pulses = 10;
    config.sample_fraction = 1.5;
    CHECK_THROWS_AS(run_bb84(config), std::invalid_argument);
    config.sample_fraction = 0.5;
    config.eve = EvePostselectClone{buzek_hillery_oracle()};
    CHECK_NOTHROW(run_bb84(config)); // 1-qubit A slot, no postselection
}
