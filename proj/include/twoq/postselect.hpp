#pragma once

#include "twoq/statevec.hpp"

#include <optional>

namespace twoq {

/// Raised when a postselected branch has (numerically) zero amplitude, so the
/// renormalized continuation state is undefined.
class PostselectionAnnihilated : public std::runtime_error {
  public:
    explicit PostselectionAnnihilated(double amplitude_magnitude)
        : std::runtime_error("postselection annihilated the state (|c| = " +
                             std::to_string(amplitude_magnitude) + ")"),
          amplitude_magnitude_(amplitude_magnitude) {}

    double amplitude_magnitude() const { return amplitude_magnitude_; }

  private:
    double amplitude_magnitude_;
};

/**
 * Result of projecting a qubit subset onto <g|.
 *
 * The input decomposes as (direction (x) g) * c + Phi, with Phi's target
 * component orthogonal to g. `reduced_state` is the partial contraction
 * <g|state (subnormalized, over the surviving qubits), `success_amplitude`
 * is c, and `discarded_weight` is ||Phi||^2, so
 * |c|^2 + discarded_weight = ||input||^2.
 */
struct PostselectOutcome {
    StateVector reduced_state;
    Amplitude success_amplitude{0.0, 0.0};
    double discarded_weight = 0.0;
    /// Present only when |c| > 0.
    std::optional<StateVector> renormalized_state;
};

inline constexpr double kDefaultMinAmplitude = 1e-8;

/**
 * Contracts `targets` of `state` against <g|. g must be normalized and have
 * width |targets|. The phase of c is fixed so that the normalized direction
 * reduced/c has its first nonzero amplitude real positive. Empty targets
 * degenerate to the identity with |c| = ||state||.
 */
PostselectOutcome project(const StateVector& state, const QubitIndexSet& targets,
                          const StateVector& g);

/// Renormalized reduced state, or PostselectionAnnihilated when |c| < min_amplitude.
StateVector postselect_or_fail(const StateVector& state, const QubitIndexSet& targets,
                               const StateVector& g,
                               double min_amplitude = kDefaultMinAmplitude);

} // namespace twoq
