#include "twoq/postselect.hpp"

#include <cmath>

namespace twoq {

PostselectOutcome project(const StateVector& state, const QubitIndexSet& targets,
                          const StateVector& g) {
    if (g.num_qubits() != targets.size()) {
        throw DimensionMismatch("projection target state has width " +
                                std::to_string(g.num_qubits()) + " but " +
                                std::to_string(targets.size()) + " qubits are projected");
    }
    targets.check_in_range(state.num_qubits());
    if (std::abs(g.norm_squared() - 1.0) > kTol) {
        throw NotNormalized("projection target state g must be normalized");
    }

    const std::size_t n = state.num_qubits();
    const std::size_t k = targets.size();
    const std::size_t n_rest = n - k;

    // Bit shifts of the target qubits and of the surviving qubits (register order).
    std::vector<std::size_t> target_shift(k);
    for (std::size_t t = 0; t < k; ++t) target_shift[t] = n - 1 - targets[t];
    std::vector<std::size_t> rest_shift;
    rest_shift.reserve(n_rest);
    for (std::size_t q = 0; q < n; ++q) {
        if (!targets.contains(q)) rest_shift.push_back(n - 1 - q);
    }

    // reduced[r] = sum_t conj(g[t]) * state[compose(r, t)]
    std::vector<Amplitude> reduced(std::size_t{1} << n_rest, Amplitude{0.0, 0.0});
    for (std::size_t r = 0; r < reduced.size(); ++r) {
        std::size_t base = 0;
        for (std::size_t b = 0; b < n_rest; ++b) {
            if ((r >> (n_rest - 1 - b)) & 1u) base |= (std::size_t{1} << rest_shift[b]);
        }
        Amplitude acc{0.0, 0.0};
        for (std::size_t t = 0; t < g.dim(); ++t) {
            std::size_t idx = base;
            for (std::size_t b = 0; b < k; ++b) {
                if ((t >> (k - 1 - b)) & 1u) idx |= (std::size_t{1} << target_shift[b]);
            }
            acc += std::conj(g.amp(t)) * state.amp(idx);
        }
        reduced[r] = acc;
    }

    PostselectOutcome out{StateVector(n_rest, reduced), Amplitude{0.0, 0.0}, 0.0, std::nullopt};

    double red_n2 = 0.0;
    for (const auto& a : reduced) red_n2 += std::norm(a);
    const double red_norm = std::sqrt(red_n2);
    out.discarded_weight = std::max(0.0, state.norm_squared() - red_n2);

    if (red_norm > 0.0) {
        // Phase convention: c carries the phase of the first nonzero amplitude,
        // so the normalized direction reduced/c starts real positive.
        Amplitude phase{1.0, 0.0};
        for (const auto& a : reduced) {
            if (std::abs(a) > red_norm * 1e-14) {
                phase = a / std::abs(a);
                break;
            }
        }
        out.success_amplitude = red_norm * phase;
        std::vector<Amplitude> renorm(reduced);
        for (auto& a : renorm) a /= out.success_amplitude;
        out.renormalized_state = StateVector(n_rest, std::move(renorm), true);
    }
    return out;
}

StateVector postselect_or_fail(const StateVector& state, const QubitIndexSet& targets,
                               const StateVector& g, double min_amplitude) {
    PostselectOutcome outcome = project(state, targets, g);
    if (std::abs(outcome.success_amplitude) < min_amplitude || !outcome.renormalized_state) {
        throw PostselectionAnnihilated(std::abs(outcome.success_amplitude));
    }
    return *outcome.renormalized_state;
}

} // namespace twoq
