#include "twoq/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

namespace twoq {

namespace {

void check_finite(const std::vector<Amplitude>& amps) {
    for (const auto& a : amps) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("amplitude is not finite");
        }
    }
}

} // namespace

// -- QubitIndexSet ------------------------------------------------------------

QubitIndexSet::QubitIndexSet(std::initializer_list<std::size_t> qubits)
    : QubitIndexSet(std::vector<std::size_t>(qubits)) {}

QubitIndexSet::QubitIndexSet(std::vector<std::size_t> qubits) : indices_(std::move(qubits)) {
    std::unordered_set<std::size_t> seen;
    for (auto q : indices_) {
        if (!seen.insert(q).second) {
            throw std::invalid_argument("duplicate qubit index " + std::to_string(q));
        }
    }
}

bool QubitIndexSet::contains(std::size_t q) const {
    return std::find(indices_.begin(), indices_.end(), q) != indices_.end();
}

void QubitIndexSet::check_in_range(std::size_t num_qubits) const {
    for (auto q : indices_) {
        if (q >= num_qubits) {
            throw DimensionMismatch("qubit index " + std::to_string(q) +
                                    " out of range for register of " +
                                    std::to_string(num_qubits) + " qubits");
        }
    }
}

// -- StateVector --------------------------------------------------------------

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits), amps_(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0}) {}

StateVector::StateVector(std::size_t num_qubits, std::vector<Amplitude> amplitudes,
                         bool normalized)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)), normalized_(normalized) {
    if (amps_.size() != (std::size_t{1} << num_qubits_)) {
        throw DimensionMismatch("amplitude count " + std::to_string(amps_.size()) +
                                " does not match 2^" + std::to_string(num_qubits_));
    }
    check_finite(amps_);
    if (normalized_ && std::abs(norm_squared() - 1.0) > kTol) {
        throw NotNormalized("state flagged normalized has squared norm " +
                            std::to_string(norm_squared()));
    }
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

StateVector StateVector::renormalized() const {
    const double n = norm();
    if (n <= 0.0) throw NotNormalized("cannot renormalize a zero state");
    std::vector<Amplitude> out(amps_);
    for (auto& a : out) a /= n;
    return StateVector(num_qubits_, std::move(out), true);
}

// -- UnitaryMatrix ------------------------------------------------------------

UnitaryMatrix::UnitaryMatrix(std::size_t dim_qubits, std::vector<Amplitude> row_major_entries)
    : dim_qubits_(dim_qubits), dim_(std::size_t{1} << dim_qubits),
      entries_(std::move(row_major_entries)) {
    if (entries_.size() != dim_ * dim_) {
        throw DimensionMismatch("unitary entry count does not match 2^k x 2^k");
    }
    check_finite(entries_);
    const double dev = max_deviation_from_unitary();
    if (dev > kTol) {
        throw NotNormalized("matrix fails unitarity check, ||U^dag U - I||_max = " +
                            std::to_string(dev));
    }
}

double UnitaryMatrix::max_deviation_from_unitary() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            Amplitude acc{0.0, 0.0};
            for (std::size_t k = 0; k < dim_; ++k) {
                acc += std::conj(entries_[k * dim_ + i]) * entries_[k * dim_ + j];
            }
            if (i == j) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim_qubits) {
    const std::size_t d = std::size_t{1} << dim_qubits;
    std::vector<Amplitude> e(d * d, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i) e[i * d + i] = 1.0;
    return UnitaryMatrix(dim_qubits, std::move(e));
}

UnitaryMatrix UnitaryMatrix::completing(
    std::size_t dim_qubits, const std::vector<std::pair<std::size_t, StateVector>>& columns) {
    const std::size_t d = std::size_t{1} << dim_qubits;
    std::vector<std::vector<Amplitude>> basis; // orthonormal columns collected so far
    std::vector<Amplitude> entries(d * d, Amplitude{0.0, 0.0});
    std::vector<bool> assigned(d, false);

    auto project_out = [&](std::vector<Amplitude>& v) {
        for (const auto& b : basis) {
            Amplitude ov{0.0, 0.0};
            for (std::size_t i = 0; i < d; ++i) ov += std::conj(b[i]) * v[i];
            for (std::size_t i = 0; i < d; ++i) v[i] -= ov * b[i];
        }
    };

    for (const auto& [col, state] : columns) {
        if (col >= d || state.dim() != d) {
            throw DimensionMismatch("column specification out of range");
        }
        if (assigned[col]) throw std::invalid_argument("column assigned twice");
        std::vector<Amplitude> v(state.amplitudes().begin(), state.amplitudes().end());
        project_out(v);
        double n2 = 0.0;
        for (const auto& a : v) n2 += std::norm(a);
        if (std::abs(n2 - state.norm_squared()) > 1e-9) {
            throw NotNormalized("given columns are not orthonormal");
        }
        const double n = std::sqrt(n2);
        if (std::abs(n - 1.0) > 1e-9) throw NotNormalized("given column is not normalized");
        for (auto& a : v) a /= n;
        for (std::size_t i = 0; i < d; ++i) entries[i * d + col] = v[i];
        basis.push_back(std::move(v));
        assigned[col] = true;
    }

    // Fill remaining columns from standard basis vectors that survive projection.
    std::size_t next_seed = 0;
    for (std::size_t col = 0; col < d; ++col) {
        if (assigned[col]) continue;
        while (true) {
            if (next_seed >= d) throw std::logic_error("failed to complete unitary");
            std::vector<Amplitude> v(d, Amplitude{0.0, 0.0});
            v[next_seed++] = 1.0;
            project_out(v);
            double n2 = 0.0;
            for (const auto& a : v) n2 += std::norm(a);
            if (n2 < 1e-12) continue; // basis vector already spanned
            const double n = std::sqrt(n2);
            for (auto& a : v) a /= n;
            for (std::size_t i = 0; i < d; ++i) entries[i * d + col] = v[i];
            basis.push_back(std::move(v));
            break;
        }
    }
    return UnitaryMatrix(dim_qubits, std::move(entries));
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
    std::vector<Amplitude> e(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) e[j * dim_ + i] = std::conj(entries_[i * dim_ + j]);
    return UnitaryMatrix(dim_qubits_, std::move(e));
}

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    if (a.dim_ != b.dim_) throw DimensionMismatch("unitary product dimension mismatch");
    const std::size_t d = a.dim_;
    std::vector<Amplitude> e(d * d, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const Amplitude aik = a.entries_[i * d + k];
            if (aik == Amplitude{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < d; ++j) e[i * d + j] += aik * b.entries_[k * d + j];
        }
    return UnitaryMatrix(a.dim_qubits_, std::move(e));
}

// -- Operations ---------------------------------------------------------------

StateVector make_basis_state(std::size_t num_qubits, std::size_t basis_index) {
    const std::size_t d = std::size_t{1} << num_qubits;
    if (basis_index >= d) {
        throw std::out_of_range("basis index " + std::to_string(basis_index) +
                                " out of range for " + std::to_string(num_qubits) + " qubits");
    }
    std::vector<Amplitude> amps(d, Amplitude{0.0, 0.0});
    amps[basis_index] = 1.0;
    return StateVector(num_qubits, std::move(amps), true);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<Amplitude> out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a.amp(i) * b.amp(j);
    return StateVector(a.num_qubits() + b.num_qubits(), std::move(out),
                       a.normalized() && b.normalized());
}

StateVector tensor(const StateVector& a, const StateVector& b, const StateVector& c) {
    return tensor(tensor(a, b), c);
}

StateVector apply_unitary(const StateVector& state, const UnitaryMatrix& u,
                          const QubitIndexSet& targets) {
    if (u.dim_qubits() != targets.size()) {
        throw DimensionMismatch("unitary acts on " + std::to_string(u.dim_qubits()) +
                                " qubits but " + std::to_string(targets.size()) +
                                " targets were given");
    }
    targets.check_in_range(state.num_qubits());

    const std::size_t n = state.num_qubits();
    const std::size_t k = targets.size();
    const std::size_t local_dim = std::size_t{1} << k;

    // Bit position (from the least significant end) of each target.
    std::vector<std::size_t> shifts(k);
    for (std::size_t t = 0; t < k; ++t) shifts[t] = n - 1 - targets[t];

    std::size_t target_mask = 0;
    for (auto s : shifts) target_mask |= (std::size_t{1} << s);

    // Enumerate basis indices with all target bits zero, then scatter/gather
    // the 2^k-amplitude block addressed by the targets.
    std::vector<Amplitude> out(state.dim());
    std::vector<Amplitude> block(local_dim);
    std::vector<std::size_t> offsets(local_dim, 0);
    for (std::size_t l = 0; l < local_dim; ++l) {
        for (std::size_t t = 0; t < k; ++t) {
            if ((l >> (k - 1 - t)) & 1u) offsets[l] |= (std::size_t{1} << shifts[t]);
        }
    }
    const std::size_t dim = state.dim();
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & target_mask) continue;
        for (std::size_t l = 0; l < local_dim; ++l) block[l] = state.amp(base | offsets[l]);
        for (std::size_t r = 0; r < local_dim; ++r) {
            Amplitude acc{0.0, 0.0};
            for (std::size_t l = 0; l < local_dim; ++l) acc += u.entry(r, l) * block[l];
            out[base | offsets[r]] = acc;
        }
    }
    return StateVector(n, std::move(out), state.normalized());
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw DimensionMismatch("inner product between states of different width");
    }
    Amplitude acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amp(i)) * b.amp(i);
    return acc;
}

StateVector haar_random_state(std::size_t num_qubits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t d = std::size_t{1} << num_qubits;
    std::vector<Amplitude> amps(d);
    for (auto& a : amps) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        a = Amplitude{re, im};
    }
    double n2 = 0.0;
    for (const auto& a : amps) n2 += std::norm(a);
    const double n = std::sqrt(n2);
    for (auto& a : amps) a /= n;
    return StateVector(num_qubits, std::move(amps), true);
}

double state_fidelity(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw DimensionMismatch("fidelity between states of different width");
    }
    const double na = a.norm_squared();
    const double nb = b.norm_squared();
    if (na <= 0.0 || nb <= 0.0) throw NotNormalized("fidelity of a zero-norm state");
    return std::norm(inner_product(a, b)) / (na * nb);
}

StateVector permute_qubits(const StateVector& state, const std::vector<std::size_t>& perm) {
    const std::size_t n = state.num_qubits();
    if (perm.size() != n) throw DimensionMismatch("permutation size mismatch");
    QubitIndexSet check(perm); // validates distinctness
    check.check_in_range(n);
    std::vector<Amplitude> out(state.dim());
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        std::size_t dst = 0;
        for (std::size_t q = 0; q < n; ++q) {
            dst = (dst << 1) | state.bit_of(idx, perm[q]);
        }
        out[dst] = state.amp(idx);
    }
    return StateVector(n, std::move(out), state.normalized());
}

// -- Standard gates ----------------------------------------------------------

namespace gates {

namespace {
UnitaryMatrix m2(Amplitude a, Amplitude b, Amplitude c, Amplitude d) {
    return UnitaryMatrix(1, {a, b, c, d});
}
} // namespace

UnitaryMatrix i() { return m2(1, 0, 0, 1); }
UnitaryMatrix x() { return m2(0, 1, 1, 0); }
UnitaryMatrix y() { return m2(0, Amplitude{0, -1}, Amplitude{0, 1}, 0); }
UnitaryMatrix z() { return m2(1, 0, 0, -1); }
UnitaryMatrix h() {
    const double s = 1.0 / std::numbers::sqrt2;
    return m2(s, s, s, -s);
}
UnitaryMatrix s() { return m2(1, 0, 0, Amplitude{0, 1}); }
UnitaryMatrix t() {
    const double s = 1.0 / std::numbers::sqrt2;
    return m2(1, 0, 0, Amplitude{s, s});
}
UnitaryMatrix rx(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return m2(c, Amplitude{0, -s}, Amplitude{0, -s}, c);
}
UnitaryMatrix ry(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return m2(c, -s, s, c);
}
UnitaryMatrix rz(double theta) {
    return m2(std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2));
}
UnitaryMatrix cx() {
    return UnitaryMatrix(2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
}
UnitaryMatrix cz() {
    return UnitaryMatrix(2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1});
}
UnitaryMatrix swap() {
    return UnitaryMatrix(2, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1});
}
UnitaryMatrix ccx() {
    std::vector<Amplitude> e(64, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < 6; ++i) e[i * 8 + i] = 1.0;
    e[6 * 8 + 7] = 1.0;
    e[7 * 8 + 6] = 1.0;
    return UnitaryMatrix(3, std::move(e));
}

} // namespace gates

} // namespace twoq
