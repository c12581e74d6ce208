#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace twoq {

using Amplitude = std::complex<double>;

/// Absolute tolerance used for amplitude comparisons and unitarity checks.
inline constexpr double kTol = 1e-10;

class DimensionMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class NotNormalized : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Ordered set of distinct qubit positions within a register.
 *
 * The listing order matters: when a set addresses a sub-register, the first
 * listed qubit is the most significant bit of the sub-register index.
 */
class QubitIndexSet {
  public:
    QubitIndexSet() = default;
    QubitIndexSet(std::initializer_list<std::size_t> qubits);
    explicit QubitIndexSet(std::vector<std::size_t> qubits);

    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    std::size_t operator[](std::size_t i) const { return indices_[i]; }
    const std::vector<std::size_t>& indices() const { return indices_; }
    bool contains(std::size_t q) const;

    /// Throws DimensionMismatch if any index is >= num_qubits.
    void check_in_range(std::size_t num_qubits) const;

    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }

    friend bool operator==(const QubitIndexSet&, const QubitIndexSet&) = default;

  private:
    std::vector<std::size_t> indices_;
};

/**
 * Dense complex statevector over a qubit register.
 *
 * Amplitude ordering is big-endian: qubit 0 is the most significant bit of
 * the basis index, so |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + ... + q_{n-1}.
 * A 0-qubit state is a single complex scalar.
 */
class StateVector {
  public:
    /// Zero state of the given width (all amplitudes 0, flagged subnormalized).
    explicit StateVector(std::size_t num_qubits);
    StateVector(std::size_t num_qubits, std::vector<Amplitude> amplitudes,
                bool normalized = false);

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    bool normalized() const { return normalized_; }

    Amplitude amp(std::size_t basis_index) const { return amps_[basis_index]; }
    Amplitude& amp(std::size_t basis_index) { return amps_[basis_index]; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }

    double norm_squared() const;
    double norm() const;

    /// Returns a copy scaled to unit norm. Throws NotNormalized on zero norm.
    StateVector renormalized() const;

    /// Extracts the bit of `qubit` from a basis index (big-endian convention).
    std::size_t bit_of(std::size_t basis_index, std::size_t qubit) const {
        return (basis_index >> (num_qubits_ - 1 - qubit)) & 1u;
    }

    friend bool operator==(const StateVector&, const StateVector&) = default;

  private:
    std::size_t num_qubits_ = 0;
    std::vector<Amplitude> amps_;
    bool normalized_ = false;
};

/**
 * Dense unitary on dim_qubits qubits. Construction verifies the unitarity
 * certificate ||U^dag U - I||_max <= 1e-10 and throws NotNormalized otherwise.
 */
class UnitaryMatrix {
  public:
    UnitaryMatrix(std::size_t dim_qubits, std::vector<Amplitude> row_major_entries);

    std::size_t dim_qubits() const { return dim_qubits_; }
    std::size_t dim() const { return dim_; }
    Amplitude entry(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }
    std::span<const Amplitude> entries() const { return entries_; }

    static UnitaryMatrix identity(std::size_t dim_qubits);

    /// Completes a set of orthonormal columns (given as states with assigned
    /// column indices) to a full unitary via Gram-Schmidt over the remaining
    /// standard basis vectors.
    static UnitaryMatrix
    completing(std::size_t dim_qubits,
               const std::vector<std::pair<std::size_t, StateVector>>& columns);

    UnitaryMatrix adjoint() const;
    friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

    double max_deviation_from_unitary() const;

  private:
    std::size_t dim_qubits_ = 0;
    std::size_t dim_ = 0;
    std::vector<Amplitude> entries_;
};

// -- Operations --------------------------------------------------------------

/// |basis_index> on num_qubits qubits. Throws std::out_of_range on bad index.
StateVector make_basis_state(std::size_t num_qubits, std::size_t basis_index);

/// Kronecker product; a's qubits become the most significant block.
StateVector tensor(const StateVector& a, const StateVector& b);
StateVector tensor(const StateVector& a, const StateVector& b, const StateVector& c);

/// Applies u to the target subsystem (identity elsewhere). The first listed
/// target is the most significant bit of u's local index.
StateVector apply_unitary(const StateVector& state, const UnitaryMatrix& u,
                          const QubitIndexSet& targets);

/// <a|b>, conjugate-linear in a.
Amplitude inner_product(const StateVector& a, const StateVector& b);

/// Normalized vector of i.i.d. standard complex Gaussians; deterministic per seed.
StateVector haar_random_state(std::size_t num_qubits, std::uint64_t seed);

/// |<a|b>|^2 / (<a|a><b|b>). Throws NotNormalized on a zero-norm input.
double state_fidelity(const StateVector& a, const StateVector& b);

/// Reorders register qubits: new qubit q holds old qubit perm[q].
StateVector permute_qubits(const StateVector& state, const std::vector<std::size_t>& perm);

// -- Standard gates ----------------------------------------------------------

namespace gates {

UnitaryMatrix i();
UnitaryMatrix x();
UnitaryMatrix y();
UnitaryMatrix z();
UnitaryMatrix h();
UnitaryMatrix s();
UnitaryMatrix t();
UnitaryMatrix rx(double theta);
UnitaryMatrix ry(double theta);
UnitaryMatrix rz(double theta);
UnitaryMatrix cx();
UnitaryMatrix cz();
UnitaryMatrix swap();
UnitaryMatrix ccx();

} // namespace gates

} // namespace twoq
