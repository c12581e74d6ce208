#pragma once

#include "twoq/postselect.hpp"
#include "twoq/statevec.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace twoq {

/// 1-based source position; line 0 marks synthetic (programmatic) instructions.
struct SourceSpan {
    std::size_t line = 0;
    std::size_t column = 0;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, std::size_t column, std::string token, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) +
                             ": " + message),
          line_(line), column_(column), token_(std::move(token)) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& token() const { return token_; }

  private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

enum class InstructionKind { Prep, Gate, Unitary, Postselect, Measure };

struct Instruction {
    InstructionKind kind;
    std::vector<std::size_t> qubits;
    std::vector<int> bits;          // prep (one bit) and postselect (one per qubit)
    std::string gate_name;          // gate only
    std::vector<double> params;     // gate only
    std::vector<Amplitude> matrix;  // unitary only, row-major 2^k x 2^k
    SourceSpan span;

    static Instruction prep(std::size_t qubit, int bit);
    static Instruction gate(std::string name, std::vector<std::size_t> qubits,
                            std::vector<double> params = {});
    static Instruction unitary(std::vector<Amplitude> matrix, std::vector<std::size_t> qubits);
    static Instruction postselect(std::vector<std::size_t> qubits, std::vector<int> bits);
    static Instruction measure(std::vector<std::size_t> qubits);
};

/// Structural equality; source spans are ignored.
bool operator==(const Instruction& a, const Instruction& b);

struct CircuitProgram {
    std::size_t num_qubits = 0;
    std::vector<Instruction> instructions;

    friend bool operator==(const CircuitProgram&, const CircuitProgram&) = default;
};

struct GateSpec {
    std::size_t num_qubits;
    std::size_t num_params;
};

/// Registry lookup; returns nullptr for unknown names.
const GateSpec* lookup_gate(const std::string& name);
UnitaryMatrix build_gate(const std::string& name, const std::vector<double>& params);

/// Parses the circuit DSL. Throws ParseError with line/column on syntax and
/// semantic errors (unknown gate, bad qubit index, arity mismatch, use after
/// measure).
CircuitProgram parse(const std::string& source);

/// Canonical text form; parse(serialize(p)) == p.
std::string serialize(const CircuitProgram& program);

/// Semantic validation for programmatically built programs (same checks as
/// parse, spans permitting).
void validate(const CircuitProgram& program);

struct PostselectEvent {
    std::size_t instruction_index;
    double amplitude_magnitude; // |c|
    double discarded_weight;
};

struct ExecutionResult {
    StateVector final_state;
    std::vector<PostselectEvent> postselect_log;
    std::vector<std::string> measurement_samples;
    double success_probability = 1.0;
};

class AnnihilatedAtInstruction : public PostselectionAnnihilated {
  public:
    AnnihilatedAtInstruction(double amplitude_magnitude, std::size_t instruction_index,
                             SourceSpan span)
        : PostselectionAnnihilated(amplitude_magnitude), instruction_index_(instruction_index),
          span_(span) {}

    std::size_t instruction_index() const { return instruction_index_; }
    SourceSpan span() const { return span_; }

  private:
    std::size_t instruction_index_;
    SourceSpan span_;
};

/**
 * Runs the program on |00...0>. Postselect and prep project and renormalize,
 * logging (index, |c|, discarded weight); success_probability is the product
 * of |c|^2 over the log. Sampling draws `shots` bitstrings over the measured
 * qubits (all qubits when no measure instruction is present), seeded.
 */
ExecutionResult execute(const CircuitProgram& program, std::size_t shots, std::uint64_t seed);

} // namespace twoq
