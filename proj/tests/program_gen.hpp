#pragma once

#include "twoq/circuit.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace twoq::test {

/// Random valid programs for the round-trip property. Measures are appended
/// last so the terminal-measurement rule holds by construction.
inline CircuitProgram random_program(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    CircuitProgram p;
    p.num_qubits = 1 + rng() % 5;
    const std::size_t n_instr = rng() % 12;

    const std::vector<std::string> one_q = {"i", "x", "y", "z", "h", "s", "t"};
    const std::vector<std::string> rot = {"rx", "ry", "rz"};
    const std::vector<std::string> two_q = {"cx", "cz", "swap"};

    auto pick_qubits = [&](std::size_t k) {
        std::vector<std::size_t> qs(p.num_qubits);
        for (std::size_t q = 0; q < p.num_qubits; ++q) qs[q] = q;
        std::shuffle(qs.begin(), qs.end(), rng);
        qs.resize(k);
        return qs;
    };

    for (std::size_t i = 0; i < n_instr; ++i) {
        switch (rng() % 6) {
        case 0:
            p.instructions.push_back(Instruction::prep(rng() % p.num_qubits, rng() % 2));
            break;
        case 1:
            p.instructions.push_back(
                Instruction::gate(one_q[rng() % one_q.size()], pick_qubits(1)));
            break;
        case 2:
            p.instructions.push_back(
                Instruction::gate(rot[rng() % rot.size()], pick_qubits(1), {angle(rng)}));
            break;
        case 3:
            if (p.num_qubits >= 2) {
                p.instructions.push_back(
                    Instruction::gate(two_q[rng() % two_q.size()], pick_qubits(2)));
            }
            break;
        case 4: {
            const std::size_t k = 1 + rng() % p.num_qubits;
            std::vector<int> bits(k);
            for (auto& b : bits) b = rng() % 2;
            p.instructions.push_back(Instruction::postselect(pick_qubits(k), bits));
            break;
        }
        case 5: {
            // 1-qubit unitary literal: an exact rotation matrix.
            const UnitaryMatrix u = gates::rz(angle(rng)) * gates::ry(angle(rng));
            p.instructions.push_back(Instruction::unitary(
                {u.entries().begin(), u.entries().end()}, pick_qubits(1)));
            break;
        }
        }
    }
    if (rng() % 3 == 0) {
        const std::size_t k = 1 + rng() % p.num_qubits;
        p.instructions.push_back(Instruction::measure(pick_qubits(k)));
    }
    return p;
}

} // namespace twoq::test
