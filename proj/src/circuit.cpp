#include "twoq/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace twoq {

// -- Instruction builders -----------------------------------------------------

Instruction Instruction::prep(std::size_t qubit, int bit) {
    Instruction in;
    in.kind = InstructionKind::Prep;
    in.qubits = {qubit};
    in.bits = {bit};
    return in;
}

Instruction Instruction::gate(std::string name, std::vector<std::size_t> qubits,
                              std::vector<double> params) {
    Instruction in;
    in.kind = InstructionKind::Gate;
    in.gate_name = std::move(name);
    in.qubits = std::move(qubits);
    in.params = std::move(params);
    return in;
}

Instruction Instruction::unitary(std::vector<Amplitude> matrix, std::vector<std::size_t> qubits) {
    Instruction in;
    in.kind = InstructionKind::Unitary;
    in.matrix = std::move(matrix);
    in.qubits = std::move(qubits);
    return in;
}

Instruction Instruction::postselect(std::vector<std::size_t> qubits, std::vector<int> bits) {
    Instruction in;
    in.kind = InstructionKind::Postselect;
    in.qubits = std::move(qubits);
    in.bits = std::move(bits);
    return in;
}

Instruction Instruction::measure(std::vector<std::size_t> qubits) {
    Instruction in;
    in.kind = InstructionKind::Measure;
    in.qubits = std::move(qubits);
    return in;
}

bool operator==(const Instruction& a, const Instruction& b) {
    return a.kind == b.kind && a.qubits == b.qubits && a.bits == b.bits &&
           a.gate_name == b.gate_name && a.params == b.params && a.matrix == b.matrix;
}

// -- Gate registry ------------------------------------------------------------

namespace {

const std::map<std::string, GateSpec>& registry() {
    static const std::map<std::string, GateSpec> table = {
        {"i", {1, 0}},  {"x", {1, 0}},  {"y", {1, 0}},    {"z", {1, 0}},  {"h", {1, 0}},
        {"s", {1, 0}},  {"t", {1, 0}},  {"rx", {1, 1}},   {"ry", {1, 1}}, {"rz", {1, 1}},
        {"cx", {2, 0}}, {"cz", {2, 0}}, {"swap", {2, 0}}, {"ccx", {3, 0}},
    };
    return table;
}

} // namespace

const GateSpec* lookup_gate(const std::string& name) {
    auto it = registry().find(name);
    return it == registry().end() ? nullptr : &it->second;
}

UnitaryMatrix build_gate(const std::string& name, const std::vector<double>& params) {
    if (name == "i") return gates::i();
    if (name == "x") return gates::x();
    if (name == "y") return gates::y();
    if (name == "z") return gates::z();
    if (name == "h") return gates::h();
    if (name == "s") return gates::s();
    if (name == "t") return gates::t();
    if (name == "rx") return gates::rx(params.at(0));
    if (name == "ry") return gates::ry(params.at(0));
    if (name == "rz") return gates::rz(params.at(0));
    if (name == "cx") return gates::cx();
    if (name == "cz") return gates::cz();
    if (name == "swap") return gates::swap();
    if (name == "ccx") return gates::ccx();
    throw std::invalid_argument("unknown gate '" + name + "'");
}

// -- Tokenizer ----------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    std::size_t line;
    std::size_t column; // 1-based
    bool is_punct() const { return text == "(" || text == ")" || text == ","; }
};

std::vector<Token> tokenize_line(const std::string& line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == ',') {
            tokens.push_back({std::string(1, c), line_no, i + 1});
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
               line[i] != '(' && line[i] != ')' && line[i] != ',' && line[i] != '#') {
            ++i;
        }
        std::string text = line.substr(start, i - start);
        std::transform(text.begin(), text.end(), text.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        tokens.push_back({std::move(text), line_no, start + 1});
    }
    return tokens;
}

class LineParser {
  public:
    LineParser(std::vector<Token> tokens, std::size_t line_no)
        : tokens_(std::move(tokens)), line_(line_no) {}

    bool done() const { return pos_ >= tokens_.size(); }

    const Token& peek() const {
        if (done()) throw ParseError(line_, end_column(), "", "unexpected end of line");
        return tokens_[pos_];
    }

    Token next() {
        const Token t = peek();
        ++pos_;
        return t;
    }

    void skip_commas() {
        while (!done() && tokens_[pos_].text == ",") ++pos_;
    }

    bool peek_is_qubit() const {
        if (done()) return false;
        const auto& t = tokens_[pos_].text;
        return t.size() >= 2 && t[0] == 'q' &&
               std::all_of(t.begin() + 1, t.end(), [](char c) { return std::isdigit(c); });
    }

    std::size_t parse_qubit() {
        const Token t = next();
        if (!(t.text.size() >= 2 && t.text[0] == 'q')) {
            throw ParseError(t.line, t.column, t.text, "expected qubit reference, got '" + t.text + "'");
        }
        std::size_t value = 0;
        auto [ptr, ec] =
            std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            throw ParseError(t.line, t.column, t.text, "malformed qubit reference '" + t.text + "'");
        }
        return value;
    }

    double parse_number() {
        const Token t = next();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            throw ParseError(t.line, t.column, t.text, "expected a number, got '" + t.text + "'");
        }
        return value;
    }

    std::size_t parse_unsigned() {
        const Token t = next();
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            throw ParseError(t.line, t.column, t.text,
                             "expected a non-negative integer, got '" + t.text + "'");
        }
        return value;
    }

    void expect(const std::string& text) {
        const Token t = next();
        if (t.text != text) {
            throw ParseError(t.line, t.column, t.text,
                             "expected '" + text + "', got '" + t.text + "'");
        }
    }

    void expect_end() {
        if (!done()) {
            const Token& t = tokens_[pos_];
            throw ParseError(t.line, t.column, t.text, "unexpected token '" + t.text + "'");
        }
    }

    std::size_t end_column() const {
        if (tokens_.empty()) return 1;
        const Token& last = tokens_.back();
        return last.column + last.text.size();
    }

    std::size_t line() const { return line_; }

  private:
    std::vector<Token> tokens_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

void check_qubit_range(std::size_t q, std::size_t num_qubits, const Token& tok) {
    if (q >= num_qubits) {
        throw ParseError(tok.line, tok.column, tok.text,
                         "qubit index " + std::to_string(q) + " out of range (register has " +
                             std::to_string(num_qubits) + " qubits)");
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

// -- parse --------------------------------------------------------------------

CircuitProgram parse(const std::string& source) {
    CircuitProgram program;
    bool have_header = false;
    std::vector<bool> measured;

    std::istringstream in(source);
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::vector<Token> tokens = tokenize_line(raw_line, line_no);
        if (tokens.empty()) continue;
        LineParser lp(std::move(tokens), line_no);

        const Token head = lp.next();
        if (!have_header) {
            if (head.text != "qubits") {
                throw ParseError(head.line, head.column, head.text,
                                 "expected 'qubits N' header, got '" + head.text + "'");
            }
            const Token count_tok = lp.peek();
            program.num_qubits = lp.parse_unsigned();
            if (program.num_qubits == 0) {
                throw ParseError(count_tok.line, count_tok.column, count_tok.text,
                                 "register must have at least one qubit");
            }
            lp.expect_end();
            have_header = true;
            measured.assign(program.num_qubits, false);
            continue;
        }

        Instruction instr;
        instr.span = {head.line, head.column};

        auto parse_qubit_checked = [&]() {
            const Token tok = lp.peek();
            const std::size_t q = lp.parse_qubit();
            check_qubit_range(q, program.num_qubits, tok);
            if (measured[q]) {
                throw ParseError(tok.line, tok.column, tok.text,
                                 "qubit q" + std::to_string(q) + " used after measure");
            }
            return q;
        };

        if (head.text == "qubits") {
            throw ParseError(head.line, head.column, head.text, "duplicate 'qubits' header");
        } else if (head.text == "prep") {
            instr.kind = InstructionKind::Prep;
            instr.qubits = {parse_qubit_checked()};
            const Token bit_tok = lp.peek();
            const std::size_t bit = lp.parse_unsigned();
            if (bit > 1) {
                throw ParseError(bit_tok.line, bit_tok.column, bit_tok.text,
                                 "prep bit must be 0 or 1");
            }
            instr.bits = {static_cast<int>(bit)};
            lp.expect_end();
        } else if (head.text == "postselect") {
            instr.kind = InstructionKind::Postselect;
            while (lp.peek_is_qubit()) {
                const Token tok = lp.peek();
                const std::size_t q = parse_qubit_checked();
                if (std::find(instr.qubits.begin(), instr.qubits.end(), q) != instr.qubits.end()) {
                    throw ParseError(tok.line, tok.column, tok.text,
                                     "duplicate postselect qubit q" + std::to_string(q));
                }
                instr.qubits.push_back(q);
                lp.skip_commas();
            }
            if (instr.qubits.empty()) {
                const Token t = lp.done() ? head : lp.peek();
                throw ParseError(t.line, t.column, t.text, "postselect requires qubit references");
            }
            const Token bits_tok = lp.next();
            if (bits_tok.text.empty() ||
                !std::all_of(bits_tok.text.begin(), bits_tok.text.end(),
                             [](char c) { return c == '0' || c == '1'; })) {
                throw ParseError(bits_tok.line, bits_tok.column, bits_tok.text,
                                 "expected a bitstring, got '" + bits_tok.text + "'");
            }
            if (bits_tok.text.size() != instr.qubits.size()) {
                throw ParseError(bits_tok.line, bits_tok.column, bits_tok.text,
                                 "bitstring length " + std::to_string(bits_tok.text.size()) +
                                     " does not match " + std::to_string(instr.qubits.size()) +
                                     " postselected qubits");
            }
            for (char c : bits_tok.text) instr.bits.push_back(c - '0');
            lp.expect_end();
        } else if (head.text == "measure") {
            instr.kind = InstructionKind::Measure;
            while (lp.peek_is_qubit()) {
                const Token tok = lp.peek();
                const std::size_t q = parse_qubit_checked();
                instr.qubits.push_back(q);
                measured[q] = true;
                lp.skip_commas();
            }
            if (instr.qubits.empty()) {
                const Token t = lp.done() ? head : lp.peek();
                throw ParseError(t.line, t.column, t.text, "measure requires qubit references");
            }
            lp.expect_end();
        } else if (head.text == "unitary") {
            instr.kind = InstructionKind::Unitary;
            while (lp.peek_is_qubit()) {
                const Token tok = lp.peek();
                const std::size_t q = parse_qubit_checked();
                if (std::find(instr.qubits.begin(), instr.qubits.end(), q) != instr.qubits.end()) {
                    throw ParseError(tok.line, tok.column, tok.text,
                                     "duplicate qubit q" + std::to_string(q));
                }
                instr.qubits.push_back(q);
                lp.skip_commas();
            }
            if (instr.qubits.empty()) {
                const Token t = lp.done() ? head : lp.peek();
                throw ParseError(t.line, t.column, t.text, "unitary requires qubit references");
            }
            const std::size_t dim = std::size_t{1} << instr.qubits.size();
            lp.expect("(");
            for (std::size_t e = 0; e < dim * dim; ++e) {
                lp.skip_commas();
                const double re = lp.parse_number();
                lp.skip_commas();
                const double im = lp.parse_number();
                instr.matrix.emplace_back(re, im);
            }
            lp.skip_commas();
            lp.expect(")");
            lp.expect_end();
            try {
                UnitaryMatrix check(instr.qubits.size(), instr.matrix);
            } catch (const std::exception& e) {
                throw ParseError(head.line, head.column, head.text, e.what());
            }
        } else {
            const GateSpec* spec = lookup_gate(head.text);
            if (spec == nullptr) {
                throw ParseError(head.line, head.column, head.text,
                                 "unknown gate '" + head.text + "'");
            }
            instr.kind = InstructionKind::Gate;
            instr.gate_name = head.text;
            for (std::size_t i = 0; i < spec->num_qubits; ++i) {
                lp.skip_commas();
                if (!lp.peek_is_qubit()) {
                    const Token t = lp.done() ? head : lp.peek();
                    throw ParseError(t.line, t.column, t.text,
                                     "gate '" + head.text + "' expects " +
                                         std::to_string(spec->num_qubits) + " qubit(s)");
                }
                const Token tok = lp.peek();
                const std::size_t q = parse_qubit_checked();
                if (std::find(instr.qubits.begin(), instr.qubits.end(), q) != instr.qubits.end()) {
                    throw ParseError(tok.line, tok.column, tok.text,
                                     "duplicate qubit q" + std::to_string(q));
                }
                instr.qubits.push_back(q);
            }
            if (!lp.done() && lp.peek().text == "(") {
                lp.expect("(");
                while (!lp.done() && lp.peek().text != ")") {
                    instr.params.push_back(lp.parse_number());
                    lp.skip_commas();
                }
                lp.expect(")");
            }
            if (instr.params.size() != spec->num_params) {
                throw ParseError(head.line, head.column, head.text,
                                 "gate '" + head.text + "' expects " +
                                     std::to_string(spec->num_params) + " parameter(s), got " +
                                     std::to_string(instr.params.size()));
            }
            lp.expect_end();
        }
        program.instructions.push_back(std::move(instr));
    }

    if (!have_header) {
        throw ParseError(line_no == 0 ? 1 : line_no, 1, "", "missing 'qubits N' header");
    }
    return program;
}

// -- serialize ----------------------------------------------------------------

std::string serialize(const CircuitProgram& program) {
    std::string out = "qubits " + std::to_string(program.num_qubits) + "\n";
    for (const auto& in : program.instructions) {
        switch (in.kind) {
        case InstructionKind::Prep:
            out += "prep q" + std::to_string(in.qubits[0]) + " " + std::to_string(in.bits[0]);
            break;
        case InstructionKind::Gate: {
            out += in.gate_name;
            for (auto q : in.qubits) out += " q" + std::to_string(q);
            if (!in.params.empty()) {
                out += " (";
                for (std::size_t i = 0; i < in.params.size(); ++i) {
                    if (i) out += ", ";
                    out += format_double(in.params[i]);
                }
                out += ")";
            }
            break;
        }
        case InstructionKind::Unitary: {
            out += "unitary";
            for (auto q : in.qubits) out += " q" + std::to_string(q);
            out += " (";
            for (std::size_t i = 0; i < in.matrix.size(); ++i) {
                if (i) out += ", ";
                out += format_double(in.matrix[i].real()) + ", " +
                       format_double(in.matrix[i].imag());
            }
            out += ")";
            break;
        }
        case InstructionKind::Postselect: {
            out += "postselect ";
            for (std::size_t i = 0; i < in.qubits.size(); ++i) {
                if (i) out += ",";
                out += "q" + std::to_string(in.qubits[i]);
            }
            out += " ";
            for (int b : in.bits) out += static_cast<char>('0' + b);
            break;
        }
        case InstructionKind::Measure:
            out += "measure";
            for (auto q : in.qubits) out += " q" + std::to_string(q);
            break;
        }
        out += "\n";
    }
    return out;
}

// -- validate -----------------------------------------------------------------

void validate(const CircuitProgram& program) {
    if (program.num_qubits == 0) throw std::invalid_argument("register must have >= 1 qubit");
    std::vector<bool> measured(program.num_qubits, false);
    for (std::size_t idx = 0; idx < program.instructions.size(); ++idx) {
        const Instruction& in = program.instructions[idx];
        const std::string where = "instruction " + std::to_string(idx);
        QubitIndexSet qs(in.qubits); // distinctness
        qs.check_in_range(program.num_qubits);
        for (auto q : in.qubits) {
            if (measured[q]) {
                throw std::invalid_argument(where + ": qubit q" + std::to_string(q) +
                                            " used after measure");
            }
        }
        switch (in.kind) {
        case InstructionKind::Prep:
            if (in.qubits.size() != 1 || in.bits.size() != 1 || in.bits[0] < 0 || in.bits[0] > 1) {
                throw std::invalid_argument(where + ": malformed prep");
            }
            break;
        case InstructionKind::Gate: {
            const GateSpec* spec = lookup_gate(in.gate_name);
            if (spec == nullptr) {
                throw std::invalid_argument(where + ": unknown gate '" + in.gate_name + "'");
            }
            if (in.qubits.size() != spec->num_qubits || in.params.size() != spec->num_params) {
                throw std::invalid_argument(where + ": arity mismatch for gate '" + in.gate_name +
                                            "'");
            }
            break;
        }
        case InstructionKind::Unitary: {
            const std::size_t dim = std::size_t{1} << in.qubits.size();
            if (in.matrix.size() != dim * dim) {
                throw std::invalid_argument(where + ": unitary entry count mismatch");
            }
            UnitaryMatrix check(in.qubits.size(), in.matrix);
            break;
        }
        case InstructionKind::Postselect:
            if (in.bits.size() != in.qubits.size()) {
                throw std::invalid_argument(where + ": postselect bit count mismatch");
            }
            for (int b : in.bits) {
                if (b < 0 || b > 1) throw std::invalid_argument(where + ": bad postselect bit");
            }
            break;
        case InstructionKind::Measure:
            for (auto q : in.qubits) measured[q] = true;
            break;
        }
    }
}

// -- execute --------------------------------------------------------------

namespace {

/// Re-embeds a reduced state into an n-qubit register with `bits` fixed at
/// `targets` (inverse of the projection's index split).
StateVector embed_basis_at(const StateVector& reduced, std::size_t n,
                           const std::vector<std::size_t>& targets, const std::vector<int>& bits) {
    std::vector<std::size_t> rest_shift;
    for (std::size_t q = 0; q < n; ++q) {
        if (std::find(targets.begin(), targets.end(), q) == targets.end()) {
            rest_shift.push_back(n - 1 - q);
        }
    }
    std::size_t fixed = 0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (bits[t]) fixed |= (std::size_t{1} << (n - 1 - targets[t]));
    }
    std::vector<Amplitude> out(std::size_t{1} << n, Amplitude{0.0, 0.0});
    for (std::size_t r = 0; r < reduced.dim(); ++r) {
        std::size_t idx = fixed;
        const std::size_t n_rest = rest_shift.size();
        for (std::size_t b = 0; b < n_rest; ++b) {
            if ((r >> (n_rest - 1 - b)) & 1u) idx |= (std::size_t{1} << rest_shift[b]);
        }
        out[idx] = reduced.amp(r);
    }
    return StateVector(n, std::move(out), reduced.normalized());
}

} // namespace

ExecutionResult execute(const CircuitProgram& program, std::size_t shots, std::uint64_t seed) {
    validate(program);

    const std::size_t n = program.num_qubits;
    StateVector state = make_basis_state(n, 0);
    std::vector<PostselectEvent> log;
    std::vector<std::size_t> measured_order;

    for (std::size_t idx = 0; idx < program.instructions.size(); ++idx) {
        const Instruction& in = program.instructions[idx];
        switch (in.kind) {
        case InstructionKind::Prep:
        case InstructionKind::Postselect: {
            const std::vector<int>& bits = in.bits;
            std::size_t g_index = 0;
            for (int b : bits) g_index = (g_index << 1) | static_cast<unsigned>(b);
            const StateVector g = make_basis_state(in.qubits.size(), g_index);
            const QubitIndexSet targets(in.qubits);
            PostselectOutcome outcome = project(state, targets, g);
            const double abs_c = std::abs(outcome.success_amplitude);
            if (!outcome.renormalized_state || abs_c < kDefaultMinAmplitude) {
                throw AnnihilatedAtInstruction(abs_c, idx, in.span);
            }
            log.push_back({idx, abs_c, outcome.discarded_weight});
            state = embed_basis_at(*outcome.renormalized_state, n, in.qubits, bits);
            break;
        }
        case InstructionKind::Gate:
            state = apply_unitary(state, build_gate(in.gate_name, in.params),
                                  QubitIndexSet(in.qubits));
            break;
        case InstructionKind::Unitary:
            state = apply_unitary(state, UnitaryMatrix(in.qubits.size(), in.matrix),
                                  QubitIndexSet(in.qubits));
            break;
        case InstructionKind::Measure:
            for (auto q : in.qubits) measured_order.push_back(q);
            break;
        }
    }

    ExecutionResult result{state.renormalized(), std::move(log), {}, 1.0};
    for (const auto& ev : result.postselect_log) {
        result.success_probability *= ev.amplitude_magnitude * ev.amplitude_magnitude;
    }

    if (measured_order.empty()) {
        for (std::size_t q = 0; q < n; ++q) measured_order.push_back(q);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const StateVector& fs = result.final_state;
    result.measurement_samples.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = uniform(rng);
        double acc = 0.0;
        std::size_t drawn = fs.dim() - 1;
        for (std::size_t i = 0; i < fs.dim(); ++i) {
            acc += std::norm(fs.amp(i));
            if (u < acc) {
                drawn = i;
                break;
            }
        }
        std::string bits;
        bits.reserve(measured_order.size());
        for (auto q : measured_order) {
            bits.push_back(static_cast<char>('0' + fs.bit_of(drawn, q)));
        }
        result.measurement_samples.push_back(std::move(bits));
    }
    return result;
}

} // namespace twoq
