#include "udisc/qasm.hpp"

#include <cstdio>
#include <optional>
#include <regex>
#include <sstream>

#include "udisc/error.hpp"

namespace udisc {

std::string emit_qasm(const Circuit& c) {
    std::ostringstream os;
    os << "OPENQASM 3.0;\n";
    os << "include \"stdgates.inc\";\n";
    os << "qubit[" << c.n_qubits() << "] q;\n";
    if (!c.measured().empty()) os << "bit[" << c.measured().size() << "] c;\n";
    for (const Gate& g : c.ops()) {
        if (!g.is_named()) {
            throw Error(ErrorCode::UnsupportedGate, "matrix gates have no OpenQASM name");
        }
        os << gate_name(g.kind);
        if (g.kind == GateKind::RZ) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", g.angle);
            os << '(' << buf << ')';
        }
        os << " q[" << g.qubits[0] << ']';
        if (g.arity() == 2) os << ",q[" << g.qubits[1] << ']';
        os << ";\n";
    }
    for (std::size_t i = 0; i < c.measured().size(); ++i) {
        os << "c[" << i << "] = measure q[" << c.measured()[i] << "];\n";
    }
    return os.str();
}

Circuit parse_qasm(std::string_view text) {
    static const std::regex header(R"(OPENQASM\s+3(\.0)?;|include\s+"[^"]*";|bit\[\d+\]\s+c;)");
    static const std::regex reg(R"(qubit\[(\d+)\]\s+q;)");
    static const std::regex gate1(R"((x|sx|h)\s+q\[(\d+)\];)");
    static const std::regex rz(R"(rz\(([^)]+)\)\s+q\[(\d+)\];)");
    static const std::regex gate2(R"((cx|ecr)\s+q\[(\d+)\]\s*,\s*q\[(\d+)\];)");
    static const std::regex meas(R"(c\[(\d+)\]\s*=\s*measure\s+q\[(\d+)\];)");

    std::optional<Circuit> c;
    std::istringstream is{std::string(text)};
    std::string line;
    int line_no = 0;
    auto need_register = [&]() -> Circuit& {
        if (!c) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": gate before qubit declaration");
        return *c;
    };
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
        if (line.starts_with("//")) continue;
        std::smatch m;
        try {
            if (std::regex_match(line, header)) continue;
            if (std::regex_match(line, m, reg)) {
                if (c) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": second register");
                c.emplace(std::stoi(m[1]));
            } else if (std::regex_match(line, m, gate1)) {
                const int q = std::stoi(m[2]);
                const std::string name = m[1];
                need_register().add(name == "x" ? Gate::x(q) : name == "sx" ? Gate::sx(q) : Gate::h(q));
            } else if (std::regex_match(line, m, rz)) {
                std::size_t used = 0;
                const std::string arg = m[1];
                const double phi = std::stod(arg, &used);
                if (used != arg.size()) throw std::invalid_argument(arg);
                need_register().add(Gate::rz(std::stoi(m[2]), phi));
            } else if (std::regex_match(line, m, gate2)) {
                const int a = std::stoi(m[2]);
                const int b = std::stoi(m[3]);
                need_register().add(m[1] == "cx" ? Gate::cnot(a, b) : Gate::ecr(a, b));
            } else if (std::regex_match(line, m, meas)) {
                need_register().measure(std::stoi(m[2]));
            } else {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unrecognised '" + line + "'");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number in '" + line + "'");
        }
    }
    if (!c) throw Error(ErrorCode::ParseError, "no qubit declaration");
    return *c;
}

}  // namespace udisc
