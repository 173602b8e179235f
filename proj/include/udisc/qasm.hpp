#pragma once

#include <string>
#include <string_view>

#include "udisc/circuit.hpp"

namespace udisc {

/// OpenQASM 3 text using only x, sx, rz, h, cx and ecr, one gate per line in
/// circuit order, then `c[i] = measure q[k];` for the i-th measured qubit k.
/// Angles are printed with 17 significant digits so parse_qasm restores them
/// exactly.
std::string emit_qasm(const Circuit& c);

/// Reads the subset written by emit_qasm.
Circuit parse_qasm(std::string_view text);

}  // namespace udisc
