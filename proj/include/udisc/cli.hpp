#pragma once

#include <iosfwd>

namespace udisc {

/// Entry point of the `udisc` tool. Returns 0 on success, 1 for bad
/// arguments or configuration, 2 when a run fails.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace udisc
