#pragma once

#include <ostream>
#include <string>

namespace flexgate::harness {

// Prints one status line per block; returns 0 when the whole chain checks
// out, 1 with the first bad index otherwise, 2 on unreadable input.
int verify_ledger_cli(const std::string& path, std::ostream& out);

// Listens on the multicast group for duration_s and prints one line per
// decoded frame. Decode failures are counted, not fatal. Returns 0 unless
// the socket cannot be opened.
int goose_dump_cli(const std::string& group, int port, double duration_s, std::ostream& out);

}  // namespace flexgate::harness
