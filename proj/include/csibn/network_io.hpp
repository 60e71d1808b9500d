#ifndef CSIBN_NETWORK_IO_HPP
#define CSIBN_NETWORK_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include "csibn/model.hpp"

namespace csibn {

/// Parses a JSON network document and validates it.
/// Throws ParseError for malformed JSON and SemanticError for any invariant
/// violation (the message lists every violation found).
Network parse_network(std::string_view text);

/// Parses without validating invariants. Tree branches are put in declared
/// value order when their labels match the test variable; otherwise they are
/// kept as written so validate() can report them.
Network parse_network_unchecked(std::string_view text);

/// Canonical JSON document (two-space indent, trailing newline).
std::string serialize_network(const Network& net);

Network load_network(const std::string& path);
Network load_network_unchecked(const std::string& path);

/// `Var=value,Var=value`; whitespace around tokens is ignored. Every variable
/// and value must exist in `net`.
Context parse_context(std::string_view text, const Network& net);

/// `A,B,C`; every variable must exist in `net`. Empty text gives an empty set.
std::vector<std::string> parse_variable_list(std::string_view text, const Network& net);

}  // namespace csibn

#endif  // CSIBN_NETWORK_IO_HPP
