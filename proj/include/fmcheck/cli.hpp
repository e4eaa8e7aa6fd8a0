#pragma once

/**
 * @file cli.hpp
 * @brief The `fmcheck` command line.
 *
 *     fmcheck [--backend brute|dpll|auto] [--json] [--ascii] <command> ...
 *
 *     check MODEL CONFIG       per-conjunct evaluation of a configuration
 *     analyze MODEL [--count]  void, dead and core features
 *     configure MODEL          interactive decisions read from stdin
 *     encode MODEL [--pretty|--dimacs]
 *     count MODEL
 *     enumerate MODEL [--limit N]
 *     serve DIR [--host H] [--port P] [--cors-origin O]
 *
 * FMCHECK_COUNT_CAP overrides the counting cap of 24 features.
 */

#include <iosfwd>
#include <string>
#include <vector>

namespace fmcheck::cli {

enum ExitCode : int {
    kSuccess = 0,
    kNegative = 1,  ///< invalid configuration, void model, conflict
    kUsage = 2,     ///< bad arguments, unreadable or unparseable input
    kLimit = 3,     ///< model above the counting cap
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace fmcheck::cli
