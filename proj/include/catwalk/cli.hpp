#pragma once

#include <ostream>

namespace catwalk
{
//! Exit codes of the command-line tool.
enum ExitCode : int
{
    kExitOk = 0,
    kExitFailed = 1,  //!< a requested verification failed
    kExitUsage = 2,   //!< bad flags or parameters
    kExitIo = 3,      //!< output could not be written
};

/*!
 * Parse and run one command: simulate, figure1, verify <1..5>, invariant.
 *
 * Reports go to --out when given, else to `out`; diagnostics go to `err`.
 */
int run_cli(int argc, char const* const* argv, std::ostream& out, std::ostream& err);
}  // namespace catwalk
