// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_CLI_COMMANDS_HPP
#define UMCAST_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace umc::cli
{
    // Process exit codes
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_invalid = 1,  // validation failure, infeasible problem, or failed closed-form validation
        exit_io = 2,
        exit_internal = 3,
    };

    std::string tool_version();

    // Entry point behind the umcast executable. args excludes the program name.
    // Every command writing --out PATH also writes PATH.manifest.json.
    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace umc::cli

#endif
