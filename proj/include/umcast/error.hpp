// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_ERROR_HPP
#define UMCAST_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace umc
{
    // One failed invariant, addressed by a JSON-style field path such as "multicast_gains[1][3]"
    struct Violation
    {
        std::string field;
        std::string message;
        std::string value;
    };

    // Input rejected by validation (config, fading, pilot powers, solver preconditions)
    class ValidationError : public std::invalid_argument
    {
    public:
        explicit ValidationError(std::vector<Violation> violations);
        ValidationError(std::string field, std::string message, std::string value = {});

        const std::vector<Violation> &violations() const noexcept { return violations_; }

    private:
        std::vector<Violation> violations_;
    };

    // Problem is well formed but has no solution under the requested precoder (e.g. ZF with N <= G + U)
    class InfeasibleError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Numerically degenerate Monte Carlo trial (ill-conditioned Gram matrix)
    class RankDeficientError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // File system or parse failure, with the offending path in the message
    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    std::string format_violations(const std::vector<Violation> &violations);

} // namespace umc

#endif
