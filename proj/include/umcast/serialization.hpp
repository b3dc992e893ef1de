// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_SERIALIZATION_HPP
#define UMCAST_SERIALIZATION_HPP

#include "umcast/allocation.hpp"
#include "umcast/model.hpp"
#include "umcast/montecarlo.hpp"
#include "umcast/pareto.hpp"
#include "umcast/scenario.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>

namespace umc
{
    using Json = nlohmann::json;

    // 17 significant digits, '.' decimal point, independent of the global locale
    std::string format_real(double v);

    // Scenario file envelope
    struct ScenarioFile
    {
        CellGeometry geometry;
        RadioParams radio;
        std::uint64_t seed = 0;
        std::vector<Position> unicast_positions;
        std::vector<std::vector<Position>> multicast_positions;
        SystemConfig config;
        FadingProfile fading;
    };

    void to_json(Json &j, const SystemConfig &v);
    void from_json(const Json &j, SystemConfig &v);
    void to_json(Json &j, const FadingProfile &v);
    void from_json(const Json &j, FadingProfile &v);
    void to_json(Json &j, const CellGeometry &v);
    void from_json(const Json &j, CellGeometry &v);
    void to_json(Json &j, const RadioParams &v);
    void from_json(const Json &j, RadioParams &v);
    void to_json(Json &j, const Position &v);
    void from_json(const Json &j, Position &v);
    void to_json(Json &j, const PilotPowers &v);
    void from_json(const Json &j, PilotPowers &v);
    void to_json(Json &j, const DownlinkPowers &v);
    void from_json(const Json &j, DownlinkPowers &v);
    void to_json(Json &j, const SeReport &v);
    void to_json(Json &j, const MmfSolution &v);
    void to_json(Json &j, const SseSolution &v);
    void to_json(Json &j, const OperatingPoint &v);
    void from_json(const Json &j, OperatingPoint &v);
    void to_json(Json &j, const ConvexityReport &v);
    void to_json(Json &j, const ValidationRecord &v);
    void from_json(const Json &j, ValidationRecord &v);
    void to_json(Json &j, const ValidationResult &v);
    void from_json(const Json &j, ValidationResult &v);
    void to_json(Json &j, const ScenarioFile &v);
    void from_json(const Json &j, ScenarioFile &v);

    // File helpers; failures raise IoError naming the path. Parse errors in read_json_file are IoErrors
    // too, while schema errors surface later as ValidationError from the from_json overloads.
    Json read_json_file(const std::string &path);
    void write_text_file(const std::string &path, const std::string &text);
    std::string dump_json(const Json &j); // 2-space indent, trailing newline

    ScenarioFile load_scenario(const std::string &path);

    // 64-bit FNV-1a of the text
    std::uint64_t fnv1a64(const std::string &text);

} // namespace umc

#endif
