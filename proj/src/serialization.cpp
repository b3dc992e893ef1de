// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace umc
{
    namespace
    {
        // Non-finite doubles have no JSON spelling; they are written as null and read back as NaN.
        Json real_or_null(double v)
        {
            return std::isfinite(v) ? Json(v) : Json(nullptr);
        }

        double real_from(const Json &j)
        {
            return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
        }
    } // namespace

    std::string format_real(double v)
    {
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        return std::string(buf, r.ptr);
    }

    void to_json(Json &j, const SystemConfig &v)
    {
        j = Json{{"n_antennas", v.n_antennas},
                 {"coherence_length", v.coherence_length},
                 {"n_unicast", v.n_unicast},
                 {"group_sizes", v.group_sizes},
                 {"pilot_length", v.pilot_length},
                 {"total_power", v.total_power},
                 {"unicast_energy_caps", v.unicast_energy_caps},
                 {"multicast_energy_caps", v.multicast_energy_caps},
                 {"sse_weights", v.sse_weights}};
    }

    void from_json(const Json &j, SystemConfig &v)
    {
        j.at("n_antennas").get_to(v.n_antennas);
        j.at("coherence_length").get_to(v.coherence_length);
        j.at("n_unicast").get_to(v.n_unicast);
        j.at("group_sizes").get_to(v.group_sizes);
        j.at("pilot_length").get_to(v.pilot_length);
        j.at("total_power").get_to(v.total_power);
        j.at("unicast_energy_caps").get_to(v.unicast_energy_caps);
        j.at("multicast_energy_caps").get_to(v.multicast_energy_caps);
        j.at("sse_weights").get_to(v.sse_weights);
    }

    void to_json(Json &j, const FadingProfile &v)
    {
        j = Json{{"unicast_gains", v.unicast_gains}, {"multicast_gains", v.multicast_gains}};
    }

    void from_json(const Json &j, FadingProfile &v)
    {
        j.at("unicast_gains").get_to(v.unicast_gains);
        j.at("multicast_gains").get_to(v.multicast_gains);
    }

    void to_json(Json &j, const CellGeometry &v)
    {
        j = Json{{"cell_radius", v.cell_radius},
                 {"exclusion_radius", v.exclusion_radius},
                 {"pathloss_exponent", v.pathloss_exponent},
                 {"attenuation_const", v.attenuation_const}};
    }

    void from_json(const Json &j, CellGeometry &v)
    {
        j.at("cell_radius").get_to(v.cell_radius);
        j.at("exclusion_radius").get_to(v.exclusion_radius);
        j.at("pathloss_exponent").get_to(v.pathloss_exponent);
        j.at("attenuation_const").get_to(v.attenuation_const);
    }

    void to_json(Json &j, const RadioParams &v)
    {
        j = Json{{"bandwidth_hz", v.bandwidth_hz},
                 {"noise_psd_dbm_hz", v.noise_psd_dbm_hz},
                 {"tx_power_watts", v.tx_power_watts}};
    }

    void from_json(const Json &j, RadioParams &v)
    {
        j.at("bandwidth_hz").get_to(v.bandwidth_hz);
        j.at("noise_psd_dbm_hz").get_to(v.noise_psd_dbm_hz);
        j.at("tx_power_watts").get_to(v.tx_power_watts);
    }

    void to_json(Json &j, const Position &v)
    {
        j = Json{{"radius_m", v.radius_m}, {"angle_rad", v.angle_rad}};
    }

    void from_json(const Json &j, Position &v)
    {
        j.at("radius_m").get_to(v.radius_m);
        j.at("angle_rad").get_to(v.angle_rad);
    }

    void to_json(Json &j, const PilotPowers &v)
    {
        j = Json{{"unicast", v.unicast}, {"multicast", v.multicast}};
    }

    void from_json(const Json &j, PilotPowers &v)
    {
        j.at("unicast").get_to(v.unicast);
        j.at("multicast").get_to(v.multicast);
    }

    void to_json(Json &j, const DownlinkPowers &v)
    {
        j = Json{{"unicast", v.unicast}, {"multicast", v.multicast}};
    }

    void from_json(const Json &j, DownlinkPowers &v)
    {
        j.at("unicast").get_to(v.unicast);
        j.at("multicast").get_to(v.multicast);
    }

    void to_json(Json &j, const SeReport &v)
    {
        j = Json{{"prelog", v.prelog},
                 {"unicast_sinr", v.unicast_sinr},
                 {"multicast_sinr", v.multicast_sinr},
                 {"unicast_se", v.unicast_se},
                 {"multicast_se", v.multicast_se},
                 {"min_multicast_se", v.min_multicast_se()}};
    }

    void to_json(Json &j, const MmfSolution &v)
    {
        j = Json{{"precoder", std::string(to_string(v.precoder))},
                 {"p_unicast", v.p_unicast},
                 {"p_multicast", v.p_multicast},
                 {"objective", v.objective},
                 {"pilot_length", v.pilot_length},
                 {"uplink_pilot_powers", v.uplink_pilot_powers},
                 {"downlink_powers", v.downlink_powers},
                 {"common_sinr", v.common_sinr},
                 {"group_b", v.group_b},
                 {"upsilon", v.upsilon},
                 {"pilot_energies", v.pilot_energies}};
    }

    void to_json(Json &j, const SseSolution &v)
    {
        j = Json{{"precoder", std::string(to_string(v.precoder))},
                 {"p_unicast", v.p_unicast},
                 {"p_multicast", v.p_multicast},
                 {"objective", v.objective},
                 {"pilot_length", v.pilot_length},
                 {"uplink_pilot_powers", v.uplink_pilot_powers},
                 {"downlink_powers", v.downlink_powers},
                 {"water_level", real_or_null(v.water_level)},
                 {"effective_vars", v.effective_vars},
                 {"offsets", v.offsets}};
    }

    void to_json(Json &j, const OperatingPoint &v)
    {
        j = Json{{"pilot_length", v.config.pilot_length}, {"pilot_powers", v.pilots}, {"downlink_powers", v.downlink}};
    }

    // The config inside an OperatingPoint is not serialized; callers re-attach it from the scenario.
    void from_json(const Json &j, OperatingPoint &v)
    {
        j.at("pilot_length").get_to(v.config.pilot_length);
        j.at("pilot_powers").get_to(v.pilots);
        j.at("downlink_powers").get_to(v.downlink);
    }

    void to_json(Json &j, const ConvexityReport &v)
    {
        j = Json{{"is_concave_boundary", v.is_concave_boundary},
                 {"worst_violation", v.worst_violation},
                 {"scale", v.scale},
                 {"worst_index", v.worst_index}};
    }

    void to_json(Json &j, const ValidationRecord &v)
    {
        j = Json{{"kind", v.kind},
                 {"index", v.index},
                 {"closed_form", v.closed_form},
                 {"empirical", v.empirical},
                 {"ci_halfwidth", v.ci_halfwidth},
                 {"z", real_or_null(v.z)}};
        if (v.kind == "multicast")
        {
            j["group"] = v.group;
            j["member"] = v.member;
        }
    }

    void from_json(const Json &j, ValidationRecord &v)
    {
        j.at("kind").get_to(v.kind);
        j.at("index").get_to(v.index);
        j.at("closed_form").get_to(v.closed_form);
        j.at("empirical").get_to(v.empirical);
        j.at("ci_halfwidth").get_to(v.ci_halfwidth);
        v.z = real_from(j.at("z"));
        v.group = j.value("group", -1);
        v.member = j.value("member", -1);
    }

    void to_json(Json &j, const ValidationResult &v)
    {
        j = Json{{"precoder", std::string(to_string(v.precoder))},
                 {"n_trials", v.n_trials},
                 {"n_discarded", v.n_discarded},
                 {"seed", v.seed},
                 {"pass_rate", v.pass_rate},
                 {"passed", v.passed},
                 {"records", v.records}};
    }

    void from_json(const Json &j, ValidationResult &v)
    {
        v.precoder = parse_precoder(j.at("precoder").get<std::string>());
        j.at("n_trials").get_to(v.n_trials);
        j.at("n_discarded").get_to(v.n_discarded);
        j.at("seed").get_to(v.seed);
        j.at("pass_rate").get_to(v.pass_rate);
        j.at("passed").get_to(v.passed);
        j.at("records").get_to(v.records);
    }

    void to_json(Json &j, const ScenarioFile &v)
    {
        j = Json{{"geometry", v.geometry},
                 {"radio", v.radio},
                 {"seed", v.seed},
                 {"positions", Json{{"unicast", v.unicast_positions}, {"multicast", v.multicast_positions}}},
                 {"config", v.config},
                 {"fading", v.fading}};
    }

    void from_json(const Json &j, ScenarioFile &v)
    {
        j.at("config").get_to(v.config);
        j.at("fading").get_to(v.fading);
        if (j.contains("geometry"))
            j.at("geometry").get_to(v.geometry);
        if (j.contains("radio"))
            j.at("radio").get_to(v.radio);
        v.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("positions"))
        {
            j.at("positions").at("unicast").get_to(v.unicast_positions);
            j.at("positions").at("multicast").get_to(v.multicast_positions);
        }
    }

    Json read_json_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open " + path);
        try
        {
            return Json::parse(in);
        }
        catch (const Json::parse_error &e)
        {
            throw IoError(path + ": " + e.what());
        }
    }

    void write_text_file(const std::string &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + path + " for writing");
        out << text;
        out.flush();
        if (!out)
            throw IoError("write failed for " + path);
    }

    std::string dump_json(const Json &j)
    {
        return j.dump(2) + "\n";
    }

    ScenarioFile load_scenario(const std::string &path)
    {
        const Json j = read_json_file(path);
        ScenarioFile s;
        try
        {
            j.get_to(s);
        }
        catch (const Json::exception &e)
        {
            throw ValidationError("scenario", std::string("malformed scenario file ") + path + ": " + e.what());
        }
        require_valid(s.config, s.fading);
        return s;
    }

    std::uint64_t fnv1a64(const std::string &text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

} // namespace umc
