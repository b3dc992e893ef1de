// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/cli/commands.hpp"

#include "umcast/allocation.hpp"
#include "umcast/cli/figures.hpp"
#include "umcast/montecarlo.hpp"
#include "umcast/pareto.hpp"
#include "umcast/scenario.hpp"
#include "umcast/serialization.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#ifndef UMCAST_VERSION
#define UMCAST_VERSION "0.0.0"
#endif

namespace umc::cli
{
    namespace
    {
        struct PhysicalOptions
        {
            CellGeometry geometry;
            RadioParams radio;
            int coherence_length = 200;
            double energy_fraction = 0.1;
        };

        struct SplitOptions
        {
            std::optional<double> p_un;
            std::optional<std::string> ratio;
        };

        void add_physical(CLI::App *app, PhysicalOptions &o)
        {
            app->add_option("--cell-radius", o.geometry.cell_radius, "Cell radius in meters")->capture_default_str();
            app->add_option("--exclusion-radius", o.geometry.exclusion_radius, "Radius of the user-free inner circle")
                ->capture_default_str();
            app->add_option("--pathloss-exponent", o.geometry.pathloss_exponent)->capture_default_str();
            app->add_option("--attenuation-const", o.geometry.attenuation_const, "Path loss at unit distance")
                ->capture_default_str();
            app->add_option("--bandwidth", o.radio.bandwidth_hz, "Bandwidth in Hz")->capture_default_str();
            app->add_option("--noise-psd", o.radio.noise_psd_dbm_hz, "Noise PSD in dBm/Hz")->capture_default_str();
            app->add_option("--tx-power", o.radio.tx_power_watts, "Total downlink power in watts")
                ->capture_default_str();
            app->add_option("--coherence", o.coherence_length, "Coherence interval T in symbols")->capture_default_str();
            app->add_option("--energy-fraction", o.energy_fraction, "Pilot energy caps as a fraction of T/(W sigma^2)")
                ->capture_default_str();
        }

        void add_split(CLI::App *app, SplitOptions &o)
        {
            auto *p = app->add_option("--p-un", o.p_un, "Unicast downlink power P_un, normalized units");
            auto *r = app->add_option("--split-ratio", o.ratio, "P_un:P_mu ratio, e.g. 1:1");
            p->excludes(r);
        }

        void require_valid_geometry(const CellGeometry &g)
        {
            if (auto rep = validate_geometry(g); !rep.ok())
                throw ValidationError(std::move(rep.violations));
        }

        void require_valid_radio(const RadioParams &r)
        {
            if (auto rep = validate_radio(r); !rep.ok())
                throw ValidationError(std::move(rep.violations));
        }

        double parse_part(const std::string &s)
        {
            double v = 0.0;
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (r.ec != std::errc() || r.ptr != s.data() + s.size())
                throw ValidationError("split_ratio", "expected A:B with non-negative numbers", s);
            return v;
        }

        // No flag: an even split, or everything to the only kind of user present.
        double resolve_p_un(const SystemConfig &cfg, const SplitOptions &o)
        {
            const double p = cfg.total_power;
            // strict here: the solvers' rounding slack is relative to P and would swallow small negatives
            if (o.p_un)
            {
                if (!(*o.p_un >= 0.0 && *o.p_un <= p))
                    throw ValidationError("p_un", "must lie in [0, total_power]", format_real(*o.p_un));
                return *o.p_un;
            }
            if (o.ratio)
            {
                const auto colon = o.ratio->find(':');
                if (colon == std::string::npos)
                    throw ValidationError("split_ratio", "expected A:B", *o.ratio);
                const double a = parse_part(o.ratio->substr(0, colon));
                const double b = parse_part(o.ratio->substr(colon + 1));
                if (!(a >= 0.0 && b >= 0.0 && a + b > 0.0))
                    throw ValidationError("split_ratio", "parts must be non-negative and not both zero", *o.ratio);
                return b == 0.0 ? p : p * a / (a + b);
            }
            if (cfg.n_unicast == 0)
                return 0.0;
            if (cfg.n_groups() == 0)
                return p;
            return 0.5 * p;
        }

        std::string utc_now()
        {
            const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            std::tm tm{};
            gmtime_r(&t, &tm);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
            return buf;
        }

        std::string hex64(std::uint64_t v)
        {
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }

        std::string file_hash(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw IoError("cannot open " + path);
            std::ostringstream ss;
            ss << in.rdbuf();
            return hex64(fnv1a64(ss.str()));
        }

        std::uint64_t fresh_seed()
        {
            std::random_device rd;
            return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }

        // Records what is needed to reproduce an output: the resolved inputs, their hash and the seeds.
        struct Manifest
        {
            std::string command;
            std::vector<std::string> arguments;
            std::string started_at = utc_now();
            Json resolved = Json::object();
            Json seeds = Json::object();
            Json inputs = Json::object();

            void write(const std::string &out_path) const
            {
                const std::string hash_source = dump_json(Json{{"command", command}, {"resolved", resolved},
                                                               {"seeds", seeds}, {"inputs", inputs}});
                Json m{{"command", command},
                       {"tool_version", tool_version()},
                       {"arguments", arguments},
                       {"resolved", resolved},
                       {"seeds", seeds},
                       {"inputs", inputs},
                       {"outputs", Json::array({out_path})},
                       {"config_hash", hex64(fnv1a64(hash_source))},
                       {"started_at", started_at},
                       {"finished_at", utc_now()}};
                write_text_file(out_path + ".manifest.json", dump_json(m));
            }
        };

        ScenarioFile load_with_manifest(const std::string &path, Manifest &m)
        {
            auto s = load_scenario(path);
            m.inputs["scenario"] = Json{{"path", path}, {"fnv1a64", file_hash(path)}};
            return s;
        }

        // ---- commands -------------------------------------------------------------------

        struct ScenarioArgs
        {
            PhysicalOptions phys;
            std::optional<std::uint64_t> seed;
            std::string out;
            int antennas = 100;
            int unicast = 50;
            int groups = 10;
            int group_size = 100;
            std::vector<int> group_sizes;
            std::optional<int> pilot_length;
        };

        int cmd_scenario(const ScenarioArgs &a, Manifest &m, std::ostream &out)
        {
            require_valid_geometry(a.phys.geometry);
            require_valid_radio(a.phys.radio);

            PhysicalSetup setup;
            setup.n_antennas = a.antennas;
            setup.coherence_length = a.phys.coherence_length;
            setup.n_unicast = a.unicast;
            setup.group_sizes = a.group_sizes.empty() ? std::vector<int>(std::max(a.groups, 0), a.group_size)
                                                      : a.group_sizes;
            setup.pilot_length = a.pilot_length;
            setup.energy_fraction = a.phys.energy_fraction;

            ScenarioFile s;
            s.geometry = a.phys.geometry;
            s.radio = a.phys.radio;
            s.seed = a.seed.value_or(fresh_seed());
            s.config = normalize_powers(a.phys.radio, setup);
            auto drop = place_users(s.geometry, setup.n_unicast, setup.group_sizes, s.seed);
            s.fading = std::move(drop.fading);
            s.unicast_positions = std::move(drop.unicast_positions);
            s.multicast_positions = std::move(drop.multicast_positions);
            require_valid(s.config, s.fading);

            write_text_file(a.out, dump_json(s));
            m.seeds["placement"] = s.seed;
            m.resolved = Json{{"geometry", s.geometry}, {"radio", s.radio}, {"config", s.config}};
            m.write(a.out);
            out << "scenario: N=" << s.config.n_antennas << " U=" << s.config.n_unicast << " G=" << s.config.n_groups()
                << " seed=" << s.seed << " -> " << a.out << '\n';
            return exit_ok;
        }

        struct SolveArgs
        {
            std::string scenario;
            std::string precoder = "mrt";
            SplitOptions split;
            std::string out;
        };

        int cmd_solve(bool mmf, const SolveArgs &a, Manifest &m, std::ostream &out)
        {
            const Precoder pc = parse_precoder(a.precoder);
            const auto s = load_with_manifest(a.scenario, m);
            const double p_un = resolve_p_un(s.config, a.split);

            Json doc{{"command", mmf ? "mmf" : "sse"}, {"precoder", std::string(to_string(pc))}};
            OperatingPoint op;
            double objective = 0.0;
            if (mmf)
            {
                const auto sol = solve_mmf(s.config, s.fading, p_un, pc);
                op = make_operating_point(s.config, &sol, nullptr);
                objective = sol.objective;
                doc["solution"] = sol;
            }
            else
            {
                const auto sol = solve_sse(s.config, s.fading, s.config.total_power - p_un, pc);
                op = make_operating_point(s.config, nullptr, &sol);
                objective = sol.objective;
                doc["solution"] = sol;
            }
            doc["objective"] = objective;
            doc["operating_point"] = op;
            doc["se_report"] = score_operating_point(op, s.fading, pc);
            write_text_file(a.out, dump_json(doc));

            m.resolved = Json{{"precoder", std::string(to_string(pc))}, {"p_unicast", p_un}};
            m.write(a.out);
            out << (mmf ? "mmf" : "sse") << ' ' << to_string(pc) << ": objective=" << format_real(objective) << " -> "
                << a.out << '\n';
            return exit_ok;
        }

        struct ParetoArgs
        {
            std::string scenario;
            std::string precoder = "mrt";
            int points = 21;
            int threads = 1;
            std::string out;
            std::optional<std::string> convexity;
        };

        int cmd_pareto(const ParetoArgs &a, Manifest &m, std::ostream &out)
        {
            const Precoder pc = parse_precoder(a.precoder);
            const auto s = load_with_manifest(a.scenario, m);
            const auto b = sweep_boundary(s.config, s.fading, pc, a.points, a.threads);

            std::ostringstream csv;
            write_boundary_csv(csv, b);
            write_text_file(a.out, csv.str());
            m.resolved = Json{{"precoder", std::string(to_string(pc))}, {"points", a.points}};
            m.write(a.out);

            out << "pareto " << to_string(pc) << ": " << b.points.size() << " points -> " << a.out << '\n';
            if (a.convexity)
            {
                const auto rep = check_convexity(b);
                write_text_file(*a.convexity, dump_json(Json(rep)));
                m.write(*a.convexity);
                out << "convexity: " << (rep.is_concave_boundary ? "concave" : "NOT concave")
                    << " worst_violation=" << format_real(rep.worst_violation) << '\n';
            }
            return exit_ok;
        }

        struct ValidateArgs
        {
            std::string scenario;
            std::string precoder = "mrt";
            SplitOptions split;
            int trials = 10000;
            std::optional<std::uint64_t> seed;
            int threads = 1;
            std::string allocation = "uniform";
            std::string out;
        };

        int cmd_validate(const ValidateArgs &a, Manifest &m, std::ostream &out)
        {
            const Precoder pc = parse_precoder(a.precoder);
            if (a.trials < 100)
                throw ValidationError("trials", "at least 100 trials are required", std::to_string(a.trials));
            if (a.allocation != "uniform" && a.allocation != "optimal")
                throw ValidationError("allocation", "expected uniform or optimal", a.allocation);

            const auto s = load_with_manifest(a.scenario, m);
            const auto &cfg = s.config;
            const double p_un = resolve_p_un(cfg, a.split);
            if (!(p_un >= 0.0 && p_un <= cfg.total_power))
                throw ValidationError("p_un", "must lie in [0, total_power]", format_real(p_un));
            const double p_mu = cfg.total_power - p_un;

            OperatingPoint op;
            if (a.allocation == "uniform")
            {
                op.config = cfg;
                op.pilots = max_energy_pilots(cfg);
                op.downlink.unicast.assign(cfg.n_unicast, cfg.n_unicast > 0 ? p_un / cfg.n_unicast : 0.0);
                op.downlink.multicast.assign(cfg.n_groups(), cfg.n_groups() > 0 ? p_mu / cfg.n_groups() : 0.0);
            }
            else
            {
                std::optional<MmfSolution> mmf;
                std::optional<SseSolution> sse;
                if (cfg.n_groups() > 0)
                    mmf = solve_mmf(cfg, s.fading, p_un, pc);
                if (cfg.n_unicast > 0)
                    sse = solve_sse(cfg, s.fading, p_mu, pc);
                op = make_operating_point(cfg, mmf ? &*mmf : nullptr, sse ? &*sse : nullptr);
            }

            MonteCarloOptions mc;
            mc.n_trials = a.trials;
            mc.seed = a.seed.value_or(fresh_seed());
            mc.n_threads = a.threads;
            const auto result = validate_closed_form(op.config, s.fading, op.pilots, op.downlink, pc, mc);

            Json doc{{"command", "validate"},
                     {"allocation", a.allocation},
                     {"p_unicast", p_un},
                     {"p_multicast", p_mu},
                     {"operating_point", op},
                     {"report", result}};
            write_text_file(a.out, dump_json(doc));
            m.seeds["monte_carlo"] = mc.seed;
            m.resolved = Json{{"precoder", std::string(to_string(pc))}, {"p_unicast", p_un}, {"trials", a.trials},
                              {"allocation", a.allocation}};
            m.write(a.out);

            out << "validate " << to_string(pc) << ": pass_rate=" << format_real(result.pass_rate) << " over "
                << result.records.size() << " users, " << result.n_trials << " trials ("
                << result.n_discarded << " discarded) -> " << a.out << '\n';
            return result.passed ? exit_ok : exit_invalid;
        }

        struct FigureArgs
        {
            std::string id;
            PhysicalOptions phys;
            std::vector<int> antennas, groups, group_sizes, unicast;
            std::optional<std::string> precoder;
            std::optional<int> drops, points;
            std::optional<std::uint64_t> seed;
            int threads = 1;
            std::string out;
        };

        int cmd_figure(const FigureArgs &a, Manifest &m, std::ostream &out)
        {
            const auto id = parse_figure_id(a.id);
            auto grid = default_figure_grid(id);
            grid.base.geometry = a.phys.geometry;
            grid.base.radio = a.phys.radio;
            grid.base.coherence_length = a.phys.coherence_length;
            grid.base.energy_fraction = a.phys.energy_fraction;
            require_valid_geometry(grid.base.geometry);
            require_valid_radio(grid.base.radio);
            if (!a.antennas.empty())
                grid.antennas = a.antennas;
            if (!a.groups.empty())
                grid.groups = a.groups;
            if (!a.group_sizes.empty())
                grid.group_sizes = a.group_sizes;
            if (!a.unicast.empty())
                grid.unicast = a.unicast;
            if (a.precoder)
                grid.precoders = {parse_precoder(*a.precoder)};
            if (a.drops)
                grid.drops = *a.drops;
            if (a.points)
                grid.points = *a.points;
            grid.seed = a.seed.value_or(fresh_seed());
            grid.n_threads = a.threads;

            write_text_file(a.out, figure_csv(id, grid));
            std::vector<std::string> precoders;
            for (auto p : grid.precoders)
                precoders.emplace_back(to_string(p));
            m.seeds["drops"] = grid.seed;
            m.resolved = Json{{"figure", to_string(id)},     {"geometry", grid.base.geometry},
                              {"radio", grid.base.radio},     {"coherence_length", grid.base.coherence_length},
                              {"energy_fraction", grid.base.energy_fraction},
                              {"antennas", grid.antennas},    {"groups", grid.groups},
                              {"group_sizes", grid.group_sizes}, {"unicast", grid.unicast},
                              {"precoders", precoders},       {"drops", grid.drops},
                              {"points", grid.points}};
            m.write(a.out);
            out << to_string(id) << ": " << grid.drops << " drop(s) per cell, seed=" << grid.seed << " -> " << a.out
                << '\n';
            return exit_ok;
        }
    } // namespace

    std::string tool_version()
    {
        return UMCAST_VERSION;
    }

    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Joint unicast and multi-group multicast massive MIMO: closed-form SE, optimal allocation, "
                     "Pareto sweeps and Monte Carlo validation",
                     "umcast"};
        app.require_subcommand(1);
        app.set_version_flag("--version", tool_version());

        ScenarioArgs sa;
        auto *sc = app.add_subcommand("scenario", "Drop users in a cell and write a normalized scenario file");
        add_physical(sc, sa.phys);
        sc->add_option("--seed", sa.seed, "Placement seed; drawn at random and recorded when omitted");
        sc->add_option("--out", sa.out, "Scenario JSON path")->required();
        sc->add_option("--antennas", sa.antennas, "Base station antennas N")->capture_default_str();
        sc->add_option("--unicast", sa.unicast, "Unicast users U")->capture_default_str();
        sc->add_option("--groups", sa.groups, "Multicast groups G")->capture_default_str();
        sc->add_option("--group-size", sa.group_size, "Users per group K")->capture_default_str();
        sc->add_option("--group-sizes", sa.group_sizes, "Explicit group sizes; overrides --groups/--group-size")
            ->delimiter(',');
        sc->add_option("--pilot-length", sa.pilot_length, "Pilot length tau; defaults to U + G");

        SolveArgs ma, ssa;
        auto *mc = app.add_subcommand("mmf", "Optimal max-min fair multicast allocation for a fixed P_un");
        auto *ss = app.add_subcommand("sse", "Optimal weighted sum-SE unicast allocation for a fixed P_mu");
        for (auto [cmd, a] : {std::pair{mc, &ma}, std::pair{ss, &ssa}})
        {
            cmd->add_option("--scenario", a->scenario, "Scenario JSON")->required();
            cmd->add_option("--precoder", a->precoder, "mrt or zf")->capture_default_str();
            add_split(cmd, a->split);
            cmd->add_option("--out", a->out, "Result JSON path")->required();
        }

        ParetoArgs pa;
        auto *pc = app.add_subcommand("pareto", "Sweep the Pareto boundary over P_un in [0, P]");
        pc->add_option("--scenario", pa.scenario, "Scenario JSON")->required();
        pc->add_option("--precoder", pa.precoder, "mrt or zf")->capture_default_str();
        pc->add_option("--points", pa.points, "Number of boundary points")->capture_default_str();
        pc->add_option("--threads", pa.threads, "Worker threads")->capture_default_str();
        pc->add_option("--out", pa.out, "Boundary CSV path")->required();
        pc->add_option("--convexity", pa.convexity, "Also write the convexity report JSON here");

        ValidateArgs va;
        auto *vc = app.add_subcommand("validate", "Check the closed-form SINRs against Monte Carlo simulation");
        vc->add_option("--scenario", va.scenario, "Scenario JSON")->required();
        vc->add_option("--precoder", va.precoder, "mrt or zf")->capture_default_str();
        add_split(vc, va.split);
        vc->add_option("--trials", va.trials, "Monte Carlo trials (>= 100)")->capture_default_str();
        vc->add_option("--seed", va.seed, "Trial seed; drawn at random and recorded when omitted");
        vc->add_option("--threads", va.threads, "Worker threads")->capture_default_str();
        vc->add_option("--allocation", va.allocation, "uniform or optimal power allocation")->capture_default_str();
        vc->add_option("--out", va.out, "Validation report JSON path")->required();

        FigureArgs fa;
        auto *fc = app.add_subcommand("figure", "Write the data grid behind one of the result figures");
        fc->add_option("id", fa.id, "fig2, fig3 or fig4")->required();
        add_physical(fc, fa.phys);
        fc->add_option("--antennas", fa.antennas, "N axis")->delimiter(',');
        fc->add_option("--groups", fa.groups, "G axis (fig2) or fixed G")->delimiter(',');
        fc->add_option("--group-sizes", fa.group_sizes, "K axis (fig2) or fixed K")->delimiter(',');
        fc->add_option("--unicast", fa.unicast, "U axis (fig3) or fixed U")->delimiter(',');
        fc->add_option("--precoder", fa.precoder, "Restrict to mrt or zf");
        fc->add_option("--drops", fa.drops, "User drops averaged per cell");
        fc->add_option("--points", fa.points, "Boundary points (fig4)");
        fc->add_option("--seed", fa.seed, "Drop seed; drawn at random and recorded when omitted");
        fc->add_option("--threads", fa.threads, "Worker threads")->capture_default_str();
        fc->add_option("--out", fa.out, "CSV path")->required();

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::Success &e)
        {
            app.exit(e, out, err);
            return exit_ok;
        }
        catch (const CLI::ParseError &e)
        {
            app.exit(e, out, err);
            return exit_invalid;
        }

        Manifest m;
        m.arguments = args;
        try
        {
            if (*sc)
            {
                m.command = "scenario";
                return cmd_scenario(sa, m, out);
            }
            if (*mc)
            {
                m.command = "mmf";
                return cmd_solve(true, ma, m, out);
            }
            if (*ss)
            {
                m.command = "sse";
                return cmd_solve(false, ssa, m, out);
            }
            if (*pc)
            {
                m.command = "pareto";
                return cmd_pareto(pa, m, out);
            }
            if (*vc)
            {
                m.command = "validate";
                return cmd_validate(va, m, out);
            }
            if (*fc)
            {
                m.command = "figure";
                return cmd_figure(fa, m, out);
            }
        }
        catch (const ValidationError &e)
        {
            err << "error: " << e.what() << '\n';
            return exit_invalid;
        }
        catch (const InfeasibleError &e)
        {
            err << "infeasible: " << e.what() << '\n';
            return exit_invalid;
        }
        catch (const IoError &e)
        {
            err << "i/o error: " << e.what() << '\n';
            return exit_io;
        }
        catch (const std::exception &e)
        {
            err << "internal error: " << e.what() << '\n';
            return exit_internal;
        }
        return exit_internal;
    }

} // namespace umc::cli
