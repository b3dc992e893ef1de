// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/montecarlo.hpp"
#include "umcast/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <thread>

namespace umc
{
    namespace
    {
        constexpr int kChunk = 256;
        constexpr double kMaxGramCondition = 1e12;

        void fill_column(RandomStream &rs, arma::cx_mat &m, arma::uword col, double variance)
        {
            rs.fill_complex_normal(std::span<std::complex<double>>(m.colptr(col), m.n_rows), variance);
        }

        void check_pilots(const SystemConfig &cfg, const PilotPowers &pilots)
        {
            auto report = validate_pilot_powers(cfg, pilots);
            if (!report.ok())
                throw ValidationError(std::move(report.violations));
        }

        // Running moments of x = (Re d, Im d, s) plus the per-column received powers.
        struct Moments
        {
            double n = 0.0;
            std::array<double, 3> mean{};
            std::array<double, 9> m2{};
            std::vector<double> column_sum;

            void merge(const Moments &o)
            {
                if (o.n == 0.0)
                    return;
                if (column_sum.empty())
                    column_sum.assign(o.column_sum.size(), 0.0);
                for (std::size_t c = 0; c < column_sum.size(); ++c)
                    column_sum[c] += o.column_sum[c];
                if (n == 0.0)
                {
                    n = o.n;
                    mean = o.mean;
                    m2 = o.m2;
                    return;
                }
                const double total = n + o.n;
                std::array<double, 3> delta{};
                for (int i = 0; i < 3; ++i)
                    delta[i] = o.mean[i] - mean[i];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        m2[3 * i + j] += o.m2[3 * i + j] + delta[i] * delta[j] * n * o.n / total;
                for (int i = 0; i < 3; ++i)
                    mean[i] += delta[i] * o.n / total;
                n = total;
            }
        };

        struct ChunkResult
        {
            std::vector<Moments> users;
            int discarded = 0;
        };

        // All user channels side by side: unicast users first, then each group's members.
        arma::cx_mat stack_channels(const ChannelDraw &draw)
        {
            arma::cx_mat h = draw.unicast;
            for (const auto &g : draw.multicast)
                h = arma::join_rows(h, g);
            return h;
        }

        std::vector<int> own_columns(const SystemConfig &cfg)
        {
            std::vector<int> own;
            for (int m = 0; m < cfg.n_unicast; ++m)
                own.push_back(m);
            for (int j = 0; j < cfg.n_groups(); ++j)
                for (int k = 0; k < cfg.group_sizes[j]; ++k)
                    own.push_back(cfg.n_unicast + j);
            return own;
        }

        ChunkResult run_chunk(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                              const DownlinkPowers &powers, const EstimationStats &stats, Precoder precoder,
                              const MonteCarloOptions &options, const std::vector<int> &own, int first, int last)
        {
            const std::size_t n_users = own.size();
            const int n_cols = cfg.n_streams();
            std::vector<std::vector<double>> col_sum(n_users, std::vector<double>(n_cols, 0.0));

            ChunkResult out;
            std::vector<std::vector<std::array<double, 3>>> per_user(n_users);
            for (int t = first; t < last; ++t)
            {
                const auto draw = draw_channels(cfg, fading, options.seed, t);
                const auto noise = draw_noise(cfg, options.seed, t);
                const auto est = mmse_estimate(cfg, fading, pilots, draw, noise);

                PrecoderSet pre;
                try
                {
                    pre = precoder == Precoder::mrt ? build_mrt_precoders(cfg, est, powers, stats)
                                                    : build_zf_precoders(cfg, est, powers, stats);
                }
                catch (const RankDeficientError &)
                {
                    ++out.discarded;
                    continue;
                }

                const arma::cx_mat cols = arma::join_rows(pre.unicast, pre.multicast);
                // row u holds h_u^H c for every precoder column c
                const arma::cx_mat gains = stack_channels(draw).t() * cols;
                for (std::size_t u = 0; u < n_users; ++u)
                {
                    double s = 0.0;
                    for (int c = 0; c < n_cols; ++c)
                    {
                        const double p = std::norm(gains(u, c));
                        col_sum[u][c] += p;
                        s += p;
                    }
                    const auto d = gains(u, own[u]);
                    per_user[u].push_back({d.real(), d.imag(), s});
                }
            }

            out.users.resize(n_users);
            for (std::size_t u = 0; u < n_users; ++u)
            {
                auto &m = out.users[u];
                m.column_sum = std::move(col_sum[u]);
                const auto &xs = per_user[u];
                m.n = static_cast<double>(xs.size());
                if (xs.empty())
                    continue;
                for (const auto &x : xs)
                    for (int i = 0; i < 3; ++i)
                        m.mean[i] += x[i];
                for (int i = 0; i < 3; ++i)
                    m.mean[i] /= m.n;
                for (const auto &x : xs)
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            m.m2[3 * i + j] += (x[i] - m.mean[i]) * (x[j] - m.mean[j]);
            }
            return out;
        }

        TrialStatistics finish(const Moments &m, int discarded)
        {
            TrialStatistics t;
            t.n_trials = static_cast<int>(m.n);
            t.n_discarded = discarded;
            const double a = m.mean[0], b = m.mean[1], s = m.mean[2];
            t.desired_mean_re = a;
            t.desired_mean_im = b;
            t.desired_power_mean = a * a + b * b;
            t.received_power_mean = s;
            for (double c : m.column_sum)
                t.interference_means.push_back(c / m.n);

            const double denom = 1.0 + s - t.desired_power_mean;
            t.empirical_sinr = t.desired_power_mean / denom;
            if (m.n >= 2.0)
            {
                const double d2 = denom * denom;
                const std::array<double, 3> grad{2.0 * a * (1.0 + s) / d2, 2.0 * b * (1.0 + s) / d2,
                                                 -t.desired_power_mean / d2};
                double var = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        var += grad[i] * grad[j] * m.m2[3 * i + j] / (m.n - 1.0);
                t.standard_error = std::sqrt(std::max(var, 0.0) / m.n);
                t.confidence_halfwidth = 1.96 * t.standard_error;
            }
            return t;
        }

        DownlinkPowers scaled(const DownlinkPowers &powers, double factor)
        {
            DownlinkPowers p = powers;
            for (auto &v : p.unicast)
                v *= factor;
            for (auto &v : p.multicast)
                v *= factor;
            return p;
        }
    } // namespace

    arma::cx_vec EstimateSet::member(int g, int k) const
    {
        return member_scale.at(g).at(k) * group.col(g);
    }

    ChannelDraw draw_channels(const SystemConfig &cfg, const FadingProfile &fading, std::uint64_t seed,
                              std::uint64_t index)
    {
        require_valid(cfg, fading);
        RandomStream rs(seed, StreamKind::channel, index);
        const auto n = static_cast<arma::uword>(cfg.n_antennas);

        ChannelDraw d;
        d.unicast.set_size(n, cfg.n_unicast);
        for (int u = 0; u < cfg.n_unicast; ++u)
            fill_column(rs, d.unicast, u, fading.unicast_gains[u]);
        for (int g = 0; g < cfg.n_groups(); ++g)
        {
            auto &m = d.multicast.emplace_back(n, cfg.group_sizes[g]);
            for (int k = 0; k < cfg.group_sizes[g]; ++k)
                fill_column(rs, m, k, fading.multicast_gains[g][k]);
        }
        return d;
    }

    NoiseDraw draw_noise(const SystemConfig &cfg, std::uint64_t seed, std::uint64_t index)
    {
        RandomStream rs(seed, StreamKind::noise, index);
        const auto n = static_cast<arma::uword>(cfg.n_antennas);
        NoiseDraw d;
        d.unicast.set_size(n, cfg.n_unicast);
        d.group.set_size(n, cfg.n_groups());
        for (int u = 0; u < cfg.n_unicast; ++u)
            fill_column(rs, d.unicast, u, 1.0);
        for (int g = 0; g < cfg.n_groups(); ++g)
            fill_column(rs, d.group, g, 1.0);
        return d;
    }

    EstimateSet mmse_estimate(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                              const ChannelDraw &draw, const NoiseDraw &noise)
    {
        check_pilots(cfg, pilots);
        const auto n = static_cast<arma::uword>(cfg.n_antennas);
        if (draw.unicast.n_rows != n || draw.unicast.n_cols != static_cast<arma::uword>(cfg.n_unicast) ||
            draw.multicast.size() != cfg.group_sizes.size() || noise.unicast.n_cols != draw.unicast.n_cols ||
            noise.unicast.n_rows != n || noise.group.n_rows != n ||
            noise.group.n_cols != static_cast<arma::uword>(cfg.n_groups()))
            throw ValidationError("channel_draw", "shape does not match the config");

        const double tau = cfg.pilot_length;
        EstimateSet e;
        e.unicast.set_size(n, cfg.n_unicast);
        for (int u = 0; u < cfg.n_unicast; ++u)
        {
            const double x = tau * pilots.unicast[u];
            const double beta = fading.unicast_gains[u];
            const double c = std::sqrt(x) * beta / (1.0 + x * beta);
            e.unicast.col(u) = c * (std::sqrt(x) * draw.unicast.col(u) + noise.unicast.col(u));
        }

        e.group.set_size(n, cfg.n_groups());
        for (int g = 0; g < cfg.n_groups(); ++g)
        {
            const auto &eta = fading.multicast_gains[g];
            const auto &q = pilots.multicast[g];
            if (draw.multicast[g].n_rows != n || draw.multicast[g].n_cols != q.size())
                throw ValidationError("channel_draw.multicast[" + std::to_string(g) + "]",
                                      "shape does not match the group");

            // Every member sends the same pilot, so the BS observes their channels superimposed.
            arma::cx_vec y = noise.group.col(g);
            double energy = 0.0;
            for (std::size_t k = 0; k < q.size(); ++k)
            {
                const double x = tau * q[k];
                y += std::sqrt(x) * draw.multicast[g].col(k);
                energy += x * eta[k];
            }
            e.group.col(g) = energy / (1.0 + energy) * y;

            auto &scale = e.member_scale.emplace_back();
            for (std::size_t k = 0; k < q.size(); ++k)
                scale.push_back(energy > 0.0 ? std::sqrt(tau * q[k]) * eta[k] / energy : 0.0);
        }
        return e;
    }

    EstimateSet mmse_estimate(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                              const ChannelDraw &draw, std::uint64_t noise_seed, std::uint64_t index)
    {
        return mmse_estimate(cfg, fading, pilots, draw, draw_noise(cfg, noise_seed, index));
    }

    PrecoderSet build_mrt_precoders(const SystemConfig &cfg, const EstimateSet &estimates,
                                    const DownlinkPowers &powers, const EstimationStats &stats)
    {
        check_downlink_powers(cfg, powers);
        const double n = cfg.n_antennas;
        PrecoderSet p;
        p.unicast.zeros(estimates.unicast.n_rows, cfg.n_unicast);
        p.multicast.zeros(estimates.group.n_rows, cfg.n_groups());

        for (int m = 0; m < cfg.n_unicast; ++m)
        {
            if (powers.unicast[m] == 0.0)
                continue;
            if (!(stats.unicast_var[m] > 0.0))
                throw ValidationError("unicast_var[" + std::to_string(m) + "]", "positive power on a zero-variance estimate");
            p.unicast.col(m) = std::sqrt(powers.unicast[m] / (n * stats.unicast_var[m])) * estimates.unicast.col(m);
        }
        for (int j = 0; j < cfg.n_groups(); ++j)
        {
            if (powers.multicast[j] == 0.0)
                continue;
            if (!(stats.group_var[j] > 0.0))
                throw ValidationError("group_var[" + std::to_string(j) + "]", "positive power on a zero-variance estimate");
            p.multicast.col(j) = std::sqrt(powers.multicast[j] / (n * stats.group_var[j])) * estimates.group.col(j);
        }
        return p;
    }

    PrecoderSet build_zf_precoders(const SystemConfig &cfg, const EstimateSet &estimates,
                                   const DownlinkPowers &powers, const EstimationStats &stats)
    {
        require_zf_feasible(cfg);
        check_downlink_powers(cfg, powers);
        const int u = cfg.n_unicast;
        const double dof = cfg.n_antennas - cfg.n_streams();

        // Unicast and group estimates differ in scale by many orders of magnitude, so the columns are
        // normalized first: with C = Cn D, C (C^H C)^-1 = Cn (Cn^H Cn)^-1 D^-1, and the condition test
        // sees only the geometry of the estimates.
        arma::cx_mat c = arma::join_rows(estimates.unicast, estimates.group);
        arma::vec norms(c.n_cols);
        for (arma::uword i = 0; i < c.n_cols; ++i)
        {
            norms(i) = arma::norm(c.col(i));
            if (!(norms(i) > 0.0) || !std::isfinite(norms(i)))
                throw RankDeficientError("zero estimate column " + std::to_string(i));
            c.col(i) /= norms(i);
        }
        arma::cx_mat q, r;
        if (!arma::qr_econ(q, r, c))
            throw RankDeficientError("QR factorization of the estimate matrix failed");
        // cond(Cn^H Cn) = cond(R)^2
        const double cond_r = arma::cond(r);
        if (!std::isfinite(cond_r) || cond_r * cond_r > kMaxGramCondition)
            throw RankDeficientError("estimate Gram matrix condition number above 1e12");

        // Cn (Cn^H Cn)^-1 = Q R^-H
        const arma::cx_mat eye = arma::eye<arma::cx_mat>(r.n_rows, r.n_rows);
        const arma::cx_mat r_inv_h = arma::solve(arma::trimatl(r.t()), eye);
        arma::cx_mat z = q * r_inv_h;
        for (arma::uword i = 0; i < z.n_cols; ++i)
            z.col(i) /= norms(i);

        PrecoderSet p;
        p.unicast = u > 0 ? arma::cx_mat(z.head_cols(u)) : arma::cx_mat(c.n_rows, 0);
        p.multicast = cfg.n_groups() > 0 ? arma::cx_mat(z.tail_cols(cfg.n_groups())) : arma::cx_mat(c.n_rows, 0);

        for (int m = 0; m < u; ++m)
            p.unicast.col(m) *= std::sqrt(dof * powers.unicast[m] * stats.unicast_var[m]);
        for (int j = 0; j < cfg.n_groups(); ++j)
            p.multicast.col(j) *= std::sqrt(dof * powers.multicast[j] * stats.group_var[j]);
        return p;
    }

    std::vector<TrialStatistics> simulate_all_users(const SystemConfig &cfg, const FadingProfile &fading,
                                                    const PilotPowers &pilots, const DownlinkPowers &powers,
                                                    Precoder precoder, const MonteCarloOptions &options)
    {
        require_valid(cfg, fading);
        check_pilots(cfg, pilots);
        check_downlink_powers(cfg, powers);
        if (precoder == Precoder::zf)
            require_zf_feasible(cfg);
        if (options.n_trials < 100)
            throw ValidationError("n_trials", "at least 100 trials are required", std::to_string(options.n_trials));
        if (!(options.power_scale > 0.0) || !std::isfinite(options.power_scale))
            throw ValidationError("power_scale", "must be positive and finite");

        const auto stats = estimation_variances(cfg, fading, pilots);
        const auto own = own_columns(cfg);
        // power_scale is a test hook and may push the total above P, so it bypasses the power check
        DownlinkPowers used = scaled(powers, options.power_scale);
        SystemConfig run_cfg = cfg;
        run_cfg.total_power = std::max(cfg.total_power, used.total());

        const int n_chunks = (options.n_trials + kChunk - 1) / kChunk;
        std::vector<ChunkResult> chunks(n_chunks);
        std::vector<std::exception_ptr> errors(n_chunks);
        const int workers = std::clamp(options.n_threads, 1, n_chunks);
        auto work = [&](int w) {
            for (int c = w; c < n_chunks; c += workers)
            {
                try
                {
                    const int first = c * kChunk;
                    const int last = std::min(options.n_trials, first + kChunk);
                    chunks[c] = run_chunk(run_cfg, fading, pilots, used, stats, precoder, options, own, first, last);
                }
                catch (...)
                {
                    errors[c] = std::current_exception();
                }
            }
        };
        if (workers == 1)
            work(0);
        else
        {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(work, w);
            for (auto &t : pool)
                t.join();
        }
        for (const auto &e : errors)
            if (e)
                std::rethrow_exception(e);

        std::vector<Moments> total(own.size());
        int discarded = 0;
        for (const auto &c : chunks)
        {
            discarded += c.discarded;
            for (std::size_t u = 0; u < own.size(); ++u)
                total[u].merge(c.users[u]);
        }
        if (!own.empty() && total[0].n == 0.0)
            throw RankDeficientError("every Monte Carlo trial was discarded");

        std::vector<TrialStatistics> out;
        out.reserve(own.size());
        for (const auto &m : total)
            out.push_back(finish(m, discarded));
        return out;
    }

    TrialStatistics empirical_sinr(const SystemConfig &cfg, const FadingProfile &fading, const PilotPowers &pilots,
                                   const DownlinkPowers &powers, Precoder precoder, const UserRef &target,
                                   const MonteCarloOptions &options)
    {
        int flat = 0;
        if (target.kind == UserRef::Kind::unicast)
        {
            if (target.index < 0 || target.index >= cfg.n_unicast)
                throw std::out_of_range("unicast index " + std::to_string(target.index) + " out of range");
            flat = target.index;
        }
        else
        {
            if (target.group < 0 || target.group >= cfg.n_groups() || target.index < 0 ||
                target.index >= cfg.group_sizes[target.group])
                throw std::out_of_range("multicast user (" + std::to_string(target.group) + ", " +
                                        std::to_string(target.index) + ") out of range");
            flat = cfg.n_unicast;
            for (int j = 0; j < target.group; ++j)
                flat += cfg.group_sizes[j];
            flat += target.index;
        }
        return simulate_all_users(cfg, fading, pilots, powers, precoder, options).at(flat);
    }

    ValidationResult validate_closed_form(const SystemConfig &cfg, const FadingProfile &fading,
                                          const PilotPowers &pilots, const DownlinkPowers &powers,
                                          Precoder precoder, const MonteCarloOptions &options)
    {
        const auto empirical = simulate_all_users(cfg, fading, pilots, powers, precoder, options);
        const auto stats = estimation_variances(cfg, fading, pilots);
        const auto closed = se_report(cfg, stats, fading, powers, precoder);

        ValidationResult r;
        r.precoder = precoder;
        r.seed = options.seed;
        r.n_trials = empirical.empty() ? 0 : empirical.front().n_trials;
        r.n_discarded = empirical.empty() ? 0 : empirical.front().n_discarded;

        auto record = [&](const std::string &kind, int flat, int group, int member, double cf) {
            const auto &e = empirical[flat];
            ValidationRecord rec;
            rec.kind = kind;
            rec.index = flat;
            rec.group = group;
            rec.member = member;
            rec.closed_form = cf;
            rec.empirical = e.empirical_sinr;
            rec.ci_halfwidth = e.confidence_halfwidth;
            const double diff = e.empirical_sinr - cf;
            if (e.standard_error > 0.0)
                rec.z = diff / e.standard_error;
            else
                rec.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
            r.records.push_back(rec);
        };

        int flat = 0;
        for (int m = 0; m < cfg.n_unicast; ++m)
            record("unicast", flat++, -1, -1, closed.unicast_sinr[m]);
        for (int j = 0; j < cfg.n_groups(); ++j)
            for (int k = 0; k < cfg.group_sizes[j]; ++k)
                record("multicast", flat++, j, k, closed.multicast_sinr[j][k]);

        const auto ok = std::count_if(r.records.begin(), r.records.end(),
                                      [](const ValidationRecord &x) { return std::abs(x.z) <= 3.0; });
        r.pass_rate = r.records.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(r.records.size());
        r.passed = r.pass_rate >= 0.99;
        return r;
    }

} // namespace umc
