// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_CLI_FIGURES_HPP
#define UMCAST_CLI_FIGURES_HPP

#include "umcast/scenario.hpp"
#include "umcast/spectral_efficiency.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace umc::cli
{
    // Everything needed to turn a seed into one user drop: geometry, radio and topology.
    struct DropSetting
    {
        CellGeometry geometry;
        RadioParams radio;
        int n_antennas = 100;
        int coherence_length = 200;
        int n_unicast = 50;
        std::vector<int> group_sizes = std::vector<int>(10, 100);
        double energy_fraction = 0.1;
    };

    struct Drop
    {
        SystemConfig config; // pilot length U + G, uniform caps, unit weights
        FadingProfile fading;
    };

    // Drop d of a run with the given seed. Drops of equal index share their placement sub-stream
    // across settings with the same user counts, so sweeps over N compare like with like.
    Drop make_drop(const DropSetting &setting, std::uint64_t seed, int drop_index);

    // Mean over drops of the optimal minimum multicast SE at P_un = unicast_share * P
    double mean_mmf_se(const DropSetting &setting, Precoder precoder, double unicast_share, int drops,
                       std::uint64_t seed);

    // Mean over drops of the optimal weighted unicast SSE at P_mu = (1 - unicast_share) * P
    double mean_sse(const DropSetting &setting, Precoder precoder, double unicast_share, int drops,
                    std::uint64_t seed);

    enum class FigureId
    {
        fig2, // min multicast SE over G x K x N at P_un = P_mu
        fig3, // unicast SSE over U x N at P_un = P_mu
        fig4, // Pareto boundary per N
    };

    FigureId parse_figure_id(const std::string &s);
    std::string to_string(FigureId id);

    struct FigureGrid
    {
        DropSetting base;                 // geometry, radio, T, energy fraction and fixed counts
        std::vector<int> antennas;        // N axis
        std::vector<int> groups;          // G axis (fig2)
        std::vector<int> group_sizes;     // K axis (fig2)
        std::vector<int> unicast;         // U axis (fig3)
        std::vector<Precoder> precoders = {Precoder::mrt, Precoder::zf};
        int points = 21;                  // fig4
        int drops = 10;
        std::uint64_t seed = 1;
        int n_threads = 1;
    };

    // Full-scale grids: fig2 G = 1..10, K = 1,10..100, N = 100,250,500 (U = 50); fig3 U = 10..150,
    // N = 50..500 (G = 10, K = 100); fig4 N = 100,250,500 with 21 points and one drop.
    FigureGrid default_figure_grid(FigureId id);

    // CSV text for the figure. Cells where ZF has no degrees of freedom, or the pilots do not fit in
    // the coherence interval, are kept with feasible = 0 and a zero value.
    std::string figure_csv(FigureId id, const FigureGrid &grid);

} // namespace umc::cli

#endif
