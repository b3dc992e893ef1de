// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_PARETO_HPP
#define UMCAST_PARETO_HPP

#include "umcast/allocation.hpp"

#include <iosfwd>
#include <vector>

namespace umc
{
    // One boundary point: both problems solved at the split p_unicast + p_multicast = P.
    struct ParetoPoint
    {
        double p_unicast = 0.0;
        double p_multicast = 0.0;
        double mmf_objective = 0.0; // O*_mu(P_un)
        double sse_objective = 0.0; // O*_un(P_mu)
        MmfSolution mmf_solution;
        SseSolution sse_solution;
    };

    // Points ordered by increasing p_unicast. Along the list mmf_objective does not increase and
    // sse_objective does not decrease.
    struct ParetoBoundary
    {
        Precoder precoder = Precoder::mrt;
        SystemConfig config;
        FadingProfile fading;
        std::vector<ParetoPoint> points;
    };

    // Solves both problems at P_un = p_unicast, P_mu = P - p_unicast. Needs U >= 1 and G >= 1.
    ParetoPoint solve_pareto_point(const SystemConfig &cfg, const FadingProfile &fading, Precoder precoder,
                                   double p_unicast);

    // Points at P_un = i P / (n_points - 1). The two end points are pinned to exactly 0 and P.
    // Points may be solved on up to n_threads threads; the result does not depend on the count.
    ParetoBoundary sweep_boundary(const SystemConfig &cfg, const FadingProfile &fading, Precoder precoder,
                                  int n_points, int n_threads = 1);

    struct ConvexityReport
    {
        bool is_concave_boundary = false;
        double worst_violation = 0.0; // max over consecutive triples of chord - curve; > 0 is non-concave
        double scale = 0.0;           // max |sse_objective|
        int worst_index = -1;         // middle point of the worst triple
    };

    // Midpoint concavity of sse_objective as a function of mmf_objective over consecutive triples,
    // with tolerance 1e-9 * scale. Needs >= 3 points ordered by strictly increasing p_unicast and
    // non-increasing mmf_objective; throws ValidationError otherwise.
    ConvexityReport check_convexity(const ParetoBoundary &boundary);

    struct SelectionPolicy
    {
        enum class Kind
        {
            ratio,      // P_un : P_mu = a : b
            target_mmf, // largest P_un whose O*_mu still reaches value
            target_sse, // smallest P_un whose O*_un reaches value
        };
        Kind kind = Kind::ratio;
        double a = 1.0;
        double b = 1.0;
        double value = 0.0;

        static SelectionPolicy ratio(double unicast_part, double multicast_part);
        static SelectionPolicy target_mmf(double min_se);
        static SelectionPolicy target_sse(double sse);
    };

    struct Selection
    {
        ParetoPoint point;
        bool clamped = false; // target outside the attainable range; point is the nearest end point
    };

    // Targets are met by bisection on P_un, stopped once the bracket is below 1e-13 P; the returned
    // point is always re-solved at its split.
    Selection select_operating_point(const ParetoBoundary &boundary, const SelectionPolicy &policy);

    // CSV with header p_un,p_mu,mmf_se,sse,precoder,N
    void write_boundary_csv(std::ostream &os, const ParetoBoundary &boundary);

} // namespace umc

#endif
