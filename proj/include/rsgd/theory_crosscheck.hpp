#pragma once

#include <cstddef>

#include "rsgd/optimizers.hpp"
#include "rsgd/theory.hpp"

// Second implementation of the closed-form bounds, written from the factored
// forms in log space. Kept separate from theory.cpp so the two can be compared.
namespace rsgd::theory::crosscheck {

double c_gamma_m(double gamma, std::size_t m);
double psi(double gamma, double p);
double chunk_moment_bound(double sigma, double p, std::size_t r);
double tail_bound_chunk(double sigma, double p, std::size_t r, double u);
double q_threshold(const Params& params);
double second_moment_bound_b(const Params& params);
double theorem3_bound(double f_x0, double alpha, std::size_t horizon, double smoothness,
                      const Params& params);
ClippingSchedule clipping_schedule(std::size_t horizon, double delta, double gap,
                                   double smoothness, double sigma, double p);

}  // namespace rsgd::theory::crosscheck
