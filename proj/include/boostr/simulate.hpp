#pragma once

#include <functional>
#include <vector>

#include "boostr/core.hpp"
#include "boostr/rng.hpp"

namespace boostr {

/// Homogeneous Poisson process: exponential inter-arrival times truncated
/// at the censoring time.
EventHistory sim_hpp(double lambda, double censor, Rng& rng);

/// Lewis-Shedler thinning against a single dominating rate. Throws
/// numeric_error if the intensity is ever observed above lambda_max.
EventHistory sim_nhpp_thinning(const std::function<double(double)>& lambda, double lambda_max, double censor, Rng& rng);

struct ThinningPiece {
  double begin = 0.0;
  double end = 0.0;
  double bound = 0.0;  // dominating rate on (begin, end]
};

/// Thinning with a separate bound per sub-interval; the pieces must be
/// contiguous and ascending.
EventHistory sim_nhpp_piecewise(const std::function<double(double)>& lambda, const std::vector<ThinningPiece>& pieces,
                                Rng& rng);

/// Dyadic pieces (censor * 2^-(j+1), censor * 2^-j] for a decreasing
/// intensity a * t^b with -1 < b < 0, each bounded by its left endpoint.
/// Deep enough that the expected count below the last piece is < 1e-12.
std::vector<ThinningPiece> dyadic_pieces_power_law(double a, double b, double censor);

// Region rate of the two-feature homogeneous process: 0.01 when both
// features are <= 0.5, 0.10 when both are > 0.5, 0.05 otherwise.
double dataset_a_rate(double x1, double x2);

// Radial coefficient c in lambda(t) = c * t^-0.5: 1.5 inside the 0.2
// disk about (0.5, 0.5), 1.0 in the annulus to 0.4, 0.5 outside.
double dataset_c_coef(double x1, double x2);
double dataset_c_mu(double x1, double x2, double t);  // c * 2 sqrt(t)

double dataset_d_rate(double x1, double x2, double t);
double dataset_d_mu(double x1, double x2, double t);

Dataset gen_dataset_a(int n, uint64_t seed, int grid_m = 100);
Dataset gen_dataset_b(int n, uint64_t seed, int grid_m = 100);  // A plus 8 redundant features
Dataset gen_dataset_c(int n, uint64_t seed, int grid_m = 100);  // horizon 50
Dataset gen_dataset_d(int n, uint64_t seed, int grid_m = 100);  // horizon 100

/// Randomized-trial generator: log lambda between events k-1 and k is
/// beta0 + beta_k Z + v, with the per-event treatment effects beta_1..4
/// determined by which quadrant of the unit square (x1, x2) falls in.
/// Observation stops at four events or day 120, whichever comes first.
struct TrialSpec {
  double beta0 = std::log(0.025);  // untreated rate; ~3 expected events per 120 days
  double sigma = 0.0;              // random-effect scale
  double treat_prob = 0.5;
  double type1_censor = 120.0;
  int type2_events = 4;
};

/// Static features are (x1, x2, Z).
Dataset gen_morvita(int n, const TrialSpec& spec, uint64_t seed, int grid_m = 120);

}  // namespace boostr
