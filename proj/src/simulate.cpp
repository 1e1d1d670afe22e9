#include "boostr/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace boostr {

EventHistory sim_hpp(double lambda, double censor, Rng& rng) {
  if (lambda < 0.0) throw std::invalid_argument("sim_hpp: negative rate");
  if (!(censor > 0.0)) throw std::invalid_argument("sim_hpp: censor must be > 0");
  EventHistory out;
  out.censor = censor;
  if (lambda == 0.0) return out;
  double t = 0.0;
  while (true) {
    t += rng.exponential(lambda);
    if (t > censor) break;
    out.times.push_back(t);
  }
  return out;
}

namespace {

void thin_interval(const std::function<double(double)>& lambda, double begin, double end, double bound, Rng& rng,
                   std::vector<double>& out) {
  if (bound <= 0.0) return;
  double t = begin;
  while (true) {
    t += rng.exponential(bound);
    if (t > end) break;
    const double rate = lambda(t);
    if (rate > bound * (1.0 + 1e-9))
      throw numeric_error("thinning: intensity " + std::to_string(rate) + " exceeds bound " + std::to_string(bound) +
                          " at t=" + std::to_string(t));
    if (rng.uniform() < rate / bound) out.push_back(t);
  }
}

}  // namespace

EventHistory sim_nhpp_thinning(const std::function<double(double)>& lambda, double lambda_max, double censor,
                               Rng& rng) {
  if (lambda_max < 0.0) throw std::invalid_argument("sim_nhpp_thinning: negative bound");
  if (!(censor > 0.0)) throw std::invalid_argument("sim_nhpp_thinning: censor must be > 0");
  EventHistory out;
  out.censor = censor;
  thin_interval(lambda, 0.0, censor, lambda_max, rng, out.times);
  return out;
}

EventHistory sim_nhpp_piecewise(const std::function<double(double)>& lambda, const std::vector<ThinningPiece>& pieces,
                                Rng& rng) {
  if (pieces.empty()) throw std::invalid_argument("sim_nhpp_piecewise: no pieces");
  EventHistory out;
  out.censor = pieces.back().end;
  for (size_t k = 0; k < pieces.size(); ++k) {
    if (k > 0 && pieces[k].begin != pieces[k - 1].end)
      throw std::invalid_argument("sim_nhpp_piecewise: pieces must be contiguous");
    thin_interval(lambda, pieces[k].begin, pieces[k].end, pieces[k].bound, rng, out.times);
  }
  return out;
}

std::vector<ThinningPiece> dyadic_pieces_power_law(double a, double b, double censor) {
  if (!(b > -1.0 && b < 0.0)) throw std::invalid_argument("dyadic_pieces_power_law: need -1 < b < 0");
  // Depth where the expected count below the deepest boundary drops under
  // 1e-12: integral of a t^b over (0, eps] is a eps^(b+1) / (b+1).
  int depth = 1;
  while (depth < 400) {
    const double eps = censor * std::pow(2.0, -depth);
    if (a * std::pow(eps, b + 1.0) / (b + 1.0) < 1e-12) break;
    ++depth;
  }
  // The sliver (0, censor * 2^-depth] is dropped; by the depth choice it
  // carries < 1e-12 expected events. Decreasing intensity, so each piece
  // is bounded by its left endpoint.
  std::vector<ThinningPiece> pieces;
  pieces.reserve(depth);
  for (int j = depth - 1; j >= 0; --j) {
    ThinningPiece piece;
    piece.begin = censor * std::pow(2.0, -(j + 1));
    piece.end = censor * std::pow(2.0, -j);
    piece.bound = a * std::pow(piece.begin, b);
    pieces.push_back(piece);
  }
  return pieces;
}

double dataset_a_rate(double x1, double x2) {
  if (x1 <= 0.5 && x2 <= 0.5) return 0.01;
  if (x1 > 0.5 && x2 > 0.5) return 0.10;
  return 0.05;
}

double dataset_c_coef(double x1, double x2) {
  const double r2 = (x1 - 0.5) * (x1 - 0.5) + (x2 - 0.5) * (x2 - 0.5);
  if (r2 <= 0.04) return 1.5;
  if (r2 <= 0.16) return 1.0;
  return 0.5;
}

double dataset_c_mu(double x1, double x2, double t) { return dataset_c_coef(x1, x2) * 2.0 * std::sqrt(t); }

double dataset_d_rate(double x1, double x2, double t) {
  return 0.01 * std::sqrt(t) * std::exp(0.5 * (x1 - 0.5) * (x1 - 0.5) + 2.0 * (x2 - 0.5) * (x2 - 0.5));
}

double dataset_d_mu(double x1, double x2, double t) {
  return 0.01 * (2.0 / 3.0) * std::pow(t, 1.5) * std::exp(0.5 * (x1 - 0.5) * (x1 - 0.5) + 2.0 * (x2 - 0.5) * (x2 - 0.5));
}

namespace {

constexpr uint64_t kStreamMain = 0;
constexpr uint64_t kStreamRedundant = 1;

Dataset gen_dataset_ab(int n, uint64_t seed, int grid_m, int extra_features) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
  const double censor = 100.0;
  Dataset data;
  data.p = 2 + extra_features;
  data.q = 0;
  data.grid = build_grid(censor, grid_m);
  data.individuals.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, kStreamMain, i);
    Individual ind;
    ind.id = std::to_string(i + 1);
    ind.x.resize(data.p);
    ind.x[0] = rng.uniform();
    ind.x[1] = rng.uniform();
    ind.events = sim_hpp(dataset_a_rate(ind.x[0], ind.x[1]), censor, rng);
    if (extra_features > 0) {
      Rng extra = Rng::substream(seed, kStreamRedundant, i);
      for (int j = 0; j < extra_features; ++j) ind.x[2 + j] = extra.uniform();
    }
    data.individuals.push_back(std::move(ind));
  }
  return data;
}

}  // namespace

Dataset gen_dataset_a(int n, uint64_t seed, int grid_m) { return gen_dataset_ab(n, seed, grid_m, 0); }

Dataset gen_dataset_b(int n, uint64_t seed, int grid_m) { return gen_dataset_ab(n, seed, grid_m, 8); }

Dataset gen_dataset_c(int n, uint64_t seed, int grid_m) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
  const double censor = 50.0;
  Dataset data;
  data.p = 2;
  data.q = 0;
  data.grid = build_grid(censor, grid_m);
  data.individuals.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, kStreamMain, i);
    Individual ind;
    ind.id = std::to_string(i + 1);
    ind.x.resize(2);
    ind.x[0] = rng.uniform();
    ind.x[1] = rng.uniform();
    const double coef = dataset_c_coef(ind.x[0], ind.x[1]);
    const auto pieces = dyadic_pieces_power_law(coef, -0.5, censor);
    ind.events = sim_nhpp_piecewise([coef](double t) { return coef * std::pow(t, -0.5); }, pieces, rng);
    data.individuals.push_back(std::move(ind));
  }
  return data;
}

Dataset gen_dataset_d(int n, uint64_t seed, int grid_m) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
  const double censor = 100.0;
  Dataset data;
  data.p = 2;
  data.q = 0;
  data.grid = build_grid(censor, grid_m);
  data.individuals.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, kStreamMain, i);
    Individual ind;
    ind.id = std::to_string(i + 1);
    ind.x.resize(2);
    ind.x[0] = rng.uniform();
    ind.x[1] = rng.uniform();
    const double x1 = ind.x[0], x2 = ind.x[1];
    ind.events = sim_nhpp_thinning([x1, x2](double t) { return dataset_d_rate(x1, x2, t); },
                                   dataset_d_rate(x1, x2, censor), censor, rng);
    data.individuals.push_back(std::move(ind));
  }
  return data;
}

Dataset gen_morvita(int n, const TrialSpec& spec, uint64_t seed, int grid_m) {
  if (n < 1) throw std::invalid_argument("gen_morvita: n must be >= 1");
  if (spec.sigma < 0.0) throw std::invalid_argument("gen_morvita: sigma must be >= 0");
  Dataset data;
  data.p = 3;  // x1, x2, treatment indicator
  data.q = 0;
  data.grid = build_grid(spec.type1_censor, grid_m);
  data.individuals.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, kStreamMain, i);
    Individual ind;
    ind.id = std::to_string(i + 1);
    ind.x.resize(3);
    const double x1 = rng.uniform();
    const double x2 = rng.uniform();
    const bool treated = rng.bernoulli(spec.treat_prob);
    const double v = spec.sigma * rng.normal();
    ind.x << x1, x2, (treated ? 1.0 : 0.0);

    // Number of leading events the treatment suppresses in this quadrant.
    int effective;
    if (x1 < 0.5 && x2 < 0.5)
      effective = 1;
    else if (x1 < 0.5)
      effective = 2;
    else if (x2 < 0.5)
      effective = 3;
    else
      effective = 4;

    double t = 0.0;
    ind.events.censor = spec.type1_censor;
    for (int k = 1; k <= spec.type2_events; ++k) {
      const double beta_k = (treated && k <= effective) ? -1.0 : 0.0;
      const double rate = std::exp(spec.beta0 + beta_k + v);
      t += rng.exponential(rate);
      if (t > spec.type1_censor) break;
      ind.events.times.push_back(t);
      if (k == spec.type2_events) ind.events.censor = t;  // observation stops at the fourth event
    }
    data.individuals.push_back(std::move(ind));
  }
  return data;
}

}  // namespace boostr
