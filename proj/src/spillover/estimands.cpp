// Copyright 2026 The Spillover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spillover/estimands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spillover/error.hpp"

namespace spillover {

namespace {

constexpr std::uint64_t kChunk = 4096;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs visit(partial, w, probability) over every support point. Chunks have a
// fixed size and partials come back in chunk order, so the final reduction is
// independent of the worker count.
template <typename Partial, typename Init, typename Visit>
std::vector<Partial> over_support(const SupportEnumerator& support,
                                  const ExecPolicy& exec, Init init,
                                  Visit visit) {
  const std::uint64_t chunks = (support.size() + kChunk - 1) / kChunk;
  std::vector<Partial> partials(chunks, init());
  parallel_for(chunks, exec, [&](std::size_t c) {
    TreatmentVector w(support.units());
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(support.size(), begin + kChunk);
    for (std::uint64_t k = begin; k < end; ++k) {
      const double p = support.assign(k, w);
      visit(partials[c], w, p);
    }
  });
  return partials;
}

struct Contrasts {
  double direct = 0.0;    // sum_i [Y_i(w_i=1) - Y_i(w_i=0)]
  double indirect = 0.0;  // sum_i sum_{j: i in dep(j)} [Y_j(w_i=1) - Y_j(w_i=0)]
};

// Contrasts at one assignment. w is toggled in place and restored. Units j
// outside influenced(i) contribute exactly zero by the dependency contract.
Contrasts contrasts_at(const OutcomeModel& model, TreatmentVector& w) {
  thread_local std::vector<std::size_t> counts;
  const auto& deps = model.dependencies();
  const std::size_t n = model.size();
  Contrasts c;
  if (model.is_anonymous()) {
    counts.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      for (auto k : deps.neighbors(j)) counts[j] += w[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      c.direct += model.response(i, 1, counts[i]) -
                  model.response(i, 0, counts[i]);
      for (auto j : deps.influenced(i)) {
        const std::size_t without_i = counts[j] - w[i];
        c.indirect += model.response(j, w[j], without_i + 1) -
                      model.response(j, w[j], without_i);
      }
    }
    return c;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t saved = w[i];
    w.set(i, 1);
    double up_self = model.outcome(i, w);
    double up_others = 0.0;
    for (auto j : deps.influenced(i)) up_others += model.outcome(j, w);
    w.set(i, 0);
    double down_self = model.outcome(i, w);
    double down_others = 0.0;
    for (auto j : deps.influenced(i)) down_others += model.outcome(j, w);
    w.set(i, saved);
    c.direct += up_self - down_self;
    c.indirect += up_others - down_others;
  }
  return c;
}

double mean_outcome_at(const OutcomeModel& model, const TreatmentVector& w) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) total += model.outcome(i, w);
  return total / static_cast<double>(model.size());
}

void check_sizes(const OutcomeModel& model, std::size_t design_n) {
  if (model.size() != design_n) {
    Fail(ErrorCode::kInvalidArgument,
         "model has " + std::to_string(model.size()) +
             " units but design has " + std::to_string(design_n));
  }
}

struct PairSum {
  CompensatedSum direct;
  CompensatedSum indirect;
};

PairSum exact_contrast_sums(const OutcomeModel& model, const Design& design,
                            const ExecPolicy& exec) {
  check_sizes(model, design_size(design));
  SupportEnumerator support(design);
  auto partials = over_support<PairSum>(
      support, exec, [] { return PairSum{}; },
      [&model](PairSum& acc, TreatmentVector& w, double p) {
        const Contrasts c = contrasts_at(model, w);
        acc.direct += p * c.direct;
        acc.indirect += p * c.indirect;
      });
  PairSum total;
  for (const auto& part : partials) {
    total.direct.merge(part.direct);
    total.indirect.merge(part.indirect);
  }
  return total;
}

struct MeanSd {
  double mean = 0.0;
  double se = 0.0;
};

MeanSd summarize(const std::vector<double>& draws) {
  CompensatedSum sum;
  for (double x : draws) sum += x;
  const double r = static_cast<double>(draws.size());
  const double mean = sum.value() / r;
  CompensatedSum sq;
  for (double x : draws) sq += (x - mean) * (x - mean);
  const double sd = std::sqrt(sq.value() / (r - 1.0));
  return {mean, sd / std::sqrt(r)};
}

void check_interior(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    Fail(ErrorCode::kOutOfRange,
         std::string(what) + " must be strictly inside (0,1)");
  }
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kExact:
      return "exact";
    case Method::kAnonymousBinomial:
      return "anonymous_binomial";
    case Method::kMonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

double ade_exact(const OutcomeModel& model, const Design& design,
                 const ExecPolicy& exec) {
  return exact_contrast_sums(model, design, exec).direct.value() /
         static_cast<double>(model.size());
}

double aie_exact(const OutcomeModel& model, const Design& design,
                 const ExecPolicy& exec) {
  return exact_contrast_sums(model, design, exec).indirect.value() /
         static_cast<double>(model.size());
}

EstimandReport estimands_exact(const OutcomeModel& model, const Design& design,
                               const ExecPolicy& exec) {
  const PairSum sums = exact_contrast_sums(model, design, exec);
  const double n = static_cast<double>(model.size());
  EstimandReport r;
  r.method = Method::kExact;
  r.ade = sums.direct.value() / n;
  r.aie = sums.indirect.value() / n;
  r.aoe = r.ade + r.aie;
  if (const auto* b = std::get_if<BernoulliDesign>(&design)) {
    r.inf = inf_analytic(model, *b, exec);
  } else {
    r.inf = kNaN;
  }
  return r;
}

EstimandReport estimands_monte_carlo(const OutcomeModel& model,
                                     const Design& design, std::uint64_t R,
                                     std::uint64_t seed,
                                     const ExecPolicy& exec) {
  check_sizes(model, design_size(design));
  if (R < 2) {
    Fail(ErrorCode::kInvalidArgument, "Monte Carlo needs at least 2 replications");
  }
  const double n = static_cast<double>(model.size());
  std::vector<double> direct(R);
  std::vector<double> indirect(R);
  std::vector<double> overall(R);
  parallel_for(R, exec, [&](std::size_t r) {
    Rng rng = stream_rng(seed, r);
    TreatmentVector w = sample_assignment(design, rng);
    const Contrasts c = contrasts_at(model, w);
    direct[r] = c.direct / n;
    indirect[r] = c.indirect / n;
    overall[r] = direct[r] + indirect[r];
  });
  const MeanSd d = summarize(direct);
  const MeanSd ind = summarize(indirect);
  const MeanSd o = summarize(overall);
  EstimandReport report;
  report.method = Method::kMonteCarlo;
  report.replications = R;
  report.ade = d.mean;
  report.aie = ind.mean;
  report.aoe = report.ade + report.aie;
  report.inf = is_bernoulli(design) ? report.aoe : kNaN;
  report.se_ade = d.se;
  report.se_aie = ind.se;
  report.se_aoe = o.se;
  return report;
}

std::string binomial_path_unavailable(const OutcomeModel& model,
                                      const Design& design) {
  if (!model.is_anonymous()) return "model is not anonymous";
  if (!model.dependencies().regular_degree()) {
    return "dependency graph is not regular";
  }
  const auto* b = std::get_if<BernoulliDesign>(&design);
  if (!b) return "design is not Bernoulli";
  if (!b->pi.is_constant()) return "treatment probabilities are not constant";
  if (b->size() != model.size()) return "design and model sizes differ";
  return {};
}

std::vector<double> binomial_pmf(std::size_t d, double p) {
  check_interior(p, "binomial probability");
  std::vector<double> pmf(d + 1);
  const double dd = static_cast<double>(d);
  if (dd * std::log1p(-p) > -600.0) {
    const double odds = p / (1.0 - p);
    pmf[0] = std::pow(1.0 - p, dd);
    for (std::size_t b = 0; b < d; ++b) {
      pmf[b + 1] = pmf[b] * static_cast<double>(d - b) /
                   static_cast<double>(b + 1) * odds;
    }
    return pmf;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgd = std::lgamma(dd + 1.0);
  for (std::size_t b = 0; b <= d; ++b) {
    const double bd = static_cast<double>(b);
    pmf[b] = std::exp(lgd - std::lgamma(bd + 1.0) - std::lgamma(dd - bd + 1.0) +
                      bd * lp + (dd - bd) * lq);
  }
  return pmf;
}

EstimandReport estimands_anonymous_binomial(const OutcomeModel& model,
                                            double pi0) {
  check_interior(pi0, "pi0");
  const Design probe{BernoulliDesign{ProbabilityVector::constant(model.size(), pi0)}};
  if (auto reason = binomial_path_unavailable(model, probe); !reason.empty()) {
    Fail(ErrorCode::kPrecondition, "binomial fast path unavailable: " + reason);
  }
  const std::size_t d = *model.dependencies().regular_degree();
  const std::size_t n = model.size();
  const auto full = binomial_pmf(d, pi0);
  const auto reduced = d > 0 ? binomial_pmf(d - 1, pi0) : std::vector<double>{};
  const double p_own[2] = {1.0 - pi0, pi0};

  CompensatedSum direct;
  CompensatedSum indirect;
  CompensatedSum derivative;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b <= d; ++b) {
      direct += full[b] * (model.response(i, 1, b) - model.response(i, 0, b));
    }
    // Unit i as the receiver: each of its d dependencies, toggled with the
    // other d - 1 still Binomial(d - 1, pi0).
    for (int x = 0; x <= 1; ++x) {
      for (std::size_t b = 0; b + 1 <= d; ++b) {
        indirect += static_cast<double>(d) * p_own[x] * reduced[b] *
                    (model.response(i, x, b + 1) - model.response(i, x, b));
      }
    }
    // dV/dpi by the product rule on P(x) * Binomial(b; d, pi0):
    //   d/dpi P(x) = 2x - 1,
    //   d/dpi Binomial(b; d) = d [Binomial(b-1; d-1) - Binomial(b; d-1)].
    for (int x = 0; x <= 1; ++x) {
      for (std::size_t b = 0; b <= d; ++b) {
        const double f = model.response(i, x, b);
        double dpmf = 0.0;
        if (d > 0) {
          const double left = b >= 1 ? reduced[b - 1] : 0.0;
          const double right = b <= d - 1 ? reduced[b] : 0.0;
          dpmf = static_cast<double>(d) * (left - right);
        }
        derivative += f * ((2.0 * x - 1.0) * full[b] + p_own[x] * dpmf);
      }
    }
  }
  const double nd = static_cast<double>(n);
  EstimandReport r;
  r.method = Method::kAnonymousBinomial;
  r.ade = direct.value() / nd;
  r.aie = indirect.value() / nd;
  r.aoe = r.ade + r.aie;
  r.inf = derivative.value() / nd;
  return r;
}

double mean_outcome_exact(const OutcomeModel& model, const Design& design,
                          const ExecPolicy& exec) {
  check_sizes(model, design_size(design));
  SupportEnumerator support(design);
  auto partials = over_support<CompensatedSum>(
      support, exec, [] { return CompensatedSum{}; },
      [&model](CompensatedSum& acc, TreatmentVector& w, double p) {
        acc += p * mean_outcome_at(model, w);
      });
  CompensatedSum total;
  for (const auto& part : partials) total.merge(part);
  return total.value();
}

double mean_outcome_anonymous_binomial(const OutcomeModel& model, double pi0) {
  check_interior(pi0, "pi0");
  const Design probe{BernoulliDesign{ProbabilityVector::constant(model.size(), pi0)}};
  if (auto reason = binomial_path_unavailable(model, probe); !reason.empty()) {
    Fail(ErrorCode::kPrecondition, "binomial fast path unavailable: " + reason);
  }
  const std::size_t d = *model.dependencies().regular_degree();
  const auto pmf = binomial_pmf(d, pi0);
  CompensatedSum total;
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (std::size_t b = 0; b <= d; ++b) {
      total += pmf[b] * ((1.0 - pi0) * model.response(i, 0, b) +
                         pi0 * model.response(i, 1, b));
    }
  }
  return total.value() / static_cast<double>(model.size());
}

FiniteDifferenceResult inf_finite_difference(
    const OutcomeModel& model, const ProbabilityVector& pi,
    const FiniteDifferenceOptions& options) {
  check_sizes(model, pi.size());
  const double h = options.step;
  if (!(h > 0.0) || !std::isfinite(h)) {
    Fail(ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  }
  const ProbabilityVector up = pi.shifted(h);
  const ProbabilityVector down = pi.shifted(-h);

  if (options.mode == DifferenceMode::kExact) {
    const double v_up =
        mean_outcome_exact(model, Design{BernoulliDesign{up}}, options.exec);
    const double v_down =
        mean_outcome_exact(model, Design{BernoulliDesign{down}}, options.exec);
    return {(v_up - v_down) / (2.0 * h), 0.0};
  }

  const std::uint64_t R = options.replications;
  if (R < 2) {
    Fail(ErrorCode::kInvalidArgument, "Monte Carlo needs at least 2 replications");
  }
  std::vector<double> slopes(R);
  parallel_for(R, options.exec, [&](std::size_t r) {
    Rng rng = stream_rng(options.seed, r);
    std::vector<double> u(pi.size());
    for (double& x : u) x = uniform01(rng);
    const double v_up = mean_outcome_at(model, threshold_assignment(u, up));
    const double v_down = mean_outcome_at(model, threshold_assignment(u, down));
    slopes[r] = (v_up - v_down) / (2.0 * h);
  });
  const MeanSd s = summarize(slopes);
  return {s.mean, s.se};
}

double inf_analytic(const OutcomeModel& model, const BernoulliDesign& design,
                    const ExecPolicy& exec) {
  const std::size_t n = model.size();
  check_sizes(model, design.size());
  if (n > kMaxBernoulliEnumerationUnits) {
    Fail(ErrorCode::kInfeasible,
         "analytic policy derivative needs n <= " +
             std::to_string(kMaxBernoulliEnumerationUnits));
  }
  const auto& deps = model.dependencies();
  std::vector<double> partial(n);
  parallel_for(n, exec, [&](std::size_t k) {
    // dV/dpi_k = (1/n) sum_{w_-k} P(w_-k) sum_i [Y_i(w_k=1) - Y_i(w_k=0)],
    // where only i = k and units influenced by k can move.
    TreatmentVector w(n);
    CompensatedSum acc;
    const std::uint64_t states = std::uint64_t{1} << (n - 1);
    for (std::uint64_t s = 0; s < states; ++s) {
      double p = 1.0;
      for (std::size_t j = 0, bit = 0; j < n; ++j) {
        if (j == k) continue;
        const std::uint8_t x = (s >> bit++) & 1u;
        w.set(j, x);
        p *= x ? design.pi[j] : 1.0 - design.pi[j];
      }
      w.set(k, 1);
      double delta = model.outcome(k, w);
      for (auto i : deps.influenced(k)) delta += model.outcome(i, w);
      w.set(k, 0);
      delta -= model.outcome(k, w);
      for (auto i : deps.influenced(k)) delta -= model.outcome(i, w);
      acc += p * delta;
    }
    partial[k] = acc.value();
  });
  CompensatedSum total;
  for (double v : partial) total += v;
  return total.value() / static_cast<double>(n);
}

double hh_de(const OutcomeModel& model, const Design& design,
             const ExecPolicy& exec) {
  const std::size_t n = model.size();
  check_sizes(model, design_size(design));
  for (std::size_t i = 0; i < n; ++i) {
    const double p = marginal_treatment_probability(design, i);
    if (!(p > 0.0 && p < 1.0)) {
      Fail(ErrorCode::kPrecondition,
           "conditional contrast undefined: unit " + std::to_string(i + 1) +
               " has treatment probability " + std::to_string(p));
    }
  }
  SupportEnumerator support(design);
  // Per unit: [0] sum p*y | W_i=1, [1] P(W_i=1), [2] sum p*y | W_i=0, [3] P(W_i=0).
  auto partials = over_support<std::vector<CompensatedSum>>(
      support, exec, [n] { return std::vector<CompensatedSum>(4 * n); },
      [&model, n](std::vector<CompensatedSum>& acc, TreatmentVector& w,
                  double p) {
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t base = 4 * i + (w[i] ? 0 : 2);
          acc[base] += p * model.outcome(i, w);
          acc[base + 1] += p;
        }
      });
  std::vector<CompensatedSum> total(4 * n);
  for (const auto& part : partials) {
    for (std::size_t k = 0; k < total.size(); ++k) total[k].merge(part[k]);
  }
  CompensatedSum contrast;
  for (std::size_t i = 0; i < n; ++i) {
    contrast += total[4 * i].value() / total[4 * i + 1].value() -
                total[4 * i + 2].value() / total[4 * i + 3].value();
  }
  return contrast.value() / static_cast<double>(n);
}

namespace {

// (1/n) sum_i E_pi Y_i(w_i = 0; W_-i).
double mean_control_outcome(const OutcomeModel& model,
                            const ProbabilityVector& pi,
                            const ExecPolicy& exec) {
  const Design design{BernoulliDesign{pi}};
  const std::size_t n = model.size();
  if (support_enumerable(design)) {
    SupportEnumerator support(design);
    auto partials = over_support<CompensatedSum>(
        support, exec, [] { return CompensatedSum{}; },
        [&model, n](CompensatedSum& acc, TreatmentVector& w, double p) {
          double total = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t saved = w[i];
            w.set(i, 0);
            total += model.outcome(i, w);
            w.set(i, saved);
          }
          acc += p * total;
        });
    CompensatedSum sum;
    for (const auto& part : partials) sum.merge(part);
    return sum.value() / static_cast<double>(n);
  }
  if (auto reason = binomial_path_unavailable(model, design); !reason.empty()) {
    Fail(ErrorCode::kInfeasible,
         "indirect-effect contrast: support too large and " + reason);
  }
  const std::size_t d = *model.dependencies().regular_degree();
  const auto pmf = binomial_pmf(d, pi[0]);
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b <= d; ++b) sum += pmf[b] * model.response(i, 0, b);
  }
  return sum.value() / static_cast<double>(n);
}

}  // namespace

double ie_two_bernoulli(const OutcomeModel& model, const ProbabilityVector& pi,
                        const ProbabilityVector& pi_prime,
                        const ExecPolicy& exec) {
  check_sizes(model, pi.size());
  check_sizes(model, pi_prime.size());
  return mean_control_outcome(model, pi_prime, exec) -
         mean_control_outcome(model, pi, exec);
}

EstimandReport compute_estimands(const OutcomeModel& model,
                                 const Design& design, MethodChoice choice,
                                 std::uint64_t R, std::uint64_t seed,
                                 const ExecPolicy& exec) {
  check_sizes(model, design_size(design));
  const auto binomial = [&] {
    const auto& b = std::get<BernoulliDesign>(design);
    return estimands_anonymous_binomial(model, b.pi[0]);
  };
  switch (choice) {
    case MethodChoice::kExact:
      return estimands_exact(model, design, exec);
    case MethodChoice::kAnonymousBinomial:
      if (auto reason = binomial_path_unavailable(model, design);
          !reason.empty()) {
        Fail(ErrorCode::kInfeasible, "binomial method unavailable: " + reason);
      }
      return binomial();
    case MethodChoice::kMonteCarlo:
      return estimands_monte_carlo(model, design, R, seed, exec);
    case MethodChoice::kAuto:
      break;
  }
  if (support_enumerable(design)) return estimands_exact(model, design, exec);
  if (binomial_path_unavailable(model, design).empty()) return binomial();
  return estimands_monte_carlo(model, design, R, seed, exec);
}

}  // namespace spillover
