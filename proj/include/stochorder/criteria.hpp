#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stochorder/config.hpp"
#include "stochorder/distribution.hpp"
#include "stochorder/ratio.hpp"
#include "stochorder/shape.hpp"

namespace stochorder {

enum class OrderVerdict { Holds, Fails, Unknown };
enum class LrVerdict { Holds, Fails, Unknown, NotAddressed };

std::string to_string(OrderVerdict v);
std::string to_string(LrVerdict v);

// How the two supports relate, computed from density positivity: hull
// endpoints plus interior positivity on the grid, so a boundary zero (e.g.
// a gamma density at 0) does not break hull equality. Never silently
// intersected; each criterion gates on the relation it needs.
enum class SupportRelation { Equal, PInQ, QInP, UnionInterval, Other };

std::string to_string(SupportRelation r);

enum class AssumptionStatus { Verified, VerifiedAtGridResolution, Unverifiable, Failed };

std::string to_string(AssumptionStatus s);

struct Assumption {
  std::string name;
  AssumptionStatus status;
  std::string witness;
};

enum class CriterionKind {
  LcEndpoint,       // Corollary: log-concave ratio, endpoint value
  LcLrEndpoint,     // Corollary: log-concave ratio, endpoint difference/derivative
  UnimodalEndpoint, // Theorem: unimodal ratio, endpoint limit
  SignPattern,      // Proposition: <=2 sign changes of phi, negative rightmost
  Superlevel,       // Proposition: {l >= 1} an interval (one-directional)
};

std::string to_string(CriterionKind k);

struct CriterionVerdict {
  CriterionKind criterion;
  bool applicable = false;
  std::vector<Assumption> assumptions;
  OrderVerdict st = OrderVerdict::Unknown;
  OrderVerdict hr = OrderVerdict::Unknown;
  LrVerdict lr = LrVerdict::NotAddressed;
  double endpoint_value = 0.0;  // l(x*+), l(x0), or the lr difference/derivative
  bool endpoint_resolved = false;
  SupportRelation support_relation = SupportRelation::Other;
};

// Shared per-pair analysis: grid, ratio profile, shape report, support sets.
struct PairContext {
  Distribution p, q;
  std::vector<double> grid;
  RatioProfile profile;
  ShapeReport shape;
  SupportRelation relation = SupportRelation::Other;
  bool union_contiguous = false;
  std::size_t first_union_index = 0;  // first grid index inside supp(P) u supp(Q)
  bool left_endpoint_in_both = false; // densities positive at the hull left point
};

PairContext analyze_pair(const Distribution& p, const Distribution& q,
                         const RunConfig& cfg);

// Theorem-backed endpoint criteria. Each returns the hypotheses it checked
// (with per-hypothesis status) and three-way order verdicts; an unresolved
// endpoint degrades to Unknown, never a guess. The converse direction of the
// unimodal criterion fires without unimodality (it only needs l < 1 on an
// initial segment), so a resolved limit below 1 yields st = hr = Fails even
// when the unimodality hypothesis failed.
CriterionVerdict endpoint_unimodal(const PairContext& ctx, const RunConfig& cfg);
CriterionVerdict endpoint_logconcave(const PairContext& ctx, const RunConfig& cfg);
CriterionVerdict lr_endpoint_test(const PairContext& ctx, const RunConfig& cfg);
CriterionVerdict sign_pattern_criterion(const PairContext& ctx, const RunConfig& cfg);
CriterionVerdict superlevel_criterion(const PairContext& ctx, const RunConfig& cfg);

// Convenience overloads that build the context.
CriterionVerdict endpoint_unimodal(const Distribution& p, const Distribution& q,
                                   const RunConfig& cfg);
CriterionVerdict endpoint_logconcave(const Distribution& p, const Distribution& q,
                                     const RunConfig& cfg);
CriterionVerdict lr_endpoint_test(const Distribution& p, const Distribution& q,
                                  const RunConfig& cfg);
CriterionVerdict sign_pattern_criterion(const Distribution& p,
                                        const Distribution& q,
                                        const RunConfig& cfg);
CriterionVerdict superlevel_criterion(const Distribution& p,
                                      const Distribution& q,
                                      const RunConfig& cfg);

// Conditional tail means D(x) = E[phi(X) | X >= x] under mu, checked against
// the endpoint sign phi(x0). Exact summation on discrete supports.
struct TailMeanReport {
  bool applicable = false;
  std::string reason;
  double left_value = 0.0;  // phi(x0)
  bool all_tail_means_nonpositive = false;
  double worst = 0.0;
  double worst_at = 0.0;
  bool converse_witness_found = false;
  double witness_x = 0.0;
  double witness_value = 0.0;
  bool equivalence_holds = false;
  std::vector<std::pair<double, double>> table;  // (x, D(x))
};

TailMeanReport tail_mean_sign(const Distribution& mu,
                              const std::function<double(double)>& phi,
                              const RunConfig& cfg);

// Runs all five criteria from strongest hypothesis to weakest and merges.
// Throws DiagnosticError if two applicable criteria contradict each other on
// the same order (that is a bug or tolerance misconfiguration, never data).
struct ClassifyResult {
  PairContext ctx;
  std::vector<CriterionVerdict> verdicts;
  OrderVerdict st = OrderVerdict::Unknown;
  OrderVerdict hr = OrderVerdict::Unknown;
  LrVerdict lr = LrVerdict::NotAddressed;
};

ClassifyResult classify_and_decide(const Distribution& p, const Distribution& q,
                                   const RunConfig& cfg);

}  // namespace stochorder
