#pragma once

#include <array>
#include <string>
#include <vector>

#include "stochorder/config.hpp"
#include "stochorder/ratio.hpp"

namespace stochorder {

enum class Tri { True, False, Undetermined };

std::string to_string(Tri t);

// Sign pattern of a sequence over {+, 0, -} with the collapse rule of the
// tail-mean lemma: maximal zero runs are deleted, then equal adjacent
// letters merge. change_count counts alternations of the collapsed word.
struct SignWord {
  std::string word;       // one letter per point
  std::string collapsed;  // over {+,-}, no equal adjacent letters
  int change_count = 0;
  enum class Rightmost { Plus, Minus, AllZero } rightmost = Rightmost::AllZero;

  // Adjacent-deduplicated word with zeros kept, e.g. "0+0-" for a profile
  // that is flat at 1, rises, flattens, then falls below.
  std::string runs() const;
};

SignWord sign_word(const std::vector<double>& values, double zero_tol);

struct UnimodalResult {
  Tri verdict = Tri::Undetermined;
  double mode_x = 0.0;
  bool has_witness = false;
  std::array<double, 3> witness{};  // grid points i<j<k with l(i)>l(j)<l(k)
};

struct LogConcaveResult {
  Tri verdict = Tri::Undetermined;
  double worst = 0.0;     // most positive curvature estimate
  double worst_at = 0.0;  // grid location
  bool any_admissible = false;
};

struct SuperlevelResult {
  bool is_interval = false;
  bool empty = false;
  double left = 0.0;
  double right = 0.0;
  bool complement_nonincreasing = false;
  double complement_violation_at = 0.0;
};

// Unimodality of l over the support union (zero-over-zero points excluded).
// "False" carries an exact witness; "True" certifies at grid resolution;
// a flat-at-tolerance but not exactly constant profile is Undetermined.
UnimodalResult check_unimodal(const RatioProfile& profile, double zero_tol);

// Discrete: all admissible Delta^2 log l(k) <= tol. Continuous: second
// central difference estimates of (log l)'' on the (possibly non-uniform)
// grid, compared against the same tol.
LogConcaveResult check_log_concave(const RatioProfile& profile,
                                   double curvature_tol);

// Structure of A = {l >= 1 - zero_tol} and monotonicity of l on the
// complement (the extra hazard-rate hypothesis of the superlevel criterion).
SuperlevelResult superlevel_structure(const RatioProfile& profile,
                                      double zero_tol);

struct ShapeReport {
  Tri log_concave = Tri::Undetermined;
  double worst_curvature = 0.0;
  double worst_curvature_at = 0.0;
  Tri unimodal = Tri::Undetermined;
  double mode_x = 0.0;
  bool has_unimodal_witness = false;
  std::array<double, 3> unimodal_witness{};
  SignWord phi_sign;
  bool superlevel_is_interval = false;
  bool superlevel_empty = false;
  double superlevel_left = 0.0;
  double superlevel_right = 0.0;
  bool rightmost_piece_nonincreasing = false;
  double rightmost_violation_at = 0.0;
  double tolerance_used = 0.0;
  double max_grid_spacing = 0.0;
  bool discrete = false;
};

// Full classification. Audits the implication chain
//   log-concave => unimodal => superlevel interval
// and throws DiagnosticError when a *decisive* violation shows up (a real
// valley or gap, not a knife-edge tolerance artifact) since the implications
// are theorems about the exact objects.
ShapeReport shape_report(const RatioProfile& profile, const RunConfig& cfg);

struct LevelFeatures {
  std::vector<double> touches;  // points where l touches 1 without crossing
  std::vector<std::pair<double, double>> crossings;  // one-cell sign flips
};

// Locates touches and crossings of the level l = 1 to within one grid cell.
LevelFeatures level_one_features(const RatioProfile& profile,
                                 const RunConfig& cfg);

}  // namespace stochorder
