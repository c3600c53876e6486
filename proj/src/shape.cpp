#include "stochorder/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochorder/errors.hpp"

namespace stochorder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Indices of points that belong to the support union S (both-zero points
// carry the 0/0 := 0 convention but lie outside S).
std::vector<std::size_t> union_support_indices(const RatioProfile& p) {
  std::vector<std::size_t> idx;
  idx.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.flags[i] != RatioFlag::ZeroOverZero) idx.push_back(i);
  return idx;
}

char diff_letter(double a, double b, double zero_tol) {
  if (a == kInf && b == kInf) return '0';
  if (a == kInf) return '-';
  if (b == kInf) return '+';
  const double tol = zero_tol * (1.0 + std::max(std::fabs(a), std::fabs(b)));
  const double d = b - a;
  if (d > tol) return '+';
  if (d < -tol) return '-';
  return '0';
}

std::string collapse(const std::string& word) {
  std::string out;
  for (char ch : word) {
    if (ch == '0') continue;
    if (!out.empty() && out.back() == ch) continue;
    out.push_back(ch);
  }
  return out;
}

}  // namespace

std::string to_string(Tri t) {
  switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    case Tri::Undetermined: return "undetermined";
  }
  return "?";
}

std::string SignWord::runs() const {
  std::string out;
  for (char ch : word)
    if (out.empty() || out.back() != ch) out.push_back(ch);
  return out;
}

SignWord sign_word(const std::vector<double>& values, double zero_tol) {
  SignWord sw;
  sw.word.reserve(values.size());
  for (double v : values) {
    if (v > zero_tol)
      sw.word.push_back('+');
    else if (v < -zero_tol)
      sw.word.push_back('-');
    else
      sw.word.push_back('0');
  }
  sw.collapsed = collapse(sw.word);
  sw.change_count =
      sw.collapsed.empty() ? 0 : static_cast<int>(sw.collapsed.size()) - 1;
  if (sw.collapsed.empty())
    sw.rightmost = SignWord::Rightmost::AllZero;
  else
    sw.rightmost = sw.collapsed.back() == '+' ? SignWord::Rightmost::Plus
                                              : SignWord::Rightmost::Minus;
  return sw;
}

UnimodalResult check_unimodal(const RatioProfile& profile, double zero_tol) {
  UnimodalResult res;
  const auto idx = union_support_indices(profile);
  if (idx.empty()) return res;

  std::string word;
  bool any_nonzero_diff = false;
  for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
    const double a = profile.ell[idx[t]];
    const double b = profile.ell[idx[t + 1]];
    word.push_back(diff_letter(a, b, zero_tol));
    if (a != b) any_nonzero_diff = true;
  }
  const std::string c = collapse(word);

  // Mode = first point attaining the maximum over S.
  std::size_t arg = idx[0];
  for (std::size_t i : idx)
    if (profile.ell[i] > profile.ell[arg]) arg = i;
  res.mode_x = profile.grid[arg];

  if (c.empty()) {
    res.verdict = any_nonzero_diff ? Tri::Undetermined : Tri::True;
    return res;
  }
  if (c == "+" || c == "-" || c == "+-") {
    res.verdict = Tri::True;
    return res;
  }

  res.verdict = Tri::False;
  // Witness i<j<k with l(i) > l(j) < l(k) strictly beyond tolerance: at the
  // first up-step following a down-step, pair the valley with the argmax of
  // everything before it.
  bool down_seen = false;
  for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
    const std::size_t a = idx[t], b = idx[t + 1];
    const char ch = diff_letter(profile.ell[a], profile.ell[b], zero_tol);
    if (ch == '-') down_seen = true;
    if (ch == '+' && down_seen) {
      std::size_t best = idx[0];
      for (std::size_t s = 0; s <= t; ++s)
        if (profile.ell[idx[s]] > profile.ell[best]) best = idx[s];
      if (diff_letter(profile.ell[a], profile.ell[best], zero_tol) == '+') {
        res.has_witness = true;
        res.witness = {profile.grid[best], profile.grid[a], profile.grid[b]};
        break;
      }
    }
  }
  return res;
}

LogConcaveResult check_log_concave(const RatioProfile& profile,
                                   double curvature_tol) {
  LogConcaveResult res;
  // Contiguous block of finite log l; -inf regions at the edges (density
  // zeros at a boundary) are trimmed, interior holes make the verdict
  // undetermined.
  std::vector<std::size_t> fin;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (std::isfinite(profile.log_ell[i])) fin.push_back(i);
  if (fin.empty()) return res;
  if (fin.back() - fin.front() + 1 != fin.size()) return res;

  res.worst = -kInf;
  if (profile.discrete) {
    for (std::size_t t = 0; t + 2 < fin.size(); ++t) {
      const auto sd = second_difference_log(profile, fin[t]);
      if (!sd.finite) continue;
      res.any_admissible = true;
      if (sd.value > res.worst) {
        res.worst = sd.value;
        res.worst_at = profile.grid[fin[t]];
      }
    }
    if (!res.any_admissible) {
      // Fewer than three support points: the concavity condition is vacuous.
      res.verdict = Tri::True;
      res.worst = 0.0;
      return res;
    }
    res.verdict = res.worst <= curvature_tol ? Tri::True : Tri::False;
    return res;
  }

  // Second differences amplify value roundoff by 1/h^2, so stencil points
  // keep a minimum separation (a fraction of the median cell width); the
  // geometric boundary refinement of the grid must not enter the curvature
  // estimate, while hybrid heavy-tail grids keep their body resolution.
  std::vector<double> widths;
  widths.reserve(fin.size());
  for (std::size_t t = 0; t + 1 < fin.size(); ++t)
    widths.push_back(profile.grid[fin[t + 1]] - profile.grid[fin[t]]);
  double h_min = 0.0;
  if (!widths.empty()) {
    std::nth_element(widths.begin(), widths.begin() + widths.size() / 2,
                     widths.end());
    h_min = 0.25 * widths[widths.size() / 2];
  }
  std::vector<std::size_t> pts;
  for (std::size_t idx : fin)
    if (pts.empty() || profile.grid[idx] - profile.grid[pts.back()] >= h_min)
      pts.push_back(idx);
  for (std::size_t t = 1; t + 1 < pts.size(); ++t) {
    const std::size_t il = pts[t - 1], i = pts[t], ir = pts[t + 1];
    const double hl = profile.grid[i] - profile.grid[il];
    const double hr = profile.grid[ir] - profile.grid[i];
    if (hl <= 0.0 || hr <= 0.0) continue;
    const double dl = (profile.log_ell[i] - profile.log_ell[il]) / hl;
    const double dr = (profile.log_ell[ir] - profile.log_ell[i]) / hr;
    const double est = 2.0 * (dr - dl) / (hl + hr);
    res.any_admissible = true;
    if (est > res.worst) {
      res.worst = est;
      res.worst_at = profile.grid[i];
    }
  }
  if (!res.any_admissible) return res;
  res.verdict = res.worst <= curvature_tol ? Tri::True : Tri::False;
  return res;
}

SuperlevelResult superlevel_structure(const RatioProfile& profile,
                                      double zero_tol) {
  SuperlevelResult res;
  const auto idx = union_support_indices(profile);
  std::vector<bool> in_a(idx.size(), false);
  std::size_t first = idx.size(), last = 0, count = 0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double l = profile.ell[idx[t]];
    if (l >= 1.0 - zero_tol) {
      in_a[t] = true;
      if (count == 0) first = t;
      last = t;
      ++count;
    }
  }
  if (count == 0) {
    res.empty = true;
    res.is_interval = true;  // empty set is (vacuously) an interval
  } else {
    res.is_interval = (last - first + 1 == count);
    res.left = profile.grid[idx[first]];
    res.right = profile.grid[idx[last]];
  }

  // l nonincreasing on the complement, compared across consecutive
  // complement points (the set definition, so gaps spanned by A count).
  res.complement_nonincreasing = true;
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (in_a[t]) continue;
    const double l = profile.ell[idx[t]];
    if (have_prev && diff_letter(prev, l, zero_tol) == '+') {
      res.complement_nonincreasing = false;
      res.complement_violation_at = profile.grid[idx[t]];
      break;
    }
    prev = l;
    have_prev = true;
  }
  return res;
}

ShapeReport shape_report(const RatioProfile& profile, const RunConfig& cfg) {
  ShapeReport r;
  r.discrete = profile.discrete;
  r.tolerance_used = cfg.zero_tol;
  for (std::size_t i = 0; i + 1 < profile.grid.size(); ++i)
    r.max_grid_spacing =
        std::max(r.max_grid_spacing, profile.grid[i + 1] - profile.grid[i]);

  const auto lc = check_log_concave(profile, cfg.curvature_tol);
  r.log_concave = lc.verdict;
  r.worst_curvature = lc.any_admissible ? lc.worst : 0.0;
  r.worst_curvature_at = lc.worst_at;

  const auto um = check_unimodal(profile, cfg.zero_tol);
  r.unimodal = um.verdict;
  r.mode_x = um.mode_x;
  r.has_unimodal_witness = um.has_witness;
  r.unimodal_witness = um.witness;

  const auto idx = union_support_indices(profile);
  std::vector<double> phi_s;
  phi_s.reserve(idx.size());
  for (std::size_t i : idx) phi_s.push_back(profile.phi[i]);
  r.phi_sign = sign_word(phi_s, cfg.zero_tol);

  const auto sl = superlevel_structure(profile, cfg.zero_tol);
  r.superlevel_is_interval = sl.is_interval;
  r.superlevel_empty = sl.empty;
  r.superlevel_left = sl.left;
  r.superlevel_right = sl.right;

  // Rightmost sign-constant part of phi: the suffix after the last point
  // with phi > zero_tol. l must be nonincreasing there for the hazard-rate
  // addenda of the sign-pattern and superlevel criteria.
  std::size_t suffix_start = 0;
  for (std::size_t t = 0; t < idx.size(); ++t)
    if (profile.phi[idx[t]] > cfg.zero_tol) suffix_start = t + 1;
  r.rightmost_piece_nonincreasing = true;
  for (std::size_t t = suffix_start; t + 1 < idx.size(); ++t) {
    if (diff_letter(profile.ell[idx[t]], profile.ell[idx[t + 1]],
                    cfg.zero_tol) == '+') {
      r.rightmost_piece_nonincreasing = false;
      r.rightmost_violation_at = profile.grid[idx[t + 1]];
      break;
    }
  }

  // Implication audit (Figure-1 chain). Only decisive violations throw: a
  // knife-edge tolerance artifact is not a classifier bug.
  if (r.log_concave == Tri::True && r.unimodal == Tri::False &&
      um.has_witness) {
    // Recover values at the witness points.
    double vi = 0, vj = 0, vk = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (profile.grid[i] == um.witness[0]) vi = profile.ell[i];
      if (profile.grid[i] == um.witness[1]) vj = profile.ell[i];
      if (profile.grid[i] == um.witness[2]) vk = profile.ell[i];
    }
    const double valley_depth = std::min(vi, vk) - vj;
    if (valley_depth > 1e-6 * (1.0 + std::max(vi, vk)))
      throw DiagnosticError(
          "shape audit: log-concave profile with a decisive unimodality "
          "violation");
  }
  if (r.unimodal == Tri::True && !sl.is_interval && !sl.empty) {
    // A real gap requires a point well below the level between two A points.
    bool decisive = false;
    bool seen_a = false;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const double l = profile.ell[idx[t]];
      if (l >= 1.0 - cfg.zero_tol) {
        seen_a = true;
      } else if (seen_a && l < 1.0 - 100.0 * cfg.zero_tol &&
                 profile.grid[idx[t]] < sl.right) {
        decisive = true;
        break;
      }
    }
    if (decisive)
      throw DiagnosticError(
          "shape audit: unimodal profile with a decisive superlevel gap");
  }
  return r;
}

LevelFeatures level_one_features(const RatioProfile& profile,
                                 const RunConfig& cfg) {
  LevelFeatures out;
  const auto idx = union_support_indices(profile);

  // Touches: isolated zero letters flanked by '+', or strictly positive
  // local minima of phi below touch_tol inside a '+' region.
  for (std::size_t t = 1; t + 1 < idx.size(); ++t) {
    const double pm = profile.phi[idx[t - 1]];
    const double pc = profile.phi[idx[t]];
    const double pp = profile.phi[idx[t + 1]];
    const bool isolated_zero = std::fabs(pc) <= cfg.zero_tol &&
                               pm > cfg.zero_tol && pp > cfg.zero_tol;
    const bool tiny_local_min = pc > cfg.zero_tol && pc <= cfg.touch_tol &&
                                pc <= pm && pc <= pp &&
                                (pm > cfg.touch_tol || pp > cfg.touch_tol ||
                                 (pm > pc && pp > pc));
    if (isolated_zero || tiny_local_min) {
      // Keep only the deepest point of a candidate run.
      if (!out.touches.empty() &&
          std::fabs(out.touches.back() - profile.grid[idx[t - 1]]) <
              2.0 * (profile.grid[idx[t]] - profile.grid[idx[t - 1]]))
        continue;
      out.touches.push_back(profile.grid[idx[t]]);
    }
  }

  // Crossings: sign flips with at most one zero letter between them.
  for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
    const double a = profile.phi[idx[t]];
    const double b = profile.phi[idx[t + 1]];
    const bool a_pos = a > cfg.zero_tol, a_neg = a < -cfg.zero_tol;
    const bool b_pos = b > cfg.zero_tol, b_neg = b < -cfg.zero_tol;
    if ((a_pos && b_neg) || (a_neg && b_pos)) {
      out.crossings.emplace_back(profile.grid[idx[t]], profile.grid[idx[t + 1]]);
    } else if ((a_pos || a_neg) && t + 2 < idx.size()) {
      const double c = profile.phi[idx[t + 2]];
      const bool zero_mid = std::fabs(b) <= cfg.zero_tol;
      if (zero_mid && ((a_pos && c < -cfg.zero_tol) || (a_neg && c > cfg.zero_tol)))
        out.crossings.emplace_back(profile.grid[idx[t]], profile.grid[idx[t + 2]]);
    }
  }
  return out;
}

}  // namespace stochorder
