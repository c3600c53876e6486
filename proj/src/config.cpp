#include "stochorder/config.hpp"

namespace stochorder {

void RunConfig::set_tolerance(const std::string& key, double value) {
  if (!(value > 0.0)) throw InputError("tolerance " + key + " must be > 0");
  if (key == "zero_tol")
    zero_tol = value;
  else if (key == "eq_tol")
    eq_tol = value;
  else if (key == "deriv_tol")
    deriv_tol = value;
  else if (key == "curvature_tol")
    curvature_tol = value;
  else if (key == "st_tol")
    st_tol = value;
  else if (key == "hr_slack")
    hr_slack = value;
  else if (key == "lr_slack")
    lr_rel_slack = value;
  else if (key == "tail_tol")
    tail_tol = value;
  else if (key == "hazard_floor")
    hazard_floor = value;
  else if (key == "touch_tol")
    touch_tol = value;
  else if (key == "abs_tol")
    quad_abs_tol = value;
  else if (key == "tail_mass")
    tail_mass = value;
  else
    throw InputError("unknown tolerance key \"" + key + "\"");
}

}  // namespace stochorder
