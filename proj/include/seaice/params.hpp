#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "seaice/error.hpp"

namespace seaice {

/// Physical constants of the coupled model (SI units).
struct PhysParams {
  double rho_atm = 1.3;
  double rho_ocn = 1026.0;
  double rho_ice = 900.0;
  double C_atm = 1.2e-3;
  double C_ocn = 5.5e-3;
  double theta_atm = 25.0 * std::numbers::pi / 180.0;
  double theta_ocn = 25.0 * std::numbers::pi / 180.0;
  double p_star = 27500.0;
  double c_star = 20.0;
  double e_ratio = 2.0;
  double delta_reg = 2e-9;
  double d_h = 0.01;
  double d_a = 0.01;
  double g_grav = 9.81;
  double kappa1 = 0.1;
  double kappa2 = 2.0;
  double h_ocn = 1.0;
  double h_atm = 3.0;

  /// Messages of the form "phys.<name>: reason"; empty when valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    auto positive = [&](double x, const char* name) {
      if (!(x > 0.0)) v.push_back(std::string("phys.") + name + ": must be > 0");
    };
    positive(rho_atm, "rho_atm");
    positive(rho_ocn, "rho_ocn");
    positive(rho_ice, "rho_ice");
    positive(p_star, "p_star");
    positive(delta_reg, "delta_reg");
    positive(d_h, "d_h");
    positive(d_a, "d_a");
    positive(h_ocn, "h_ocn");
    positive(h_atm, "h_atm");
    if (!(C_atm >= 0.0)) v.push_back("phys.C_atm: must be >= 0");
    if (!(C_ocn >= 0.0)) v.push_back("phys.C_ocn: must be >= 0");
    if (!(c_star >= 0.0)) v.push_back("phys.c_star: must be >= 0");
    if (!(g_grav >= 0.0)) v.push_back("phys.g_grav: must be >= 0");
    if (!(kappa1 > 0.0)) v.push_back("phys.kappa1: must be > 0");
    if (!(kappa1 < kappa2)) v.push_back("phys.kappa2: must exceed kappa1");
    if (!(e_ratio >= 1.0)) v.push_back("phys.e_ratio: must be >= 1");
    if (!(h_atm > kappa2)) v.push_back("phys.h_atm: atmosphere top must lie above kappa2");
    return v;
  }
  void validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
  }
};

}  // namespace seaice
