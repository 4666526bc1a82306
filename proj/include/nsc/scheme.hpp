#pragma once

#include <string>
#include <string_view>

namespace nsc {

enum class SchemeVariant {
  MoreauJean,
  MoreauJeanVariant,
  NonsmoothNewmark,
  NonsmoothHHT,
  NonsmoothGeneralizedAlpha,
  NonsmoothKHGeneralizedAlpha,
};

std::string_view to_string(SchemeVariant variant);
SchemeVariant parse_variant(std::string_view name);

struct SchemeSpec {
  SchemeVariant variant = SchemeVariant::MoreauJean;
  double theta = 0.5;
  double gamma = 0.5;
  double beta = 0.25;
  double alpha_m = 0.0;
  double alpha_f = 0.0;

  static SchemeSpec moreau_jean(double theta);
  static SchemeSpec moreau_jean_variant(double theta);
  static SchemeSpec newmark(double gamma, double beta);
  /// HHT with the usual second-order choice gamma = 1/2 + alpha, beta = (1 + alpha)^2 / 4.
  static SchemeSpec hht(double alpha);
  static SchemeSpec hht(double alpha, double gamma, double beta);
  static SchemeSpec generalized_alpha(double gamma, double beta, double alpha_m, double alpha_f);
  /// alpha_m = (2 rho - 1)/(rho + 1), alpha_f = rho/(rho + 1),
  /// gamma = 1/2 + alpha_f - alpha_m, beta = (gamma + 1/2)^2 / 4.
  static SchemeSpec generalized_alpha_from_rho(double rho_inf);
  static SchemeSpec kh_generalized_alpha(double gamma, double beta, double alpha_m, double alpha_f);
  static SchemeSpec kh_generalized_alpha_from_rho(double rho_inf);

  bool is_moreau_family() const {
    return variant == SchemeVariant::MoreauJean || variant == SchemeVariant::MoreauJeanVariant;
  }
  bool is_alpha_family() const { return !is_moreau_family(); }

  /// Filter time-scale factor nu = 1/2 - alpha_m.
  double nu() const { return 0.5 - alpha_m; }
  /// Filter gain eta = alpha_f - alpha_m.
  double eta() const { return alpha_f - alpha_m; }
  /// eta / nu, with the rho_inf = 1 limit 2/3 when nu = 0.
  double eta_over_nu() const;
  /// Whether the filter construction has a finite form (nu != 0 or eta = 0).
  bool filters_well_defined() const;

  /// Throws Error(InvalidSpec | InconsistentSpec) when parameters are out of range.
  void validate() const;

  std::string describe() const;
};

}  // namespace nsc
