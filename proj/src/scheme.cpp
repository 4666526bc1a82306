#include "nsc/scheme.hpp"

#include <cmath>
#include <sstream>

#include "nsc/error.hpp"

namespace nsc {

std::string_view to_string(SchemeVariant variant) {
  switch (variant) {
    case SchemeVariant::MoreauJean: return "moreau_jean";
    case SchemeVariant::MoreauJeanVariant: return "moreau_jean_variant";
    case SchemeVariant::NonsmoothNewmark: return "newmark";
    case SchemeVariant::NonsmoothHHT: return "hht";
    case SchemeVariant::NonsmoothGeneralizedAlpha: return "generalized_alpha";
    case SchemeVariant::NonsmoothKHGeneralizedAlpha: return "kh_generalized_alpha";
  }
  return "unknown";
}

SchemeVariant parse_variant(std::string_view name) {
  for (auto v : {SchemeVariant::MoreauJean, SchemeVariant::MoreauJeanVariant, SchemeVariant::NonsmoothNewmark,
                 SchemeVariant::NonsmoothHHT, SchemeVariant::NonsmoothGeneralizedAlpha,
                 SchemeVariant::NonsmoothKHGeneralizedAlpha}) {
    if (to_string(v) == name) {
      return v;
    }
  }
  fail(ErrorCode::InvalidSpec, "scheme.variant", "unknown scheme '" + std::string(name) + "'");
}

SchemeSpec SchemeSpec::moreau_jean(double theta) {
  SchemeSpec s;
  s.variant = SchemeVariant::MoreauJean;
  s.theta = theta;
  return s;
}

SchemeSpec SchemeSpec::moreau_jean_variant(double theta) {
  SchemeSpec s;
  s.variant = SchemeVariant::MoreauJeanVariant;
  s.theta = theta;
  return s;
}

SchemeSpec SchemeSpec::newmark(double gamma, double beta) {
  SchemeSpec s;
  s.variant = SchemeVariant::NonsmoothNewmark;
  s.gamma = gamma;
  s.beta = beta;
  return s;
}

SchemeSpec SchemeSpec::hht(double alpha) {
  return hht(alpha, 0.5 + alpha, 0.25 * (1.0 + alpha) * (1.0 + alpha));
}

SchemeSpec SchemeSpec::hht(double alpha, double gamma, double beta) {
  SchemeSpec s;
  s.variant = SchemeVariant::NonsmoothHHT;
  s.gamma = gamma;
  s.beta = beta;
  s.alpha_m = 0.0;
  s.alpha_f = alpha;
  return s;
}

SchemeSpec SchemeSpec::generalized_alpha(double gamma, double beta, double alpha_m, double alpha_f) {
  SchemeSpec s;
  s.variant = SchemeVariant::NonsmoothGeneralizedAlpha;
  s.gamma = gamma;
  s.beta = beta;
  s.alpha_m = alpha_m;
  s.alpha_f = alpha_f;
  return s;
}

SchemeSpec SchemeSpec::generalized_alpha_from_rho(double rho_inf) {
  if (!(rho_inf >= 0.0 && rho_inf <= 1.0)) {
    fail(ErrorCode::InvalidSpec, "scheme.rho_inf", "spectral radius must lie in [0, 1]");
  }
  const double alpha_m = (2.0 * rho_inf - 1.0) / (rho_inf + 1.0);
  const double alpha_f = rho_inf / (rho_inf + 1.0);
  const double gamma = 0.5 + alpha_f - alpha_m;
  const double beta = 0.25 * (gamma + 0.5) * (gamma + 0.5);
  return generalized_alpha(gamma, beta, alpha_m, alpha_f);
}

SchemeSpec SchemeSpec::kh_generalized_alpha(double gamma, double beta, double alpha_m, double alpha_f) {
  SchemeSpec s = generalized_alpha(gamma, beta, alpha_m, alpha_f);
  s.variant = SchemeVariant::NonsmoothKHGeneralizedAlpha;
  return s;
}

SchemeSpec SchemeSpec::kh_generalized_alpha_from_rho(double rho_inf) {
  SchemeSpec s = generalized_alpha_from_rho(rho_inf);
  s.variant = SchemeVariant::NonsmoothKHGeneralizedAlpha;
  return s;
}

double SchemeSpec::eta_over_nu() const {
  if (nu() == 0.0) {
    // rho_inf = 1: (alpha_f - alpha_m)/(1/2 - alpha_m) -> 2/3 along the rho family.
    return 2.0 / 3.0;
  }
  return eta() / nu();
}

bool SchemeSpec::filters_well_defined() const { return nu() != 0.0 || eta() == 0.0; }

void SchemeSpec::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (is_moreau_family()) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
      fail(ErrorCode::InvalidSpec, "scheme.theta", "theta must lie in [0, 1]");
    }
    return;
  }
  if (!finite(gamma) || !finite(beta) || !finite(alpha_m) || !finite(alpha_f)) {
    fail(ErrorCode::InvalidSpec, "scheme", "parameters must be finite");
  }
  if (gamma < 0.0) {
    fail(ErrorCode::InvalidSpec, "scheme.gamma", "gamma must be non-negative");
  }
  if (beta < 0.0) {
    fail(ErrorCode::InvalidSpec, "scheme.beta", "beta must be non-negative");
  }
  switch (variant) {
    case SchemeVariant::NonsmoothNewmark:
      if (alpha_m != 0.0 || alpha_f != 0.0) {
        fail(ErrorCode::InconsistentSpec, "scheme.alpha", "Newmark requires alpha_m = alpha_f = 0");
      }
      break;
    case SchemeVariant::NonsmoothHHT:
      if (alpha_m != 0.0) {
        fail(ErrorCode::InconsistentSpec, "scheme.alpha_m", "HHT requires alpha_m = 0");
      }
      if (!(alpha_f >= 0.0 && alpha_f <= 1.0 / 3.0)) {
        fail(ErrorCode::InvalidSpec, "scheme.alpha", "HHT requires alpha in [0, 1/3]");
      }
      break;
    default:
      if (!(alpha_m < 1.0)) {
        fail(ErrorCode::InvalidSpec, "scheme.alpha_m", "alpha_m must be below 1");
      }
      if (!(alpha_f < 1.0)) {
        fail(ErrorCode::InvalidSpec, "scheme.alpha_f", "alpha_f must be below 1");
      }
      break;
  }
}

std::string SchemeSpec::describe() const {
  std::ostringstream os;
  os << to_string(variant);
  if (is_moreau_family()) {
    os << "(theta=" << theta << ")";
  } else {
    os << "(gamma=" << gamma << ", beta=" << beta << ", alpha_m=" << alpha_m << ", alpha_f=" << alpha_f << ")";
  }
  return os.str();
}

}  // namespace nsc
