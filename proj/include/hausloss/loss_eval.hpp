#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hausloss/grid.hpp"

namespace hausloss {

enum class LossFamily { Dsc, Dt, DtOs, DtGauss, Er, Cv, Combined };

constexpr std::string_view to_string(LossFamily f) {
  switch (f) {
    case LossFamily::Dsc: return "dsc";
    case LossFamily::Dt: return "dt";
    case LossFamily::DtOs: return "dt-os";
    case LossFamily::DtGauss: return "dt-gauss";
    case LossFamily::Er: return "er";
    case LossFamily::Cv: return "cv";
    case LossFamily::Combined: return "combined";
  }
  return "unknown";
}

LossFamily parse_family(std::string_view name);

/// Loss value plus its gradient with respect to the prediction q.
template <typename Scalar>
struct LossEval {
  Scalar value = Scalar(0);
  Grid<Scalar> grad;
  LossFamily family = LossFamily::Dsc;
  std::vector<std::string> flags;
  std::map<std::string, double> terms;

  bool has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
};

/// max(x - level, 0) / (1 - level): zero below the level, and a solid
/// plateau of value 1 maps back to 1.
template <typename Scalar>
inline Scalar soft_threshold(Scalar x, Scalar level) {
  return x > level ? (x - level) / (Scalar(1) - level) : Scalar(0);
}

template <typename Scalar>
inline Scalar soft_threshold_slope(Scalar x, Scalar level) {
  return x > level ? Scalar(1) / (Scalar(1) - level) : Scalar(0);
}

template <typename Scalar>
void require_same_spec(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q) {
  require_same_spec(p.spec(), q.spec());
}

}  // namespace hausloss
