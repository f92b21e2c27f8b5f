#include "nabc/policy.hpp"

#include <algorithm>
#include <string>

#include "nabc/errors.hpp"

namespace nabc {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ab: return "ab";
    case Method::sr: return "sr";
    case Method::ad: return "ad";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ab") return Method::ab;
  if (lower == "sr") return Method::sr;
  if (lower == "ad") return Method::ad;
  throw InputError("unknown method '" + std::string(text) + "' (expected ab, sr or ad)");
}

double Policy::control(int stage, const Eigen::Ref<const Eigen::VectorXd>& reduced) const {
  if (stage == 0) return std::clamp(root.control, 0.0, 1.0);
  if (stage < 0 || stage > static_cast<int>(stages.size()))
    throw InputError("policy: stage " + std::to_string(stage) + " has no control surrogate");
  return std::clamp(stages[stage - 1].control.predict(reduced), 0.0, 1.0);
}

}  // namespace nabc
