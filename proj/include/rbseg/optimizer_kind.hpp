#ifndef RBSEG_OPTIMIZER_KIND_HPP
#define RBSEG_OPTIMIZER_KIND_HPP

#include <string>

#include "rbseg/errors.hpp"

namespace rbseg {

enum class OptimizerKind { Momentum, RMSProp, Adam };

inline const char* optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Momentum: return "Momentum";
    case OptimizerKind::RMSProp: return "RMSProp";
    default: return "Adam";
  }
}

inline OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "Momentum") return OptimizerKind::Momentum;
  if (name == "RMSProp") return OptimizerKind::RMSProp;
  if (name == "Adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer: " + name);
}

}  // namespace rbseg

#endif  // RBSEG_OPTIMIZER_KIND_HPP
