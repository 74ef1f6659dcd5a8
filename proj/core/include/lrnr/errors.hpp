#pragma once

#include <stdexcept>
#include <string>

namespace lrnr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LRNR_DECLARE_ERROR(Name)                         \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& what)               \
        : Error(std::string(#Name) + ": " + what) {}     \
  }

LRNR_DECLARE_ERROR(OutOfRange);
LRNR_DECLARE_ERROR(NotMonotone);
LRNR_DECLARE_ERROR(InvalidEps);
LRNR_DECLARE_ERROR(DegenerateJump);
LRNR_DECLARE_ERROR(HorizonExceeded);
LRNR_DECLARE_ERROR(NotAdmissible);
LRNR_DECLARE_ERROR(NotInShock);
LRNR_DECLARE_ERROR(OutOfDomain);
LRNR_DECLARE_ERROR(InvalidCx);
LRNR_DECLARE_ERROR(ShapeMismatch);
LRNR_DECLARE_ERROR(ShockBeforeHorizon);
LRNR_DECLARE_ERROR(CapExceeded);
LRNR_DECLARE_ERROR(IOError);
LRNR_DECLARE_ERROR(ConfigError);

#undef LRNR_DECLARE_ERROR

}  // namespace lrnr
