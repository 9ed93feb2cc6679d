#pragma once

#include "qcrb/errors.hpp"
#include "qcrb/fock_oracle.hpp"
#include "qcrb/moments.hpp"
#include "qcrb/optimizer.hpp"
#include "qcrb/qfim_ideal.hpp"
#include "qcrb/qfim_lossy.hpp"

namespace qcrb {
inline constexpr const char* kVersion = "0.1.0";
}
