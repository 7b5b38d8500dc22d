// SPDX-License-Identifier: Apache-2.0
// Umbrella header.
#pragma once

#include "umm/asymptotics.hpp"
#include "umm/detection.hpp"
#include "umm/errors.hpp"
#include "umm/lan_models.hpp"
#include "umm/linalg.hpp"
#include "umm/montecarlo.hpp"
#include "umm/nlp_detect.hpp"
#include "umm/specfun.hpp"

namespace umm {
inline constexpr const char* kVersion = "0.1.0";
}
