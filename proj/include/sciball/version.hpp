#pragma once

#define SCIBALL_VERSION_MAJOR 0
#define SCIBALL_VERSION_MINOR 3
#define SCIBALL_VERSION_PATCH 0

namespace sciball {

  inline constexpr char const* version = "0.3.0";

}  // namespace sciball
