#pragma once

#include <string>

#include "robopainter/params.hpp"

// Shared fixtures for the unit suites: the parameter file and the room
// descriptions are compiled in as absolute paths so the binaries run from any
// working directory.

#ifndef ROBOPAINTER_PARAMS_FILE
#error "ROBOPAINTER_PARAMS_FILE must be defined by the build"
#endif
#ifndef ROBOPAINTER_ROOMS_DIR
#error "ROBOPAINTER_ROOMS_DIR must be defined by the build"
#endif

namespace testsupport {

inline const robopainter::RobotParams& params() {
  static const robopainter::RobotParams p =
      robopainter::load_robot_params(ROBOPAINTER_PARAMS_FILE);
  return p;
}

inline std::string params_path() { return ROBOPAINTER_PARAMS_FILE; }

inline std::string room_path(const char* name) {
  return std::string(ROBOPAINTER_ROOMS_DIR) + "/" + name;
}

}  // namespace testsupport
