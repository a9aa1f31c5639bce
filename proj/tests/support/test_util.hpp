#pragma once

#include <string>

#include "npefix/frontend/checker.hpp"
#include "npefix/frontend/parser.hpp"

namespace npefix::testing {

inline CheckedProgramPtr checked(const std::string& text, const std::string& path = "T.mj",
                                 bool allow_reserved = false) {
  return load_program({SourceUnit{path, text}}, CheckOptions{allow_reserved});
}

inline Program parsed(const std::string& text, const std::string& path = "T.mj") {
  return parse_program({SourceUnit{path, text}});
}

}  // namespace npefix::testing
