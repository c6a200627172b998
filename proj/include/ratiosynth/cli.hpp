#pragma once

// Command-line entry point. Exit codes: 0 success, 1 usage, 2 parse or
// validation error, 3 task unsatisfiable, 4 solver failure.

#include "ratiosynth/error.hpp"

namespace ratiosynth {

int exit_code(ErrorKind kind);

int run_cli(int argc, char** argv);

}  // namespace ratiosynth
