#pragma once

namespace rabi {

// Entry point of the `rabi` command. Returns 0 on success, 2 on usage and
// domain errors, 3 on accuracy and truncation errors.
int run_cli(int argc, const char* const* argv);

}  // namespace rabi
