// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure. The determinism criterion drives the real CLI binary.

#include <iostream>

#include "depad/selftest.hpp"

int main(int argc, char** argv) {
    depad::selftest::Options opts;
    opts.cli_path = DEPAD_CLI_PATH;
    if (argc > 1) opts.filter = argv[1];
    return depad::selftest::run(opts, std::cout);
}
