#pragma once

#include <iosfwd>
#include <string>

namespace depad::selftest {

struct Options {
    bool list_only = false;
    std::string filter;        // run only criteria whose name contains this
    std::string cli_path;      // depad binary for the cross-process determinism check;
                               // empty = compare in-process pipelines instead
    bool inject_failure = false;  // test hook: corrupt one tolerance to prove failures surface
    unsigned threads = 8;
};

// Runs the embedded synthetic acceptance suite, one pass/fail line per
// criterion. Returns 0 when everything passes, 1 otherwise.
int run(const Options& opts, std::ostream& out);

} // namespace depad::selftest
