#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relusynth::cli {

enum ExitCode : int {
    kOk = 0,
    kAssertionFailed = 1,
    kUsage = 2,      // unknown subcommand or malformed arguments
    kBadInput = 3,   // unreadable or invalid input file
    kRuntime = 4,    // construction or experiment failed
};

struct CommandResult {
    int exit_code = kOk;
    std::vector<std::string> artifacts;  // files written
    std::string summary;
};

// args excludes the program name. Summary lines go to out, diagnostics to err.
CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace relusynth::cli
