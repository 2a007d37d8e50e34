#include "relusynth/cli.hpp"

int main(int argc, char** argv) { return relusynth::cli::main(argc, argv); }
