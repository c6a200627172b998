#include "ratiosynth/cli.hpp"

int main(int argc, char** argv) { return ratiosynth::run_cli(argc, argv); }
