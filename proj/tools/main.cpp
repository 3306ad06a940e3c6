#include "squeezelab_cli/commands.hpp"

int main(int argc, char** argv) { return squeezelab::cli::run_cli(argc, argv); }
