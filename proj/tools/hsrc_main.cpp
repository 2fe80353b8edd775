#include "hsrc/cli.hpp"

int main(int argc, char** argv) { return hsrc::cli::run(argc, argv); }
