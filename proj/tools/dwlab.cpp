#include <dwlab/cli.hpp>

int main(int argc, char** argv) { return dwlab::cli::run(argc, argv); }
