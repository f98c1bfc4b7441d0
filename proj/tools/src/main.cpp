#include "cli.hpp"

int main(int argc, char** argv) { return unistitch::cli::run(argc, argv); }
