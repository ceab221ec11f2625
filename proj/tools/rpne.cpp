#include "rpne/cli.hpp"

int main(int argc, char** argv) { return rpne::cli::main(argc, argv); }
