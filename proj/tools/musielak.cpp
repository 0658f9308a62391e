#include "musielak/cli.hpp"

int main(int argc, char** argv) { return musielak::cli::main(argc, argv); }
